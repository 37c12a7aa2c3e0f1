#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cpg {

using Complex = std::complex<double>;
using GateMatrix = Eigen::Matrix2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle to [0, 2*pi).
double wrap_phase(double phase);

/// One phased rectangular drive segment.
///
/// omega is the Rabi amplitude in units of Omega_ref = pi / T_ref, tau the
/// duration in units of T_ref, so the nominal area is omega * tau * pi.
/// A resonant pi pulse is Pulse(1, 1, phase).
class Pulse {
 public:
  Pulse(double omega, double tau, double phase);

  double omega() const { return omega_; }
  double tau() const { return tau_; }
  double phase() const { return phase_; }
  /// Area in units of pi.
  double area() const { return omega_ * tau_; }

  Pulse with_phase(double phase) const { return Pulse(omega_, tau_, phase); }

  friend bool operator==(const Pulse&, const Pulse&) = default;

 private:
  double omega_;
  double tau_;
  double phase_;
};

/// Systematic errors: fractional Rabi error and detuning in units of Omega_ref.
struct ErrorPoint {
  double epsilon = 0.0;
  double delta = 0.0;
};

/// SU(2) element in Cayley-Klein form [[a, b], [-b*, a*]].
///
/// Templated on the scalar so that complex jets travel through the same
/// composition code as plain complex numbers.
template <typename Scalar>
struct CayleyKlein {
  Scalar a;
  Scalar b;
};

using Unitary = CayleyKlein<Complex>;

/// Product lhs * rhs (rhs acts first).
template <typename Scalar>
CayleyKlein<Scalar> operator*(const CayleyKlein<Scalar>& lhs, const CayleyKlein<Scalar>& rhs) {
  using std::conj;
  return {lhs.a * rhs.a - lhs.b * conj(rhs.b), lhs.a * rhs.b + lhs.b * conj(rhs.a)};
}

GateMatrix to_matrix(const Unitary& u);

enum class GateKind { X, RX90, H, I };

GateKind parse_gate_kind(std::string_view tag);
std::string to_string(GateKind kind);

/// Ordered pulse train; pulse 0 is applied first.
class CompositeSequence {
 public:
  CompositeSequence(std::string name, std::vector<Pulse> pulses, GateKind target = GateKind::X,
                    bool symmetric = false);

  const std::string& name() const { return name_; }
  const std::vector<Pulse>& pulses() const { return pulses_; }
  GateKind target() const { return target_; }
  bool symmetric() const { return symmetric_; }
  std::size_t size() const { return pulses_.size(); }

  std::vector<double> phases() const;
  /// Sum of omega * tau, in units of pi.
  double total_area() const;

  friend bool operator==(const CompositeSequence&, const CompositeSequence&) = default;

 private:
  std::string name_;
  std::vector<Pulse> pulses_;
  GateKind target_;
  bool symmetric_;
};

/// Builds the palindrome p1 p2 ... pk ... p2 p1 of identical pi pulses.
CompositeSequence anagram_sequence(std::string name, std::span<const double> half_phases,
                                   GateKind target = GateKind::X);

/// Exact propagator of a constant-Hamiltonian rectangular pulse.
Unitary pulse_propagator(const Pulse& pulse, const ErrorPoint& err);

/// Propagator together with its derivative with respect to omega.
///
/// The derivative is returned in the same [[da, db], [-db*, da*]] layout,
/// which holds because omega is real.
struct PropagatorSensitivity {
  Unitary value;
  Unitary d_omega;
};
PropagatorSensitivity pulse_propagator_sensitivity(const Pulse& pulse, const ErrorPoint& err);

Unitary compose(std::span<const Pulse> pulses, const ErrorPoint& err);
Unitary compose(const CompositeSequence& seq, const ErrorPoint& err);

/// Average gate fidelity (|Tr(U^dagger G)|^2 + 2) / 6 for a qubit.
double gate_fidelity(const GateMatrix& u, const GateMatrix& target);
inline double gate_infidelity(const GateMatrix& u, const GateMatrix& target) {
  return 1.0 - gate_fidelity(u, target);
}

GateMatrix target_gate(GateKind kind);

GateMatrix rz(double theta);

/// e^{i pi/2} Rz(pi/2) U Rz(pi/2): turns an Rx(pi/2) implementation into H.
GateMatrix hadamard_wrap(const GateMatrix& u);

/// Infidelity of the sequence against a gate kind; H is scored through
/// hadamard_wrap on the physical propagator.
double sequence_infidelity(const CompositeSequence& seq, GateKind target, const ErrorPoint& err);

CompositeSequence shift_all_phases(const CompositeSequence& seq, double chi);

/// Negates every phase (mirror partner of the sequence).
CompositeSequence negate_phases(const CompositeSequence& seq);

/// Scales every duration by (1 + eta).
CompositeSequence scale_durations(const CompositeSequence& seq, double eta);

/// Error point equivalent to a fractional duration error eta.
ErrorPoint duration_error_map(const ErrorPoint& err, double eta);

struct ErrorBox {
  double eps_lo = -0.15;
  double eps_hi = 0.15;
  double delta_lo = -0.15;
  double delta_hi = 0.15;

  static ErrorBox square(double half_width) {
    return {-half_width, half_width, -half_width, half_width};
  }
};

struct GridSize {
  int n_eps = 8;
  int n_delta = 8;
};

/// Uniform samples including both endpoints; a single sample sits at the midpoint.
std::vector<double> axis_samples(double lo, double hi, int n);

/// Mean of 1 - F over an endpoint-inclusive grid.
double average_infidelity(const CompositeSequence& seq, GateKind target, const ErrorBox& box,
                          const GridSize& grid);
double average_infidelity(const CompositeSequence& seq, const GateMatrix& target, const ErrorBox& box,
                          const GridSize& grid);

}  // namespace cpg
