#include "cpgates/su2.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpg {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("non-finite ") + what);
  }
}

bool phases_match(double p, double q) {
  double d = std::fabs(wrap_phase(p - q));
  return std::min(d, kTwoPi - d) < 1e-12;
}

// cos(h) and S = sin(h)/r for h = r*tau/2.
struct HalfAngle {
  double cos_h;
  double s;
};

HalfAngle half_angle(double r, double tau) {
  const double h = 0.5 * r * tau;
  if (r * tau < 1e-6) {
    const double h2 = h * h;
    return {std::cos(h), 0.5 * tau * (1.0 - h2 / 6.0 * (1.0 - h2 / 20.0 * (1.0 - h2 / 42.0)))};
  }
  return {std::cos(h), std::sin(h) / r};
}

// S(u) = sin(tau*sqrt(u)/2)/sqrt(u) and dS/du.
struct SincTerms {
  double cos_h;
  double s;
  double ds;
};

SincTerms sinc_terms(double u, double tau) {
  const double half_tau = 0.5 * tau;
  const double h = half_tau * std::sqrt(u);
  if (h < 0.5) {
    // Power series in u; 12 terms leave an error far below 1e-16 for h < 0.5.
    double s = 0.0;
    double ds = 0.0;
    double term = half_tau;  // (-1)^k (tau/2)^{2k+1} / (2k+1)!
    double upow = 1.0;
    for (int k = 0; k < 12; ++k) {
      s += term * upow;
      if (k + 1 < 12) {
        const double next = -term * half_tau * half_tau / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        ds += (k + 1) * next * upow;
        term = next;
      }
      upow *= u;
    }
    return {std::cos(h), s, ds};
  }
  const double r = std::sqrt(u);
  const double s = std::sin(h) / r;
  const double c = std::cos(h);
  return {c, s, (0.25 * tau * c - 0.5 * s) / u};
}

}  // namespace

double wrap_phase(double phase) {
  double w = std::fmod(phase, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

Pulse::Pulse(double omega, double tau, double phase) {
  require_finite(omega, "pulse amplitude");
  require_finite(tau, "pulse duration");
  require_finite(phase, "pulse phase");
  if (omega < 0.0) throw std::invalid_argument("pulse amplitude must be >= 0");
  if (tau <= 0.0) throw std::invalid_argument("pulse duration must be > 0");
  omega_ = omega;
  tau_ = tau;
  phase_ = wrap_phase(phase);
}

GateMatrix to_matrix(const Unitary& u) {
  GateMatrix m;
  m << u.a, u.b, -std::conj(u.b), std::conj(u.a);
  return m;
}

GateKind parse_gate_kind(std::string_view tag) {
  std::string t(tag);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "x") return GateKind::X;
  if (t == "rx90" || t == "rx(pi/2)") return GateKind::RX90;
  if (t == "h") return GateKind::H;
  if (t == "i" || t == "id") return GateKind::I;
  throw std::invalid_argument("unknown gate tag '" + std::string(tag) + "' (expected x, rx90, h or i)");
}

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "x";
    case GateKind::RX90: return "rx90";
    case GateKind::H: return "h";
    case GateKind::I: return "i";
  }
  return "?";
}

CompositeSequence::CompositeSequence(std::string name, std::vector<Pulse> pulses, GateKind target,
                                     bool symmetric)
    : name_(std::move(name)), pulses_(std::move(pulses)), target_(target), symmetric_(symmetric) {
  if (pulses_.empty()) throw std::invalid_argument("sequence '" + name_ + "' has no pulses");
  if (target_ != GateKind::X && target_ != GateKind::RX90) {
    throw std::invalid_argument("sequence target must be x or rx90");
  }
  if (symmetric_) {
    const std::size_t n = pulses_.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
      const Pulse& p = pulses_[i];
      const Pulse& q = pulses_[n - 1 - i];
      if (p.omega() != q.omega() || p.tau() != q.tau() || !phases_match(p.phase(), q.phase())) {
        throw std::invalid_argument("sequence '" + name_ + "' is flagged symmetric but is not a palindrome");
      }
    }
  }
}

std::vector<double> CompositeSequence::phases() const {
  std::vector<double> out;
  out.reserve(pulses_.size());
  for (const auto& p : pulses_) out.push_back(p.phase());
  return out;
}

double CompositeSequence::total_area() const {
  double a = 0.0;
  for (const auto& p : pulses_) a += p.area();
  return a;
}

CompositeSequence anagram_sequence(std::string name, std::span<const double> half_phases, GateKind target) {
  if (half_phases.empty()) throw std::invalid_argument("anagram needs at least one phase");
  std::vector<Pulse> pulses;
  const std::size_t k = half_phases.size();
  pulses.reserve(2 * k - 1);
  for (std::size_t i = 0; i < k; ++i) pulses.emplace_back(1.0, 1.0, half_phases[i]);
  for (std::size_t i = k - 1; i-- > 0;) pulses.emplace_back(1.0, 1.0, half_phases[i]);
  return CompositeSequence(std::move(name), std::move(pulses), target, true);
}

Unitary pulse_propagator(const Pulse& pulse, const ErrorPoint& err) {
  require_finite(err.epsilon, "epsilon");
  require_finite(err.delta, "delta");
  const double x = pulse.omega() * kPi * (1.0 + err.epsilon);
  const double y = err.delta * kPi;
  const double r = std::hypot(x, y);
  const HalfAngle ha = half_angle(r, pulse.tau());
  const Complex a{ha.cos_h, y * ha.s};
  const Complex b0{0.0, -x * ha.s};
  return {a, b0 * std::polar(1.0, pulse.phase())};
}

PropagatorSensitivity pulse_propagator_sensitivity(const Pulse& pulse, const ErrorPoint& err) {
  require_finite(err.epsilon, "epsilon");
  require_finite(err.delta, "delta");
  const double dx_domega = kPi * (1.0 + err.epsilon);
  const double x = pulse.omega() * dx_domega;
  const double y = err.delta * kPi;
  const double tau = pulse.tau();
  const SincTerms st = sinc_terms(x * x + y * y, tau);
  const Complex phase = std::polar(1.0, pulse.phase());

  const Complex a{st.cos_h, y * st.s};
  const Complex b0{0.0, -x * st.s};
  // a = cos h + i y S(u), b0 = -i x S(u), u = x^2 + y^2, d cos h / du = -tau S / 4.
  const Complex da_dx = 2.0 * x * Complex{-0.25 * tau * st.s, y * st.ds};
  const Complex db0_dx{0.0, -(st.s + 2.0 * x * x * st.ds)};
  return {{a, b0 * phase}, {da_dx * dx_domega, db0_dx * dx_domega * phase}};
}

Unitary compose(std::span<const Pulse> pulses, const ErrorPoint& err) {
  Unitary total{1.0, 0.0};
  for (const auto& p : pulses) total = pulse_propagator(p, err) * total;
  return total;
}

Unitary compose(const CompositeSequence& seq, const ErrorPoint& err) {
  return compose(std::span<const Pulse>(seq.pulses()), err);
}

double gate_fidelity(const GateMatrix& u, const GateMatrix& target) {
  const double t = std::abs((u.adjoint() * target).trace());
  return (t * t + 2.0) / 6.0;
}

GateMatrix target_gate(GateKind kind) {
  const double h = 1.0 / std::sqrt(2.0);
  GateMatrix g;
  switch (kind) {
    case GateKind::X:
      g << 0.0, -kI, -kI, 0.0;
      break;
    case GateKind::RX90:
      g << h, -kI * h, -kI * h, h;
      break;
    case GateKind::H:
      g << h, h, h, -h;
      break;
    case GateKind::I:
      g.setIdentity();
      break;
  }
  return g;
}

GateMatrix rz(double theta) {
  GateMatrix g = GateMatrix::Zero();
  g(0, 0) = std::polar(1.0, -0.5 * theta);
  g(1, 1) = std::polar(1.0, 0.5 * theta);
  return g;
}

GateMatrix hadamard_wrap(const GateMatrix& u) {
  const GateMatrix z = rz(0.5 * kPi);
  return kI * (z * u * z);
}

double sequence_infidelity(const CompositeSequence& seq, GateKind target, const ErrorPoint& err) {
  GateMatrix u = to_matrix(compose(seq, err));
  if (target == GateKind::H) u = hadamard_wrap(u);
  return gate_infidelity(u, target_gate(target));
}

CompositeSequence shift_all_phases(const CompositeSequence& seq, double chi) {
  std::vector<Pulse> pulses;
  pulses.reserve(seq.size());
  for (const auto& p : seq.pulses()) pulses.push_back(p.with_phase(p.phase() + chi));
  return CompositeSequence(seq.name(), std::move(pulses), seq.target(), seq.symmetric());
}

CompositeSequence negate_phases(const CompositeSequence& seq) {
  std::vector<Pulse> pulses;
  pulses.reserve(seq.size());
  for (const auto& p : seq.pulses()) pulses.push_back(p.with_phase(-p.phase()));
  return CompositeSequence(seq.name(), std::move(pulses), seq.target(), seq.symmetric());
}

CompositeSequence scale_durations(const CompositeSequence& seq, double eta) {
  std::vector<Pulse> pulses;
  pulses.reserve(seq.size());
  for (const auto& p : seq.pulses()) pulses.emplace_back(p.omega(), p.tau() * (1.0 + eta), p.phase());
  return CompositeSequence(seq.name(), std::move(pulses), seq.target(), seq.symmetric());
}

ErrorPoint duration_error_map(const ErrorPoint& err, double eta) {
  return {(1.0 + err.epsilon) * (1.0 + eta) - 1.0, err.delta * (1.0 + eta)};
}

std::vector<double> axis_samples(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("axis needs at least one sample");
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw std::invalid_argument("invalid axis range");
  }
  if (n > 1 && !(lo < hi)) throw std::invalid_argument("empty axis range with more than one sample");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
  out.back() = hi;
  return out;
}

double average_infidelity(const CompositeSequence& seq, GateKind target, const ErrorBox& box,
                          const GridSize& grid) {
  const auto eps = axis_samples(box.eps_lo, box.eps_hi, grid.n_eps);
  const auto del = axis_samples(box.delta_lo, box.delta_hi, grid.n_delta);
  double sum = 0.0;
  for (double e : eps) {
    for (double d : del) sum += sequence_infidelity(seq, target, {e, d});
  }
  return sum / static_cast<double>(eps.size() * del.size());
}

double average_infidelity(const CompositeSequence& seq, const GateMatrix& target, const ErrorBox& box,
                          const GridSize& grid) {
  const auto eps = axis_samples(box.eps_lo, box.eps_hi, grid.n_eps);
  const auto del = axis_samples(box.delta_lo, box.delta_hi, grid.n_delta);
  double sum = 0.0;
  for (double e : eps) {
    for (double d : del) sum += gate_infidelity(to_matrix(compose(seq, {e, d})), target);
  }
  return sum / static_cast<double>(eps.size() * del.size());
}

}  // namespace cpg
