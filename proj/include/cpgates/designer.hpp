#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cpgates/jet.hpp"
#include "cpgates/su2.hpp"

namespace cpg {

/// Distinct derivative orders, each of total degree >= 1, kept sorted.
class ConditionSet {
 public:
  ConditionSet() = default;
  explicit ConditionSet(std::vector<DerivativeOrder> orders);

  const std::vector<DerivativeOrder>& orders() const { return orders_; }
  int max_total_order() const;
  bool empty() const { return orders_.empty(); }

 private:
  std::vector<DerivativeOrder> orders_;
};

/// Symmetric (anagram) pi-pulse design problem with 2k-1 pulses.
///
/// Unknowns are the k half-phases. With constrain_center set (k = 3 only)
/// the center phase follows phi3 = 2 phi2 - 2 phi1, which fixes U12 = -i.
struct DesignProblem {
  int n_pulses = 5;
  ConditionSet conditions;
  bool constrain_center = false;

  DesignProblem() = default;
  DesignProblem(int n_pulses, ConditionSet conditions);

  int half_count() const { return (n_pulses + 1) / 2; }
  int free_count() const { return half_count() - (constrain_center ? 1 : 0); }
  /// Maps free unknowns to the full half-phase vector.
  std::vector<double> expand(const Eigen::VectorXd& free) const;
  void validate() const;
};

/// Stacked real/imag parts of the first row of U(0,0) + iX, followed by every
/// entry of D_{m,n}U for each condition. Zero iff the phases solve the problem.
Eigen::VectorXd design_residual(std::span<const double> half_phases, const DesignProblem& prob);

// ---- damped least squares -------------------------------------------------

struct LeastSquaresOptions {
  int max_iters = 500;
  double lambda_init = 1e-3;
  double lambda_min = 1e-8;
  double lambda_max = 1e4;
  double fd_step = 1e-6;
  /// Stop once the infinity norm of the residual falls below this.
  double residual_floor = 1e-14;
};

struct LeastSquaresResult {
  Eigen::VectorXd x;
  double residual_inf = 0.0;
  int iterations = 0;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central-difference Jacobian of a residual function.
Eigen::MatrixXd numerical_jacobian(const ResidualFn& f, const Eigen::VectorXd& x, double step);

/// Levenberg-style damped Gauss-Newton with adaptive damping.
LeastSquaresResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x0,
                                       const LeastSquaresOptions& opts = {});

/// One undamped-as-possible Gauss-Newton step from x (used to confirm that
/// converged solutions are stationary).
Eigen::VectorXd gauss_newton_step(const ResidualFn& f, const Eigen::VectorXd& x, double fd_step = 1e-6);

// ---- symmetric design -----------------------------------------------------

struct DesignOptions {
  int starts = 256;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  int threads = 0;  // 0: hardware concurrency
  LeastSquaresOptions solver;
  /// Robustness ranking: fraction below `rank_level` on a square grid.
  double rank_level = 1e-4;
  double rank_half_width = 0.3;
  int rank_resolution = 101;
};

struct DesignSolution {
  std::vector<double> half_phases;  // canonical, radians in [0, 2pi)
  double residual_inf = 0.0;
  double robust_fraction = 0.0;
};

/// Multi-start damped least squares from uniform random phases. Returns the
/// distinct converged solutions ranked by robust fraction (best first).
std::vector<DesignSolution> design_symmetric(const DesignProblem& prob, const DesignOptions& opts = {});

/// Polishes a starting half-phase vector (e.g. printed decimals) to the
/// nearest exact root. The center constraint of the problem is ignored.
LeastSquaresResult refine_solution(std::span<const double> half_phases, const DesignProblem& prob,
                                   const LeastSquaresOptions& opts = {});

/// Canonical representatives: wrap to [0, 2pi), identify phi with -phi,
/// merge vectors closer than 1e-5 (circular max-norm). phi and phi + pi on the
/// center are kept distinct.
std::vector<std::vector<double>> dedupe_solutions(const std::vector<std::vector<double>>& solutions,
                                                  double merge_distance = 1e-5);

/// Circular max-norm distance between two phase vectors.
double phase_distance(std::span<const double> a, std::span<const double> b);

// ---- closed-form five-pulse derivative formulas ----------------------------

/// First-order derivatives of U11 for the anagram p1 p2 p3 p2 p1 with
/// p3 = 2 p2 - 2 p1, as closed-form expressions and from the jet engine.
struct FivePulseBracketCheck {
  double phi1 = 0.0;
  double phi2 = 0.0;
  // Brackets as published: D10 U11 = -(pi/2)[1 - 2cos p1 + 2cos(2p1 - p2)],
  // D01 U11 = i[1 + 2cos p1 - 2cos(2p1 - p2)]. They always sum to 2.
  double published_d10_bracket = 0.0;
  double published_d01_bracket = 0.0;
  // Sign variant consistent with the jet engine: 1 + 2cos p1 + 2cos(2p1 - p2).
  double consistent_d10_bracket = 0.0;
  Complex jet_d10_u11;
  Complex jet_d01_u11;
};
FivePulseBracketCheck five_pulse_bracket_check(double phi1, double phi2);

}  // namespace cpg
