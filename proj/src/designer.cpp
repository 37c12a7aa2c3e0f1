#include "cpgates/designer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>

#include "cpgates/landscape.hpp"
#include "cpgates/parallel.hpp"

namespace cpg {

ConditionSet::ConditionSet(std::vector<DerivativeOrder> orders) : orders_(std::move(orders)) {
  for (const auto& o : orders_) {
    if (o.eps < 0 || o.delta < 0 || o.total() < 1) {
      throw std::invalid_argument("derivative condition needs m, n >= 0 and m + n >= 1");
    }
  }
  std::sort(orders_.begin(), orders_.end());
  if (std::adjacent_find(orders_.begin(), orders_.end()) != orders_.end()) {
    throw std::invalid_argument("duplicate derivative condition");
  }
}

int ConditionSet::max_total_order() const {
  int k = 0;
  for (const auto& o : orders_) k = std::max(k, o.total());
  return k;
}

DesignProblem::DesignProblem(int n, ConditionSet c)
    : n_pulses(n), conditions(std::move(c)), constrain_center(n == 5) {
  validate();
}

void DesignProblem::validate() const {
  if (n_pulses < 1 || n_pulses % 2 == 0) throw std::invalid_argument("anagram length must be odd");
  if (constrain_center && half_count() != 3) {
    throw std::invalid_argument("center-phase constraint applies to five-pulse anagrams only");
  }
}

std::vector<double> DesignProblem::expand(const Eigen::VectorXd& free) const {
  if (free.size() != free_count()) throw std::invalid_argument("free phase count mismatch");
  std::vector<double> half(free.data(), free.data() + free.size());
  if (constrain_center) half.push_back(2.0 * half[1] - 2.0 * half[0]);
  return half;
}

Eigen::VectorXd design_residual(std::span<const double> half_phases, const DesignProblem& prob) {
  if (static_cast<int>(half_phases.size()) != prob.half_count()) {
    throw std::invalid_argument("phase count does not match the design problem");
  }
  const CompositeSequence seq = anagram_sequence("design", half_phases);
  const int order = prob.conditions.max_total_order();
  const UnitaryJet jet = sequence_jet(seq, order);

  const auto& conds = prob.conditions.orders();
  Eigen::VectorXd r(4 + 8 * static_cast<Eigen::Index>(conds.size()));
  const Complex a = jet.a.value();
  const Complex b = jet.b.value();
  // target -iX: U11 = 0, U12 = -i
  r.setZero();
  r(0) = a.real();
  r(1) = a.imag();
  r(2) = b.real();
  r(3) = b.imag() + 1.0;
  Eigen::Index row = 4;
  for (const auto& c : conds) {
    const GateMatrix d = derivative_matrix(jet, c.eps, c.delta);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        r(row++) = d(i, j).real();
        r(row++) = d(i, j).imag();
      }
    }
  }
  return r;
}

Eigen::MatrixXd numerical_jacobian(const ResidualFn& f, const Eigen::VectorXd& x, double step) {
  Eigen::MatrixXd jac;
  Eigen::VectorXd xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    xp(k) = x(k) + step;
    const Eigen::VectorXd fp = f(xp);
    xp(k) = x(k) - step;
    const Eigen::VectorXd fm = f(xp);
    xp(k) = x(k);
    if (k == 0) jac.resize(fp.size(), x.size());
    jac.col(k) = (fp - fm) / (2.0 * step);
  }
  return jac;
}

LeastSquaresResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x, const LeastSquaresOptions& opts) {
  Eigen::VectorXd r = f(x);
  double cost = r.squaredNorm();
  double lambda = opts.lambda_init;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    if (r.lpNorm<Eigen::Infinity>() < opts.residual_floor) break;
    const Eigen::MatrixXd jac = numerical_jacobian(f, x, opts.fd_step);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal().array() += lambda;
      const Eigen::VectorXd step = lhs.ldlt().solve(-jtr);
      const Eigen::VectorXd trial_x = x + step;
      const Eigen::VectorXd trial_r = f(trial_x);
      const double trial_cost = trial_r.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        x = trial_x;
        r = trial_r;
        cost = trial_cost;
        lambda = std::max(opts.lambda_min, lambda * 0.3);
        accepted = true;
        if (step.lpNorm<Eigen::Infinity>() < 1e-15) it = opts.max_iters;
      } else {
        lambda *= 10.0;
        if (lambda > opts.lambda_max) break;
      }
    }
    if (!accepted) break;
  }
  return {x, r.lpNorm<Eigen::Infinity>(), it};
}

Eigen::VectorXd gauss_newton_step(const ResidualFn& f, const Eigen::VectorXd& x, double fd_step) {
  const Eigen::VectorXd r = f(x);
  const Eigen::MatrixXd jac = numerical_jacobian(f, x, fd_step);
  return x + jac.completeOrthogonalDecomposition().solve(-r);
}

double phase_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double w = wrap_phase(a[i] - b[i]);
    d = std::max(d, std::min(w, kTwoPi - w));
  }
  return d;
}

namespace {

std::vector<double> canonical_wrap(std::span<const double> v, double sign) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double p : v) {
    double w = wrap_phase(sign * p);
    if (kTwoPi - w < 1e-9) w = 0.0;
    out.push_back(w);
  }
  return out;
}

bool tolerant_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::fabs(a[i] - b[i]) > 1e-7) return a[i] < b[i];
  }
  return false;
}

std::vector<double> canonical(std::span<const double> v) {
  auto plus = canonical_wrap(v, 1.0);
  auto minus = canonical_wrap(v, -1.0);
  return tolerant_less(minus, plus) ? minus : plus;
}

}  // namespace

std::vector<std::vector<double>> dedupe_solutions(const std::vector<std::vector<double>>& solutions,
                                                  double merge_distance) {
  std::vector<std::vector<double>> reps;
  for (const auto& s : solutions) {
    auto c = canonical(s);
    const auto mirror = canonical_wrap(c, -1.0);
    const bool seen = std::any_of(reps.begin(), reps.end(), [&](const std::vector<double>& r) {
      return phase_distance(r, c) < merge_distance || phase_distance(r, mirror) < merge_distance;
    });
    if (!seen) reps.push_back(std::move(c));
  }
  std::sort(reps.begin(), reps.end(), tolerant_less);
  return reps;
}

std::vector<DesignSolution> design_symmetric(const DesignProblem& prob, const DesignOptions& opts) {
  prob.validate();
  if (opts.starts < 1) throw std::invalid_argument("design needs at least one start");
  const ResidualFn residual = [&prob](const Eigen::VectorXd& free) {
    return design_residual(prob.expand(free), prob);
  };

  std::vector<std::optional<std::vector<double>>> found(static_cast<std::size_t>(opts.starts));
  parallel_for(found.size(), opts.threads, [&](std::size_t i) {
    std::mt19937_64 rng(splitmix64(opts.seed ^ splitmix64(i)));
    Eigen::VectorXd x0(prob.free_count());
    for (auto& v : x0) v = kTwoPi * uniform01(rng);
    const LeastSquaresResult res = levenberg_marquardt(residual, x0, opts.solver);
    if (res.residual_inf < opts.tol) found[i] = prob.expand(res.x);
  });

  std::vector<std::vector<double>> converged;
  for (auto& f : found) {
    if (f) converged.push_back(std::move(*f));
  }
  const auto reps = dedupe_solutions(converged);

  std::vector<DesignSolution> out;
  const ErrorBox box = ErrorBox::square(opts.rank_half_width);
  const GridSize grid{opts.rank_resolution, opts.rank_resolution};
  for (const auto& half : reps) {
    DesignSolution s;
    s.half_phases = half;
    s.residual_inf = design_residual(half, prob).lpNorm<Eigen::Infinity>();
    const auto lg = eval_grid(anagram_sequence("candidate", half), GateKind::X, box, grid, opts.threads);
    s.robust_fraction = robust_fraction(lg, opts.rank_level);
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const DesignSolution& a, const DesignSolution& b) {
    return a.robust_fraction > b.robust_fraction;
  });
  return out;
}

LeastSquaresResult refine_solution(std::span<const double> half_phases, const DesignProblem& prob,
                                   const LeastSquaresOptions& opts) {
  DesignProblem free_prob = prob;
  free_prob.constrain_center = false;
  const ResidualFn residual = [&free_prob](const Eigen::VectorXd& x) {
    return design_residual(std::vector<double>(x.data(), x.data() + x.size()), free_prob);
  };
  Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(half_phases.data(), static_cast<Eigen::Index>(half_phases.size()));
  return levenberg_marquardt(residual, x0, opts);
}

FivePulseBracketCheck five_pulse_bracket_check(double phi1, double phi2) {
  FivePulseBracketCheck c;
  c.phi1 = phi1;
  c.phi2 = phi2;
  const double c1 = std::cos(phi1);
  const double c2 = std::cos(2.0 * phi1 - phi2);
  c.published_d10_bracket = 1.0 - 2.0 * c1 + 2.0 * c2;
  c.published_d01_bracket = 1.0 + 2.0 * c1 - 2.0 * c2;
  c.consistent_d10_bracket = 1.0 + 2.0 * c1 + 2.0 * c2;
  const double half[3] = {phi1, phi2, 2.0 * phi2 - 2.0 * phi1};
  const UnitaryJet jet = sequence_jet(anagram_sequence("five", half), 1);
  c.jet_d10_u11 = jet.a.derivative(1, 0);
  c.jet_d01_u11 = jet.a.derivative(0, 1);
  return c;
}

}  // namespace cpg
