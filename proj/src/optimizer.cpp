#include "cpgates/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cpgates/parallel.hpp"

namespace cpg {

OptimizerSpec OptimizerSpec::defaults(int n_pulses, GateKind target) {
  OptimizerSpec s;
  s.n_pulses = n_pulses;
  s.target = target;
  s.tau = target == GateKind::X ? 1.0 : 0.5;
  s.amplitude_lo = 0.0;
  s.amplitude_hi = 2.0 / s.tau;
  s.fixed_omega = 1.0 / s.tau;
  return s;
}

void OptimizerSpec::validate() const {
  if (n_pulses < 1) throw std::invalid_argument("n_pulses must be positive");
  if (target == GateKind::I) throw std::invalid_argument("optimizer target must be x, rx90 or h");
  if (!(amplitude_lo >= 0.0) || !(amplitude_hi >= amplitude_lo)) {
    throw std::invalid_argument("amplitude bounds must satisfy 0 <= lo <= hi");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(fixed_omega >= 0.0)) throw std::invalid_argument("fixed amplitude must be non-negative");
  if (grid.n_eps < 1 || grid.n_delta < 1) throw std::invalid_argument("grid dimensions must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(clip_norm > 0.0)) throw std::invalid_argument("clip norm must be positive");
  if (!(area_penalty >= 0.0)) throw std::invalid_argument("area penalty must be non-negative");
  if (starts < 1) throw std::invalid_argument("starts must be >= 1");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  axis_samples(box.eps_lo, box.eps_hi, grid.n_eps);
  axis_samples(box.delta_lo, box.delta_hi, grid.n_delta);
}

namespace {

int slot_of(int i, const OptimizerSpec& spec) {
  return spec.symmetric ? std::min(i, spec.n_pulses - 1 - i) : i;
}

void check_length(const Eigen::VectorXd& params, const OptimizerSpec& spec) {
  if (params.size() != spec.param_count()) {
    throw std::invalid_argument("parameter vector has length " + std::to_string(params.size()) + ", expected " +
                                std::to_string(spec.param_count()));
  }
}

double omega_of(const Eigen::VectorXd& params, const OptimizerSpec& spec, int slot) {
  return spec.vary_amplitudes ? params(spec.free_slots() + slot) : spec.fixed_omega;
}

// H is scored as RX90: the virtual-Z wrap preserves fidelity exactly.
GateKind scoring_target(GateKind g) { return g == GateKind::H ? GateKind::RX90 : g; }

// Tr(G^dagger M) for M = [[a, b], [-b*, a*]].
struct TraceForm {
  Complex g11, g12, g21, g22;
  explicit TraceForm(const GateMatrix& g)
      : g11(std::conj(g(0, 0))), g12(std::conj(g(0, 1))), g21(std::conj(g(1, 0))), g22(std::conj(g(1, 1))) {}
  Complex operator()(const Unitary& m) const {
    return g11 * m.a + g12 * m.b - g21 * std::conj(m.b) + g22 * std::conj(m.a);
  }
};

}  // namespace

CompositeSequence params_to_sequence(const Eigen::VectorXd& params, const OptimizerSpec& spec, std::string name) {
  check_length(params, spec);
  std::vector<Pulse> pulses;
  pulses.reserve(static_cast<std::size_t>(spec.n_pulses));
  for (int i = 0; i < spec.n_pulses; ++i) {
    const int s = slot_of(i, spec);
    pulses.emplace_back(omega_of(params, spec, s), spec.tau, params(s));
  }
  // Only the target tags X and RX90 exist on a sequence; H runs use RX90.
  return CompositeSequence(std::move(name), std::move(pulses), scoring_target(spec.target), spec.symmetric);
}

double objective(const Eigen::VectorXd& params, const OptimizerSpec& spec) {
  const CompositeSequence seq = params_to_sequence(params, spec);
  double value = average_infidelity(seq, scoring_target(spec.target), spec.box, spec.grid);
  if (spec.area_penalty > 0.0) value += spec.area_penalty * seq.total_area();
  return value;
}

double objective_and_gradient(const Eigen::VectorXd& params, const OptimizerSpec& spec, Eigen::VectorXd& grad) {
  check_length(params, spec);
  const int n = spec.n_pulses;
  const int slots = spec.free_slots();
  const TraceForm trace(target_gate(scoring_target(spec.target)));
  const auto eps = axis_samples(spec.box.eps_lo, spec.box.eps_hi, spec.grid.n_eps);
  const auto del = axis_samples(spec.box.delta_lo, spec.box.delta_hi, spec.grid.n_delta);

  std::vector<Pulse> pulses;
  pulses.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int s = slot_of(i, spec);
    pulses.emplace_back(omega_of(params, spec, s), spec.tau, params(s));
  }

  grad = Eigen::VectorXd::Zero(spec.param_count());
  std::vector<Unitary> value(n), d_omega(n), suffix(n + 1);
  double sum = 0.0;
  for (double e : eps) {
    for (double d : del) {
      const ErrorPoint err{e, d};
      for (int k = 0; k < n; ++k) {
        const auto ps = pulse_propagator_sensitivity(pulses[k], err);
        value[k] = ps.value;
        d_omega[k] = ps.d_omega;
      }
      // suffix[k] = U_{n-1} ... U_k, suffix[n] = identity.
      suffix[n] = {1.0, 0.0};
      for (int k = n - 1; k >= 0; --k) suffix[k] = suffix[k + 1] * value[k];
      const Complex t = trace(suffix[0]);
      sum += 1.0 - (std::norm(t) + 2.0) / 6.0;

      Unitary prefix{1.0, 0.0};  // U_{k-1} ... U_0
      for (int k = 0; k < n; ++k) {
        const int s = slot_of(k, spec);
        // dU/dphi keeps the Cayley-Klein layout with da = 0, db = i b.
        const Unitary d_phi{0.0, Complex{0.0, 1.0} * value[k].b};
        const Complex dt_phi = trace(suffix[k + 1] * d_phi * prefix);
        grad(s) += -std::real(std::conj(t) * dt_phi) / 3.0;
        if (spec.vary_amplitudes) {
          const Complex dt_omega = trace(suffix[k + 1] * d_omega[k] * prefix);
          grad(slots + s) += -std::real(std::conj(t) * dt_omega) / 3.0;
        }
        prefix = value[k] * prefix;
      }
    }
  }
  const double count = static_cast<double>(eps.size() * del.size());
  grad /= count;
  double result = sum / count;
  if (spec.area_penalty > 0.0) {
    double area = 0.0;
    for (const auto& p : pulses) area += p.area();
    result += spec.area_penalty * area;
    if (spec.vary_amplitudes) {
      for (int k = 0; k < n; ++k) grad(slots + slot_of(k, spec)) += spec.area_penalty * spec.tau;
    }
  }
  return result;
}

Eigen::VectorXd objective_gradient(const Eigen::VectorXd& params, const OptimizerSpec& spec, GradientMode mode) {
  if (mode == GradientMode::Analytic) {
    Eigen::VectorXd g;
    objective_and_gradient(params, spec, g);
    return g;
  }
  check_length(params, spec);
  constexpr double step = 1e-6;
  Eigen::VectorXd g(params.size());
  Eigen::VectorXd p = params;
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    p(k) = params(k) + step;
    const double fp = objective(p, spec);
    p(k) = params(k) - step;
    const double fm = objective(p, spec);
    p(k) = params(k);
    g(k) = (fp - fm) / (2.0 * step);
  }
  return g;
}

Eigen::VectorXd project(Eigen::VectorXd params, const OptimizerSpec& spec) {
  check_length(params, spec);
  const int slots = spec.free_slots();
  for (int s = 0; s < slots; ++s) params(s) = wrap_phase(params(s));
  if (spec.vary_amplitudes) {
    for (int s = 0; s < slots; ++s) {
      params(slots + s) = std::clamp(params(slots + s), spec.amplitude_lo, spec.amplitude_hi);
    }
  }
  return params;
}

namespace {

struct StartRun {
  Eigen::VectorXd params;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> trace;
};

StartRun run_start(const OptimizerSpec& spec, std::size_t index) {
  std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(index)));
  const int slots = spec.free_slots();
  Eigen::VectorXd x(spec.param_count());
  for (int s = 0; s < slots; ++s) x(s) = kTwoPi * uniform01(rng);
  if (spec.vary_amplitudes) {
    for (int s = 0; s < slots; ++s) {
      x(slots + s) = spec.amplitude_lo + (spec.amplitude_hi - spec.amplitude_lo) * uniform01(rng);
    }
  }
  x = project(std::move(x), spec);

  StartRun run;
  Eigen::VectorXd grad;
  double f = objective_and_gradient(x, spec, grad);
  run.params = x;
  run.objective = f;
  run.trace.push_back(f);

  Eigen::VectorXd m = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
  double b1t = 1.0;
  double b2t = 1.0;
  for (int it = 1; it <= spec.max_iters; ++it) {
    const double norm = grad.norm();
    if (norm > spec.clip_norm) grad *= spec.clip_norm / norm;
    m = spec.beta1 * m + (1.0 - spec.beta1) * grad;
    v = spec.beta2 * v + (1.0 - spec.beta2) * grad.cwiseAbs2();
    b1t *= spec.beta1;
    b2t *= spec.beta2;
    const Eigen::ArrayXd m_hat = m.array() / (1.0 - b1t);
    const Eigen::ArrayXd v_hat = v.array() / (1.0 - b2t);
    x = project(x - (spec.learning_rate * m_hat / (v_hat.sqrt() + spec.adam_epsilon)).matrix(), spec);

    f = objective_and_gradient(x, spec, grad);
    if (f < run.objective) {
      run.objective = f;
      run.params = x;
    }
    run.trace.push_back(run.objective);
    run.iterations = it;
    if (it >= spec.patience) {
      const double before = run.trace[static_cast<std::size_t>(it - spec.patience)];
      if (before - run.objective < spec.min_improvement) break;
    }
  }
  // Report the exact objective of the returned point.
  run.objective = objective(run.params, spec);
  return run;
}

}  // namespace

OptResult optimize(const OptimizerSpec& spec) {
  spec.validate();
  std::vector<StartRun> runs(static_cast<std::size_t>(spec.starts));
  parallel_for(runs.size(), spec.threads, [&](std::size_t i) { runs[i] = run_start(spec, i); });

  OptResult res;
  res.learning_rate = spec.learning_rate;
  res.beta1 = spec.beta1;
  res.beta2 = spec.beta2;
  res.adam_epsilon = spec.adam_epsilon;
  res.clip_norm = spec.clip_norm;
  std::size_t best = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    res.starts.push_back({static_cast<int>(i), runs[i].objective, runs[i].iterations});
    if (runs[i].objective < runs[best].objective) best = i;
  }
  res.best_start = static_cast<int>(best);
  res.params = runs[best].params;
  res.objective = runs[best].objective;
  res.trace = std::move(runs[best].trace);
  return res;
}

}  // namespace cpg
