#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpgates/su2.hpp"

namespace cpg {

/// Direct minimization of the grid-averaged infidelity.
///
/// Parameter layout: the free phases, followed by the free amplitudes when
/// vary_amplitudes is set. With symmetric set there are ceil(N/2) free slots
/// and pulse i uses slot min(i, N-1-i).
struct OptimizerSpec {
  int n_pulses = 5;
  GateKind target = GateKind::X;
  bool symmetric = false;
  bool vary_amplitudes = true;
  /// Amplitude bounds in Omega_ref units.
  double amplitude_lo = 0.0;
  double amplitude_hi = 2.0;
  double tau = 1.0;
  /// Amplitude used for every pulse when vary_amplitudes is off.
  double fixed_omega = 1.0;
  ErrorBox box;
  GridSize grid;
  double learning_rate = 1e-3;
  double clip_norm = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int starts = 64;
  int max_iters = 20000;
  /// Stop a start once its best objective improved by less than
  /// min_improvement over the last `patience` iterations.
  int patience = 200;
  double min_improvement = 1e-12;
  std::uint64_t seed = 0;
  double area_penalty = 0.0;
  int threads = 0;

  /// Defaults for a target: tau = 1 for X, 1/2 for RX90 and H; amplitudes
  /// bounded by [0, 2/tau] so each pulse can rotate by up to 2 pi; fixed
  /// amplitude 1/tau (a pi pulse).
  static OptimizerSpec defaults(int n_pulses, GateKind target);

  int free_slots() const { return symmetric ? (n_pulses + 1) / 2 : n_pulses; }
  int param_count() const { return free_slots() * (vary_amplitudes ? 2 : 1); }
  void validate() const;
};

/// Builds the pulse train described by a parameter vector.
CompositeSequence params_to_sequence(const Eigen::VectorXd& params, const OptimizerSpec& spec,
                                     std::string name = "optimized");

/// Average infidelity over spec.box / spec.grid plus area_penalty * sum(omega tau).
/// H targets are scored as RX90, which the virtual-Z wrap maps to H exactly.
double objective(const Eigen::VectorXd& params, const OptimizerSpec& spec);

enum class GradientMode { Analytic, FiniteDifference };

/// Gradient of the objective. Analytic mode runs reverse accumulation over
/// the pulse chain; FiniteDifference uses central differences (step 1e-6).
Eigen::VectorXd objective_gradient(const Eigen::VectorXd& params, const OptimizerSpec& spec,
                                   GradientMode mode = GradientMode::Analytic);

/// Objective and analytic gradient in one pass.
double objective_and_gradient(const Eigen::VectorXd& params, const OptimizerSpec& spec, Eigen::VectorXd& grad);

/// Wraps phases to [0, 2pi) and clamps amplitudes to the bounds.
Eigen::VectorXd project(Eigen::VectorXd params, const OptimizerSpec& spec);

struct StartSummary {
  int index = 0;
  double objective = 0.0;
  int iterations = 0;
};

struct OptResult {
  Eigen::VectorXd params;
  double objective = 0.0;
  int best_start = 0;
  std::vector<StartSummary> starts;
  /// Best-so-far objective of the winning start, one entry per iteration
  /// (entry 0 is the initial point).
  std::vector<double> trace;
  // Adam settings actually used.
  double learning_rate = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double adam_epsilon = 0.0;
  double clip_norm = 0.0;
};

/// Multi-start projected Adam descent. Starts are independent and seeded from
/// (seed, start index); the winner is the lowest objective, ties to the lower index.
OptResult optimize(const OptimizerSpec& spec);

}  // namespace cpg
