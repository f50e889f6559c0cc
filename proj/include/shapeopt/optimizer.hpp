#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "shapeopt/deformation.hpp"
#include "shapeopt/mesh.hpp"
#include "shapeopt/random.hpp"
#include "shapeopt/shape_calculus.hpp"

namespace shapeopt {

enum class StepRuleKind { RobbinsMonro, Armijo, DampedArmijo };

struct StepRule {
  StepRuleKind kind = StepRuleKind::Armijo;
  double alpha = 50.0;          // scale / initial step
  double exponent = 0.85;       // Robbins-Monro decay
  double rho = 0.5;             // Armijo backtracking factor
  double c = 1e-4;              // Armijo sufficient-decrease constant
  double damping_factor = 0.9;  // damped Armijo
  int damping_period = 20;
  double alpha_min = 0.0;
  int max_backtracks = 30;

  void check() const;
  bool is_armijo() const { return kind != StepRuleKind::RobbinsMonro; }
};

/// Base step for iteration n: Robbins-Monro expects n >= 1, the damped rule
/// counts periods from n = 0.
double propose_step(const StepRule& rule, int n);

struct RunConfig {
  int iterations = 100;
  uint64_t seed = 0;
  StepRule step;
  ScenarioDistribution distribution;
  double mu_min = 10.0;
  double mu_max = 25.0;
  int estimate_m = 0;       // 0 disables sampling estimates
  int estimate_every = 0;   // cadence; 0 = endpoints only (when m > 0)
  int snapshot_every = 0;
  double solver_tol = 1e-10;
  bool guard = true;
  std::optional<double> grad_norm_stop;  // off by default
};

struct IterationRecord {
  int n = 0;
  double step = 0.0;
  double j_sample = 0.0;       // J(u^n, xi^n), single sample
  double grad_norm_sq = 0.0;   // a_elas(V, V)
  double v_l2 = 0.0;           // ||V||_L2(D,R^2)
  int backtracks = 0;
  int guard_halvings = 0;
  double min_quality = 0.0;
  bool accepted = false;
  double j_hat = std::numeric_limits<double>::quiet_NaN();
  double v_hat = std::numeric_limits<double>::quiet_NaN();
};

struct ArmijoResult {
  double t = 0.0;
  int backtracks = 0;
  bool accepted = false;
  std::vector<double> trial_values;
};

/// Backtracking line search on J(., xi) along -V; every trial re-transfers
/// ybar and re-solves the state on the trial mesh, and a trial is only
/// admissible if the deformed mesh validates.
ArmijoResult armijo_backtrack(const TriMesh& mesh, const Scenario& scenario,
                              const TargetMeasurement& target, const VectorField& V,
                              double base_alpha, double rho, double c,
                              double grad_norm_sq, int max_backtracks,
                              double j_current, const SolverOptions& opts);

struct EstimateResult {
  double j_hat = 0.0;
  double v_hat = 0.0;
};

/// Monte Carlo estimates of E[J] and E[||V||] at a fixed shape, with samples
/// keyed by (seed, iteration, sample index) for reproducibility.
EstimateResult estimate_expectation(const TriMesh& mesh,
                                    const ScenarioDistribution& dist,
                                    const TargetMeasurement& target, int m,
                                    uint64_t seed, uint64_t iteration,
                                    double mu_min, double mu_max,
                                    const SolverOptions& opts);

struct RunResult {
  TriMesh final_mesh;
  std::vector<IterationRecord> history;
  bool aborted = false;
  std::string abort_reason;
  double final_j_hat = std::numeric_limits<double>::quiet_NaN();
  double final_v_hat = std::numeric_limits<double>::quiet_NaN();
};

/// Per-iteration hook; fields are on the pre-update mesh of that iteration.
struct IterationSnapshot {
  const TriMesh& mesh;
  const NodalField& y;
  const NodalField& p;
  const NodalField& mu;
  const VectorField& V;
};
using SnapshotCallback =
    std::function<void(const IterationRecord&, const IterationSnapshot&)>;

RunResult run_optimization(const TriMesh& initial_mesh,
                           const TargetMeasurement& target, const RunConfig& config,
                           const SnapshotCallback& on_snapshot = nullptr);

}  // namespace shapeopt
