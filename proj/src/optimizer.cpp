#include "shapeopt/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace shapeopt {

void StepRule::check() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("step.alpha must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("step.rho must be in (0,1)");
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("step.c must be in (0,1)");
  if (!(exponent > 0.5 && exponent <= 1.0))
    throw std::invalid_argument("step.exponent must be in (0.5, 1]");
  if (!(damping_factor > 0.0 && damping_factor <= 1.0))
    throw std::invalid_argument("step.damping must be in (0,1]");
  if (damping_period < 1) throw std::invalid_argument("step.period must be >= 1");
  if (max_backtracks < 1) throw std::invalid_argument("max_backtracks must be >= 1");
}

double propose_step(const StepRule& rule, int n) {
  switch (rule.kind) {
    case StepRuleKind::RobbinsMonro:
      if (n < 1) throw std::invalid_argument("Robbins-Monro needs n >= 1");
      return rule.alpha * std::pow(static_cast<double>(n), -rule.exponent);
    case StepRuleKind::Armijo:
      return rule.alpha;
    case StepRuleKind::DampedArmijo: {
      double a = rule.alpha *
                 std::pow(rule.damping_factor, n / rule.damping_period);
      return std::max(a, rule.alpha_min);
    }
  }
  return rule.alpha;
}

ArmijoResult armijo_backtrack(const TriMesh& mesh, const Scenario& scenario,
                              const TargetMeasurement& target, const VectorField& V,
                              double base_alpha, double rho, double c,
                              double grad_norm_sq, int max_backtracks,
                              double j_current, const SolverOptions& opts) {
  ArmijoResult res;
  double t = base_alpha;
  for (int m = 0; m <= max_backtracks; ++m, t *= rho) {
    TriMesh trial = deform_mesh(mesh, V, t);
    if (!validate_mesh(trial).empty()) {
      res.trial_values.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    double j_trial;
    try {
      NodalField ybar = transfer_target(target, trial);
      NodalField y = solve_state(trial, scenario, opts);
      j_trial = objective_value(trial, y, ybar);
    } catch (const std::exception&) {
      // a barely valid trial mesh can defeat the solver; reject the step
      res.trial_values.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    res.trial_values.push_back(j_trial);
    if (j_trial <= j_current - t * c * grad_norm_sq) {
      res.t = t;
      res.backtracks = m;
      res.accepted = true;
      return res;
    }
  }
  res.t = 0.0;
  res.backtracks = max_backtracks;
  res.accepted = false;
  return res;
}

namespace {

struct GradientEval {
  NodalField y;
  NodalField p;
  VectorField V;
  double j = 0.0;
  double grad_norm_sq = 0.0;
  double v_l2 = 0.0;
};

GradientEval evaluate_gradient(const TriMesh& mesh, const Scenario& scenario,
                               const NodalField& ybar, const VectorField& ybar_grad,
                               const SparseSystem& elasticity,
                               const SolverOptions& opts) {
  GradientEval ev;
  ev.y = solve_state(mesh, scenario, opts);
  ev.p = solve_adjoint(mesh, scenario, ev.y, ybar, opts);
  ev.j = objective_value(mesh, ev.y, ybar);
  ShapeDerivativeLoad dJ =
      assemble_shape_derivative(mesh, scenario, ev.y, ev.p, ybar, &ybar_grad);
  ev.V = solve_deformation(mesh, elasticity, dJ, opts);
  ev.grad_norm_sq = dot(dJ.load.values(), ev.V.values());
  ev.v_l2 = l2_norm(ev.V);
  return ev;
}

}  // namespace

EstimateResult estimate_expectation(const TriMesh& mesh,
                                    const ScenarioDistribution& dist,
                                    const TargetMeasurement& target, int m,
                                    uint64_t seed, uint64_t iteration,
                                    double mu_min, double mu_max,
                                    const SolverOptions& opts) {
  if (m < 1) throw std::invalid_argument("sample count must be >= 1");
  NodalField ybar = transfer_target(target, mesh);
  VectorField ybar_grad = transfer_target_gradient(target, mesh);
  LameField lame = solve_mu_field(mesh, mu_min, mu_max, opts);
  SparseSystem elasticity = assemble_elasticity(mesh, lame);
  double jsum = 0.0, vsum = 0.0;
  for (int l = 0; l < m; ++l) {
    RandomStream stream(seed, RandomStream::Purpose::Estimate, iteration,
                        static_cast<uint64_t>(l));
    Scenario sc = sample_scenario(dist, stream);
    GradientEval ev = evaluate_gradient(mesh, sc, ybar, ybar_grad, elasticity, opts);
    jsum += ev.j;
    vsum += ev.v_l2;
  }
  return {jsum / m, vsum / m};
}

RunResult run_optimization(const TriMesh& initial_mesh,
                           const TargetMeasurement& target, const RunConfig& config,
                           const SnapshotCallback& on_snapshot) {
  if (config.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  config.step.check();
  if (config.estimate_m < 0) throw std::invalid_argument("estimate.m must be >= 0");

  SolverOptions opts;
  opts.rel_tol = config.solver_tol;

  RunResult run;
  run.final_mesh = initial_mesh;
  TriMesh& mesh = run.final_mesh;

  for (int n = 1; n <= config.iterations; ++n) {
    RandomStream step_stream(config.seed, RandomStream::Purpose::Step,
                             static_cast<uint64_t>(n));
    Scenario scenario = sample_scenario(config.distribution, step_stream);

    IterationRecord rec;
    rec.n = n;
    try {
      NodalField ybar = transfer_target(target, mesh);
      VectorField ybar_grad = transfer_target_gradient(target, mesh);
      LameField lame = solve_mu_field(mesh, config.mu_min, config.mu_max, opts);
      SparseSystem elasticity = assemble_elasticity(mesh, lame);
      GradientEval ev =
          evaluate_gradient(mesh, scenario, ybar, ybar_grad, elasticity, opts);
      rec.j_sample = ev.j;
      rec.grad_norm_sq = ev.grad_norm_sq;
      rec.v_l2 = ev.v_l2;

      bool estimate_now =
          config.estimate_m > 0 &&
          (n == 1 || (config.estimate_every > 0 && n % config.estimate_every == 0));
      if (estimate_now) {
        EstimateResult est = estimate_expectation(
            mesh, config.distribution, target, config.estimate_m, config.seed,
            static_cast<uint64_t>(n), config.mu_min, config.mu_max, opts);
        rec.j_hat = est.j_hat;
        rec.v_hat = est.v_hat;
      }

      if (on_snapshot && config.snapshot_every > 0 &&
          (n == 1 || n % config.snapshot_every == 0)) {
        on_snapshot(rec, IterationSnapshot{mesh, ev.y, ev.p, lame.mu, ev.V});
      }

      TriMesh next = mesh;
      if (config.step.is_armijo()) {
        int n_damped = n - 1;  // first iteration uses the undamped alpha
        double base = propose_step(config.step, n_damped);
        ArmijoResult ar = armijo_backtrack(
            mesh, scenario, target, ev.V, base, config.step.rho, config.step.c,
            ev.grad_norm_sq, config.step.max_backtracks, ev.j, opts);
        rec.step = ar.t;
        rec.backtracks = ar.backtracks;
        rec.accepted = ar.accepted;
        if (ar.accepted) next = deform_mesh(mesh, ev.V, ar.t);
      } else {
        double t = propose_step(config.step, n);
        if (config.guard) {
          int halvings = 0;
          TriMesh trial = deform_mesh(mesh, ev.V, t);
          while (!validate_mesh(trial).empty() && halvings < 30) {
            t *= 0.5;
            ++halvings;
            trial = deform_mesh(mesh, ev.V, t);
          }
          rec.guard_halvings = halvings;
          if (validate_mesh(trial).empty()) {
            rec.step = t;
            rec.accepted = true;
            next = std::move(trial);
          } else {
            rec.step = 0.0;
            rec.accepted = false;
            run.history.push_back(rec);
            run.aborted = true;
            run.abort_reason = "mesh-validity guard exhausted at iteration " +
                               std::to_string(n);
            break;
          }
        } else {
          rec.step = t;
          next = deform_mesh(mesh, ev.V, t);
          rec.accepted = validate_mesh(next).empty();
        }
      }

      mesh = std::move(next);
      MeshQualityReport q = triangle_quality(mesh);
      rec.min_quality = q.min_ratio;
      run.history.push_back(rec);

      if (!config.guard && !rec.accepted) {
        run.aborted = true;
        run.abort_reason =
            "mesh failed validation at iteration " + std::to_string(n) +
            " (guard disabled)";
        break;
      }
      if (config.grad_norm_stop && rec.v_l2 <= *config.grad_norm_stop) break;
    } catch (const std::exception& e) {
      run.aborted = true;
      run.abort_reason = std::string("iteration ") + std::to_string(n) + ": " + e.what();
      run.history.push_back(rec);
      break;
    }
  }

  if (!run.aborted && config.estimate_m > 0 && validate_mesh(mesh).empty()) {
    EstimateResult est = estimate_expectation(
        mesh, config.distribution, target, config.estimate_m, config.seed,
        static_cast<uint64_t>(config.iterations + 1), config.mu_min,
        config.mu_max, opts);
    run.final_j_hat = est.j_hat;
    run.final_v_hat = est.v_hat;
  }
  return run;
}

}  // namespace shapeopt
