// Acceptance suite: eight end-to-end criteria, one pass/fail line each.
// Run with no arguments for the full suite, or pass criterion numbers to
// run a subset, e.g. `acceptance 1 3 8`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "shapeopt/config.hpp"
#include "shapeopt/io.hpp"
#include "shapeopt/optimizer.hpp"

using namespace shapeopt;

namespace {

char detail[512];

Scenario nominal_scenario(int inclusions = 1) {
  Scenario s;
  s.kappa.assign(inclusions + 1, 4.0);
  s.kappa[0] = 1.5;
  s.g_value = 10.0;
  return s;
}

ScenarioDistribution paper_distribution(double sd) {
  ScenarioDistribution d;
  d.kappa0 = ComponentSpec::truncated(1.5, sd, 1.0, 2.0);
  d.kappa_int = ComponentSpec::truncated(4.0, sd, 3.0, 5.0);
  d.g = ComponentSpec::truncated(10.0, sd, 9.0, 11.0);
  return d;
}

VectorField random_active_field(const TriMesh& m, RandomStream& rng) {
  std::vector<uint8_t> act = active_vertices(m);
  VectorField V(m);
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (!act[v] || m.on_boundary[v]) continue;
    V.x(v) = 2.0 * rng.uniform01() - 1.0;
    V.y(v) = 2.0 * rng.uniform01() - 1.0;
  }
  return V;
}

// 1. Finite-difference consistency of the assembled shape derivative.
bool criterion_fd() {
  SolverOptions opts{1e-12, 20};
  Scenario sc = nominal_scenario();
  TriMesh mesh = generate_mesh(39, {InclusionSpec{0.5, 0.5, 0.22, 0.22}});
  TargetMeasurement target =
      generate_target(generate_mesh(39, {InclusionSpec{0.55, 0.5, 0.2, 0.2}}), sc,
                      opts);
  NodalField ybar = transfer_target(target, mesh);
  VectorField gyb = transfer_target_gradient(target, mesh);
  NodalField y = solve_state(mesh, sc, opts);
  NodalField p = solve_adjoint(mesh, sc, y, ybar, opts);
  ShapeDerivativeLoad dJ = assemble_shape_derivative(mesh, sc, y, p, ybar, &gyb);
  double j0 = objective_value(mesh, y, ybar);

  const double eps_list[3] = {1e-3, 1e-4, 1e-5};
  double worst = 0.0;
  RandomStream rng(1234, RandomStream::Purpose::Test, 1);
  for (int trial = 0; trial < 10; ++trial) {
    // keep eps*V well below the local mesh size so no trial mesh degenerates
    VectorField V = random_active_field(mesh, rng);
    for (double& x : V.values()) x *= 0.1;
    double exact = dot(dJ.load.values(), V.values());
    double err[3];
    for (int k = 0; k < 3; ++k) {
      TriMesh moved = deform_mesh(mesh, V, -eps_list[k]);
      NodalField yb = transfer_target(target, moved);
      NodalField ym = solve_state(moved, sc, opts);
      double fd = (objective_value(moved, ym, yb) - j0) / eps_list[k];
      err[k] = std::fabs(fd - exact) / std::max(std::fabs(exact), 1e-300);
    }
    if (!(err[0] > err[1] && err[1] > err[2])) {
      std::snprintf(detail, sizeof(detail),
                    "direction %d not monotone: %.3e, %.3e, %.3e", trial, err[0],
                    err[1], err[2]);
      return false;
    }
    worst = std::max(worst, err[2]);
  }
  std::snprintf(detail, sizeof(detail),
                "10 directions, max rel err %.3e at eps=1e-5 (tol 1e-2)", worst);
  return worst <= 1e-2;
}

// 2. Second-order L2 convergence for a manufactured solution.
bool criterion_fem_order() {
  auto solve_err = [](int res) {
    TriMesh m = generate_mesh(res, {});
    SparseSystem K = assemble_stiffness(m, std::vector<double>{1.0});
    NodalField f(m), exact(m);
    for (int v = 0; v < m.num_vertices(); ++v) {
      double c = std::cos(M_PI * m.vertices[v].x) * std::cos(M_PI * m.vertices[v].y);
      f[v] = 2.0 * M_PI * M_PI * c;
      exact[v] = c;
    }
    NodalField y = solve_zero_mean(m, K, assemble_load(m, f, 0.0));
    NodalField err(m);
    for (int v = 0; v < m.num_vertices(); ++v) err[v] = y[v] - exact[v];
    return l2_norm(err);
  };
  double ratio = solve_err(20) / solve_err(40);
  std::snprintf(detail, sizeof(detail), "L2 error ratio 20/40 = %.3f (want [3.6,4.4])",
                ratio);
  return ratio >= 3.6 && ratio <= 4.4;
}

// 3. Matching measurement and shape is a fixed point of the iteration.
bool criterion_fixed_point() {
  SolverOptions opts{1e-12, 20};
  Scenario sc = nominal_scenario();
  TriMesh mesh = generate_mesh(19, {InclusionSpec{0.5, 0.5, 0.22, 0.22}});
  TargetMeasurement target = generate_target(mesh, sc, opts);
  NodalField ybar = transfer_target(target, mesh);
  VectorField gyb = transfer_target_gradient(target, mesh);
  NodalField y = solve_state(mesh, sc, opts);
  NodalField p = solve_adjoint(mesh, sc, y, ybar, opts);
  ShapeDerivativeLoad dJ = assemble_shape_derivative(mesh, sc, y, p, ybar, &gyb);
  LameField lame = solve_mu_field(mesh, 10.0, 25.0, opts);
  VectorField V = solve_deformation(mesh, assemble_elasticity(mesh, lame), dJ, opts);

  double scale = l2_norm(y);
  double pn = l2_norm(p);
  double lmax = 0.0;
  for (double x : dJ.load.values()) lmax = std::max(lmax, std::fabs(x));
  double vn = l2_norm(V);
  std::snprintf(detail, sizeof(detail),
                "|p| %.2e, load max %.2e, |V| %.2e vs 1e-8*|y| = %.2e", pn, lmax, vn,
                1e-8 * scale);
  return pn <= 1e-8 * scale && lmax <= 1e-8 * scale && vn <= 1e-8 * scale;
}

// 4. Six-inclusion identification run reaches a small misfit.
bool criterion_six_inclusions() {
  std::vector<InclusionSpec> start = {
      {0.20, 0.74, 0.09, 0.09}, {0.26, 0.26, 0.08, 0.08}, {0.52, 0.78, 0.07, 0.07},
      {0.54, 0.24, 0.09, 0.09}, {0.78, 0.58, 0.08, 0.08}, {0.82, 0.20, 0.06, 0.06}};
  std::vector<InclusionSpec> tgt = {
      {0.23, 0.70, 0.135, 0.06},  {0.23, 0.30, 0.0533, 0.12},
      {0.55, 0.75, 0.105, 0.0467}, {0.51, 0.28, 0.06, 0.135},
      {0.80, 0.54, 0.12, 0.0533},  {0.79, 0.25, 0.04, 0.09}};

  TriMesh mesh = generate_mesh(39, start);
  TargetMeasurement target =
      generate_target(generate_mesh(39, tgt), nominal_scenario(6));

  RunConfig cfg;
  cfg.iterations = 300;
  cfg.seed = 11;
  cfg.step.kind = StepRuleKind::Armijo;
  cfg.step.alpha = 50.0;
  cfg.step.rho = 0.5;
  cfg.step.c = 1e-4;
  cfg.distribution = paper_distribution(1e-2);
  cfg.distribution.num_inclusions = 6;
  cfg.estimate_m = 100;
  cfg.estimate_every = 0;  // endpoints only

  RunResult run = run_optimization(mesh, target, cfg);
  double j0 = run.history.empty() ? NAN : run.history.front().j_hat;
  double jT = run.final_j_hat;
  std::snprintf(detail, sizeof(detail),
                "%d triangles, j_hat start %.4e, end %.4e (want [1e-5,1e-3] and "
                "< 0.05*start)%s",
                mesh.num_triangles(), j0, jT,
                run.aborted ? (", aborted: " + run.abort_reason).c_str() : "");
  return !run.aborted && jT >= 1e-5 && jT <= 1e-3 && jT < 0.05 * j0;
}

// 5. Stiffer interior Lame bounds preserve mesh quality better.
bool criterion_lame_bounds() {
  TriMesh mesh = generate_mesh(39, {InclusionSpec{0.5, 0.5, 0.3, 0.15}});
  TargetMeasurement target =
      generate_target(generate_mesh(39, {InclusionSpec{0.5, 0.5, 0.2, 0.2}}),
                      nominal_scenario());

  auto run_with = [&](double mu_min, double mu_max) {
    RunConfig cfg;
    cfg.iterations = 200;
    cfg.seed = 12;
    cfg.step.kind = StepRuleKind::Armijo;
    cfg.step.alpha = 400.0;
    cfg.step.rho = 0.5;
    cfg.step.c = 1e-4;
    cfg.distribution = paper_distribution(1e-2);
    cfg.mu_min = mu_min;
    cfg.mu_max = mu_max;
    return run_optimization(mesh, target, cfg);
  };
  RunResult soft = run_with(0.5, 1.0);
  RunResult stiff = run_with(10.0, 25.0);
  MeshQualityReport qs = triangle_quality(soft.final_mesh);
  MeshQualityReport qt = triangle_quality(stiff.final_mesh);
  std::snprintf(detail, sizeof(detail),
                "max aspect: mu(0.5,1) %.2f vs mu(10,25) %.2f, inverted %d/%d",
                qs.max_ratio, qt.max_ratio, qs.inverted_count, qt.inverted_count);
  return qt.max_ratio < qs.max_ratio && qt.inverted_count == 0;
}

// 6. High-variance comparison of step size rules.
bool criterion_high_variance() {
  TriMesh mesh = generate_mesh(23, {InclusionSpec{0.42, 0.5, 0.26, 0.26}});
  TargetMeasurement target =
      generate_target(generate_mesh(23, {InclusionSpec{0.58, 0.5, 0.24, 0.16}}),
                      nominal_scenario());

  auto base_cfg = [&]() {
    RunConfig cfg;
    cfg.iterations = 200;
    cfg.seed = 13;
    cfg.distribution = paper_distribution(0.2);
    return cfg;
  };

  RunConfig rm = base_cfg();
  rm.step.kind = StepRuleKind::RobbinsMonro;
  rm.step.alpha = 800.0;
  rm.step.exponent = 0.85;
  rm.estimate_m = 1000;
  RunResult rm_run = run_optimization(mesh, target, rm);

  RunConfig damped = base_cfg();
  damped.step.kind = StepRuleKind::DampedArmijo;
  damped.step.alpha = 400.0;
  damped.step.damping_factor = 0.8;
  damped.step.damping_period = 20;
  damped.estimate_m = 1000;
  RunResult damped_run = run_optimization(mesh, target, damped);

  RunConfig plain = base_cfg();
  plain.step.kind = StepRuleKind::Armijo;
  plain.step.alpha = 400.0;
  RunResult plain_run = run_optimization(mesh, target, plain);

  auto tail_max = [](const RunResult& r) {
    double mx = 0.0;
    size_t n = r.history.size();
    for (size_t i = n >= 50 ? n - 50 : 0; i < n; ++i)
      mx = std::max(mx, r.history[i].j_sample);
    return mx;
  };
  double rm_j = rm_run.final_j_hat;
  double da_j = damped_run.final_j_hat;
  double da_tail = tail_max(damped_run);
  double ar_tail = tail_max(plain_run);
  std::snprintf(detail, sizeof(detail),
                "j_hat_200: RM %.4e, damped %.4e (band [2e-3,2e-2]); tail max J: "
                "damped %.4e < plain %.4e%s",
                rm_j, da_j, da_tail, ar_tail,
                (rm_run.aborted || damped_run.aborted || plain_run.aborted)
                    ? ", some run aborted"
                    : "");
  return !rm_run.aborted && !damped_run.aborted && !plain_run.aborted &&
         rm_j >= 2e-3 && rm_j <= 2e-2 && da_j >= 2e-3 && da_j <= 2e-2 &&
         da_tail < ar_tail;
}

// 7. Structural invariants across the modules.
bool criterion_invariants() {
  SolverOptions opts{1e-12, 20};
  TriMesh m = generate_mesh(10, {InclusionSpec{0.5, 0.5, 0.25, 0.2}});
  int n = m.num_vertices();

  SparseSystem K = assemble_stiffness(m, std::vector<double>{1.5, 4.0});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(K.matrix.coeff(i, j) - K.matrix.coeff(j, i)) > 1e-14) {
        std::snprintf(detail, sizeof(detail), "stiffness not symmetric at (%d,%d)", i, j);
        return false;
      }
  std::vector<double> ones(n, 1.0), out(n);
  K.matrix.apply(ones, out);
  for (double x : out)
    if (std::fabs(x) > 1e-12) {
      std::snprintf(detail, sizeof(detail), "constants not in stiffness kernel");
      return false;
    }

  NodalField g(m, 10.0);
  NodalField y = solve_zero_mean(m, K, assemble_load(m, NodalField(m), 10.0), opts);
  std::vector<double> w = nodal_integral_weights(m);
  if (std::fabs(dot(w, y.values())) > 1e-12 * l2_norm(y)) {
    std::snprintf(detail, sizeof(detail), "zero-mean constraint violated");
    return false;
  }

  LameField lame = solve_mu_field(m, 10.0, 25.0, opts);
  for (int v = 0; v < n; ++v)
    if (lame.mu[v] < 10.0 - 1e-9 || lame.mu[v] > 25.0 + 1e-9) {
      std::snprintf(detail, sizeof(detail), "mu out of bounds at vertex %d", v);
      return false;
    }

  SparseSystem A = assemble_elasticity(m, lame);
  std::vector<double> rot(2 * n), Arot(2 * n);
  for (int v = 0; v < n; ++v) {
    rot[2 * v] = -m.vertices[v].y;
    rot[2 * v + 1] = m.vertices[v].x;
  }
  A.matrix.apply(rot, Arot);
  for (double x : Arot)
    if (std::fabs(x) > 1e-10) {
      std::snprintf(detail, sizeof(detail), "rotation not in elasticity kernel");
      return false;
    }

  Scenario sc = nominal_scenario();
  TargetMeasurement target =
      generate_target(generate_mesh(10, {InclusionSpec{0.55, 0.5, 0.2, 0.2}}), sc);
  NodalField ybar = transfer_target(target, m);
  VectorField gyb = transfer_target_gradient(target, m);
  NodalField st = solve_state(m, sc, opts);
  NodalField p = solve_adjoint(m, sc, st, ybar, opts);
  ShapeDerivativeLoad dJ = assemble_shape_derivative(m, sc, st, p, ybar, &gyb);
  for (int v = 0; v < n; ++v)
    if (!dJ.active[v] && (dJ.load.x(v) != 0.0 || dJ.load.y(v) != 0.0)) {
      std::snprintf(detail, sizeof(detail), "load not bit-exact zero off the active set");
      return false;
    }

  VectorField V = solve_deformation(m, A, dJ, opts);
  std::vector<double> AV(2 * n);
  A.matrix.apply(V.values(), AV);
  double lnorm = std::sqrt(dot(dJ.load.values(), dJ.load.values()));
  RandomStream rng(99, RandomStream::Purpose::Test, 7);
  for (int trial = 0; trial < 10; ++trial) {
    VectorField U = random_active_field(m, rng);
    double gap = std::fabs(dot(AV, U.values()) - dot(dJ.load.values(), U.values()));
    if (gap > 1e-8 * lnorm * std::sqrt(dot(U.values(), U.values()))) {
      std::snprintf(detail, sizeof(detail), "Galerkin identity violated: gap %.3e", gap);
      return false;
    }
  }

  TriMesh rt = parse_mesh(write_mesh(m));
  for (int v = 0; v < n; ++v)
    if (rt.vertices[v].x != m.vertices[v].x || rt.vertices[v].y != m.vertices[v].y) {
      std::snprintf(detail, sizeof(detail), "mesh round-trip not bit-exact");
      return false;
    }

  RunConfig cfg;
  cfg.iterations = 3;
  cfg.seed = 5;
  cfg.step.kind = StepRuleKind::Armijo;
  cfg.step.alpha = 50.0;
  cfg.distribution = paper_distribution(1e-2);
  RunResult r1 = run_optimization(m, target, cfg);
  RunResult r2 = run_optimization(m, target, cfg);
  if (r1.history.size() != r2.history.size()) {
    std::snprintf(detail, sizeof(detail), "determinism: history lengths differ");
    return false;
  }
  for (size_t i = 0; i < r1.history.size(); ++i)
    if (r1.history[i].j_sample != r2.history[i].j_sample ||
        r1.history[i].step != r2.history[i].step) {
      std::snprintf(detail, sizeof(detail), "determinism: histories differ at %zu", i);
      return false;
    }
  for (int v = 0; v < n; ++v)
    if (r1.final_mesh.vertices[v].x != r2.final_mesh.vertices[v].x ||
        r1.final_mesh.vertices[v].y != r2.final_mesh.vertices[v].y) {
      std::snprintf(detail, sizeof(detail), "determinism: final meshes differ");
      return false;
    }

  std::snprintf(detail, sizeof(detail),
                "symmetry, kernels, mean constraint, mu bounds, restriction, "
                "Galerkin, round-trip, determinism all hold");
  return true;
}

// 8. Without the validity guard an aggressive step destroys the mesh fast.
bool criterion_guard_off() {
  TriMesh mesh = generate_mesh(19, {InclusionSpec{0.45, 0.5, 0.25, 0.25}});
  TargetMeasurement target =
      generate_target(generate_mesh(19, {InclusionSpec{0.55, 0.5, 0.2, 0.2}}),
                      nominal_scenario());
  RunConfig cfg;
  cfg.iterations = 10;
  cfg.seed = 21;
  cfg.step.kind = StepRuleKind::RobbinsMonro;
  cfg.step.alpha = 2000.0;
  cfg.step.exponent = 0.85;
  cfg.distribution = paper_distribution(1e-2);
  cfg.guard = false;
  RunResult run = run_optimization(mesh, target, cfg);
  int failed_at = run.history.empty() ? -1 : run.history.back().n;
  std::snprintf(detail, sizeof(detail),
                "aborted=%d at iteration %d, %zu mesh violations", run.aborted ? 1 : 0,
                failed_at, validate_mesh(run.final_mesh).size());
  return run.aborted && failed_at >= 1 && failed_at <= 5 &&
         !validate_mesh(run.final_mesh).empty();
}

struct Criterion {
  int id;
  const char* name;
  bool (*fn)();
};

const Criterion criteria[] = {
    {1, "shape-derivative finite-difference consistency", criterion_fd},
    {2, "FEM second-order convergence", criterion_fem_order},
    {3, "optimum is a fixed point", criterion_fixed_point},
    {4, "six-inclusion identification run", criterion_six_inclusions},
    {5, "Lame bounds control mesh quality", criterion_lame_bounds},
    {6, "high-variance step rule comparison", criterion_high_variance},
    {7, "module invariants", criterion_invariants},
    {8, "guard off fails fast", criterion_guard_off},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    auto start = std::chrono::steady_clock::now();
    detail[0] = '\0';
    bool ok = false;
    try {
      ok = c.fn();
    } catch (const std::exception& e) {
      std::snprintf(detail, sizeof(detail), "exception: %s", e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start).count();
    std::printf("[%s] %d %s: %s [%.1fs]\n", ok ? "PASS" : "FAIL", c.id, c.name,
                detail, secs);
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
