#include "shapeopt/shape_calculus.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace shapeopt {

TargetMeasurement::TargetMeasurement(TriMesh mesh, NodalField ybar, Scenario scenario)
    : mesh_(std::make_unique<TriMesh>(std::move(mesh))), scenario_(std::move(scenario)) {
  ybar_ = NodalField(*mesh_, ybar.values());
  locator_ = std::make_unique<PointLocator>(*mesh_);
}

NodalField solve_state(const TriMesh& mesh, const Scenario& scenario,
                       const SolverOptions& opts, SolveDiagnostics* diag) {
  SparseSystem K = assemble_stiffness(mesh, scenario.kappa);
  K.constraint = ConstraintKind::ZeroMean;
  K.mean_weights = nodal_integral_weights(mesh);
  std::vector<double> rhs = assemble_load(mesh, scenario.f_value, scenario.g_value);
  return solve_zero_mean(mesh, K, rhs, opts, diag);
}

NodalField solve_adjoint(const TriMesh& mesh, const Scenario& scenario,
                         const NodalField& y, const NodalField& ybar,
                         const SolverOptions& opts, SolveDiagnostics* diag) {
  SparseSystem K = assemble_stiffness(mesh, scenario.kappa);
  K.constraint = ConstraintKind::ZeroMean;
  K.mean_weights = nodal_integral_weights(mesh);
  // Lagrangian stationarity in y gives the right side ybar - y; this is the
  // convention under which the volume derivative formula below passes the
  // finite-difference check.
  NodalField diff(mesh);
  for (int v = 0; v < mesh.num_vertices(); ++v) diff[v] = ybar[v] - y[v];
  std::vector<double> rhs = assemble_load(mesh, diff, 0.0);
  return solve_zero_mean(mesh, K, rhs, opts, diag);
}

double objective_value(const TriMesh& mesh, const NodalField& y,
                       const NodalField& ybar) {
  SparseMatrix M = assemble_mass(mesh);
  std::vector<double> d(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) d[v] = y[v] - ybar[v];
  std::vector<double> Md(mesh.num_vertices());
  M.apply(d, Md);
  return 0.5 * dot(d, Md);
}

TargetMeasurement generate_target(TriMesh target_mesh, const Scenario& scenario,
                                  const SolverOptions& opts) {
  NodalField ybar = solve_state(target_mesh, scenario, opts);
  return TargetMeasurement(std::move(target_mesh), std::move(ybar),
                           scenario);
}

NodalField transfer_target(const TargetMeasurement& target, const TriMesh& mesh) {
  NodalField out(mesh);
  const TriMesh& tm = target.mesh();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    PointLocation loc = target.locator().locate(mesh.vertices[v]);
    const Triangle& tr = tm.triangles[loc.triangle];
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += loc.bary[i] * target.ybar()[tr.v[i]];
    out[v] = s;
  }
  std::vector<double> w = nodal_integral_weights(mesh);
  double mean = dot(w, out.values()) /
                std::accumulate(w.begin(), w.end(), 0.0);
  for (int v = 0; v < mesh.num_vertices(); ++v) out[v] -= mean;
  return out;
}

VectorField transfer_target_gradient(const TargetMeasurement& target,
                                     const TriMesh& mesh) {
  VectorField out(mesh);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    PointLocation loc = target.locator().locate(mesh.vertices[v]);
    Vec2 g = field_gradient(target.ybar(), loc.triangle);
    out.x(v) = g.x;
    out.y(v) = g.y;
  }
  return out;
}

std::vector<uint8_t> active_vertices(const TriMesh& mesh) {
  std::vector<uint8_t> active(mesh.num_vertices(), 0);
  for (const Triangle& t : mesh.triangles) {
    bool touches = mesh.on_interface[t.v[0]] || mesh.on_interface[t.v[1]] ||
                   mesh.on_interface[t.v[2]];
    if (touches)
      for (int v : t.v) active[v] = 1;
  }
  return active;
}

ShapeDerivativeLoad assemble_shape_derivative(const TriMesh& mesh,
                                              const Scenario& scenario,
                                              const NodalField& y,
                                              const NodalField& p,
                                              const NodalField& ybar,
                                              const VectorField* ybar_grad) {
  if (&y.mesh() != &mesh || &p.mesh() != &mesh || &ybar.mesh() != &mesh)
    throw std::invalid_argument("fields live on a different mesh");
  if (ybar_grad && ybar_grad->num_vertices() != mesh.num_vertices())
    throw std::invalid_argument("ybar gradient field size mismatch");

  ShapeDerivativeLoad out;
  out.load = VectorField(mesh);
  out.active = active_vertices(mesh);

  // The zero-mean state solves -div(kappa grad y) = f - lambda with the
  // compatibility multiplier lambda = (int f + int g ds) / |D|; the volume
  // source seen by the derivative is that effective one.
  double area_total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) area_total += mesh.area(t);
  double boundary_len = 0.0;
  for (const Edge& e : mesh.boundary_edges)
    boundary_len += (mesh.vertices[e.a] - mesh.vertices[e.b]).norm();
  double lambda = (scenario.f_value * area_total + scenario.g_value * boundary_len) /
                  area_total;
  const double f = scenario.f_value - lambda;

  // int_T (y - ybar) phi_a dx accumulated per vertex; paired with the nodal
  // source-mesh gradient when available.
  std::vector<double> misfit_weight(mesh.num_vertices(), 0.0);

  std::array<Vec2, 3> g;
  double A;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tr = mesh.triangles[t];
    double kappa = scenario.kappa.at(tr.region);
    hat_gradients(mesh, t, g, A);

    Vec2 gy{0, 0}, gp{0, 0}, gyb{0, 0};
    double pbar = 0.0;
    for (int i = 0; i < 3; ++i) {
      gy = gy + g[i] * y[tr.v[i]];
      gp = gp + g[i] * p[tr.v[i]];
      gyb = gyb + g[i] * ybar[tr.v[i]];
      pbar += p[tr.v[i]] / 3.0;
    }
    double gygp = gy.dot(gp);

    // Misfit at the three edge midpoints (edges 01, 12, 20); the 3-midpoint
    // rule is exact for the quadratic integrands below.
    double d[3];
    for (int i = 0; i < 3; ++i) d[i] = y[tr.v[i]] - ybar[tr.v[i]];
    double dm[3] = {0.5 * (d[0] + d[1]), 0.5 * (d[1] + d[2]), 0.5 * (d[2] + d[0])};
    double half_sq = (dm[0] * dm[0] + dm[1] * dm[1] + dm[2] * dm[2]) / 2.0;

    // div(U) term, constant per element for U = phi_a e_k.
    double t4_scalar = (A / 3.0) * half_sq + A * (kappa * gygp - f * pbar);

    for (int a = 0; a < 3; ++a) {
      // int_T (y - ybar) phi_a dx: phi_a is 1/2 on the two adjacent midpoints.
      double misfit_int = (A / 3.0) * 0.5 * (dm[a] + dm[(a + 2) % 3]);
      misfit_weight[tr.v[a]] += misfit_int;
      for (int k = 0; k < 2; ++k) {
        double gyk = (k == 0) ? gy.x : gy.y;
        double gpk = (k == 0) ? gp.x : gp.y;
        double gybk = (k == 0) ? gyb.x : gyb.y;
        double gak = (k == 0) ? g[a].x : g[a].y;

        double term = -kappa * A * (gyk * g[a].dot(gp) + gpk * g[a].dot(gy));
        if (!ybar_grad) term += -gybk * misfit_int;
        // -grad(f)' U p vanishes for constant f.
        term += gak * t4_scalar;
        if (k == 0)
          out.load.x(tr.v[a]) += term;
        else
          out.load.y(tr.v[a]) += term;
      }
    }
  }

  if (ybar_grad)
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      out.load.x(v) -= misfit_weight[v] * ybar_grad->x(v);
      out.load.y(v) -= misfit_weight[v] * ybar_grad->y(v);
    }

  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (!out.active[v] || mesh.on_boundary[v]) {
      out.load.x(v) = 0.0;
      out.load.y(v) = 0.0;
      out.active[v] = out.active[v] && !mesh.on_boundary[v];
    }
  return out;
}

}  // namespace shapeopt
