#include "shapeopt/deformation.hpp"

#include <algorithm>
#include <stdexcept>

namespace shapeopt {

LameField solve_mu_field(const TriMesh& mesh, double mu_min, double mu_max,
                         const SolverOptions& opts) {
  if (!(mu_min > 0.0) || !(mu_min <= mu_max))
    throw std::invalid_argument("need 0 < mu_min <= mu_max");

  int max_region = 0;
  for (const Triangle& t : mesh.triangles) max_region = std::max(max_region, t.region);
  SparseSystem K = assemble_stiffness(mesh, std::vector<double>(max_region + 1, 1.0));
  K.constraint = ConstraintKind::Dirichlet;
  K.constrained.assign(mesh.num_vertices(), 0);
  K.boundary_values.assign(mesh.num_vertices(), 0.0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.on_interface[v]) {
      K.constrained[v] = 1;
      K.boundary_values[v] = mu_max;
    } else if (mesh.on_boundary[v]) {
      K.constrained[v] = 1;
      K.boundary_values[v] = mu_min;
    }
  }
  std::vector<double> rhs(mesh.num_vertices(), 0.0);
  std::vector<double> mu = solve_dirichlet(K, rhs, opts);
  // The discrete maximum principle can fail on non-acute triangles; the
  // bounds are a hard contract, so clamp.
  for (double& m : mu) m = std::clamp(m, mu_min, mu_max);

  LameField lame;
  lame.mu = NodalField(mesh, std::move(mu));
  lame.lambda = 0.0;
  lame.mu_min = mu_min;
  lame.mu_max = mu_max;
  return lame;
}

SparseSystem assemble_elasticity(const TriMesh& mesh, const LameField& lame) {
  const int n = mesh.num_vertices();
  std::vector<std::array<int, 2>> idx;
  std::vector<double> vals;
  idx.reserve(36 * mesh.num_triangles());
  vals.reserve(36 * mesh.num_triangles());

  std::array<Vec2, 3> g;
  double A;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tr = mesh.triangles[t];
    hat_gradients(mesh, t, g, A);
    double mu =
        (lame.mu[tr.v[0]] + lame.mu[tr.v[1]] + lame.mu[tr.v[2]]) / 3.0;
    // 2 mu eps(phi_a e_k) : eps(phi_b e_l)
    //   = mu [ (grad_a . grad_b) delta_kl + (grad_a)_l (grad_b)_k ]
    // plus lambda div-div coupling (grad_a)_k (grad_b)_l.
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double gab = g[a].dot(g[b]);
        double ga[2] = {g[a].x, g[a].y};
        double gb[2] = {g[b].x, g[b].y};
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            double e = mu * ((k == l ? gab : 0.0) + ga[l] * gb[k]) +
                       lame.lambda * ga[k] * gb[l];
            idx.push_back({2 * tr.v[a] + k, 2 * tr.v[b] + l});
            vals.push_back(A * e);
          }
      }
  }

  SparseSystem sys;
  sys.matrix = SparseMatrix::from_triplets(2 * n, std::move(idx), std::move(vals));
  sys.constraint = ConstraintKind::Dirichlet;
  sys.constrained.assign(2 * n, 0);
  sys.boundary_values.assign(2 * n, 0.0);
  for (int v = 0; v < n; ++v)
    if (mesh.on_boundary[v]) {
      sys.constrained[2 * v] = 1;
      sys.constrained[2 * v + 1] = 1;
    }
  return sys;
}

VectorField solve_deformation(const TriMesh& mesh, const SparseSystem& elasticity,
                              const ShapeDerivativeLoad& load,
                              const SolverOptions& opts, SolveDiagnostics* diag) {
  std::vector<double> v = solve_dirichlet(elasticity, load.load.values(), opts, diag);
  return VectorField(mesh, std::move(v));
}

VectorField solve_deformation(const TriMesh& mesh, const LameField& lame,
                              const ShapeDerivativeLoad& load,
                              const SolverOptions& opts, SolveDiagnostics* diag) {
  SparseSystem A = assemble_elasticity(mesh, lame);
  return solve_deformation(mesh, A, load, opts, diag);
}

}  // namespace shapeopt
