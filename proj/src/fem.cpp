#include "shapeopt/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace shapeopt {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<std::array<int, 2>> idx,
                                         std::vector<double> values) {
  std::vector<int> order(idx.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return idx[a][0] != idx[b][0] ? idx[a][0] < idx[b][0] : idx[a][1] < idx[b][1];
  });
  SparseMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  int last_r = -1, last_c = -1;
  for (int o : order) {
    int r = idx[o][0], c = idx[o][1];
    if (r == last_r && c == last_c) {
      m.val.back() += values[o];
    } else {
      m.col.push_back(c);
      m.val.push_back(values[o]);
      ++m.row_ptr[r + 1];
      last_r = r;
      last_c = c;
    }
  }
  for (int i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

void SparseMatrix::apply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (col[k] == i) d[i] = val[k];
  return d;
}

double SparseMatrix::coeff(int i, int j) const {
  for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (col[k] == j) return val[k];
  return 0.0;
}

// ---------------------------------------------------------------------------
// PCG

std::vector<double> pcg_solve(const SparseMatrix& A, const std::vector<double>& rhs,
                              const SolverOptions& opts,
                              const std::vector<double>* deflate,
                              SolveDiagnostics* diag) {
  const int n = A.n;
  std::vector<double> x(n, 0.0), r = rhs, z(n), p(n), Ap(n);
  std::vector<double> inv_diag = A.diagonal();
  for (double& d : inv_diag) d = (d != 0.0) ? 1.0 / d : 1.0;

  double defl_nn = deflate ? dot(*deflate, *deflate) : 0.0;
  auto project = [&](std::vector<double>& v) {
    if (!deflate || defl_nn == 0.0) return;
    double c = dot(*deflate, v) / defl_nn;
    for (int i = 0; i < n; ++i) v[i] -= c * (*deflate)[i];
  };

  double norm_b = std::sqrt(dot(rhs, rhs));
  if (norm_b == 0.0) {
    if (diag) *diag = {0, 0.0, 0.0};
    return x;
  }
  double tol = opts.rel_tol * norm_b;
  int max_it = opts.max_iter_per_dof * n;

  project(r);
  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  project(z);
  p = z;
  double rz = dot(r, z);
  double res_norm = std::sqrt(dot(r, r));
  double best_res = res_norm;
  int it = 0, stalled = 0;
  while (res_norm > tol && it < max_it) {
    A.apply(p, Ap);
    double pAp = dot(p, Ap);
    if (pAp <= 0.0) break;  // lost positive definiteness numerically
    double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    project(z);
    double rz_new = dot(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    res_norm = std::sqrt(dot(r, r));
    ++it;
    // On badly conditioned meshes rounding can pin the residual above a very
    // tight tolerance; stop once progress stalls and fall through to the
    // usability check below.
    if (res_norm < 0.999 * best_res) {
      best_res = res_norm;
      stalled = 0;
    } else if (++stalled > std::max(1000, n)) {
      break;
    }
  }
  if (res_norm > tol && res_norm > 1e-4 * norm_b) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "pcg: no convergence after %d iterations (relative residual %.3e)",
                  it, res_norm / norm_b);
    throw std::runtime_error(msg);
  }
  if (diag) {
    diag->iterations = it;
    diag->relative_residual = res_norm / norm_b;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Assembly

void hat_gradients(const TriMesh& mesh, int t, std::array<Vec2, 3>& grad, double& area) {
  const Triangle& tr = mesh.triangles[t];
  const Vec2& p0 = mesh.vertices[tr.v[0]];
  const Vec2& p1 = mesh.vertices[tr.v[1]];
  const Vec2& p2 = mesh.vertices[tr.v[2]];
  double A2 = cross(p1 - p0, p2 - p0);  // 2 * signed area
  area = 0.5 * A2;
  grad[0] = Vec2{(p1.y - p2.y) / A2, (p2.x - p1.x) / A2};
  grad[1] = Vec2{(p2.y - p0.y) / A2, (p0.x - p2.x) / A2};
  grad[2] = Vec2{(p0.y - p1.y) / A2, (p1.x - p0.x) / A2};
}

namespace {

SparseSystem assemble_stiffness_impl(
    const TriMesh& mesh, const std::function<double(int)>& elem_coeff) {
  const int n = mesh.num_vertices();
  std::vector<std::array<int, 2>> idx;
  std::vector<double> vals;
  idx.reserve(9 * mesh.num_triangles());
  vals.reserve(9 * mesh.num_triangles());
  std::array<Vec2, 3> g;
  double A;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double c = elem_coeff(t);
    if (!(c > 0.0)) throw std::invalid_argument("non-positive coefficient");
    hat_gradients(mesh, t, g, A);
    const Triangle& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        idx.push_back({tr.v[i], tr.v[j]});
        vals.push_back(c * A * g[i].dot(g[j]));
      }
  }
  SparseSystem sys;
  sys.matrix = SparseMatrix::from_triplets(n, std::move(idx), std::move(vals));
  sys.constraint = ConstraintKind::None;
  return sys;
}

}  // namespace

SparseSystem assemble_stiffness(const TriMesh& mesh,
                                const std::vector<double>& region_coeff) {
  return assemble_stiffness_impl(mesh, [&](int t) {
    int r = mesh.triangles[t].region;
    if (r < 0 || r >= static_cast<int>(region_coeff.size()))
      throw std::invalid_argument("region label without coefficient");
    return region_coeff[r];
  });
}

SparseSystem assemble_stiffness(const TriMesh& mesh, const NodalField& coeff) {
  return assemble_stiffness_impl(mesh, [&](int t) {
    const Triangle& tr = mesh.triangles[t];
    return (coeff[tr.v[0]] + coeff[tr.v[1]] + coeff[tr.v[2]]) / 3.0;
  });
}

SparseMatrix assemble_mass(const TriMesh& mesh) {
  const int n = mesh.num_vertices();
  std::vector<std::array<int, 2>> idx;
  std::vector<double> vals;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double A = mesh.area(t);
    const Triangle& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        idx.push_back({tr.v[i], tr.v[j]});
        vals.push_back(A / 12.0 * (i == j ? 2.0 : 1.0));
      }
  }
  return SparseMatrix::from_triplets(n, std::move(idx), std::move(vals));
}

std::vector<double> nodal_integral_weights(const TriMesh& mesh) {
  std::vector<double> w(mesh.num_vertices(), 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double A = mesh.area(t);
    for (int v : mesh.triangles[t].v) w[v] += A / 3.0;
  }
  return w;
}

std::vector<double> assemble_load(const TriMesh& mesh, double f_const, double g_const) {
  std::vector<double> b(mesh.num_vertices(), 0.0);
  if (f_const != 0.0)
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      double A = mesh.area(t);
      for (int v : mesh.triangles[t].v) b[v] += f_const * A / 3.0;
    }
  if (g_const != 0.0)
    for (const Edge& e : mesh.boundary_edges) {
      double len = (mesh.vertices[e.a] - mesh.vertices[e.b]).norm();
      b[e.a] += g_const * len / 2.0;
      b[e.b] += g_const * len / 2.0;
    }
  return b;
}

std::vector<double> assemble_load(const TriMesh& mesh, const NodalField& f,
                                  double g_const) {
  // Volume term M f, exact for P1*P1.
  SparseMatrix M = assemble_mass(mesh);
  std::vector<double> b(mesh.num_vertices());
  M.apply(f.values(), b);
  if (g_const != 0.0)
    for (const Edge& e : mesh.boundary_edges) {
      double len = (mesh.vertices[e.a] - mesh.vertices[e.b]).norm();
      b[e.a] += g_const * len / 2.0;
      b[e.b] += g_const * len / 2.0;
    }
  return b;
}

// ---------------------------------------------------------------------------
// Solves

NodalField solve_zero_mean(const TriMesh& mesh, const SparseSystem& K,
                           const std::vector<double>& rhs,
                           const SolverOptions& opts, SolveDiagnostics* diag) {
  const int n = K.matrix.n;
  std::vector<double> w = K.mean_weights;
  if (w.empty()) w = nodal_integral_weights(mesh);
  if (w.size() != static_cast<size_t>(n))
    throw std::invalid_argument("zero-mean solve needs nodal weights");

  // K y + lambda w = rhs with w'y = 0. Taking the inner product with the
  // constant kernel vector fixes lambda = sum(rhs) / sum(w).
  double sum_rhs = std::accumulate(rhs.begin(), rhs.end(), 0.0);
  double sum_w = std::accumulate(w.begin(), w.end(), 0.0);
  double lambda = sum_rhs / sum_w;

  std::vector<double> rhs_c(n);
  for (int i = 0; i < n; ++i) rhs_c[i] = rhs[i] - lambda * w[i];

  std::vector<double> ones(n, 1.0);
  std::vector<double> y = pcg_solve(K.matrix, rhs_c, opts, &ones, diag);

  // Shift the kernel component so the weighted mean vanishes.
  double shift = dot(w, y) / sum_w;
  for (double& v : y) v -= shift;
  if (diag) diag->lambda = lambda;
  return NodalField(mesh, std::move(y));
}

std::vector<double> solve_dirichlet(const SparseSystem& K,
                                    const std::vector<double>& rhs,
                                    const SolverOptions& opts,
                                    SolveDiagnostics* diag) {
  const int n = K.matrix.n;
  if (K.constraint != ConstraintKind::Dirichlet)
    throw std::invalid_argument("system is not Dirichlet-tagged");
  if (K.constrained.size() != static_cast<size_t>(n))
    throw std::invalid_argument("constraint flags size mismatch");
  bool any = false;
  for (uint8_t c : K.constrained) any |= (c != 0);
  if (!any) throw std::invalid_argument("empty constrained set");

  // Eliminate constrained dofs in place: solve the free block with the
  // boundary contribution moved to the right side.
  std::vector<double> xc(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (K.constrained[i]) xc[i] = K.boundary_values.empty() ? 0.0 : K.boundary_values[i];
  std::vector<double> Axc(n);
  K.matrix.apply(xc, Axc);

  // Reduced system on free dofs.
  std::vector<int> free_idx, pos(n, -1);
  for (int i = 0; i < n; ++i)
    if (!K.constrained[i]) {
      pos[i] = static_cast<int>(free_idx.size());
      free_idx.push_back(i);
    }
  const int nf = static_cast<int>(free_idx.size());
  std::vector<double> rhs_f(nf);
  for (int k = 0; k < nf; ++k) rhs_f[k] = rhs[free_idx[k]] - Axc[free_idx[k]];

  SparseMatrix Af;
  Af.n = nf;
  Af.row_ptr.assign(nf + 1, 0);
  for (int k = 0; k < nf; ++k) {
    int i = free_idx[k];
    for (int p = K.matrix.row_ptr[i]; p < K.matrix.row_ptr[i + 1]; ++p)
      if (pos[K.matrix.col[p]] >= 0) ++Af.row_ptr[k + 1];
  }
  for (int k = 0; k < nf; ++k) Af.row_ptr[k + 1] += Af.row_ptr[k];
  Af.col.resize(Af.row_ptr[nf]);
  Af.val.resize(Af.row_ptr[nf]);
  {
    std::vector<int> cur(Af.row_ptr.begin(), Af.row_ptr.end() - 1);
    for (int k = 0; k < nf; ++k) {
      int i = free_idx[k];
      for (int p = K.matrix.row_ptr[i]; p < K.matrix.row_ptr[i + 1]; ++p) {
        int jc = pos[K.matrix.col[p]];
        if (jc >= 0) {
          Af.col[cur[k]] = jc;
          Af.val[cur[k]] = K.matrix.val[p];
          ++cur[k];
        }
      }
    }
  }

  std::vector<double> xf =
      nf > 0 ? pcg_solve(Af, rhs_f, opts, nullptr, diag) : std::vector<double>{};
  std::vector<double> x = xc;
  for (int k = 0; k < nf; ++k) x[free_idx[k]] = xf[k];
  return x;
}

// ---------------------------------------------------------------------------
// Field calculus

Vec2 field_gradient(const NodalField& field, int triangle) {
  const TriMesh& mesh = field.mesh();
  std::array<Vec2, 3> g;
  double A;
  hat_gradients(mesh, triangle, g, A);
  if (A == 0.0) throw std::invalid_argument("degenerate triangle");
  const Triangle& tr = mesh.triangles[triangle];
  Vec2 out{0, 0};
  for (int i = 0; i < 3; ++i) {
    out.x += field[tr.v[i]] * g[i].x;
    out.y += field[tr.v[i]] * g[i].y;
  }
  return out;
}

double l2_norm(const NodalField& field) {
  SparseMatrix M = assemble_mass(field.mesh());
  std::vector<double> Mv(field.size());
  M.apply(field.values(), Mv);
  return std::sqrt(std::max(0.0, dot(field.values(), Mv)));
}

double l2_norm(const VectorField& field) {
  SparseMatrix M = assemble_mass(field.mesh());
  const int n = field.num_vertices();
  std::vector<double> cx(n), cy(n), tmp(n);
  for (int v = 0; v < n; ++v) {
    cx[v] = field.x(v);
    cy[v] = field.y(v);
  }
  double s = 0.0;
  M.apply(cx, tmp);
  s += dot(cx, tmp);
  M.apply(cy, tmp);
  s += dot(cy, tmp);
  return std::sqrt(std::max(0.0, s));
}

}  // namespace shapeopt
