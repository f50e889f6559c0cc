#pragma once

#include <functional>
#include <vector>

#include "shapeopt/mesh.hpp"

namespace shapeopt {

/// P1 scalar field: one value per mesh vertex.
class NodalField {
 public:
  NodalField() = default;
  NodalField(const TriMesh& mesh, double fill = 0.0)
      : mesh_(&mesh), values_(mesh.num_vertices(), fill) {}
  NodalField(const TriMesh& mesh, std::vector<double> values)
      : mesh_(&mesh), values_(std::move(values)) {}

  const TriMesh& mesh() const { return *mesh_; }
  double& operator[](int v) { return values_[v]; }
  double operator[](int v) const { return values_[v]; }
  int size() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  const TriMesh* mesh_ = nullptr;
  std::vector<double> values_;
};

/// P1 vector field: one 2-vector per vertex, stored interleaved (x0,y0,x1,...).
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const TriMesh& mesh)
      : mesh_(&mesh), values_(2 * mesh.num_vertices(), 0.0) {}
  VectorField(const TriMesh& mesh, std::vector<double> interleaved)
      : mesh_(&mesh), values_(std::move(interleaved)) {}

  const TriMesh& mesh() const { return *mesh_; }
  double& x(int v) { return values_[2 * v]; }
  double& y(int v) { return values_[2 * v + 1]; }
  double x(int v) const { return values_[2 * v]; }
  double y(int v) const { return values_[2 * v + 1]; }
  Vec2 at(int v) const { return {values_[2 * v], values_[2 * v + 1]}; }
  int num_vertices() const { return static_cast<int>(values_.size() / 2); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  const TriMesh* mesh_ = nullptr;
  std::vector<double> values_;
};

/// Symmetric sparse matrix in CSR form.
class SparseMatrix {
 public:
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  static SparseMatrix from_triplets(int n, std::vector<std::array<int, 2>> idx,
                                    std::vector<double> values);
  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> diagonal() const;
  double coeff(int i, int j) const;  // slow, for tests/diagnostics
};

enum class ConstraintKind { None, ZeroMean, Dirichlet };

/// Sparse operator plus its constraint metadata.
struct SparseSystem {
  SparseMatrix matrix;
  ConstraintKind constraint = ConstraintKind::None;
  std::vector<double> mean_weights;       // ZeroMean: nodal integral weights
  std::vector<uint8_t> constrained;       // Dirichlet: per-dof flag
  std::vector<double> boundary_values;    // Dirichlet: per-dof value
};

struct SolveDiagnostics {
  int iterations = 0;
  double relative_residual = 0.0;
  double lambda = 0.0;  // mean-constraint multiplier (zero-mean solves)
};

struct SolverOptions {
  double rel_tol = 1e-10;
  int max_iter_per_dof = 50;
};

/// Jacobi-preconditioned CG. `deflate` (optional, unit-normalized not
/// required) is removed from search directions each iteration; used for the
/// constant kernel of pure-Neumann stiffness.
std::vector<double> pcg_solve(const SparseMatrix& A, const std::vector<double>& rhs,
                              const SolverOptions& opts,
                              const std::vector<double>* deflate = nullptr,
                              SolveDiagnostics* diag = nullptr);

// ---------------------------------------------------------------------------
// Assembly

/// Stiffness with piecewise-constant coefficient per region label.
SparseSystem assemble_stiffness(const TriMesh& mesh,
                                const std::vector<double>& region_coeff);
/// Stiffness with nodal coefficient; the element value is the vertex mean.
SparseSystem assemble_stiffness(const TriMesh& mesh, const NodalField& coeff);

SparseMatrix assemble_mass(const TriMesh& mesh);

/// Nodal integrals of the hat functions (lumped mass).
std::vector<double> nodal_integral_weights(const TriMesh& mesh);

std::vector<double> assemble_load(const TriMesh& mesh, double f_const, double g_const);
std::vector<double> assemble_load(const TriMesh& mesh, const NodalField& f, double g_const);

// ---------------------------------------------------------------------------
// Solves

/// Pure-Neumann solve in the zero-mean space: K y + lambda w = rhs, w'y = 0.
NodalField solve_zero_mean(const TriMesh& mesh, const SparseSystem& K,
                           const std::vector<double>& rhs,
                           const SolverOptions& opts = {},
                           SolveDiagnostics* diag = nullptr);

/// Dirichlet-constrained solve; works for scalar and vector (interleaved) dofs.
std::vector<double> solve_dirichlet(const SparseSystem& K,
                                    const std::vector<double>& rhs,
                                    const SolverOptions& opts = {},
                                    SolveDiagnostics* diag = nullptr);

// ---------------------------------------------------------------------------
// Field calculus

/// Constant gradient of the P1 interpolant on one triangle.
Vec2 field_gradient(const NodalField& field, int triangle);

/// Gradients of the three hat functions of a triangle; also returns its area.
void hat_gradients(const TriMesh& mesh, int t, std::array<Vec2, 3>& grad, double& area);

double l2_norm(const NodalField& field);
double l2_norm(const VectorField& field);

double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace shapeopt
