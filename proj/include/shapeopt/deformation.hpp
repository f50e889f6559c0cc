#pragma once

#include "shapeopt/fem.hpp"
#include "shapeopt/mesh.hpp"
#include "shapeopt/shape_calculus.hpp"

namespace shapeopt {

/// Lame coefficients of the deformation inner product: lambda is a constant
/// (zero in the optimizer), mu a nodal field clamped to [mu_min, mu_max].
struct LameField {
  NodalField mu;
  double lambda = 0.0;
  double mu_min = 0.0;
  double mu_max = 0.0;
};

/// Harmonic mu with mu_max on the interface and mu_min on the outer boundary,
/// clamped to the bounds afterwards.
LameField solve_mu_field(const TriMesh& mesh, double mu_min, double mu_max,
                         const SolverOptions& opts = {});

/// 2-dofs-per-vertex elasticity operator, Dirichlet-tagged with both
/// components pinned to zero on the outer boundary.
SparseSystem assemble_elasticity(const TriMesh& mesh, const LameField& lame);

VectorField solve_deformation(const TriMesh& mesh, const SparseSystem& elasticity,
                              const ShapeDerivativeLoad& load,
                              const SolverOptions& opts = {},
                              SolveDiagnostics* diag = nullptr);

/// Convenience wrapper assembling the operator itself.
VectorField solve_deformation(const TriMesh& mesh, const LameField& lame,
                              const ShapeDerivativeLoad& load,
                              const SolverOptions& opts = {},
                              SolveDiagnostics* diag = nullptr);

}  // namespace shapeopt
