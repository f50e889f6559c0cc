#pragma once

#include <memory>

#include "shapeopt/fem.hpp"
#include "shapeopt/mesh.hpp"
#include "shapeopt/random.hpp"

namespace shapeopt {

struct PdeSolution {
  NodalField y;
  NodalField p;
  Scenario scenario;
};

/// Deterministic measurement generated on a fixed target-shape mesh; a fixed
/// function of x, interpolated onto whatever mesh the optimizer currently has.
class TargetMeasurement {
 public:
  TargetMeasurement(TriMesh mesh, NodalField ybar, Scenario scenario);

  const TriMesh& mesh() const { return *mesh_; }
  const NodalField& ybar() const { return ybar_; }
  const Scenario& scenario() const { return scenario_; }
  const PointLocator& locator() const { return *locator_; }

 private:
  std::unique_ptr<TriMesh> mesh_;  // stable address for field/locator backrefs
  NodalField ybar_;
  Scenario scenario_;
  std::unique_ptr<PointLocator> locator_;
};

/// Nodal shape-derivative load: dJ[phi_a e_k] for every vertex a, zero outside
/// the active set (vertices with an interface-touching incident triangle) and
/// on the boundary.
struct ShapeDerivativeLoad {
  VectorField load;
  std::vector<uint8_t> active;  // per-vertex flag
};

NodalField solve_state(const TriMesh& mesh, const Scenario& scenario,
                       const SolverOptions& opts = {},
                       SolveDiagnostics* diag = nullptr);

NodalField solve_adjoint(const TriMesh& mesh, const Scenario& scenario,
                         const NodalField& y, const NodalField& ybar,
                         const SolverOptions& opts = {},
                         SolveDiagnostics* diag = nullptr);

double objective_value(const TriMesh& mesh, const NodalField& y,
                       const NodalField& ybar);

TargetMeasurement generate_target(TriMesh target_mesh, const Scenario& scenario,
                                  const SolverOptions& opts = {});

/// Interpolates ybar onto the current mesh nodes and shifts it to zero mean.
NodalField transfer_target(const TargetMeasurement& target, const TriMesh& mesh);

/// Source-mesh gradient of ybar evaluated at each current-mesh vertex. Feeding
/// this into the derivative assembly makes it the exact derivative of the
/// discrete objective under node motion (the transferred nodal values change
/// with the source-mesh gradient, not the re-interpolated one).
VectorField transfer_target_gradient(const TargetMeasurement& target,
                                     const TriMesh& mesh);

/// Per-vertex flags for supp(U) touching the interface.
std::vector<uint8_t> active_vertices(const TriMesh& mesh);

/// With ybar_grad (from transfer_target_gradient) the measurement term uses
/// the source-mesh gradient at the nodes; without it, the current-mesh P1
/// gradient of ybar (first-order consistent but not FD-exact).
ShapeDerivativeLoad assemble_shape_derivative(const TriMesh& mesh,
                                              const Scenario& scenario,
                                              const NodalField& y,
                                              const NodalField& p,
                                              const NodalField& ybar,
                                              const VectorField* ybar_grad = nullptr);

}  // namespace shapeopt
