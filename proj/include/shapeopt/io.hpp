#pragma once

#include <map>
#include <string>

#include "shapeopt/fem.hpp"
#include "shapeopt/mesh.hpp"
#include "shapeopt/optimizer.hpp"
#include "shapeopt/shape_calculus.hpp"

namespace shapeopt {

class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Legacy ASCII VTK unstructured grid with point data y, p, mu, V and cell
/// data region, quality.
std::string write_vtk(const TriMesh& mesh, const NodalField& y, const NodalField& p,
                      const NodalField& mu, const VectorField& V);

/// Target measurement on disk: <prefix>.mesh plus <prefix>.vals (one decimal
/// per line, 1-based vertex order).
void save_target(const TargetMeasurement& target, const std::string& prefix);
TargetMeasurement load_target(const std::string& prefix, const Scenario& scenario);

std::string csv_header();
std::string csv_row(const IterationRecord& rec);

}  // namespace shapeopt
