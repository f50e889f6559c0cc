#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace shapeopt {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const;
};

double cross(const Vec2& a, const Vec2& b);

struct Triangle {
  std::array<int, 3> v;  // vertex indices, CCW
  int region = 0;        // 0 = outer domain, 1..N = inclusions
};

struct Edge {
  int a = 0;
  int b = 0;  // a < b after normalization
};

/// Inclusion boundary curve: ellipse (rx == ry gives a circle).
struct InclusionSpec {
  double cx = 0.5;
  double cy = 0.5;
  double rx = 0.2;
  double ry = 0.2;
};

/// Conforming triangulation of the unit square with region labels.
/// Interface edges (edges separating triangles of different regions) are
/// derived from connectivity and stay fixed under deformation.
class TriMesh {
 public:
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> boundary_edges;
  std::vector<Edge> interface_edges;       // derived
  std::vector<uint8_t> on_boundary;        // per-vertex flag
  std::vector<uint8_t> on_interface;       // per-vertex flag

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  double area(int t) const;                 // signed area
  Vec2 centroid(int t) const;

  /// Recomputes interface edges and vertex flags from connectivity.
  void build_topology();
};

struct MeshQualityReport {
  std::vector<double> aspect_ratio;  // circumradius / (2 * inradius), NaN if inverted
  double min_ratio = 0.0;
  double mean_ratio = 0.0;
  double max_ratio = 0.0;
  int inverted_count = 0;
};

struct MeshViolation {
  std::string what;
  int triangle = -1;
};

struct PointLocation {
  int triangle = -1;
  std::array<double, 3> bary{};
  bool extrapolated = false;
};

struct MeshError {
  std::string message;
  int line = 0;
};

TriMesh parse_mesh(const std::string& text);       // throws MeshParseError
std::string write_mesh(const TriMesh& mesh);       // 17-significant-digit coords

class MeshParseError : public std::exception {
 public:
  explicit MeshParseError(MeshError e);
  const char* what() const noexcept override { return full_.c_str(); }
  const MeshError& error() const { return err_; }

 private:
  MeshError err_;
  std::string full_;
};

/// Structured grid of the unit square with the vertex ring nearest each
/// inclusion curve snapped onto it; triangles labeled inside/outside.
TriMesh generate_mesh(int resolution, const std::vector<InclusionSpec>& inclusions);

MeshQualityReport triangle_quality(const TriMesh& mesh);

class VectorField;  // fem.hpp
TriMesh deform_mesh(const TriMesh& mesh, const VectorField& field, double t);

std::vector<MeshViolation> validate_mesh(const TriMesh& mesh);

/// Point location with a uniform-grid accelerator built on first use per call
/// site; see PointLocator for amortized queries.
PointLocation locate_point(const TriMesh& mesh, const Vec2& p);

/// Grid-binned locator for repeated queries against a fixed mesh.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh);
  PointLocation locate(const Vec2& p) const;

 private:
  const TriMesh& mesh_;
  int nx_ = 0, ny_ = 0;
  double x0_ = 0, y0_ = 0, dx_ = 1, dy_ = 1;
  std::vector<std::vector<int>> bins_;
};

}  // namespace shapeopt
