#include "shapeopt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "shapeopt/fem.hpp"

namespace shapeopt {

double Vec2::norm() const { return std::sqrt(x * x + y * y); }

double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

double TriMesh::area(int t) const {
  const Triangle& tr = triangles[t];
  const Vec2& p0 = vertices[tr.v[0]];
  const Vec2& p1 = vertices[tr.v[1]];
  const Vec2& p2 = vertices[tr.v[2]];
  return 0.5 * cross(p1 - p0, p2 - p0);
}

Vec2 TriMesh::centroid(int t) const {
  const Triangle& tr = triangles[t];
  const Vec2& p0 = vertices[tr.v[0]];
  const Vec2& p1 = vertices[tr.v[1]];
  const Vec2& p2 = vertices[tr.v[2]];
  return {(p0.x + p1.x + p2.x) / 3.0, (p0.y + p1.y + p2.y) / 3.0};
}

namespace {

Edge make_edge(int a, int b) {
  if (a > b) std::swap(a, b);
  return Edge{a, b};
}

bool edge_less(const Edge& l, const Edge& r) {
  return l.a != r.a ? l.a < r.a : l.b < r.b;
}

}  // namespace

void TriMesh::build_topology() {
  interface_edges.clear();
  on_boundary.assign(vertices.size(), 0);
  on_interface.assign(vertices.size(), 0);

  for (const Edge& e : boundary_edges) {
    on_boundary[e.a] = 1;
    on_boundary[e.b] = 1;
  }

  // Edge -> (region of first triangle, region of second triangle or -1)
  std::map<std::pair<int, int>, std::pair<int, int>> edges;
  for (const Triangle& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      Edge e = make_edge(t.v[k], t.v[(k + 1) % 3]);
      auto key = std::make_pair(e.a, e.b);
      auto it = edges.find(key);
      if (it == edges.end()) {
        edges.emplace(key, std::make_pair(t.region, -1));
      } else {
        it->second.second = t.region;
      }
    }
  }
  for (const auto& [key, regions] : edges) {
    if (regions.second >= 0 && regions.first != regions.second) {
      interface_edges.push_back(Edge{key.first, key.second});
      on_interface[key.first] = 1;
      on_interface[key.second] = 1;
    }
  }
}

// ---------------------------------------------------------------------------
// Parsing / writing

MeshParseError::MeshParseError(MeshError e) : err_(std::move(e)) {
  full_ = "line " + std::to_string(err_.line) + ": " + err_.message;
}

namespace {

struct LineReader {
  std::istringstream in;
  int line_no = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  // Next non-empty line with comments stripped; false at EOF.
  bool next(std::string& out) {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      auto end = raw.find_last_not_of(" \t\r");
      if (end == std::string::npos) continue;
      out = raw.substr(0, end + 1);
      return true;
    }
    return false;
  }
};

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw MeshParseError(MeshError{msg, line});
}

}  // namespace

TriMesh parse_mesh(const std::string& text) {
  TriMesh mesh;
  LineReader rd(text);
  std::string line;

  auto expect_section = [&](const char* name) {
    if (!rd.next(line) || line != name)
      parse_fail(rd.line_no, std::string("expected section ") + name);
  };
  auto read_count = [&]() {
    if (!rd.next(line)) parse_fail(rd.line_no, "expected count");
    long n = 0;
    try {
      n = std::stol(line);
    } catch (...) {
      parse_fail(rd.line_no, "malformed count '" + line + "'");
    }
    if (n < 0) parse_fail(rd.line_no, "negative count");
    return static_cast<int>(n);
  };

  expect_section("$Nodes");
  int n_nodes = read_count();
  mesh.vertices.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    if (!rd.next(line)) parse_fail(rd.line_no, "unexpected end of $Nodes");
    std::istringstream ls(line);
    int id;
    double x, y;
    if (!(ls >> id >> x >> y)) parse_fail(rd.line_no, "malformed node line");
    if (id < 1 || id > n_nodes) parse_fail(rd.line_no, "node id out of range");
    mesh.vertices[id - 1] = Vec2{x, y};
  }

  expect_section("$Triangles");
  int n_tris = read_count();
  mesh.triangles.resize(n_tris);
  for (int i = 0; i < n_tris; ++i) {
    if (!rd.next(line)) parse_fail(rd.line_no, "unexpected end of $Triangles");
    std::istringstream ls(line);
    int id, a, b, c, region;
    if (!(ls >> id >> a >> b >> c >> region))
      parse_fail(rd.line_no, "malformed triangle line");
    if (id < 1 || id > n_tris) parse_fail(rd.line_no, "triangle id out of range");
    for (int v : {a, b, c})
      if (v < 1 || v > n_nodes)
        parse_fail(rd.line_no, "vertex index out of range in triangle " +
                                   std::to_string(id));
    if (region < 0) parse_fail(rd.line_no, "negative region label");
    mesh.triangles[id - 1] = Triangle{{a - 1, b - 1, c - 1}, region};
    if (mesh.area(id - 1) <= 0.0)
      parse_fail(rd.line_no, "inverted triangle " + std::to_string(id));
  }

  expect_section("$BoundaryEdges");
  int n_edges = read_count();
  mesh.boundary_edges.resize(n_edges);
  // Count triangle-edge multiplicity to detect dangling boundary edges.
  std::map<std::pair<int, int>, int> edge_mult;
  for (const Triangle& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      Edge e = make_edge(t.v[k], t.v[(k + 1) % 3]);
      ++edge_mult[{e.a, e.b}];
    }
  for (int i = 0; i < n_edges; ++i) {
    if (!rd.next(line)) parse_fail(rd.line_no, "unexpected end of $BoundaryEdges");
    std::istringstream ls(line);
    int id, a, b;
    if (!(ls >> id >> a >> b)) parse_fail(rd.line_no, "malformed boundary edge line");
    if (id < 1 || id > n_edges) parse_fail(rd.line_no, "edge id out of range");
    for (int v : {a, b})
      if (v < 1 || v > n_nodes)
        parse_fail(rd.line_no, "vertex index out of range in edge " +
                                   std::to_string(id));
    Edge e = make_edge(a - 1, b - 1);
    auto it = edge_mult.find({e.a, e.b});
    if (it == edge_mult.end() || it->second != 1)
      parse_fail(rd.line_no, "dangling boundary edge " + std::to_string(id));
    mesh.boundary_edges[id - 1] = e;
  }

  mesh.build_topology();
  return mesh;
}

std::string write_mesh(const TriMesh& mesh) {
  std::string out;
  char buf[128];
  out += "$Nodes\n" + std::to_string(mesh.vertices.size()) + "\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g\n", i + 1,
                  mesh.vertices[i].x, mesh.vertices[i].y);
    out += buf;
  }
  out += "$Triangles\n" + std::to_string(mesh.triangles.size()) + "\n";
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const Triangle& t = mesh.triangles[i];
    std::snprintf(buf, sizeof(buf), "%zu %d %d %d %d\n", i + 1, t.v[0] + 1,
                  t.v[1] + 1, t.v[2] + 1, t.region);
    out += buf;
  }
  out += "$BoundaryEdges\n" + std::to_string(mesh.boundary_edges.size()) + "\n";
  for (size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu %d %d\n", i + 1,
                  mesh.boundary_edges[i].a + 1, mesh.boundary_edges[i].b + 1);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

// Scaled level: <0 inside, 0 on curve.
double inclusion_level(const InclusionSpec& inc, const Vec2& p) {
  double wx = (p.x - inc.cx) / inc.rx;
  double wy = (p.y - inc.cy) / inc.ry;
  return wx * wx + wy * wy - 1.0;
}

Vec2 snap_to_curve(const InclusionSpec& inc, const Vec2& p) {
  double wx = (p.x - inc.cx) / inc.rx;
  double wy = (p.y - inc.cy) / inc.ry;
  double r = std::sqrt(wx * wx + wy * wy);
  if (r < 1e-14) return {inc.cx + inc.rx, inc.cy};
  return {inc.cx + inc.rx * wx / r, inc.cy + inc.ry * wy / r};
}

}  // namespace

TriMesh generate_mesh(int resolution, const std::vector<InclusionSpec>& inclusions) {
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  const int R = resolution;
  const double h = 1.0 / R;

  // Precondition: curves strictly inside with margin 2h, pairwise disjoint
  // with margin 2h. Checked on dense curve samples.
  const int ns = 512;
  std::vector<std::vector<Vec2>> samples(inclusions.size());
  for (size_t k = 0; k < inclusions.size(); ++k) {
    for (int s = 0; s < ns; ++s) {
      double th = 2.0 * M_PI * s / ns;
      Vec2 p{inclusions[k].cx + inclusions[k].rx * std::cos(th),
             inclusions[k].cy + inclusions[k].ry * std::sin(th)};
      if (p.x < 2 * h || p.x > 1 - 2 * h || p.y < 2 * h || p.y > 1 - 2 * h)
        throw std::invalid_argument("inclusion " + std::to_string(k + 1) +
                                    " too close to the domain boundary");
      samples[k].push_back(p);
    }
  }
  for (size_t k = 0; k < inclusions.size(); ++k)
    for (size_t l = k + 1; l < inclusions.size(); ++l) {
      if (inclusion_level(inclusions[l], {inclusions[k].cx, inclusions[k].cy}) < 0 ||
          inclusion_level(inclusions[k], {inclusions[l].cx, inclusions[l].cy}) < 0)
        throw std::invalid_argument("inclusions overlap");
      double dmin = std::numeric_limits<double>::max();
      for (const Vec2& p : samples[k])
        for (const Vec2& q : samples[l])
          dmin = std::min(dmin, (p - q).norm());
      if (dmin < 2 * h) throw std::invalid_argument("inclusions closer than 2 cell widths");
    }

  TriMesh mesh;
  auto vid = [R](int i, int j) { return j * (R + 1) + i; };
  mesh.vertices.resize((R + 1) * (R + 1));
  for (int j = 0; j <= R; ++j)
    for (int i = 0; i <= R; ++i) mesh.vertices[vid(i, j)] = Vec2{i * h, j * h};

  // Per-vertex inclusion membership from the undeformed grid positions.
  std::vector<int> vertex_incl(mesh.vertices.size(), -1);
  for (size_t v = 0; v < mesh.vertices.size(); ++v)
    for (size_t k = 0; k < inclusions.size(); ++k)
      if (inclusion_level(inclusions[k], mesh.vertices[v]) < 0.0) {
        vertex_incl[v] = static_cast<int>(k);
        break;
      }

  for (int j = 0; j < R; ++j)
    for (int i = 0; i < R; ++i) {
      mesh.triangles.push_back(
          Triangle{{vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)}, 0});
      mesh.triangles.push_back(
          Triangle{{vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)}, 0});
    }

  std::vector<std::set<int>> neighbors(mesh.vertices.size());
  for (const Triangle& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      neighbors[t.v[k]].insert(t.v[(k + 1) % 3]);
      neighbors[t.v[k]].insert(t.v[(k + 2) % 3]);
    }

  // Label first: triangle belongs to inclusion k iff all three vertices do.
  std::vector<int> lab(mesh.triangles.size(), 0);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    int k = vertex_incl[mesh.triangles[t].v[0]];
    if (k >= 0 && vertex_incl[mesh.triangles[t].v[1]] == k &&
        vertex_incl[mesh.triangles[t].v[2]] == k)
      lab[t] = k + 1;
  }

  // Only the vertices on the boundary polygon of each labeled patch get
  // snapped onto the curve. A labeled triangle with all three vertices on the
  // polygon would flatten once snapped; drop such triangles from the patch
  // until none remain.
  std::map<std::pair<int, int>, std::vector<int>> edge_tris;
  for (size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int e = 0; e < 3; ++e) {
      int a = mesh.triangles[t].v[e];
      int b = mesh.triangles[t].v[(e + 1) % 3];
      edge_tris[std::minmax(a, b)].push_back(static_cast<int>(t));
    }
  std::vector<int> poly_incl(mesh.vertices.size(), -1);
  auto compute_polygon = [&]() {
    std::fill(poly_incl.begin(), poly_incl.end(), -1);
    for (const auto& [edge, tris] : edge_tris) {
      int a = lab[tris[0]];
      int b = tris.size() == 2 ? lab[tris[1]] : 0;
      if (a == b) continue;
      int k = std::max(a, b) - 1;
      poly_incl[edge.first] = k;
      poly_incl[edge.second] = k;
    }
  };
  compute_polygon();
  for (int pass = 0; pass < 64; ++pass) {
    bool changed = false;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
      if (lab[t] == 0) continue;
      const Triangle& tr = mesh.triangles[t];
      if (poly_incl[tr.v[0]] < 0 || poly_incl[tr.v[1]] < 0 || poly_incl[tr.v[2]] < 0)
        continue;
      lab[t] = 0;
      changed = true;
    }
    if (!changed) break;
    compute_polygon();
  }
  for (size_t k = 0; k < inclusions.size(); ++k)
    if (std::count(lab.begin(), lab.end(), static_cast<int>(k) + 1) == 0)
      throw std::invalid_argument("resolution too coarse for inclusion " +
                                  std::to_string(k + 1));
  std::vector<Vec2> grid_pos = mesh.vertices;
  for (size_t v = 0; v < mesh.vertices.size(); ++v)
    if (poly_incl[v] >= 0)
      mesh.vertices[v] = snap_to_curve(inclusions[poly_incl[v]], mesh.vertices[v]);

  // Snapping can crowd the vertices next to the polygon; relax those (two edge
  // layers, polygon and square boundary fixed) by neighbor averaging.
  std::vector<uint8_t> movable(mesh.vertices.size(), 0);
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (poly_incl[v] < 0) continue;
    for (int n1 : neighbors[v]) {
      if (poly_incl[n1] < 0) movable[n1] = 1;
      for (int n2 : neighbors[n1])
        if (poly_incl[n2] < 0) movable[n2] = 1;
    }
  }
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Vec2& p = mesh.vertices[v];
    if (p.x < 0.5 * h || p.x > 1 - 0.5 * h || p.y < 0.5 * h || p.y > 1 - 0.5 * h)
      movable[v] = 0;
  }
  for (int pass = 0; pass < 30; ++pass) {
    std::vector<Vec2> next = mesh.vertices;
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
      if (!movable[v]) continue;
      Vec2 avg{0, 0};
      for (int nb : neighbors[v]) avg = avg + mesh.vertices[nb];
      next[v] = avg * (1.0 / neighbors[v].size());
    }
    mesh.vertices = std::move(next);
  }

  // Where the curve bends sharply relative to h, snapping can still fold a
  // triangle. Back the involved moved vertices off toward their grid
  // positions until every triangle has positive area.
  for (int pass = 0; pass < 60; ++pass) {
    bool bad = false;
    for (const Triangle& tr : mesh.triangles) {
      const Vec2& a = mesh.vertices[tr.v[0]];
      const Vec2& b = mesh.vertices[tr.v[1]];
      const Vec2& c = mesh.vertices[tr.v[2]];
      double area2 = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
      if (area2 > 1e-12 * h * h) continue;
      bad = true;
      for (int k = 0; k < 3; ++k) {
        int v = tr.v[k];
        if (poly_incl[v] >= 0 || movable[v])
          mesh.vertices[v] = (mesh.vertices[v] + grid_pos[v]) * 0.5;
      }
    }
    if (!bad) break;
  }

  for (size_t t = 0; t < mesh.triangles.size(); ++t) mesh.triangles[t].region = lab[t];

  for (int i = 0; i < R; ++i) {
    mesh.boundary_edges.push_back(make_edge(vid(i, 0), vid(i + 1, 0)));
    mesh.boundary_edges.push_back(make_edge(vid(i, R), vid(i + 1, R)));
    mesh.boundary_edges.push_back(make_edge(vid(0, i), vid(0, i + 1)));
    mesh.boundary_edges.push_back(make_edge(vid(R, i), vid(R, i + 1)));
  }

  mesh.build_topology();
  auto violations = validate_mesh(mesh);
  if (!violations.empty())
    throw std::runtime_error("generated mesh invalid: " + violations[0].what);
  return mesh;
}

// ---------------------------------------------------------------------------
// Quality

MeshQualityReport triangle_quality(const TriMesh& mesh) {
  MeshQualityReport rep;
  rep.aspect_ratio.resize(mesh.num_triangles(),
                          std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  int valid = 0;
  rep.min_ratio = std::numeric_limits<double>::max();
  rep.max_ratio = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double A = mesh.area(t);
    if (A <= 0.0) {
      ++rep.inverted_count;
      continue;
    }
    const Triangle& tr = mesh.triangles[t];
    double a = (mesh.vertices[tr.v[1]] - mesh.vertices[tr.v[2]]).norm();
    double b = (mesh.vertices[tr.v[2]] - mesh.vertices[tr.v[0]]).norm();
    double c = (mesh.vertices[tr.v[0]] - mesh.vertices[tr.v[1]]).norm();
    double s = 0.5 * (a + b + c);
    // circumradius / (2 * inradius) = a*b*c*s / (8*A^2)
    double ratio = a * b * c * s / (8.0 * A * A);
    rep.aspect_ratio[t] = ratio;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    sum += ratio;
    ++valid;
  }
  rep.mean_ratio = valid > 0 ? sum / valid : 0.0;
  if (valid == 0) rep.min_ratio = 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Deformation and validation

TriMesh deform_mesh(const TriMesh& mesh, const VectorField& field, double t) {
  TriMesh out = mesh;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out.vertices[v].x = mesh.vertices[v].x - t * field.x(v);
    out.vertices[v].y = mesh.vertices[v].y - t * field.y(v);
  }
  return out;
}

std::vector<MeshViolation> validate_mesh(const TriMesh& mesh) {
  std::vector<MeshViolation> violations;
  double mean_area = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) mean_area += std::fabs(mesh.area(t));
  mean_area /= std::max(1, mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double a = mesh.area(t);
    if (a <= 0.0)
      violations.push_back({"inverted triangle " + std::to_string(t + 1), t});
    else if (a <= 1e-6 * mean_area)
      violations.push_back({"degenerate triangle " + std::to_string(t + 1), t});
  }

  // Interface loops: every interface vertex must carry exactly two interface
  // edges, otherwise a loop is pinched or broken.
  std::map<int, int> degree;
  for (const Edge& e : mesh.interface_edges) {
    ++degree[e.a];
    ++degree[e.b];
  }
  for (const auto& [v, d] : degree)
    if (d != 2)
      violations.push_back(
          {"interface vertex " + std::to_string(v + 1) + " has degree " +
               std::to_string(d),
           -1});
  for (const Edge& e : mesh.interface_edges)
    if (!mesh.on_boundary.empty() && (mesh.on_boundary[e.a] || mesh.on_boundary[e.b]))
      violations.push_back({"interface touches the domain boundary", -1});
  return violations;
}

// ---------------------------------------------------------------------------
// Point location

namespace {

std::array<double, 3> barycentric(const TriMesh& mesh, int t, const Vec2& p) {
  const Triangle& tr = mesh.triangles[t];
  const Vec2& p0 = mesh.vertices[tr.v[0]];
  const Vec2& p1 = mesh.vertices[tr.v[1]];
  const Vec2& p2 = mesh.vertices[tr.v[2]];
  double A = cross(p1 - p0, p2 - p0);
  double l0 = cross(p1 - p, p2 - p) / A;
  double l1 = cross(p2 - p, p0 - p) / A;
  return {l0, l1, 1.0 - l0 - l1};
}

}  // namespace

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(mesh) {
  if (mesh.num_triangles() == 0) throw std::invalid_argument("empty mesh");
  int n = std::max(1, static_cast<int>(std::sqrt(mesh.num_triangles() / 2.0)));
  nx_ = ny_ = n;
  double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Vec2& v : mesh.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  x0_ = xmin;
  y0_ = ymin;
  dx_ = (xmax - xmin) / nx_;
  dy_ = (ymax - ymin) / ny_;
  if (dx_ <= 0) dx_ = 1;
  if (dy_ <= 0) dy_ = 1;
  bins_.resize(nx_ * ny_);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tr = mesh.triangles[t];
    double txmin = xmax, txmax = xmin, tymin = ymax, tymax = ymin;
    for (int v : tr.v) {
      txmin = std::min(txmin, mesh.vertices[v].x);
      txmax = std::max(txmax, mesh.vertices[v].x);
      tymin = std::min(tymin, mesh.vertices[v].y);
      tymax = std::max(tymax, mesh.vertices[v].y);
    }
    int i0 = std::clamp(static_cast<int>((txmin - x0_) / dx_), 0, nx_ - 1);
    int i1 = std::clamp(static_cast<int>((txmax - x0_) / dx_), 0, nx_ - 1);
    int j0 = std::clamp(static_cast<int>((tymin - y0_) / dy_), 0, ny_ - 1);
    int j1 = std::clamp(static_cast<int>((tymax - y0_) / dy_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) bins_[j * nx_ + i].push_back(t);
  }
}

PointLocation PointLocator::locate(const Vec2& p) const {
  const double tol = 1e-12;
  int i = std::clamp(static_cast<int>((p.x - x0_) / dx_), 0, nx_ - 1);
  int j = std::clamp(static_cast<int>((p.y - y0_) / dy_), 0, ny_ - 1);
  for (int t : bins_[j * nx_ + i]) {
    auto b = barycentric(mesh_, t, p);
    if (b[0] >= -tol && b[1] >= -tol && b[2] >= -tol)
      return {t, b, false};
  }
  // Not in the candidate bin: exhaustive containment pass, then nearest
  // triangle with clamped coordinates.
  for (int t = 0; t < mesh_.num_triangles(); ++t) {
    auto b = barycentric(mesh_, t, p);
    if (b[0] >= -tol && b[1] >= -tol && b[2] >= -tol)
      return {t, b, false};
  }
  int best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (int t = 0; t < mesh_.num_triangles(); ++t) {
    Vec2 c = mesh_.centroid(t);
    double d = (c - p).norm();
    if (d < best_d) {
      best_d = d;
      best = t;
    }
  }
  auto b = barycentric(mesh_, best, p);
  double sum = 0;
  for (double& l : b) {
    l = std::max(l, 0.0);
    sum += l;
  }
  for (double& l : b) l /= sum;
  return {best, b, true};
}

PointLocation locate_point(const TriMesh& mesh, const Vec2& p) {
  if (mesh.num_triangles() == 0) throw std::invalid_argument("empty mesh");
  const double tol = 1e-12;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto b = barycentric(mesh, t, p);
    if (b[0] >= -tol && b[1] >= -tol && b[2] >= -tol)
      return {t, b, false};
  }
  int best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double d = (mesh.centroid(t) - p).norm();
    if (d < best_d) {
      best_d = d;
      best = t;
    }
  }
  auto b = barycentric(mesh, best, p);
  double sum = 0;
  for (double& l : b) {
    l = std::max(l, 0.0);
    sum += l;
  }
  for (double& l : b) l /= sum;
  return {best, b, true};
}

}  // namespace shapeopt
