#include "shapeopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace shapeopt {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string write_vtk(const TriMesh& mesh, const NodalField& y, const NodalField& p,
                      const NodalField& mu, const VectorField& V) {
  std::ostringstream out;
  char buf[160];
  out << "# vtk DataFile Version 3.0\n"
      << "shape optimization snapshot\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec2& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", v.x, v.y);
    out << buf;
  }
  out << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (const Triangle& t : mesh.triangles)
    out << "3 " << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
  out << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) out << "5\n";

  out << "POINT_DATA " << mesh.num_vertices() << "\n";
  auto scalar = [&](const char* name, const NodalField& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", f[v]);
      out << buf;
    }
  };
  scalar("y", y);
  scalar("p", p);
  scalar("mu", mu);
  out << "VECTORS V double\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", V.x(v), V.y(v));
    out << buf;
  }

  MeshQualityReport q = triangle_quality(mesh);
  out << "CELL_DATA " << mesh.num_triangles() << "\n";
  out << "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (const Triangle& t : mesh.triangles) out << t.region << "\n";
  out << "SCALARS quality double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    double r = q.aspect_ratio[t];
    std::snprintf(buf, sizeof(buf), "%.17g\n", std::isnan(r) ? -1.0 : r);
    out << buf;
  }
  return out.str();
}

void save_target(const TargetMeasurement& target, const std::string& prefix) {
  write_file(prefix + ".mesh", write_mesh(target.mesh()));
  std::string vals;
  char buf[64];
  for (int v = 0; v < target.mesh().num_vertices(); ++v) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", target.ybar()[v]);
    vals += buf;
  }
  write_file(prefix + ".vals", vals);
}

TargetMeasurement load_target(const std::string& prefix, const Scenario& scenario) {
  TriMesh mesh = parse_mesh(read_file(prefix + ".mesh"));
  std::istringstream in(read_file(prefix + ".vals"));
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  if (vals.size() != static_cast<size_t>(mesh.num_vertices()))
    throw std::runtime_error("target values count does not match mesh " + prefix);
  NodalField ybar(mesh, std::move(vals));
  return TargetMeasurement(std::move(mesh), std::move(ybar), scenario);
}

std::string csv_header() {
  return "iter,step,J_sample,grad_norm_sq,V_l2,backtracks,min_quality,accepted,"
         "j_hat,v_hat\n";
}

std::string csv_row(const IterationRecord& rec) {
  char buf[320];
  auto opt = [](double v) {
    if (std::isnan(v)) return std::string();
    char b[48];
    std::snprintf(b, sizeof(b), "%.17g", v);
    return std::string(b);
  };
  std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%d,%s,%s\n",
                rec.n, rec.step, rec.j_sample, rec.grad_norm_sq, rec.v_l2,
                rec.backtracks, rec.min_quality, rec.accepted ? 1 : 0,
                opt(rec.j_hat).c_str(), opt(rec.v_hat).c_str());
  return buf;
}

}  // namespace shapeopt
