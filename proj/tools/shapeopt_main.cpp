#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "shapeopt/config.hpp"
#include "shapeopt/io.hpp"

namespace fs = std::filesystem;
using namespace shapeopt;

namespace {

std::vector<InclusionSpec> parse_inclusions(const std::vector<std::string>& circles,
                                            const std::vector<std::string>& ellipses) {
  std::vector<InclusionSpec> incs;
  auto split = [](const std::string& s) {
    std::vector<double> nums;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) nums.push_back(std::stod(tok));
    return nums;
  };
  for (const auto& c : circles) {
    auto n = split(c);
    if (n.size() != 3) throw std::runtime_error("--circle expects cx,cy,r");
    incs.push_back({n[0], n[1], n[2], n[2]});
  }
  for (const auto& e : ellipses) {
    auto n = split(e);
    if (n.size() != 4) throw std::runtime_error("--ellipse expects cx,cy,rx,ry");
    incs.push_back({n[0], n[1], n[2], n[3]});
  }
  return incs;
}

int cmd_mesh_gen(int resolution, const std::vector<std::string>& circles,
                 const std::vector<std::string>& ellipses, const std::string& out) {
  TriMesh mesh = generate_mesh(resolution, parse_inclusions(circles, ellipses));
  write_file(out, write_mesh(mesh));
  MeshQualityReport q = triangle_quality(mesh);
  std::printf("wrote %s: %d vertices, %d triangles, %zu interface edges\n",
              out.c_str(), mesh.num_vertices(), mesh.num_triangles(),
              mesh.interface_edges.size());
  std::printf("quality: min %.4f mean %.4f max %.4f inverted %d\n", q.min_ratio,
              q.mean_ratio, q.max_ratio, q.inverted_count);
  return 0;
}

int cmd_generate_target(const std::string& mesh_path, double kappa0,
                        double kappa_int, double g, double f,
                        const std::string& out) {
  TriMesh mesh = parse_mesh(read_file(mesh_path));
  int max_region = 0;
  for (const Triangle& t : mesh.triangles) max_region = std::max(max_region, t.region);
  Scenario sc;
  sc.kappa.assign(max_region + 1, kappa_int);
  sc.kappa[0] = kappa0;
  sc.g_value = g;
  sc.f_value = f;
  TargetMeasurement target = generate_target(std::move(mesh), sc);
  save_target(target, out);
  std::vector<double> w = nodal_integral_weights(target.mesh());
  double integral = dot(w, target.ybar().values());
  std::printf("wrote %s.mesh and %s.vals; integral of ybar = %.3e\n", out.c_str(),
              out.c_str(), integral);
  return 0;
}

int cmd_optimize(const std::string& config_path, long seed_override,
                 const std::string& out_override, bool no_guard) {
  ConfigFile cfg = parse_config(read_file(config_path));
  if (seed_override >= 0) cfg.run.seed = static_cast<uint64_t>(seed_override);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (no_guard) cfg.run.guard = false;
  if (cfg.mesh_path.empty()) throw ConfigError("config missing key 'mesh'");
  if (cfg.target_prefix.empty()) throw ConfigError("config missing key 'target'");

  TriMesh mesh = parse_mesh(read_file(cfg.mesh_path));
  int max_region = 0;
  for (const Triangle& t : mesh.triangles) max_region = std::max(max_region, t.region);
  cfg.run.distribution.num_inclusions = std::max(1, max_region);
  TargetMeasurement target = load_target(cfg.target_prefix, Scenario{});
  fs::create_directories(cfg.out_dir);

  std::string csv = csv_header();
  SnapshotCallback snap = [&](const IterationRecord& rec, const IterationSnapshot& s) {
    char name[64];
    std::snprintf(name, sizeof(name), "snapshot_%05d", rec.n);
    write_file(cfg.out_dir + "/" + name + ".vtk",
               write_vtk(s.mesh, s.y, s.p, s.mu, s.V));
    write_file(cfg.out_dir + "/" + name + ".mesh", write_mesh(s.mesh));
  };
  RunResult run = run_optimization(mesh, target, cfg.run, snap);
  for (const IterationRecord& rec : run.history) csv += csv_row(rec);
  write_file(cfg.out_dir + "/convergence.csv", csv);
  write_file(cfg.out_dir + "/final.mesh", write_mesh(run.final_mesh));

  std::string summary;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "iterations %zu\naborted %d\n",
                run.history.size(), run.aborted ? 1 : 0);
  summary += buf;
  if (!std::isnan(run.final_j_hat)) {
    std::snprintf(buf, sizeof(buf), "j_hat %.17g\nv_hat %.17g\nm %d\n",
                  run.final_j_hat, run.final_v_hat, cfg.run.estimate_m);
    summary += buf;
  }
  if (run.aborted) summary += "reason " + run.abort_reason + "\n";
  write_file(cfg.out_dir + "/summary.txt", summary);
  std::fputs(summary.c_str(), stdout);
  if (run.aborted) {
    std::fprintf(stderr, "run aborted: %s\n", run.abort_reason.c_str());
    return 1;
  }
  return 0;
}

int cmd_quality_report(const std::string& mesh_path, const std::string& csv_out) {
  TriMesh mesh = parse_mesh(read_file(mesh_path));
  MeshQualityReport q = triangle_quality(mesh);
  std::printf("triangles %d\nmin %.6f\nmean %.6f\nmax %.6f\ninverted %d\n",
              mesh.num_triangles(), q.min_ratio, q.mean_ratio, q.max_ratio,
              q.inverted_count);
  if (!csv_out.empty()) {
    std::string csv = "triangle,aspect_ratio\n";
    char buf[64];
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g\n", t + 1, q.aspect_ratio[t]);
      csv += buf;
    }
    write_file(csv_out, csv);
  }
  return q.inverted_count > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic shape-gradient interface identification"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("mesh-gen", "Generate a labeled unit-square mesh");
  int resolution = 39;
  std::vector<std::string> circles, ellipses;
  std::string gen_out = "mesh.mesh";
  gen->add_option("--resolution", resolution, "cells per side");
  gen->add_option("--circle", circles, "inclusion circle cx,cy,r (repeatable)");
  gen->add_option("--ellipse", ellipses, "inclusion ellipse cx,cy,rx,ry (repeatable)");
  gen->add_option("--out", gen_out, "output mesh file")->required();

  auto* tgt = app.add_subcommand("generate-target",
                                 "Solve the state on a target mesh and save it");
  std::string tgt_mesh, tgt_out = "target";
  double kappa0 = 1.5, kappa_int = 4.0, gval = 10.0, fval = 0.0;
  tgt->add_option("--mesh", tgt_mesh, "target mesh file")->required();
  tgt->add_option("--kappa0", kappa0, "outer conductivity");
  tgt->add_option("--kappa-int", kappa_int, "inclusion conductivity");
  tgt->add_option("--g", gval, "boundary flux");
  tgt->add_option("--f", fval, "volume source");
  tgt->add_option("--out", tgt_out, "output prefix")->required();

  auto* opt = app.add_subcommand("optimize", "Run the stochastic shape-gradient loop");
  std::string config_path, opt_out;
  long seed_override = -1;
  bool no_guard = false;
  opt->add_option("config", config_path, "run configuration file")->required();
  opt->add_option("--seed", seed_override, "override the master seed");
  opt->add_option("--out", opt_out, "override the output directory");
  opt->add_flag("--no-guard", no_guard, "disable the mesh-validity guard");

  auto* qr = app.add_subcommand("quality-report", "Aspect-ratio report for a mesh");
  std::string qr_mesh, qr_csv;
  qr->add_option("mesh", qr_mesh, "mesh file")->required();
  qr->add_option("--csv", qr_csv, "per-triangle CSV output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_mesh_gen(resolution, circles, ellipses, gen_out);
    if (tgt->parsed())
      return cmd_generate_target(tgt_mesh, kappa0, kappa_int, gval, fval, tgt_out);
    if (opt->parsed())
      return cmd_optimize(config_path, seed_override, opt_out, no_guard);
    if (qr->parsed()) return cmd_quality_report(qr_mesh, qr_csv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const MeshParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const FileError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
