#include "shapeopt/config.hpp"

#include <cmath>
#include <sstream>

namespace shapeopt {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& key, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ", key '" + key +
                    "': " + msg);
}

double parse_number(int line, const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    fail(line, key, "not a number: '" + v + "'");
  }
}

int parse_int(int line, const std::string& key, const std::string& v) {
  double d = parse_number(line, key, v);
  if (d != std::floor(d)) fail(line, key, "not an integer: '" + v + "'");
  return static_cast<int>(d);
}

}  // namespace

ComponentSpec parse_component(const std::string& value) {
  std::string v = trim(value);
  auto open = v.find('(');
  if (open == std::string::npos || v.back() != ')')
    throw ConfigError("expected const(v) or trunc_normal(mean,std,lo,hi), got '" +
                      v + "'");
  std::string name = trim(v.substr(0, open));
  std::string args = v.substr(open + 1, v.size() - open - 2);
  std::vector<double> nums;
  std::istringstream as(args);
  std::string tok;
  while (std::getline(as, tok, ',')) {
    tok = trim(tok);
    try {
      nums.push_back(std::stod(tok));
    } catch (...) {
      throw ConfigError("bad numeric argument '" + tok + "' in '" + v + "'");
    }
  }
  if (name == "const") {
    if (nums.size() != 1) throw ConfigError("const() takes one argument");
    return ComponentSpec::constant(nums[0]);
  }
  if (name == "trunc_normal") {
    if (nums.size() != 4)
      throw ConfigError("trunc_normal() takes (mean, std, lo, hi)");
    ComponentSpec c = ComponentSpec::truncated(nums[0], nums[1], nums[2], nums[3]);
    try {
      c.dist->check();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    return c;
  }
  throw ConfigError("unknown distribution '" + name + "'");
}

ConfigFile parse_config(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    RunConfig& r = cfg.run;

    try {
      if (key == "mesh") {
        cfg.mesh_path = value;
      } else if (key == "target") {
        cfg.target_prefix = value;
      } else if (key == "out") {
        cfg.out_dir = value;
      } else if (key == "iters") {
        r.iterations = parse_int(line_no, key, value);
        if (r.iterations < 1) fail(line_no, key, "must be >= 1");
      } else if (key == "seed") {
        r.seed = static_cast<uint64_t>(parse_number(line_no, key, value));
      } else if (key == "step.rule") {
        if (value == "robbins_monro")
          r.step.kind = StepRuleKind::RobbinsMonro;
        else if (value == "armijo")
          r.step.kind = StepRuleKind::Armijo;
        else if (value == "damped_armijo")
          r.step.kind = StepRuleKind::DampedArmijo;
        else
          fail(line_no, key, "must be robbins_monro | armijo | damped_armijo");
      } else if (key == "step.alpha") {
        r.step.alpha = parse_number(line_no, key, value);
      } else if (key == "step.rho") {
        r.step.rho = parse_number(line_no, key, value);
      } else if (key == "step.c") {
        r.step.c = parse_number(line_no, key, value);
      } else if (key == "step.exponent") {
        r.step.exponent = parse_number(line_no, key, value);
      } else if (key == "step.damping") {
        r.step.damping_factor = parse_number(line_no, key, value);
      } else if (key == "step.period") {
        r.step.damping_period = parse_int(line_no, key, value);
      } else if (key == "mu_min") {
        r.mu_min = parse_number(line_no, key, value);
      } else if (key == "mu_max") {
        r.mu_max = parse_number(line_no, key, value);
      } else if (key == "estimate.m") {
        r.estimate_m = parse_int(line_no, key, value);
      } else if (key == "estimate.every") {
        r.estimate_every = parse_int(line_no, key, value);
      } else if (key == "snapshot.every") {
        r.snapshot_every = parse_int(line_no, key, value);
      } else if (key == "solver.tol") {
        r.solver_tol = parse_number(line_no, key, value);
      } else if (key == "guard") {
        if (value == "on")
          r.guard = true;
        else if (value == "off")
          r.guard = false;
        else
          fail(line_no, key, "must be on | off");
      } else if (key == "kappa0") {
        r.distribution.kappa0 = parse_component(value);
      } else if (key == "kappa_int") {
        r.distribution.kappa_int = parse_component(value);
      } else if (key == "g") {
        r.distribution.g = parse_component(value);
      } else if (key == "f") {
        r.distribution.f = parse_component(value);
      } else {
        fail(line_no, key, "unknown key");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(line_no, key, e.what());
    }
  }
  return cfg;
}

}  // namespace shapeopt
