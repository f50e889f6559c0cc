#pragma once

#include <string>

#include "shapeopt/optimizer.hpp"

namespace shapeopt {

/// Parsed run configuration file (flat key=value, '#' comments). Every parse
/// error names the offending key and line.
struct ConfigFile {
  std::string mesh_path;
  std::string target_prefix;
  std::string out_dir = "run";
  RunConfig run;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ConfigFile parse_config(const std::string& text);

/// Distribution literal: `const(v)` or `trunc_normal(mean, std, lo, hi)`.
ComponentSpec parse_component(const std::string& value);

}  // namespace shapeopt
