#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapeopt {

/// Keyed deterministic stream: xoshiro256** seeded through splitmix64 from
/// (master seed, purpose, iteration, sample index). Distinct keys give
/// independent substreams; the sequence for a key never depends on what other
/// streams have drawn.
class RandomStream {
 public:
  enum class Purpose : uint64_t { Step = 1, Estimate = 2, Test = 3 };

  RandomStream(uint64_t master_seed, Purpose purpose, uint64_t iteration,
               uint64_t sample_index = 0);

  uint64_t next_u64();
  double uniform01();            // in [0,1)
  double normal();               // standard normal, Marsaglia polar method

 private:
  uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct TruncNormalParams {
  double mean = 0.0;
  double stddev = 1.0;
  double lo = 0.0;
  double hi = 1.0;

  void check() const {
    if (!(stddev > 0.0)) throw std::invalid_argument("stddev must be > 0");
    if (!(lo < hi)) throw std::invalid_argument("bounds must satisfy lo < hi");
  }
};

double sample_truncated_normal(const TruncNormalParams& params, RandomStream& stream);

/// Analytic CDF of the truncated normal (used by tests and diagnostics).
double truncated_normal_cdf(const TruncNormalParams& params, double x);

struct Scenario {
  std::vector<double> kappa;  // kappa[0] outer region, kappa[i] inclusion i
  double g_value = 0.0;       // Neumann flux on the outer boundary
  double f_value = 0.0;       // constant volume source
};

/// One scenario component: fixed value or truncated normal.
struct ComponentSpec {
  double value = 0.0;                       // used when dist is empty
  std::optional<TruncNormalParams> dist;

  static ComponentSpec constant(double v) { return {v, std::nullopt}; }
  static ComponentSpec truncated(double mean, double sd, double lo, double hi) {
    return {0.0, TruncNormalParams{mean, sd, lo, hi}};
  }
  bool deterministic() const { return !dist.has_value(); }
};

struct ScenarioDistribution {
  ComponentSpec kappa0 = ComponentSpec::constant(1.5);
  ComponentSpec kappa_int = ComponentSpec::constant(4.0);
  ComponentSpec g = ComponentSpec::constant(10.0);
  ComponentSpec f = ComponentSpec::constant(0.0);
  int num_inclusions = 1;   // kappa_int is shared by all inclusions
  bool deterministic() const {
    return kappa0.deterministic() && kappa_int.deterministic() &&
           g.deterministic() && f.deterministic();
  }
};

Scenario sample_scenario(const ScenarioDistribution& dist, RandomStream& stream);

}  // namespace shapeopt
