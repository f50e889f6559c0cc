#include "shapeopt/random.hpp"

#include <algorithm>
#include <cmath>

namespace shapeopt {

namespace {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(uint64_t master_seed, Purpose purpose,
                           uint64_t iteration, uint64_t sample_index) {
  uint64_t key = master_seed;
  key = splitmix64(key) ^ (static_cast<uint64_t>(purpose) * 0xd6e8feb86659fd93ULL);
  key = splitmix64(key) ^ (iteration * 0xa0761d6478bd642fULL);
  key = splitmix64(key) ^ (sample_index * 0xe7037ed1a0b428dbULL);
  for (auto& s : s_) s = splitmix64(key);
}

uint64_t RandomStream::next_u64() {
  // xoshiro256**
  uint64_t result = rotl(s_[1] * 5, 7) * 9;
  uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RandomStream::uniform01() {
  return (next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  have_spare_ = true;
  return u * m;
}

double sample_truncated_normal(const TruncNormalParams& params,
                               RandomStream& stream) {
  params.check();
  // A near-degenerate window pins the value; rejection would never land in it.
  double span = std::max({std::fabs(params.lo), std::fabs(params.hi), 1.0});
  if (params.hi - params.lo < 1e-12 * span)
    return 0.5 * (params.lo + params.hi);
  // Rejection from the untruncated normal. Windows in this problem sit well
  // within a few sigma, so acceptance is high; bail out instead of hanging
  // when it is not.
  const int max_tries = 2000000;  // acceptance below ~1e-6 is an input error
  for (int i = 0; i < max_tries; ++i) {
    double x = params.mean + params.stddev * stream.normal();
    if (x >= params.lo && x <= params.hi) return x;
  }
  throw std::runtime_error(
      "truncated normal rejection sampling: acceptance probability too low");
}

double truncated_normal_cdf(const TruncNormalParams& params, double x) {
  auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  double a = (params.lo - params.mean) / params.stddev;
  double b = (params.hi - params.mean) / params.stddev;
  double z = (x - params.mean) / params.stddev;
  if (x <= params.lo) return 0.0;
  if (x >= params.hi) return 1.0;
  return (phi(z) - phi(a)) / (phi(b) - phi(a));
}

namespace {

double sample_component(const ComponentSpec& c, RandomStream& stream) {
  if (c.deterministic()) return c.value;
  return sample_truncated_normal(*c.dist, stream);
}

}  // namespace

Scenario sample_scenario(const ScenarioDistribution& dist, RandomStream& stream) {
  Scenario s;
  // Fixed component order keeps a given stream's draws stable.
  double k0 = sample_component(dist.kappa0, stream);
  double kint = sample_component(dist.kappa_int, stream);
  s.g_value = sample_component(dist.g, stream);
  s.f_value = sample_component(dist.f, stream);
  if (!(k0 > 0.0) || !(kint > 0.0))
    throw std::invalid_argument("conductivities must be positive");
  s.kappa.assign(dist.num_inclusions + 1, kint);
  s.kappa[0] = k0;
  return s;
}

}  // namespace shapeopt
