#pragma once

#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Dense>

namespace tensorclust {

// Deterministic random source. Every sampler is hand-rolled on top of
// mt19937_64 because the standard library's distribution objects are
// implementation-defined; (data, config, seed) must pin a chain bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for worker k (replicate, chain) derived by splitmix
  // scrambling, so parallel replicates never share draws.
  static Rng for_stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);
  double normal();                        // Box-Muller, no spare caching
  double exponential(double rate);
  double gamma(double shape, double rate);  // Marsaglia-Tsang
  long poisson(double mean);
  int uniform_int(int lo, int hi);        // inclusive bounds

  // Index draw proportional to exp(logw[i]); guarded by max-shift.
  // Throws when every entry is -inf (all conditional weights vanished).
  int categorical_from_log(std::span<const double> logw);

  Eigen::VectorXd dirichlet(std::span<const double> alpha);

 private:
  std::mt19937_64 engine_;
};

// Seed for worker `stream` under a base seed, same scrambling as for_stream.
// Used where a config wants a plain seed value (replicate harness, CLI).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace tensorclust
