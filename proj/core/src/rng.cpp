#include "tensorclust/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tensorclust {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed) {
  // Scramble so that nearby user seeds give unrelated twister states.
  std::uint64_t s = seed;
  std::seed_seq seq{static_cast<unsigned>(splitmix64(s) & 0xffffffffu),
                    static_cast<unsigned>(splitmix64(s) >> 32),
                    static_cast<unsigned>(splitmix64(s) & 0xffffffffu),
                    static_cast<unsigned>(splitmix64(s) >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seeded_engine(seed)) {}

Rng Rng::for_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(derive_seed(seed, stream));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (stream * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL);
  return splitmix64(s);
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("Rng::uniform: lo must be < hi");
  return lo + (hi - lo) * uniform();
}

double Rng::normal() {
  // u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("Rng::exponential: rate must be positive");
  return -std::log1p(-uniform()) / rate;
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("Rng::gamma: shape and rate must be positive");
  }
  if (shape < 1.0) {
    // Boost from shape + 1; u^(1/shape) can underflow to 0 only for
    // astronomically small shape, floor keeps downstream logs finite.
    const double u = uniform();
    const double boost = gamma(shape + 1.0, 1.0) * std::pow(u, 1.0 / shape);
    return std::max(boost, 1e-300) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

long Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("Rng::poisson: mean must be finite and nonnegative");
  }
  if (mean == 0.0) return 0;
  // Additivity split keeps the product method exact for any mean without
  // exp(-mean) underflow.
  if (mean > 30.0) {
    const double half = mean / 2.0;
    return poisson(half) + poisson(mean - half);
  }
  const double limit = std::exp(-mean);
  double prod = 1.0;
  long k = 0;
  do {
    ++k;
    prod *= uniform();
  } while (prod > limit);
  return k - 1;
}

int Rng::uniform_int(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("Rng::uniform_int: empty range");
  const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  return lo + static_cast<int>(next_u64() % range);
}

int Rng::categorical_from_log(std::span<const double> logw) {
  if (logw.empty()) throw std::invalid_argument("categorical_from_log: empty weight vector");
  double m = -std::numeric_limits<double>::infinity();
  for (double w : logw) {
    if (std::isnan(w)) throw std::runtime_error("categorical_from_log: NaN weight");
    m = std::max(m, w);
  }
  if (m == -std::numeric_limits<double>::infinity()) {
    throw std::runtime_error("categorical_from_log: all conditional weights vanished");
  }
  double total = 0.0;
  for (double w : logw) total += std::exp(w - m);
  const double u = uniform() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    cum += std::exp(logw[i] - m);
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(logw.size() - 1);
}

Eigen::VectorXd Rng::dirichlet(std::span<const double> alpha) {
  if (alpha.empty()) throw std::invalid_argument("dirichlet: empty concentration vector");
  Eigen::VectorXd out(static_cast<Eigen::Index>(alpha.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] > 0.0)) throw std::invalid_argument("dirichlet: concentrations must be positive");
    // Floor keeps occupied weights strictly positive so log priors stay finite.
    const double g = std::max(gamma(alpha[i], 1.0), 1e-300);
    out[static_cast<Eigen::Index>(i)] = g;
    total += g;
  }
  return out / total;
}

}  // namespace tensorclust
