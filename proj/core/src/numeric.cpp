#include "tensorclust/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tensorclust {

double log_gamma_fn(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_factorial(long n) {
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  return log_gamma_fn(static_cast<double>(n) + 1.0);
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_falling_factorial(int k, int t) {
  if (t < 0) throw std::invalid_argument("log_falling_factorial: t < 0");
  if (k < t) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (int m = 0; m < t; ++m) s += std::log(static_cast<double>(k - m));
  return s;
}

double log_rising_factorial(double x, int n) {
  if (!(x > 0.0)) throw std::invalid_argument("log_rising_factorial: x must be positive");
  if (n < 0) throw std::invalid_argument("log_rising_factorial: n < 0");
  return log_gamma_fn(x + n) - log_gamma_fn(x);
}

double gamma_log_pdf(double x, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("gamma_log_pdf: shape and rate must be positive");
  }
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - log_gamma_fn(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

}  // namespace tensorclust
