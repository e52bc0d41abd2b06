#pragma once

#include <span>

namespace tensorclust {

// Thread-safe log-gamma. glibc's lgamma writes the global signgam, which is a
// data race once chains run on a worker pool.
double log_gamma_fn(double x);

double log_factorial(long n);

// log(exp(a) + exp(b)), safe for -inf arguments.
double log_add_exp(double a, double b);
double log_sum_exp(std::span<const double> v);

// log of k * (k-1) * ... * (k-t+1); -inf when k < t.
double log_falling_factorial(int k, int t);
// log of x * (x+1) * ... * (x+n-1) for x > 0.
double log_rising_factorial(double x, int n);

// Shape-rate parameterization.
double gamma_log_pdf(double x, double shape, double rate);

}  // namespace tensorclust
