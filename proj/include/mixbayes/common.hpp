#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixbayes {

using Vec = std::vector<double>;
using Rng = std::mt19937_64;

/// Mixture index: rank-1 laws use only [0], bivariate index laws use both.
using Idx = std::array<double, 2>;

struct Interval {
  double lo;
  double hi;
};
using Box = std::vector<Interval>;

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// Series argument outside (or on) the convergence region.
class NonConvergent : public std::runtime_error {
 public:
  explicit NonConvergent(const std::string& what) : std::runtime_error("NonConvergent: " + what) {}
};

/// Requested tolerance could not be met within the evaluation budget.
class ToleranceNotMet : public std::runtime_error {
 public:
  explicit ToleranceNotMet(const std::string& what) : std::runtime_error("ToleranceNotMet: " + what) {}
};

/// Posterior weight normalizer is zero or diverges.
class ImproperPosterior : public std::runtime_error {
 public:
  explicit ImproperPosterior(const std::string& what) : std::runtime_error("ImproperPosterior: " + what) {}
};

/// Cap on single-series terms; MIXBAYES_MAX_TERMS overrides. Double series use 4x.
inline long max_series_terms() {
  if (const char* s = std::getenv("MIXBAYES_MAX_TERMS")) {
    const long v = std::atol(s);
    if (v > 0) return v;
  }
  return 1000000L;
}

inline double log_sum_exp(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_sum_exp(const std::vector<double>& v) {
  double m = neg_inf;
  for (double x : v) m = std::max(m, x);
  if (m == neg_inf) return neg_inf;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace mixbayes
