#pragma once

#include <cmath>
#include <optional>

#include "mixbayes/common.hpp"
#include "mixbayes/quadrature.hpp"

// Scalar special-function kernel: generalized hypergeometric series pFq,
// Tricomi's confluent function of the second kind, and the Appell double
// series F2 and F4, all with explicit truncation-error control. Everything
// downstream (power-series mixing laws, Kummer/McKay normalizers) sits on
// these four evaluators.

namespace mixbayes {

/// Parameters of a pFq-type series: upper a_1..a_p, lower b_1..b_q (> 0), argument.
struct HypParams {
  std::vector<double> upper;
  std::vector<double> lower;
  double arg = 0.0;
};

struct SeriesResult {
  double value = 0.0;
  double log_value = neg_inf;  ///< log of value (finite even when value overflows)
  double tail_bound = 0.0;     ///< bound on the truncation error
  long terms_used = 1;
};

/// (alpha)_m = Gamma(alpha+m)/Gamma(alpha); direct product for small m so the
/// recurrence (a)_{m+1} = (a)_m (a+m) holds to the last bit.
inline double pochhammer(double alpha, long m) {
  require(alpha > 0, "pochhammer: alpha must be > 0");
  require(m >= 0, "pochhammer: m must be >= 0");
  if (m <= 128) {
    double p = 1.0;
    for (long i = 0; i < m; ++i) {
      p *= alpha + static_cast<double>(i);
      if (!std::isfinite(p)) break;
    }
    if (std::isfinite(p)) return p;
  }
  return std::exp(std::lgamma(alpha + static_cast<double>(m)) - std::lgamma(alpha));
}

/// log Gamma(alpha+s) - log Gamma(alpha) for real shift s (alpha, alpha+s > 0).
inline double log_pochhammer(double alpha, double s) {
  require(alpha > 0 && alpha + s > 0, "log_pochhammer: out of domain");
  return std::lgamma(alpha + s) - std::lgamma(alpha);
}

namespace detail {

// Sum a series with positive terms, t_0 = 1 and t_{k+1} = t_k * ratio(k).
// Stops once both the next term and a geometric tail majorant drop below
// tol * max(1, sum). ratio_limit is the asymptotic term ratio (|z| for
// p = q+1, 0 for p <= q): the majorant rate is the max of the measured and
// asymptotic ratios over a short lookahead.
template <typename RatioFn>
SeriesResult sum_positive_series(RatioFn ratio, double ratio_limit, double tol, long cap,
                                 const char* who) {
  double t = 1.0, sum = 1.0, shift = 0.0;
  long k = 0;
  while (true) {
    const double r = ratio(k);
    t *= r;
    sum += t;
    ++k;
    if (sum > 1e250) {
      const double s = std::log(sum);
      shift += s;
      t /= sum;
      sum = 1.0;
    }
    if (k >= 8) {
      double rstar = ratio_limit;
      for (long j = 0; j < 4; ++j) rstar = std::max(rstar, ratio(k + j));
      if (rstar < 1.0) {
        const double tail = t * rstar / (1.0 - rstar);
        const double scale = tol * std::max(1.0, sum);
        if (t <= scale && tail <= scale) {
          SeriesResult res;
          res.log_value = std::log(sum) + shift;
          res.value = std::exp(res.log_value);
          res.tail_bound = tail * std::exp(shift);
          res.terms_used = k + 1;
          return res;
        }
      }
    }
    if (k >= cap)
      throw ToleranceNotMet(std::string(who) + ": term cap " + std::to_string(cap) + " reached");
  }
}

inline SeriesResult series_result_from_log(double log_value, double tail, long terms) {
  SeriesResult r;
  r.log_value = log_value;
  r.value = std::exp(log_value);
  r.tail_bound = tail;
  r.terms_used = terms;
  return r;
}

inline double sum_params(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

}  // namespace detail

SeriesResult genhyp(const HypParams& p, double tol);

namespace detail {

inline double pfq_ratio(const HypParams& p, long k) {
  double r = p.arg / static_cast<double>(k + 1);
  for (double a : p.upper) r *= a + static_cast<double>(k);
  for (double b : p.lower) r /= b + static_cast<double>(k);
  return r;
}

// Direct summation when term signs may alternate (negative upper parameters
// after a transform, or small negative arguments with no transform match).
// The tail bound uses term magnitudes once |ratio| < 1 with lookahead.
inline SeriesResult sum_general_series(const HypParams& p, double tol, long cap,
                                       const char* who) {
  double t = 1.0, sum = 1.0;
  long k = 0;
  const double limit = (p.upper.size() == p.lower.size() + 1) ? std::abs(p.arg) : 0.0;
  while (true) {
    t *= pfq_ratio(p, k);
    sum += t;
    ++k;
    if (t == 0.0) {  // terminating series
      SeriesResult r;
      r.value = sum;
      r.log_value = std::log(std::abs(sum));
      r.tail_bound = 0.0;
      r.terms_used = k + 1;
      return r;
    }
    if (k >= 8) {
      double rstar = limit;
      for (long j = 0; j < 4; ++j) rstar = std::max(rstar, std::abs(pfq_ratio(p, k + j)));
      if (rstar < 1.0) {
        const double tail = std::abs(t) * rstar / (1.0 - rstar);
        const double scale = tol * std::max(1.0, std::abs(sum));
        if (std::abs(t) <= scale && tail <= scale) {
          SeriesResult r;
          r.value = sum;
          r.log_value = std::log(std::abs(sum));
          r.tail_bound = tail;
          r.terms_used = k + 1;
          return r;
        }
      }
    }
    if (k >= cap)
      throw ToleranceNotMet(std::string(who) + ": term cap reached");
  }
}

// p = q+1 series exactly at z = 1 with delta = sum(lower) - sum(upper) > 0:
// terms decay like k^{-(1+delta)}; integral-test majorant with a safety factor.
inline SeriesResult sum_gauss_boundary(const HypParams& p, double tol, long cap) {
  const double delta = sum_params(p.lower) - sum_params(p.upper);
  double t = 1.0, sum = 1.0;
  long k = 0;
  while (true) {
    t *= pfq_ratio(p, k);
    sum += t;
    ++k;
    if (k >= 16) {
      const double tail = 2.0 * t * static_cast<double>(k) / delta;
      const double scale = tol * std::max(1.0, sum);
      if (t <= scale && tail <= scale)
        return series_result_from_log(std::log(sum), tail, k + 1);
    }
    if (k >= cap) throw ToleranceNotMet("genhyp: term cap reached at unit argument");
  }
}

}  // namespace detail

/// Generalized hypergeometric series pFq(a; b; z) with tail_bound <= tol
/// (interpreted relative to the value once the value exceeds 1). Negative
/// arguments are routed through the Kummer (1F1) and Pfaff (2F1)
/// transformations so that the summed series has positive terms.
inline SeriesResult genhyp(const HypParams& p, double tol) {
  require(tol > 0, "genhyp: tol must be > 0");
  for (double b : p.lower) require(b > 0, "genhyp: lower parameters must be > 0");
  const std::size_t np = p.upper.size(), nq = p.lower.size();
  const double z = p.arg;
  const long cap = max_series_terms();

  if (z == 0.0) return detail::series_result_from_log(0.0, 0.0, 1);

  if (np > nq + 1) throw NonConvergent("genhyp: p > q+1 with nonzero argument");
  if (np == nq + 1) {
    if (std::abs(z) > 1.0) throw NonConvergent("genhyp: |arg| > 1 for p = q+1");
    if (z == 1.0) {
      const double delta = detail::sum_params(p.lower) - detail::sum_params(p.upper);
      if (delta <= 0) throw NonConvergent("genhyp: arg = 1 needs sum(b) > sum(a)");
      if (np == 2) {  // Gauss summation
        const double a = p.upper[0], b = p.upper[1], c = p.lower[0];
        const double lg = std::lgamma(c) + std::lgamma(c - a - b) - std::lgamma(c - a) -
                          std::lgamma(c - b);
        return detail::series_result_from_log(lg, 0.0, 1);
      }
      return detail::sum_gauss_boundary(p, tol, cap);
    }
    if (std::abs(z) == 1.0) throw NonConvergent("genhyp: arg = -1 boundary rejected");
  }

  bool positive_uppers = true;
  for (double a : p.upper) positive_uppers = positive_uppers && a > 0;

  if (z > 0 && positive_uppers) {
    const double limit = (np == nq + 1) ? z : 0.0;
    return detail::sum_positive_series([&](long k) { return detail::pfq_ratio(p, k); }, limit,
                                       tol, cap, "genhyp");
  }

  // z < 0 transforms keeping terms positive
  if (np == 0 && nq == 0) {  // 0F0(z) = exp(z) = 1 / 0F0(-z)
    HypParams q = p;
    q.arg = -z;
    SeriesResult r = detail::sum_positive_series([&](long k) { return detail::pfq_ratio(q, k); },
                                                 0.0, tol, cap, "genhyp");
    const double lv = -r.log_value;
    SeriesResult out = detail::series_result_from_log(lv, r.tail_bound * std::exp(2 * lv),
                                                      r.terms_used);
    return out;
  }
  if (np == 1 && nq == 1 && positive_uppers && p.lower[0] - p.upper[0] > 0) {
    // Kummer: 1F1(a;b;z) = e^z 1F1(b-a;b;-z)
    HypParams q{{p.lower[0] - p.upper[0]}, {p.lower[0]}, -z};
    SeriesResult r = genhyp(q, tol);
    const double lv = z + r.log_value;
    return detail::series_result_from_log(lv, r.tail_bound * std::exp(z), r.terms_used);
  }
  if (np == 2 && nq == 1 && positive_uppers) {
    // Pfaff: 2F1(a,b;c;z) = (1-z)^{-b} 2F1(c-a,b;c;z/(z-1))
    double a = p.upper[0], b = p.upper[1];
    const double c = p.lower[0];
    if (c - a <= 0 && c - b > 0) std::swap(a, b);
    if (c - a > 0) {
      HypParams q{{c - a, b}, {c}, z / (z - 1.0)};
      SeriesResult r = genhyp(q, tol);
      const double lf = -b * std::log1p(-z);
      return detail::series_result_from_log(lf + r.log_value, r.tail_bound * std::exp(lf),
                                            r.terms_used);
    }
  }
  return detail::sum_general_series(p, tol, cap, "genhyp");
}

/// psi(g1, g2, g3) = (1/Gamma(g1)) Int_0^inf t^{g1-1} (1+t)^{g2-g1-1} e^{-g3 t} dt,
/// evaluated by adaptive quadrature of the defining integral. g3 = 0 is
/// admitted when g2 < 1 (Beta-integral closed form), covering the extended
/// Kummer family.
inline SeriesResult tricomi_psi(double g1, double g2, double g3, double tol = 1e-12) {
  require(g1 > 0, "tricomi_psi: g1 must be > 0");
  require(g3 >= 0, "tricomi_psi: g3 must be >= 0");
  require(tol > 0, "tricomi_psi: tol must be > 0");
  if (g3 == 0.0) {
    require(g2 < 1, "tricomi_psi: g3 = 0 requires g2 < 1");
    const double lg = std::lgamma(1.0 - g2) - std::lgamma(g1 + 1.0 - g2);
    return detail::series_result_from_log(lg, 0.0, 1);
  }
  const double lgam = std::lgamma(g1);
  auto core = [&](double t) {
    return std::exp((g2 - g1 - 1.0) * std::log1p(t) - g3 * t - lgam);
  };
  // [0,1]: remove the t^{g1-1} endpoint singularity exactly via t = w^{1/g1}
  QuadResult p1;
  if (g1 < 1.0) {
    p1 = quad1d([&](double w) { return core(std::pow(w, 1.0 / g1)) / g1; }, 0.0, 1.0, tol / 2);
  } else {
    p1 = quad1d([&](double t) { return std::pow(t, g1 - 1.0) * core(t); }, 0.0, 1.0, tol / 2);
  }
  QuadResult p2 = quad1d([&](double t) { return std::exp((g1 - 1.0) * std::log(t)) * core(t); },
                         1.0, inf, tol / 2);
  SeriesResult r;
  r.value = p1.value + p2.value;
  r.log_value = std::log(r.value);
  r.tail_bound = p1.abs_err + p2.abs_err;
  r.terms_used = p1.evals + p2.evals;
  return r;
}

namespace detail {

// Shared double-series driver for the Appell functions. term_log(m, n) must
// return the log of the (positive) term; diagonals are accumulated until a
// geometric majorant on the diagonal sums falls below tolerance.
template <typename TermLog>
SeriesResult appell_sum(TermLog term_log, double diag_limit, double tol, const char* who) {
  const long cap = 4 * max_series_terms();
  double shift = term_log(0, 0);  // = 0 for all Appell cases, kept for clarity
  double sum = 1.0;
  double prev_diag = 1.0;
  long terms = 1;
  for (long s = 1;; ++s) {
    double diag = 0.0;
    for (long m = 0; m <= s; ++m) diag += std::exp(term_log(m, s - m) - shift);
    sum += diag;
    terms += s + 1;
    if (sum > 1e250) {
      const double ls = std::log(sum);
      shift += ls;
      diag /= sum;
      prev_diag /= sum;
      sum = 1.0;
    }
    if (s >= 4 && diag > 0.0) {
      const double rstar = std::max(diag / prev_diag, diag_limit);
      if (rstar < 1.0) {
        const double tail = diag * rstar / (1.0 - rstar);
        const double scale = tol * std::max(1.0, sum);
        if (diag <= scale && tail <= scale) {
          SeriesResult r;
          r.log_value = std::log(sum) + shift;
          r.value = std::exp(r.log_value);
          r.tail_bound = tail * std::exp(shift);
          r.terms_used = terms;
          return r;
        }
      }
    }
    if (s >= 4 && diag == 0.0 && prev_diag == 0.0) {
      // both arguments zero beyond the first rows: series terminated
      SeriesResult r;
      r.log_value = std::log(sum) + shift;
      r.value = std::exp(r.log_value);
      r.tail_bound = 0.0;
      r.terms_used = terms;
      return r;
    }
    prev_diag = diag;
    if (terms >= cap) throw ToleranceNotMet(std::string(who) + ": term cap reached");
  }
}

inline double xlogy(long n, double y) { return n == 0 ? 0.0 : n * std::log(y); }

}  // namespace detail

/// Appell F2(g1; g2, g3; g4, g5; w, z) for w, z >= 0 with w + z < 1.
inline SeriesResult appell_f2(double g1, double g2, double g3, double g4, double g5, double w,
                              double z, double tol = 1e-12) {
  require(g1 > 0 && g2 > 0 && g3 > 0 && g4 > 0 && g5 > 0, "appell_f2: parameters must be > 0");
  require(w >= 0 && z >= 0, "appell_f2: arguments must be >= 0");
  require(tol > 0, "appell_f2: tol must be > 0");
  if (w + z >= 1.0) throw NonConvergent("appell_f2: w + z >= 1");
  const double lg1 = std::lgamma(g1), lg2 = std::lgamma(g2), lg3 = std::lgamma(g3),
               lg4 = std::lgamma(g4), lg5 = std::lgamma(g5);
  auto term_log = [&](long m, long n) {
    return std::lgamma(g1 + m + n) - lg1 + std::lgamma(g2 + m) - lg2 + std::lgamma(g3 + n) -
           lg3 - (std::lgamma(g4 + m) - lg4) - (std::lgamma(g5 + n) - lg5) -
           std::lgamma(m + 1.0) - std::lgamma(n + 1.0) + detail::xlogy(m, w) +
           detail::xlogy(n, z);
  };
  return detail::appell_sum(term_log, w + z, tol, "appell_f2");
}

/// Appell F4(g1, g2; g3, g4; w, z) for w, z >= 0 with sqrt(w) + sqrt(z) < 1.
inline SeriesResult appell_f4(double g1, double g2, double g3, double g4, double w, double z,
                              double tol = 1e-12) {
  require(g1 > 0 && g2 > 0 && g3 > 0 && g4 > 0, "appell_f4: parameters must be > 0");
  require(w >= 0 && z >= 0, "appell_f4: arguments must be >= 0");
  require(tol > 0, "appell_f4: tol must be > 0");
  const double rad = std::sqrt(w) + std::sqrt(z);
  if (rad >= 1.0) throw NonConvergent("appell_f4: sqrt(w) + sqrt(z) >= 1");
  const double lg1 = std::lgamma(g1), lg2 = std::lgamma(g2), lg3 = std::lgamma(g3),
               lg4 = std::lgamma(g4);
  auto term_log = [&](long m, long n) {
    return std::lgamma(g1 + m + n) - lg1 + std::lgamma(g2 + m + n) - lg2 -
           (std::lgamma(g3 + n) - lg3) - (std::lgamma(g4 + m) - lg4) - std::lgamma(m + 1.0) -
           std::lgamma(n + 1.0) + detail::xlogy(m, w) + detail::xlogy(n, z);
  };
  return detail::appell_sum(term_log, rad * rad, tol, "appell_f4");
}

}  // namespace mixbayes
