#pragma once

#include <algorithm>
#include <cmath>
#include <queue>

#include "mixbayes/common.hpp"

// Adaptive Gauss-Kronrod quadrature on finite, semi-infinite and doubly
// infinite intervals, plus an iterated 2-d version for rectangles and the
// ordered wedge {0 < z1 < z2}. These are the referee used to certify every
// closed form in the library, so they report an explicit error estimate.

namespace mixbayes {

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;  ///< error estimate from Gauss/Kronrod differences
  long evals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1,1].
inline constexpr std::array<double, 8> gk15_nodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> gk15_wk = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gk15_wg = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

inline Panel gk15(const std::function<double(double)>& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kron = 0, gauss = 0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * gk15_nodes[i];
    const double f1 = f(c - dx);
    const double f2 = (i == 7) ? f1 : f(c + dx);
    evals += (i == 7) ? 1 : 2;
    const double fsum = (i == 7) ? f1 : f1 + f2;
    kron += gk15_wk[i] * fsum;
    if (i % 2 == 1) gauss += gk15_wg[i / 2] * fsum;
  }
  kron *= h;
  gauss *= h;
  const double diff = std::abs(kron - gauss);
  // QUADPACK-style sharpened estimate
  const double err = diff > 0 ? diff * std::min(1.0, std::pow(200.0 * diff / std::max(std::abs(kron), 1e-300), 1.5)) + 1e-300 : 1e-300;
  return Panel{a, b, kron, std::max(err, std::abs(kron) * 1e-15)};
}

inline QuadResult adapt_finite(const std::function<double(double)>& f, double a, double b,
                               double tol, int max_panels) {
  long evals = 0;
  std::priority_queue<Panel> heap;
  heap.push(gk15(f, a, b, evals));
  double total = heap.top().value;
  double err = heap.top().err;
  int n = 1;
  while (n < max_panels) {
    const double target = std::max({tol, 1e-14, 1e-12 * std::abs(total)});
    if (err <= target) break;
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted at double precision
      err -= worst.err;
      Panel dead = worst;
      dead.err = 0;
      heap.push(dead);
      continue;
    }
    Panel left = gk15(f, worst.a, mid, evals);
    Panel right = gk15(f, mid, worst.b, evals);
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  const double target = std::max({tol, 1e-14, 1e-12 * std::abs(total)});
  if (err > 100.0 * target)
    throw ToleranceNotMet("quad1d: estimated error " + std::to_string(err) + " above target " +
                          std::to_string(target));
  return QuadResult{total, err, evals};
}

}  // namespace detail

/// Integrate f over (a,b); either endpoint may be infinite. Endpoint
/// singularities must be integrable (the rule never samples endpoints).
inline QuadResult quad1d(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-10, int max_panels = 4000) {
  require(a < b, "quad1d: empty interval");
  if (std::isfinite(a) && std::isfinite(b)) {
    return detail::adapt_finite(f, a, b, tol, max_panels);
  }
  if (std::isfinite(a) && b == inf) {
    // t = a + u/(1-u)
    auto g = [&](double u) {
      const double om = 1.0 - u;
      return f(a + u / om) / (om * om);
    };
    return detail::adapt_finite(g, 0.0, 1.0, tol, max_panels);
  }
  if (a == neg_inf && std::isfinite(b)) {
    auto g = [&](double u) {
      const double om = 1.0 - u;
      return f(b - u / om) / (om * om);
    };
    return detail::adapt_finite(g, 0.0, 1.0, tol, max_panels);
  }
  // doubly infinite: t = u/(1-u^2) maps (-1,1) onto R
  auto g = [&](double u) {
    const double om = 1.0 - u * u;
    return f(u / om) * (1.0 + u * u) / (om * om);
  };
  return detail::adapt_finite(g, -1.0, 1.0, tol, max_panels);
}

struct Domain2 {
  Interval x;  ///< first coordinate (outer)
  Interval y;  ///< second coordinate
  bool wedge = false;  ///< integrate over {0 < x < y}; intervals ignored
};

/// Iterated integral of f(x, y) over a rectangle or the ordered wedge
/// {0 < z1 < z2}. The wedge uses the substitution z1 = t z2.
inline QuadResult quad2d(const std::function<double(double, double)>& f, const Domain2& dom,
                         double tol = 1e-8, int max_panels = 600) {
  long inner_evals = 0;
  double inner_err = 0;
  const double itol = tol / 10.0;
  if (dom.wedge) {
    auto outer = [&](double z2) {
      QuadResult r = quad1d([&](double t) { return f(t * z2, z2); }, 0.0, 1.0, itol, max_panels);
      inner_evals += r.evals;
      inner_err = std::max(inner_err, r.abs_err);
      return z2 * r.value;
    };
    QuadResult out = quad1d(outer, 0.0, inf, tol, max_panels);
    out.evals += inner_evals;
    out.abs_err += inner_err;
    return out;
  }
  auto outer = [&](double x) {
    QuadResult r = quad1d([&](double y) { return f(x, y); }, dom.y.lo, dom.y.hi, itol, max_panels);
    inner_evals += r.evals;
    inner_err = std::max(inner_err, r.abs_err);
    return r.value;
  };
  QuadResult out = quad1d(outer, dom.x.lo, dom.x.hi, tol, max_panels);
  out.evals += inner_evals;
  out.abs_err += inner_err;
  return out;
}

}  // namespace mixbayes
