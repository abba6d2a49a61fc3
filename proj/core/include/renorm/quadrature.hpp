#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace renorm {

using RealFn = std::function<double(double)>;

struct Quad {
  double value = 0.0;
  double err = 0.0;      // reported bound, meant to be honest not tight
  bool converged = true; // false when the requested tolerance was not met
};

// Adaptive Gauss-Kronrod on a finite interval.
inline Quad integrate(const RealFn& f, double a, double b, double tol) {
  Quad q;
  if (a == b) return q;
  double err = 0;
  q.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 14, tol, &err);
  q.err = err;
  q.converged = (err <= std::max(tol, tol * std::abs(q.value)) * 4 + 1e-300);
  return q;
}

// tanh-sinh for integrable endpoint singularities on [a,b].
inline Quad integrate_endpoint_singular(const RealFn& f, double a, double b,
                                        double tol) {
  boost::math::quadrature::tanh_sinh<double> ts;
  Quad q;
  double err = 0, l1 = 0;
  q.value = ts.integrate(f, a, b, tol, &err, &l1);
  q.err = err * std::max(1.0, l1);
  q.converged = std::isfinite(q.value);
  return q;
}

// [a, infinity) for rapidly decaying integrands.
inline Quad integrate_to_inf(const RealFn& f, double a, double tol) {
  boost::math::quadrature::exp_sinh<double> es;
  Quad q;
  double err = 0, l1 = 0;
  q.value = es.integrate([&](double u) { return f(a + u); }, tol, &err, &l1);
  q.err = err * std::max(1.0, l1);
  q.converged = std::isfinite(q.value);
  return q;
}

// One-sided sweep of dyadic annuli [R 2^{-k-1}, R 2^{-k}] toward an interior
// singular point at 0. On each octave the integrand is smooth, so a fixed
// 30-point Gauss rule is near machine precision and its distance from the
// 15-point value is a realistic panel error. The panel values of a power-law
// times smooth integrand decay geometrically; after the measured ratio
// stabilizes the remaining tail r v/(1-r) is summed analytically, and the
// error bound carries the mismatch between successive tail predictions, so
// the sweep stops after a few panels with an honest bound even for exponents
// close to the divergence threshold. Panels that stop decaying for a run of
// octaves signal a non-integrable or logarithmically divergent integrand and
// set *diverged.
inline Quad integrate_annular_to_zero(const RealFn& f, double R, double tol,
                                      int max_panels = 220, bool* diverged = nullptr) {
  using boost::math::quadrature::gauss;
  Quad total;
  if (diverged) *diverged = false;
  double prev_v = std::numeric_limits<double>::quiet_NaN();
  double prev_pred = std::numeric_limits<double>::quiet_NaN();
  int stuck = 0, zeros = 0;
  for (int k = 0; k < max_panels; ++k) {
    double hi = R * std::ldexp(1.0, -k);
    double lo = hi * 0.5;
    double v = gauss<double, 30>::integrate(f, lo, hi);
    double coarse = gauss<double, 15>::integrate(f, lo, hi);
    if (!std::isfinite(v)) {
      total.converged = false;
      if (diverged) *diverged = true;
      return total;
    }
    double perr = std::abs(v - coarse) + 1e-16 * std::abs(v);
    total.value += v;
    total.err += perr;
    double mag = std::abs(v);
    if (mag == 0) {
      if (++zeros >= 3 && k > 8) {
        total.converged = total.err <= 4.0 * tol + 1e-300;
        return total;
      }
      prev_v = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    zeros = 0;
    if (std::isfinite(prev_v) && prev_v != 0) {
      if (mag < std::abs(prev_v) * 0.9995) {
        stuck = 0;
        double r = v / prev_v;
        double tail = v * r / (1.0 - r);
        if (std::isfinite(prev_pred)) {
          double mismatch = std::abs(prev_pred - (v + tail));
          if (k >= 4 && mismatch + perr < tol * 0.5) {
            total.value += tail;
            total.err += 2.0 * mismatch + 1e-16 * std::abs(tail);
            total.converged = total.err <= 4.0 * tol + 1e-300;
            return total;
          }
        }
        prev_pred = tail;
      } else {
        prev_pred = std::numeric_limits<double>::quiet_NaN();
        if (++stuck >= 6 && k >= 12) {
          total.converged = false;
          if (diverged) *diverged = true;
          return total;
        }
      }
    }
    prev_v = v;
  }
  total.converged = false;
  return total;
}

// Int_0^1 dl/l g(l), computed in v = log l over descending width-2 panels.
// g must decay like a positive power of l at 0 (g ~ C l^rate); once panels
// decay geometrically the remaining tail C e^{rate v}/rate is summed
// analytically from the measured ratio and the value is corrected by it.
inline Quad integrate_loglambda(const RealFn& g, double tol,
                                int max_panels = 240) {
  Quad total;
  const double width = 2.0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < max_panels; ++k) {
    double vhi = -width * k;
    double vlo = vhi - width;
    Quad p = integrate([&](double v) { return g(std::exp(v)); }, vlo, vhi,
                       tol * 0.25);
    total.value += p.value;
    total.err += p.err;
    double mag = std::abs(p.value);
    if (std::isfinite(prev) && prev > 0 && mag > 0 && mag < prev * 0.9999) {
      double r = mag / prev;
      double tail = p.value * r / (1.0 - r);
      if (std::abs(tail) < tol * 0.5) {
        total.value += tail;
        total.err += 0.1 * std::abs(tail) + tol * 0.25;
        return total;
      }
    }
    if (mag == 0 && k > 6) return total;
    prev = mag;
  }
  total.converged = false;
  return total;
}

// Neville polynomial extrapolation of (x_i, y_i) to x = 0. Used for the
// geometric epsilon-damping sequences, whose values are smooth in epsilon.
inline double extrapolate_to_zero(const std::vector<double>& xs,
                                  const std::vector<double>& ys) {
  std::size_t n = xs.size();
  if (n == 0 || ys.size() != n) throw std::invalid_argument("extrapolate_to_zero: bad input");
  std::vector<double> t = ys;
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i + j < n; ++i) {
      double den = xs[i] - xs[i + j];
      t[i] = ((0.0 - xs[i + j]) * t[i] - (0.0 - xs[i]) * t[i + 1]) / den;
    }
  }
  return t[0];
}

}  // namespace renorm
