#include "renorm/mellin.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

#include "renorm/polyfit.hpp"
#include "renorm/quadrature.hpp"

// The weighted scale integral of a log-power symbol t against a probe w is
//
//   T(mu) = int_0^1 dl/l l^mu G(l),  G(l) = l sum_s int_a^b t(s l u) psi(s u)
//                                           w(s l u) du,  s = +-1,
//
// with u running over the window annulus of each side. Everything here keys
// off the small-scale behavior of G. A graded term c |h|^alpha log^p|h|
// contributes
//
//   G_term(l) = c l^(alpha+1) sum_q C(p,q) log^q(l)
//               int u^alpha log^(p-q)(u) psi(s u) w(s l u) du,
//
// and expanding w about 0 to order M turns the u-integral into fixed window
// moments plus a probe remainder vanishing to order M+1. The moment part
// integrates against l^(mu-1) log^q(l) in closed form,
//
//   int_0^1 l^(x-1) log^q(l) dl = (-1)^q q! / x^(q+1),
//
// which carries the entire pole structure; the remainder part converges on a
// strip that widens with M and is integrated on log-scale panels. The direct
// branch skips the expansion and integrates l^(mu-1) G(l) as is. Both
// branches share one precomputed node set, so contour sums and ring limits
// re-weight the same data with exp(mu v) instead of re-integrating.

namespace renorm::mel {
namespace {

using boost::math::quadrature::gauss;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return b;
}

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

void validate(const LogPowerSymbol& t) {
  if (t.jordan < 1 || t.jordan > 3)
    throw std::invalid_argument("jordan grading must be 1, 2 or 3");
  if (t.trunc < 0) throw std::invalid_argument("trunc must be nonnegative");
  for (const SymbolTerm& tm : t.terms) {
    if (tm.k < 0 || tm.k > t.trunc)
      throw std::invalid_argument("term grade outside [0, trunc]");
    if (tm.logpow < 0 || tm.logpow + 1 > t.jordan)
      throw std::invalid_argument("term log power outside the jordan grading");
  }
  if (t.remainder && t.remainder_degree + 1e-9 < t.omega + t.trunc + 1)
    throw std::invalid_argument(
        "remainder degree must be at least omega + trunc + 1");
}

// int_a^b u^beta log^r(u) psi(s u) du over one side's annulus
double annulus_moment(const CutoffPair& p, double beta, int r, bool neg) {
  const double a = neg ? p.a_neg : p.a_pos;
  const double b = neg ? p.b_neg : p.b_pos;
  const double s = neg ? -1.0 : 1.0;
  return integrate(
             [&](double u) {
               return std::pow(u, beta) * ipow(std::log(u), r) * p.psi(s * u);
             },
             a, b, 1e-13)
      .value;
}

// distance from the singular point to the probe support; 0 when it straddles
double probe_gap(const TestFunction& w) {
  if (w.support_lo() > 0) return w.support_lo();
  if (w.support_hi() < 0) return -w.support_hi();
  return 0.0;
}

// Window integrals in u. psi is flat at the window edges and the integrand
// is analytic inside for most nodes, where a fixed split rule is already at
// machine precision. A probe support edge falling strictly inside the window
// is flat to all orders and spoils fixed rules, so those nodes refine
// adaptively instead.
bool edge_inside(const TestFunction& w, double lo, double hi) {
  return (w.support_lo() > lo && w.support_lo() < hi) ||
         (w.support_hi() > lo && w.support_hi() < hi);
}

template <class F>
double window_quad(double a, double b, bool adapt, const F& f) {
  if (adapt) return integrate(f, a, b, 1e-12).value;
  double m = 0.5 * (a + b);
  return gauss<double, 30>::integrate(f, a, m) +
         gauss<double, 30>::integrate(f, m, b);
}

struct PoleGroup {
  double x = 0.0;           // pole at mu = -x
  std::vector<double> amp;  // contribution sum_q amp[q] / (mu + x)^(q+1)
};

struct Ctx {
  const LogPowerSymbol* t = nullptr;
  const CutoffPair* pair = nullptr;
  const TestFunction* w = nullptr;
  bool continued = false;
  int taylor = -1;                    // probe expansion order M
  std::function<double(double)> rem;  // probe Taylor remainder of order M
  std::vector<PoleGroup> poles;
  std::vector<double> vs, ws, ds;  // nodes of int e^{mu v} D(e^v) dv, v <= 0
};

// D(l) = l^{1-mu} x (integrand of the direct branch)
double direct_density(const Ctx& c, double lam) {
  const CutoffPair& p = *c.pair;
  const TestFunction& w = *c.w;
  double total = 0.0;
  for (int side = 0; side < 2; ++side) {
    const bool neg = side == 1;
    const double s = neg ? -1.0 : 1.0;
    const double a = neg ? p.a_neg : p.a_pos;
    const double b = neg ? p.b_neg : p.b_pos;
    const double h1 = neg ? -lam * b : lam * a;
    const double h2 = neg ? -lam * a : lam * b;
    if (w.support_hi() <= h1 || w.support_lo() >= h2) continue;
    total += window_quad(a, b, edge_inside(w, h1, h2), [&](double u) {
      return c.t->density(s * lam * u) * p.psi(s * u) * w.value(s * lam * u);
    });
  }
  return lam * total;
}

// D(l) = G(l) minus the probe-expansion model whose scale integral is the
// explicit pole part; the probe remainder keeps the subtraction exact at
// depth instead of cancelling two near-equal floats
double continued_density(const Ctx& c, double lam) {
  const LogPowerSymbol& t = *c.t;
  const CutoffPair& p = *c.pair;
  const double lnl = std::log(lam);
  double total = 0.0;
  for (const SymbolTerm& tm : t.terms) {
    const double alpha = t.omega + tm.k;
    const bool neg = tm.negative_side;
    const double s = neg ? -1.0 : 1.0;
    const double a = neg ? p.a_neg : p.a_pos;
    const double b = neg ? p.b_neg : p.b_pos;
    const double h1 = neg ? -lam * b : lam * a;
    const double h2 = neg ? -lam * a : lam * b;
    // with no surviving expansion coefficients the subtracted model is zero
    // and the integrand carries the probe's own support
    if (c.poles.empty() &&
        (c.w->support_hi() <= h1 || c.w->support_lo() >= h2))
      continue;
    const bool adapt = edge_inside(*c.w, h1, h2);
    const double lpow = std::pow(lam, alpha + 1.0);
    for (int q = 0; q <= tm.logpow; ++q) {
      const int r = tm.logpow - q;
      double integral = window_quad(a, b, adapt, [&](double u) {
        return std::pow(u, alpha) * ipow(std::log(u), r) * p.psi(s * u) *
               c.rem(s * lam * u);
      });
      total += tm.coef * binom(tm.logpow, q) * ipow(lnl, q) * lpow * integral;
    }
  }
  if (t.remainder) {
    for (int side = 0; side < 2; ++side) {
      const bool neg = side == 1;
      const double s = neg ? -1.0 : 1.0;
      const double a = neg ? p.a_neg : p.a_pos;
      const double b = neg ? p.b_neg : p.b_pos;
      const double h1 = neg ? -lam * b : lam * a;
      const double h2 = neg ? -lam * a : lam * b;
      if (c.w->support_hi() <= h1 || c.w->support_lo() >= h2) continue;
      total += lam * window_quad(a, b, edge_inside(*c.w, h1, h2), [&](double u) {
        return t.remainder(s * lam * u) * p.psi(s * u) * c.w->value(s * lam * u);
      });
    }
  }
  return total;
}

// Assemble the pole part and the log-scale quadrature nodes. mu_min_re is
// the leftmost real part the context will ever be evaluated at; it fixes the
// probe expansion order and the panel depth.
Ctx build_ctx(const LogPowerSymbol& t, const CutoffPair& pair,
              const TestFunction& w, double mu_min_re, double tol,
              bool continued) {
  Ctx c;
  c.t = &t;
  c.pair = &pair;
  c.w = &w;
  c.continued = continued;

  double alpha_min = std::numeric_limits<double>::infinity();
  for (const SymbolTerm& tm : t.terms)
    alpha_min = std::min(alpha_min, t.omega + tm.k);

  double decay;  // D(l) ~ l^decay up to log factors
  if (continued) {
    int order = 0;
    if (!t.terms.empty())
      order = std::max(0, static_cast<int>(
                              std::ceil(-1.75 - mu_min_re - alpha_min))) +
              2;
    c.taylor = order;
    c.rem = taylor_remainder(w, order);
    for (const SymbolTerm& tm : t.terms) {
      const double alpha = t.omega + tm.k;
      for (int m = 0; m <= order; ++m) {
        double wm = w.deriv(0.0, m) / factorial(m);
        if (tm.negative_side && (m % 2)) wm = -wm;
        if (wm == 0.0) continue;
        PoleGroup g;
        g.x = alpha + m + 1.0;
        g.amp.assign(tm.logpow + 1, 0.0);
        for (int q = 0; q <= tm.logpow; ++q) {
          const double mom =
              annulus_moment(pair, alpha + m, tm.logpow - q, tm.negative_side);
          g.amp[q] = tm.coef * binom(tm.logpow, q) * wm * mom *
                     ((q % 2) ? -1.0 : 1.0) * factorial(q);
        }
        c.poles.push_back(std::move(g));
      }
    }
    decay = t.terms.empty() ? std::numeric_limits<double>::infinity()
                            : mu_min_re + alpha_min + c.taylor + 2.0;
    if (t.remainder)
      decay = std::min(decay, mu_min_re + t.remainder_degree + 1.0);
  } else {
    decay = mu_min_re + t.omega + 1.0;
  }

  // probes that keep away from the singular point cut the integral off at a
  // positive scale (when no expansion coefficient survives, nothing below
  // the cut contributes)
  const double gap = probe_gap(w);
  const double bmax = std::max(pair.b_pos, pair.b_neg);
  const double vcut =
      gap > 0.0 ? std::log(gap / bmax) : -std::numeric_limits<double>::infinity();

  const double tolx = std::clamp(tol, 1e-13, 1e-6) * 1e-2;
  double v_end;
  if (!continued && gap > 0.0) {
    v_end = std::min(vcut, 0.0);
  } else {
    const double span = -std::log(tolx) + 12.0;
    const double rate = std::max(decay, 0.2);
    v_end = -(span + 2.0 * std::log1p(span / rate)) / rate;
    if (continued && c.poles.empty()) v_end = std::max(v_end, std::min(vcut, 0.0));
  }

  const auto& xs = gauss<double, 30>::abscissa();
  const auto& wt = gauss<double, 30>::weights();

  auto density_at = [&](double v) {
    const double d = continued ? continued_density(c, std::exp(v))
                               : direct_density(c, std::exp(v));
    if (!std::isfinite(d))
      throw std::runtime_error(
          "scale integral overflowed; the symbol is too singular for this "
          "branch");
    return d;
  };

  // v-intervals where a probe support edge crosses a window. The edge is
  // flat to all orders and defeats a fixed rule; everywhere else the profile
  // is as smooth as the window integrand, so only these panels refine.
  std::vector<std::pair<double, double>> rough;
  for (double e : {w.support_lo(), w.support_hi()}) {
    if (!std::isfinite(e) || e == 0.0) continue;
    const double wa = e > 0 ? pair.a_pos : pair.a_neg;
    const double wb = e > 0 ? pair.b_pos : pair.b_neg;
    rough.emplace_back(std::log(std::abs(e) / wb), std::log(std::abs(e) / wa));
  }
  auto crosses_edge = [&](double lo, double hi) {
    for (const auto& iv : rough)
      if (lo < iv.second && hi > iv.first) return true;
    return false;
  };

  double scale = 1.0;
  double pmass = 0.0;
  auto rule30 = [&](double a2, double b2, double* vv, double* ww, double* dd,
                    double& l1) {
    const double mid = 0.5 * (a2 + b2);
    const double half = 0.5 * (b2 - a2);
    double sum = 0.0;
    l1 = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (int sgn : {-1, 1}) {
        vv[n] = mid + sgn * half * xs[i];
        ww[n] = half * wt[i];
        dd[n] = density_at(vv[n]);
        sum += ww[n] * dd[n];
        l1 += ww[n] * std::abs(dd[n]);
        ++n;
      }
    }
    return sum;
  };
  auto emit = [&](const double* vv, const double* ww, const double* dd) {
    for (int i = 0; i < 30; ++i) {
      c.vs.push_back(vv[i]);
      c.ws.push_back(ww[i]);
      c.ds.push_back(dd[i]);
      pmass += ww[i] * std::abs(dd[i]) * std::exp(mu_min_re * vv[i]);
    }
  };
  // bisect until the one-panel value matches the sum over halves, then keep
  // the halves
  std::function<void(double, double, int, double)> refine =
      [&](double a2, double b2, int depth, double parent) {
        const double mid = 0.5 * (a2 + b2);
        double lv[30], lw[30], ld[30], rv[30], rw[30], rd[30];
        double l1l = 0.0, l1r = 0.0;
        const double il = rule30(a2, mid, lv, lw, ld, l1l);
        const double ir = rule30(mid, b2, rv, rw, rd, l1r);
        const bool ok = std::abs(parent - il - ir) <=
                        std::max(1e-13 * (l1l + l1r), 1e-15 * scale);
        if (ok || depth >= 10) {
          emit(lv, lw, ld);
          emit(rv, rw, rd);
          return;
        }
        refine(a2, mid, depth + 1, il);
        refine(mid, b2, depth + 1, ir);
      };

  const double panel = 2.0;
  int quiet = 0;
  for (int k = 0; k < 500; ++k) {
    const double vb = -panel * k;
    if (vb <= v_end + 1e-14) break;
    const double va = std::max(vb - panel, v_end);
    pmass = 0.0;
    double pv[30], pw[30], pd[30];
    double l1 = 0.0;
    const double whole = rule30(va, vb, pv, pw, pd, l1);
    if (crosses_edge(va, vb))
      refine(va, vb, 0, whole);
    else
      emit(pv, pw, pd);
    scale = std::max(scale, pmass);
    quiet = pmass <= tolx * 1e-3 * scale ? quiet + 1 : 0;
    if (quiet >= 3) break;
  }
  return c;
}

Complex ctx_eval(const Ctx& c, Complex mu) {
  Complex total = 0.0;
  for (const PoleGroup& g : c.poles) {
    const Complex dmu = mu + g.x;
    Complex denom = dmu;
    for (std::size_t q = 0; q < g.amp.size(); ++q) {
      total += g.amp[q] / denom;
      denom *= dmu;
    }
  }
  for (std::size_t i = 0; i < c.vs.size(); ++i)
    total += c.ws[i] * std::exp(mu * c.vs[i]) * c.ds[i];
  return total;
}

// Trapezoidal contour sums with point doubling until the coefficients hold
// still; exponentially accurate while the contour stays clear of poles.
LaurentSeries contour_series(const Ctx& c, double center, double radius,
                             int kmin, int kmax) {
  const double two_pi = 2.0 * std::acos(-1.0);
  auto point = [&](double th) {
    return ctx_eval(c, Complex(center + radius * std::cos(th),
                               radius * std::sin(th)));
  };
  auto coeffs = [&](const std::vector<Complex>& vals) {
    const int n = static_cast<int>(vals.size());
    std::vector<Complex> out;
    out.reserve(kmax - kmin + 1);
    for (int k = kmin; k <= kmax; ++k) {
      Complex sum = 0.0;
      for (int j = 0; j < n; ++j)
        sum += vals[j] * std::polar(1.0, -k * two_pi * j / n);
      out.push_back(sum * std::pow(radius, -k) / static_cast<double>(n));
    }
    return out;
  };

  std::vector<Complex> vals(64);
  for (int j = 0; j < 64; ++j) vals[j] = point(two_pi * j / 64);
  std::vector<Complex> prev = coeffs(vals);
  while (vals.size() < 2048) {
    const int n = static_cast<int>(vals.size());
    std::vector<Complex> next(2 * n);
    for (int j = 0; j < n; ++j) {
      next[2 * j] = vals[j];
      next[2 * j + 1] = point(two_pi * (2 * j + 1) / (2 * n));
    }
    vals.swap(next);
    std::vector<Complex> cur = coeffs(vals);
    double diff = 0.0, mag = 1.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      diff = std::max(diff, std::abs(cur[i] - prev[i]));
      mag = std::max(mag, std::abs(cur[i]));
    }
    if (diff <= 1e-8 * mag) {
      LaurentSeries out;
      out.center = center;
      out.kmin = kmin;
      out.coeff = std::move(cur);
      out.points = static_cast<int>(vals.size());
      out.radius = radius;
      return out;
    }
    prev = std::move(cur);
  }
  throw std::runtime_error(
      "contour coefficients did not stabilize; the radius likely touches a "
      "pole");
}

double default_radius(const LogPowerSymbol& t, double center) {
  double gap = std::numeric_limits<double>::infinity();
  for (const SymbolTerm& tm : t.terms) {
    const double alpha = t.omega + tm.k;
    const int depth =
        static_cast<int>(std::max(80.0, std::abs(center) - alpha + 4.0));
    for (int m = 0; m <= depth; ++m) {
      const double d = std::abs(center + alpha + m + 1.0);
      if (d > 1e-9) gap = std::min(gap, d);
    }
  }
  if (!std::isfinite(gap)) return 0.5;
  return std::min(0.5, 0.5 * gap);
}

// contours and rings around `center` must stay inside the strip where the
// truncated expansion continues the integral
void check_strip(const LogPowerSymbol& t, double left) {
  if (t.remainder && left + t.remainder_degree + 1.0 < 0.25)
    throw std::domain_error(
        "contour reaches below the continuation range of the truncated "
        "expansion");
}

// <t (1 - chi), w>: everything the scale decomposition does not see
Quad outer_pairing(const LogPowerSymbol& t, const CutoffPair& p,
                   const TestFunction& w, double tol) {
  auto f = [&](double h) {
    return t.density(h) * (1.0 - p.chi(h)) * w.value(h);
  };
  Quad total;
  if (w.support_hi() > p.a_pos) {
    Quad q = integrate(f, p.a_pos, w.support_hi(), tol);
    total.value += q.value;
    total.err += q.err;
    total.converged = total.converged && q.converged;
  }
  if (w.support_lo() < -p.a_neg) {
    Quad q = integrate(f, w.support_lo(), -p.a_neg, tol);
    total.value += q.value;
    total.err += q.err;
    total.converged = total.converged && q.converged;
  }
  return total;
}

}  // namespace

double LogPowerSymbol::density(double h) const {
  if (h == 0.0) return 0.0;
  const double ah = std::abs(h);
  const bool neg = h < 0.0;
  const double lg = std::log(ah);
  double total = 0.0;
  for (const SymbolTerm& tm : terms) {
    if (tm.negative_side != neg) continue;
    total += tm.coef * std::pow(ah, omega + tm.k) * ipow(lg, tm.logpow);
  }
  if (remainder) total += remainder(h);
  return total;
}

LogPowerSymbol LogPowerSymbol::power(double alpha, int logpow,
                                     dist::Support side, double coef) {
  LogPowerSymbol t;
  t.omega = alpha;
  t.trunc = 0;
  t.jordan = logpow + 1;
  if (side != dist::Support::negative) t.terms.push_back({coef, 0, logpow, false});
  if (side != dist::Support::positive) t.terms.push_back({coef, 0, logpow, true});
  validate(t);
  return t;
}

bool verify_scaling(const LogPowerSymbol& t, double tol) {
  if (t.jordan < 1 || t.jordan > 3) return false;
  if (t.trunc < 0) return false;
  for (const SymbolTerm& tm : t.terms) {
    if (tm.k < 0 || tm.k > t.trunc) return false;
    if (tm.logpow < 0 || tm.logpow + 1 > t.jordan) return false;
  }
  if (t.remainder) {
    if (t.remainder_degree + 1e-9 < t.omega + t.trunc + 1) return false;
    // remainder must shrink at least as fast as its claimed degree
    for (double h : {-1.3, -0.9, -0.5, -0.2, 0.2, 0.5, 0.9, 1.3}) {
      const double base = std::abs(t.remainder(h));
      if (base < 1e-280) continue;
      for (double lam : {0.5, 0.25}) {
        const double scaled = std::abs(t.remainder(lam * h));
        const double bound =
            std::pow(lam, t.remainder_degree) * base * (1.0 + 1e3 * tol) + 1e-280;
        if (scaled > bound) return false;
      }
    }
  }
  return true;
}

double pole_distance(const LogPowerSymbol& t, Complex mu) {
  double best = std::numeric_limits<double>::infinity();
  for (const SymbolTerm& tm : t.terms) {
    const double alpha = t.omega + tm.k;
    const int depth = static_cast<int>(
        std::max(80.0, -mu.real() - alpha + 4.0));
    for (int m = 0; m <= depth; ++m)
      best = std::min(best, std::abs(mu + (alpha + m + 1.0)));
  }
  return best;
}

Complex mellin(const LogPowerSymbol& t, const CutoffPair& pair,
               const TestFunction& omega, Complex mu, double tol,
               Branch branch) {
  validate(t);
  const bool off = probe_gap(omega) > 0.0;
  // probes that stay away from the singular point see an entire function,
  // so the pole ladder only matters when the support reaches the origin
  if (!off && pole_distance(t, mu) < 1e-6)
    throw std::domain_error("mu lies within 1e-6 of a pole of the scale integral");
  const bool direct_ok = off || mu.real() + t.omega + 1.0 >= 0.25;
  Branch b = branch;
  if (b == Branch::automatic) b = direct_ok ? Branch::direct : Branch::continued;
  if (b == Branch::direct && !direct_ok)
    throw std::domain_error("the direct scale integral does not converge at this mu");
  if (b == Branch::continued && !off) check_strip(t, mu.real());
  const Ctx c = build_ctx(t, pair, omega, mu.real(), tol, b == Branch::continued);
  return ctx_eval(c, mu);
}

Complex LaurentSeries::at(int k) const {
  if (k < kmin) return 0.0;
  const int idx = k - kmin;
  if (idx >= static_cast<int>(coeff.size()))
    throw std::out_of_range("Laurent coefficient above the computed order");
  return coeff[idx];
}

LaurentSeries laurent(const LogPowerSymbol& t, const CutoffPair& pair,
                      const TestFunction& omega, double center, double radius,
                      int kmax) {
  validate(t);
  if (kmax < 0) throw std::invalid_argument("kmax must be nonnegative");
  const double rho = radius > 0.0 ? radius : default_radius(t, center);
  check_strip(t, center - rho);
  const Ctx c = build_ctx(t, pair, omega, center - rho, 1e-10, true);
  return contour_series(c, center, rho, -(t.jordan + 1), kmax);
}

RieszExtension::RieszExtension(LogPowerSymbol t, CutoffPair pair)
    : t_(std::move(t)), pair_(std::move(pair)) {
  validate(t_);
}

dist::PairResult RieszExtension::evaluate(const TestFunction& omega,
                                          double tol) const {
  const double rho = default_radius(t_, 0.0);
  check_strip(t_, -rho);
  const Ctx c = build_ctx(t_, pair_, omega, -rho,
                          std::clamp(tol * 1e-2, 1e-13, 1e-9), true);
  const LaurentSeries ls = contour_series(c, 0.0, rho, -(t_.jordan + 1), 0);

  // pole-subtracted values on rings {+-r, +-ir}: the four-point average
  // kills the odd orders and the mu^2 and mu^6 terms of the limit, and one
  // Richardson step across radii r and r/sqrt(2) kills mu^4, leaving an
  // order mu^8 defect; the Taylor coefficients of the limit grow like the
  // inverse pole gap to the k, so this headroom is needed, not luxury
  const double r = std::min(0.05, 0.4 * rho);
  auto g = [&](Complex mu) {
    Complex v = ctx_eval(c, mu);
    for (int k = ls.kmin; k < 0; ++k) {
      if (ls.at(k) == Complex(0.0)) continue;
      v -= ls.at(k) * std::pow(mu, k);
    }
    return v;
  };
  auto ring_avg = [&](double rr) {
    const Complex re = 0.5 * (g(Complex(rr, 0)) + g(Complex(-rr, 0)));
    const Complex im = 0.5 * (g(Complex(0, rr)) + g(Complex(0, -rr)));
    return 0.5 * (re + im);
  };
  const Complex e1 = ring_avg(r);
  const Complex e2 = ring_avg(r / std::sqrt(2.0));
  const Complex inner = (4.0 * e2 - e1) / 3.0;

  const Quad outer = outer_pairing(t_, pair_, omega, tol * 0.25);

  dist::PairResult out;
  out.value = inner.real() + outer.value;
  out.err = std::abs(e1 - e2) * 3e-4 + std::abs(inner.imag()) + outer.err + 1e-12;
  out.converged = outer.converged;
  return out;
}

RieszExtension riesz_extend(const LogPowerSymbol& t, const CutoffPair& pair) {
  return RieszExtension(t, pair);
}

LogPowerSymbol symbol_rho(const LogPowerSymbol& t) {
  if (t.remainder)
    throw std::invalid_argument(
        "the Euler action needs a term-only symbol, not a numeric remainder");
  LogPowerSymbol out = t;
  out.terms.clear();
  for (const SymbolTerm& tm : t.terms) {
    const double alpha = t.omega + tm.k;
    if (alpha != 0.0)
      out.terms.push_back({tm.coef * alpha, tm.k, tm.logpow, tm.negative_side});
    if (tm.logpow > 0)
      out.terms.push_back(
          {tm.coef * tm.logpow, tm.k, tm.logpow - 1, tm.negative_side});
  }
  return out;
}

double residue_rho(const LogPowerSymbol& t, const CutoffPair& pair,
                   const TestFunction& omega) {
  return laurent(t, pair, omega, 0.0, 0.0, 0).at(-1).real();
}

double residue_defining(const LogPowerSymbol& t, const CutoffPair& pair,
                        const TestFunction& omega, double tol) {
  const RieszExtension ext(t, pair);
  const double r1 = ext.evaluate(omega, tol).value;
  // <rho u, w> = -<u, (1 + h d/dh) w> moves the Euler operator to the probe
  const TestFunction hdw =
      omega.derivative().times_poly({omega.center(), 1.0});
  const double r2 = ext.evaluate(hdw, tol).value;
  const double r3 = riesz_extend(symbol_rho(t), pair).evaluate(omega, tol).value;
  return -(r1 + r2) - r3;
}

FlowFit rg_flow(const LogPowerSymbol& t, const CutoffPair& pair,
                const TestFunction& omega, const std::vector<double>& ells,
                int degree, double tol) {
  if (degree < 0) throw std::invalid_argument("fit degree must be nonnegative");
  if (ells.size() < static_cast<std::size_t>(degree) + 2)
    throw std::invalid_argument("need at least degree + 2 scales");
  std::vector<double> xs, ys;
  for (double ell : ells) {
    if (!(ell > 0.0)) throw std::invalid_argument("scales must be positive");
    const CutoffPair scaled(pair.a_pos / ell, pair.b_pos / ell,
                            pair.a_neg / ell, pair.b_neg / ell);
    xs.push_back(std::log(ell));
    ys.push_back(RieszExtension(t, scaled).evaluate(omega, 1e-9).value);
  }
  FlowFit fit;
  fit.values = ys;
  fit.coeff = polynomial_fit(xs, ys, degree, &fit.residual);
  double scale = 1.0;
  for (double y : ys) scale = std::max(scale, std::abs(y));
  if (fit.residual > tol * scale)
    throw std::runtime_error(
        "extension flow is not polynomial at this degree in log(ell)");
  return fit;
}

LogPowerSymbol symbol_from_toml(const toml::Table& tbl,
                                const std::string& section) {
  const toml::Value* sec = toml::find(tbl, section);
  if (!sec || !sec->is_table())
    throw std::invalid_argument("missing [" + section + "] table");
  const toml::Table& s = sec->as_table();

  LogPowerSymbol t;
  bool have_omega = false;
  std::vector<const toml::Table*> term_tables;
  for (const auto& [key, val] : s) {
    if (key == "omega" && val.is_number()) {
      t.omega = val.as_number();
      have_omega = true;
    } else if (key == "trunc" && val.is_integer()) {
      t.trunc = static_cast<int>(val.as_integer());
    } else if (key == "jordan" && val.is_integer()) {
      t.jordan = static_cast<int>(val.as_integer());
    } else if (key.rfind("term", 0) == 0 && val.is_table()) {
      term_tables.push_back(&val.as_table());
    } else {
      throw std::invalid_argument("unknown symbol key: " + key);
    }
  }
  if (!have_omega) throw std::invalid_argument("symbol needs a numeric omega");

  for (const toml::Table* tt : term_tables) {
    SymbolTerm tm;
    for (const auto& [key, val] : *tt) {
      if (key == "coef" && val.is_number()) {
        tm.coef = val.as_number();
      } else if (key == "k" && val.is_integer()) {
        tm.k = static_cast<int>(val.as_integer());
      } else if (key == "logpow" && val.is_integer()) {
        tm.logpow = static_cast<int>(val.as_integer());
      } else if (key == "side" && val.is_string()) {
        const std::string& side = val.as_string();
        if (side == "h>0")
          tm.negative_side = false;
        else if (side == "h<0")
          tm.negative_side = true;
        else
          throw std::invalid_argument("term side must be \"h>0\" or \"h<0\"");
      } else {
        throw std::invalid_argument("unknown term key: " + key);
      }
    }
    t.terms.push_back(tm);
  }
  validate(t);
  return t;
}

}  // namespace renorm::mel
