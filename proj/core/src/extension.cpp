#include "renorm/extension.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <stdexcept>

#include "renorm/polyfit.hpp"
#include "renorm/quadrature.hpp"

namespace renorm::ext {

namespace {

double round_or_self(double x) { return std::nearbyint(x); }

// Regular (singularity-free) part int t (1-chi) phi over both supported
// sides; the integrand vanishes inside the inner plateau.
Quad outer_part(const dist::SampledDistribution& t, const CutoffPair& pair,
                const TestFunction& phi, double tol) {
  Quad total;
  if (t.support != dist::Support::negative) {
    double hi = phi.support_hi();
    if (hi > pair.a_pos) {
      Quad q = integrate(
          [&](double h) { return t.density(h) * (1.0 - pair.chi(h)) * phi.value(h); },
          pair.a_pos, hi, tol);
      total.value += q.value;
      total.err += q.err;
      total.converged = total.converged && q.converged;
    }
  }
  if (t.support != dist::Support::positive) {
    double lo = phi.support_lo();
    if (lo < -pair.a_neg) {
      Quad q = integrate(
          [&](double h) { return t.density(h) * (1.0 - pair.chi(h)) * phi.value(h); },
          lo, -pair.a_neg, tol);
      total.value += q.value;
      total.err += q.err;
      total.converged = total.converged && q.converged;
    }
  }
  return total;
}

}  // namespace

int subtraction_order(double s, int d) {
  double sigma = s + d;
  if (sigma > 0) return -1;
  return static_cast<int>(std::floor(-sigma + 1e-12));
}

bool degree_demoted(double s, int d) {
  double sigma = s + d;
  return sigma <= 1e-12 && std::abs(sigma - round_or_self(sigma)) < 1e-12;
}

ExtendedDistribution::ExtendedDistribution(dist::SampledDistribution t, CutoffPair pair,
                                           double s)
    : t_(std::move(t)), pair_(pair), s_(s) {
  if (t_.is_delta)
    throw std::invalid_argument("extension acts on densities, not point masses");
  m_ = subtraction_order(s_, t_.d);
  demoted_ = degree_demoted(s_, t_.d);
}

ExtendedDistribution extend(const dist::SampledDistribution& t, double s,
                            const CutoffPair& pair) {
  return ExtendedDistribution(t, pair, s);
}

dist::PairResult ExtendedDistribution::evaluate(const TestFunction& phi, double tol) const {
  auto rem = taylor_remainder(phi, m_);
  // with a subtraction the integrand carries -t chi P beyond the probe's
  // support, so the range may stop at the support edge only when no
  // counterterm is subtracted
  double r_pos = t_.support != dist::Support::negative
                     ? (m_ >= 0 ? pair_.b_pos
                                : std::min(pair_.b_pos, std::max(0.0, phi.support_hi())))
                     : 0.0;
  double r_neg = t_.support != dist::Support::positive
                     ? (m_ >= 0 ? pair_.b_neg
                                : std::min(pair_.b_neg, std::max(0.0, -phi.support_lo())))
                     : 0.0;
  dist::PairResult inner = dist::integrate_singular(
      [&](double h) { return t_.density(h) * pair_.chi(h) * rem(h); }, r_neg, r_pos,
      s_ + t_.d + m_ + 1, tol * 0.5);
  Quad outer = outer_part(t_, pair_, phi, tol * 0.5);
  inner.value += outer.value;
  inner.err += outer.err;
  inner.converged = inner.converged && outer.converged;
  return inner;
}

dist::PairResult ExtendedDistribution::evaluate_scale_integral(const TestFunction& phi,
                                                               double tol) const {
  using boost::math::quadrature::gauss;
  auto rem = taylor_remainder(phi, m_);
  // With h = lam u the annulus of psi maps to the fixed window [a, b],
  // where the integrand is analytic; a fixed-order rule is then exact to
  // machine precision and g stays cheap under the outer log-scale panels.
  auto g = [&](double lam) {
    double total = 0;
    if (t_.support != dist::Support::negative) {
      total += gauss<double, 30>::integrate(
          [&](double u) {
            double h = lam * u;
            return lam * t_.density(h) * pair_.psi(u) * rem(h);
          },
          pair_.a_pos, pair_.b_pos);
    }
    if (t_.support != dist::Support::positive) {
      total += gauss<double, 30>::integrate(
          [&](double u) {
            double h = lam * u;
            return lam * t_.density(-h) * pair_.psi(-u) * rem(-h);
          },
          pair_.a_neg, pair_.b_neg);
    }
    return total;
  };
  Quad scale = integrate_loglambda(g, tol * 0.5);
  Quad outer = outer_part(t_, pair_, phi, tol * 0.5);
  dist::PairResult out;
  out.value = scale.value + outer.value;
  out.err = scale.err + outer.err;
  out.converged = scale.converged && outer.converged;
  return out;
}

dist::PairResult ExtendedDistribution::evaluate_epsilon_limit(const TestFunction& phi,
                                                              double tol) const {
  using boost::math::quadrature::gauss;
  std::vector<double> dercoef;
  double fact = 1;
  for (int k = 0; k <= m_; ++k) {
    if (k > 0) fact *= k;
    dercoef.push_back(phi.deriv(0.0, k) / fact);
  }

  // Octave-doubling panels with a fixed-order rule: each octave of a
  // power-law-times-smooth integrand is analytic, so this is deterministic
  // and near machine precision at a fixed cost.
  auto octaves = [](const RealFn& g, double lo, double hi) {
    double total = 0;
    for (double a = lo; a < hi;) {
      double b = std::min(2.0 * a, hi);
      total += gauss<double, 30>::integrate(g, a, b);
      a = b;
    }
    return total;
  };

  auto value_at = [&](double eps) {
    double total = 0;
    auto side = [&](int sgn) {
      double a = sgn > 0 ? pair_.a_pos : pair_.a_neg;
      double b = sgn > 0 ? pair_.b_pos : pair_.b_neg;
      double hi = sgn > 0 ? phi.support_hi() : -phi.support_lo();
      if (hi <= eps * a) return;
      // rising edge of 1 - chi(./eps), mapped to the fixed window [a, b]
      total += gauss<double, 30>::integrate(
          [&](double u) {
            double x = sgn * eps * u;
            return eps * t_.density(x) * (1.0 - pair_.chi(sgn * u)) * phi.value(x);
          },
          a, std::min(b, hi / eps));
      // past the edge the shell cutoff is gone entirely
      if (hi > eps * b)
        total += octaves([&](double h) { return t_.density(sgn * h) * phi.value(sgn * h); },
                         eps * b, hi);
      // moment counterterm int t (chi - chi(./eps)) h^k, in the same pieces;
      // the grid keeps eps b <= a so the plateaus do not interleave
      for (int k = 0; k <= m_; ++k) {
        auto mom = [&](double h) {
          double x = sgn * h;
          return t_.density(x) * std::pow(x, k);
        };
        double piece = gauss<double, 30>::integrate(
            [&](double u) {
              double x = sgn * eps * u;
              return eps * t_.density(x) * (1.0 - pair_.chi(sgn * u)) * std::pow(x, k);
            },
            a, b);
        piece += octaves(mom, eps * b, a);
        piece += gauss<double, 30>::integrate(
            [&](double h) { return mom(h) * pair_.chi(sgn * h); }, a, b);
        total -= dercoef[k] * piece;
      }
    };
    if (t_.support != dist::Support::negative) side(+1);
    if (t_.support != dist::Support::positive) side(-1);
    return total;
  };

  // The shell value minus the limit is -<t chi(./eps), I_m(phi)>, and the
  // Taylor series of the remainder turns that into pure powers
  // eps^{rate + j}: the moment counterterm has already absorbed every
  // logarithm, including the degree-demoted rate = 1 case where the model
  // becomes polynomial in eps. Five columns leave only an eps^{rate+4}
  // residual over the eps grid.
  double rate = s_ + t_.d + m_ + 1;
  double amin = std::min(pair_.a_pos, pair_.a_neg);
  double bmax = std::max(pair_.b_pos, pair_.b_neg);
  int k0 = 2;
  while (std::ldexp(1.0, -k0) * bmax > amin) ++k0;
  std::vector<std::vector<double>> design;
  std::vector<double> ys;
  for (int k = k0; k <= k0 + 8; ++k) {
    double eps = std::ldexp(1.0, -k);
    ys.push_back(value_at(eps));
    design.push_back({1.0, std::pow(eps, rate), std::pow(eps, rate + 1),
                      std::pow(eps, rate + 2), std::pow(eps, rate + 3)});
  }
  double rms = 0;
  std::vector<double> c = lsq_fit(design, ys, &rms);
  dist::PairResult out;
  out.value = c[0];
  out.err = 4.0 * rms + tol;
  out.converged = rms < 10.0 * tol + 1e-12;
  return out;
}

dist::PairResult ambiguity(const dist::SampledDistribution& t, const CutoffPair& pair,
                           int m, const TestFunction& phi, double tol) {
  dist::PairResult out;
  if (m < 0) return out;
  if (t.is_delta) {
    if (t.delta_order <= m) {
      double sgn = (t.delta_order % 2 == 0) ? 1.0 : -1.0;
      out.value = sgn * phi.deriv(0.0, t.delta_order);
    }
    return out;
  }
  auto pm = taylor_polynomial(phi, m);
  double r_pos = t.support != dist::Support::negative ? pair.b_pos : 0.0;
  double r_neg = t.support != dist::Support::positive ? pair.b_neg : 0.0;
  return dist::integrate_singular(
      [&](double h) { return t.density(h) * pair.chi(h) * pm(h); }, r_neg, r_pos,
      t.degree + t.d, tol);
}

double extension_difference_chi(const dist::SampledDistribution& t, double s,
                                const CutoffPair& pair1, const CutoffPair& pair2,
                                const TestFunction& phi, double tol) {
  int m = subtraction_order(s, t.d);
  if (m < 0) return 0.0;
  auto pm = taylor_polynomial(phi, m);
  double total = 0;
  if (t.support != dist::Support::negative) {
    double lo = 0.5 * std::min(pair1.a_pos, pair2.a_pos);
    double hi = std::max(pair1.b_pos, pair2.b_pos);
    total += integrate(
                 [&](double h) {
                   return t.density(h) * (pair2.chi(h) - pair1.chi(h)) * pm(h);
                 },
                 lo, hi, tol)
                 .value;
  }
  if (t.support != dist::Support::positive) {
    double lo = 0.5 * std::min(pair1.a_neg, pair2.a_neg);
    double hi = std::max(pair1.b_neg, pair2.b_neg);
    total += integrate(
                 [&](double h) {
                   return t.density(-h) * (pair2.chi(-h) - pair1.chi(-h)) * pm(-h);
                 },
                 lo, hi, tol)
                 .value;
  }
  return total;
}

LocalCounterterm fit_counterterm(const Evaluator& t1, const Evaluator& t2, int m,
                                 const std::vector<TestFunction>& probes, double tol) {
  if (m < 0) throw std::invalid_argument("counterterm order must be nonnegative");
  if (static_cast<int>(probes.size()) < 2 * (m + 1))
    throw std::invalid_argument("need at least 2(m+1) probes");
  std::vector<std::vector<double>> design;
  std::vector<double> ys;
  double scale = 1.0;
  for (const auto& phi : probes) {
    std::vector<double> row;
    double sgn = 1.0;
    for (int k = 0; k <= m; ++k, sgn = -sgn) row.push_back(sgn * phi.deriv(0.0, k));
    design.push_back(std::move(row));
    double y = t2(phi) - t1(phi);
    scale = std::max(scale, std::abs(y));
    ys.push_back(y);
  }
  LocalCounterterm out;
  out.coeff = lsq_fit(design, ys, &out.residual);
  if (out.residual > tol * scale)
    throw std::runtime_error("difference not supported at the singular point");
  return out;
}

namespace {

// Common boundary moment: -int T(h) w(h) chi'(h) P_m(omega)(h) dh over the
// supported sides; the integrand lives in the cutoff annuli only.
double boundary_moment(const dist::SampledDistribution& T,
                       const std::function<double(double)>& w, const CutoffPair& pair,
                       int m, const TestFunction& omega, double tol) {
  if (T.is_delta) throw std::invalid_argument("boundary pairing needs a density");
  if (m < 0) return 0.0;
  auto pm = taylor_polynomial(omega, m);
  double total = 0;
  if (T.support != dist::Support::negative) {
    total += integrate(
                 [&](double h) { return T.density(h) * w(h) * pair.chi_prime(h) * pm(h); },
                 pair.a_pos, pair.b_pos, tol)
                 .value;
  }
  if (T.support != dist::Support::positive) {
    total += integrate(
                 [&](double h) { return T.density(h) * w(h) * pair.chi_prime(h) * pm(h); },
                 -pair.b_neg, -pair.a_neg, tol)
                 .value;
  }
  return -total;
}

}  // namespace

double residue_d(const dist::SampledDistribution& T, const CutoffPair& pair, int m,
                 const TestFunction& omega, double tol) {
  return boundary_moment(T, [](double) { return 1.0; }, pair, m, omega, tol);
}

double anomaly_1d(const dist::SampledDistribution& T,
                  const std::function<double(double)>& a, const CutoffPair& pair, int m,
                  const TestFunction& omega, double tol) {
  return boundary_moment(T, a, pair, m, omega, tol);
}

double anomaly_2d(const dist::SampledDistribution& T,
                  const std::function<double(double, double)>& Xh, const CutoffPair& pair,
                  int m, const TestFunction& omega_x, const TestFunction& omega_h,
                  double tol) {
  double xscale = 0;
  for (int i = 0; i <= 32; ++i) {
    double x = omega_x.support_lo() +
               (omega_x.support_hi() - omega_x.support_lo()) * double(i) / 32.0;
    xscale = std::max(xscale, std::abs(Xh(x, 1.0)) + std::abs(Xh(x, -1.0)));
    if (std::abs(Xh(x, 0.0)) > 1e-10 * std::max(1.0, xscale))
      throw std::invalid_argument("vector field not tangent to the singular line");
  }
  auto xweight = [&](double h) {
    return integrate([&](double x) { return Xh(x, h) * omega_x.value(x); },
                     omega_x.support_lo(), omega_x.support_hi(), tol * 0.1)
        .value;
  };
  return boundary_moment(T, xweight, pair, m, omega_h, tol);
}

}  // namespace renorm::ext
