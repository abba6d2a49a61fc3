#include "renorm/testfunc.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <stdexcept>

namespace renorm {

namespace {

using Poly = std::vector<double>;  // constant term first

double poly_eval(const Poly& p, double x) {
  double r = 0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

Poly poly_deriv(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * double(i));
  if (d.empty()) d.push_back(0.0);
  return d;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

Poly poly_scale(Poly p, double s) {
  for (double& c : p) c *= s;
  return p;
}

Poly poly_shift_up(const Poly& p) {  // multiply by the variable
  Poly r(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) r[i + 1] = p[i];
  return r;
}

}  // namespace

double smoothstep01(double u) {
  if (u <= 0) return 0;
  if (u >= 1) return 1;
  double e1 = std::exp(-1.0 / u);
  double e2 = std::exp(-1.0 / (1.0 - u));
  return e1 / (e1 + e2);
}

double smoothstep01_deriv(double u) {
  if (u <= 0 || u >= 1) return 0;
  double e1 = std::exp(-1.0 / u);
  double e2 = std::exp(-1.0 / (1.0 - u));
  if (e1 == 0 || e2 == 0) return 0;
  double s = e1 + e2;
  return e1 * e2 * (1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u))) / (s * s);
}

struct TestFunction::Impl {
  enum Kind { kGaussian, kBump } kind = kGaussian;
  double c = 0;     // center
  double w = 1;     // gaussian scale sigma, or bump halfwidth
  double a = 0.5;   // gaussian: exp(-a v^2), v = h - c
  Poly poly{1.0};   // gaussian: P(v); bump: Q(u), u = v / w
  int p = 0;        // bump: extra (1-u^2)^{-p}
};

TestFunction TestFunction::gaussian(double center, double width, std::vector<double> poly) {
  if (!(width > 0)) throw std::invalid_argument("width must be positive");
  if (poly.empty()) poly = {1.0};
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::kGaussian;
  impl->c = center;
  impl->w = width;
  impl->a = 0.5 / (width * width);
  impl->poly = std::move(poly);
  TestFunction f;
  f.impl_ = impl;
  return f;
}

TestFunction TestFunction::bump(double center, double halfwidth, double scale) {
  if (!(halfwidth > 0)) throw std::invalid_argument("halfwidth must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::kBump;
  impl->c = center;
  impl->w = halfwidth;
  impl->poly = {scale * std::exp(1.0)};
  impl->p = 0;
  TestFunction f;
  f.impl_ = impl;
  return f;
}

TestFunction TestFunction::times_poly(const std::vector<double>& poly) const {
  auto impl = std::make_shared<Impl>(*impl_);
  if (impl->kind == Impl::kGaussian) {
    impl->poly = poly_mul(impl->poly, poly);
  } else {
    // incoming poly is in v = h - c; rewrite in u = v / w.
    Poly q = poly;
    double f = 1;
    for (std::size_t k = 0; k < q.size(); ++k, f *= impl->w) q[k] *= f;
    impl->poly = poly_mul(impl->poly, q);
  }
  TestFunction f;
  f.impl_ = impl;
  return f;
}

double TestFunction::value(double h) const {
  const Impl& im = *impl_;
  double v = h - im.c;
  if (im.kind == Impl::kGaussian) return poly_eval(im.poly, v) * std::exp(-im.a * v * v);
  double u = v / im.w;
  double one = 1.0 - u * u;
  if (one <= 0) return 0;
  return poly_eval(im.poly, u) * std::pow(one, -im.p) * std::exp(-1.0 / one);
}

TestFunction TestFunction::derivative() const {
  auto impl = std::make_shared<Impl>(*impl_);
  const Impl& im = *impl_;
  if (im.kind == Impl::kGaussian) {
    impl->poly = poly_add(poly_deriv(im.poly),
                          poly_scale(poly_shift_up(im.poly), -2.0 * im.a));
  } else {
    // d/dh [Q (1-u^2)^{-p} E] with E = exp(-1/(1-u^2)) stays in the family:
    // Q' (1-u^2)^2 + 2 p u Q (1-u^2) - 2 u Q over (1-u^2)^{p+2}, times 1/w.
    Poly one_m_u2{1.0, 0.0, -1.0};
    Poly t1 = poly_mul(poly_deriv(im.poly), poly_mul(one_m_u2, one_m_u2));
    Poly t2 = poly_scale(poly_mul(poly_shift_up(im.poly), one_m_u2), 2.0 * im.p);
    Poly t3 = poly_scale(poly_shift_up(im.poly), -2.0);
    impl->poly = poly_scale(poly_add(poly_add(t1, t2), t3), 1.0 / im.w);
    impl->p = im.p + 2;
  }
  TestFunction f;
  f.impl_ = impl;
  return f;
}

double TestFunction::deriv(double h, int k) const {
  if (k < 0) throw std::invalid_argument("derivative order must be nonnegative");
  TestFunction d = *this;
  for (int i = 0; i < k; ++i) d = d.derivative();
  return d.value(h);
}

bool TestFunction::compact() const { return impl_->kind == Impl::kBump; }

double TestFunction::support_lo() const {
  const Impl& im = *impl_;
  return im.kind == Impl::kBump ? im.c - im.w : im.c - 26.0 * im.w;
}

double TestFunction::support_hi() const {
  const Impl& im = *impl_;
  return im.kind == Impl::kBump ? im.c + im.w : im.c + 26.0 * im.w;
}

double TestFunction::center() const { return impl_->c; }
double TestFunction::width() const { return impl_->w; }

double CutoffPair::chi(double h) const {
  if (h >= 0) return 1.0 - smoothstep01((h - a_pos) / (b_pos - a_pos));
  return 1.0 - smoothstep01((-h - a_neg) / (b_neg - a_neg));
}

double CutoffPair::chi_prime(double h) const {
  if (h >= 0) return -smoothstep01_deriv((h - a_pos) / (b_pos - a_pos)) / (b_pos - a_pos);
  return smoothstep01_deriv((-h - a_neg) / (b_neg - a_neg)) / (b_neg - a_neg);
}

std::function<double(double)> taylor_polynomial(const TestFunction& phi, int m) {
  std::vector<double> coef;
  double fact = 1;
  for (int k = 0; k <= m; ++k) {
    if (k > 0) fact *= k;
    coef.push_back(phi.deriv(0.0, k) / fact);
  }
  return [coef](double h) {
    double r = 0;
    for (std::size_t i = coef.size(); i-- > 0;) r = r * h + coef[i];
    return r;
  };
}

std::function<double(double)> taylor_remainder(const TestFunction& phi, int m) {
  if (m < 0) return [phi](double h) { return phi.value(h); };
  auto pm = taylor_polynomial(phi, m);
  TestFunction dmp1 = phi;
  for (int k = 0; k <= m; ++k) dmp1 = dmp1.derivative();
  double fact = 1;
  for (int k = 2; k <= m; ++k) fact *= k;
  double hsmall = 0.5 * phi.width();
  return [phi, pm, dmp1, m, fact, hsmall](double h) {
    if (std::abs(h) > hsmall) return phi.value(h) - pm(h);
    // integral form h^{m+1}/m! int_0^1 (1-t)^m phi^{(m+1)}(t h) dt keeps the
    // order-(m+1) zero exact instead of cancelling two near-equal values
    double integral = boost::math::quadrature::gauss<double, 30>::integrate(
        [&](double t) { return std::pow(1.0 - t, m) * dmp1.value(t * h); }, 0.0, 1.0);
    return std::pow(h, m + 1) / fact * integral;
  };
}

}  // namespace renorm
