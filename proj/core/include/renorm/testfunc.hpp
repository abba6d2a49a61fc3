#pragma once

// Closed-form one-dimensional test functions with analytic derivatives,
// plateau cutoff pairs chi/psi for the telescopic scale decomposition, and
// Taylor polynomials/remainders about h = 0.

#include <functional>
#include <memory>
#include <vector>

namespace renorm {

// 0 for u <= 0, 1 for u >= 1, smooth and strictly monotone in between.
double smoothstep01(double u);
double smoothstep01_deriv(double u);

// Two closed-form families, both closed under differentiation:
//   gaussian kind: P(h-c) * exp(-a (h-c)^2), rapidly decaying, with the
//     radius beyond which it is numerically negligible recorded;
//   bump kind: Q(u) (1-u^2)^{-p} exp(-1/(1-u^2)) with u=(h-c)/w, compactly
//     supported in [c-w, c+w].
class TestFunction {
 public:
  // poly coefficients are in powers of (h - center), constant term first.
  static TestFunction gaussian(double center, double width,
                               std::vector<double> poly = {1.0});
  // Normalized so the value at the center is scale.
  static TestFunction bump(double center, double halfwidth, double scale = 1.0);
  // Multiply by a polynomial in (h - center of this function).
  TestFunction times_poly(const std::vector<double>& poly) const;

  double value(double h) const;
  double operator()(double h) const { return value(h); }
  // k-th derivative, analytic (the family is closed under d/dh).
  double deriv(double h, int k) const;
  TestFunction derivative() const;

  bool compact() const;
  double support_lo() const;  // truncation radius for the gaussian kind
  double support_hi() const;
  double center() const;
  double width() const;

 private:
  TestFunction() = default;
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// chi smooth with chi = 1 on the inner plateau and 0 outside the outer
// radius, possibly with different radii on the two sides of 0; psi = -h chi'
// satisfies the telescoping identity int_0^1 dl/l psi(h/l) = chi(h) for
// h != 0 and is supported in the closed annuli exactly.
struct CutoffPair {
  double a_pos = 1.0, b_pos = 2.0;
  double a_neg = 1.0, b_neg = 2.0;

  CutoffPair() = default;
  CutoffPair(double a, double b) : a_pos(a), b_pos(b), a_neg(a), b_neg(b) {}
  CutoffPair(double ap, double bp, double an, double bn)
      : a_pos(ap), b_pos(bp), a_neg(an), b_neg(bn) {}

  bool symmetric() const { return a_pos == a_neg && b_pos == b_neg; }
  double outer() const { return b_pos > b_neg ? b_pos : b_neg; }

  double chi(double h) const;
  double chi_prime(double h) const;
  double psi(double h) const { return -h * chi_prime(h); }
};

// P_m(phi)(h) = sum_{k<=m} h^k phi^(k)(0)/k!; the remainder I_m = phi - P_m
// is evaluated through the integral form near 0 so the order-(m+1) vanishing
// is not lost to cancellation.
std::function<double(double)> taylor_polynomial(const TestFunction& phi, int m);
std::function<double(double)> taylor_remainder(const TestFunction& phi, int m);

}  // namespace renorm
