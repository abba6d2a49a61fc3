#pragma once

// Extension of distributions across the singular point by Taylor-remainder
// subtraction: the extension operator with its three equivalent evaluation
// routes, extension ambiguities, counterterm fitting, and the boundary
// residue/anomaly pairings of the graded calculus in the 1D and 2D charts.

#include <functional>
#include <vector>

#include "renorm/distributions.hpp"
#include "renorm/testfunc.hpp"

namespace renorm::ext {

// Subtraction order from the claimed degree: none when s + d > 0, otherwise
// the unique m with -m-1 < s+d <= -m. Returns -1 for none.
int subtraction_order(double s, int d);
// s + d a nonpositive integer: the extension picks up a logarithmic blow-up
// and only lands in the strictly smaller degree classes.
bool degree_demoted(double s, int d);

class ExtendedDistribution {
 public:
  ExtendedDistribution(dist::SampledDistribution t, CutoffPair pair, double s);

  int order() const { return m_; }
  bool demoted() const { return demoted_; }
  double claimed_degree() const { return s_; }
  const CutoffPair& cutoff() const { return pair_; }
  const dist::SampledDistribution& base() const { return t_; }

  // <t chi, I_m(phi)> + <t (1-chi), phi>; the default route.
  dist::PairResult evaluate(const TestFunction& phi, double tol = 1e-9) const;
  // int_0^1 dl/l <t psi(./l), I_m(phi)> + <t (1-chi), phi>; telescoped form.
  dist::PairResult evaluate_scale_integral(const TestFunction& phi,
                                           double tol = 1e-8) const;
  // Shell-regularized form with the moment counterterm c_eps subtracted and
  // the eps -> 0 limit taken by fitting the proven rate model.
  dist::PairResult evaluate_epsilon_limit(const TestFunction& phi,
                                          double tol = 1e-7) const;

 private:
  dist::SampledDistribution t_;
  CutoffPair pair_;
  double s_ = 0;
  int m_ = -1;
  bool demoted_ = false;
};

ExtendedDistribution extend(const dist::SampledDistribution& t, double s,
                            const CutoffPair& pair);

// <t chi, P_m(phi)>; reproduces point masses exactly (symbolic route) and
// reports divergence when t chi h^k is not integrable.
dist::PairResult ambiguity(const dist::SampledDistribution& t, const CutoffPair& pair,
                           int m, const TestFunction& phi, double tol = 1e-9);

// (R1 - R2) t (phi) = <t (chi2 - chi1), P_m(phi)>; identically 0 when
// s + d > 0.
double extension_difference_chi(const dist::SampledDistribution& t, double s,
                                const CutoffPair& pair1, const CutoffPair& pair2,
                                const TestFunction& phi, double tol = 1e-9);

using Evaluator = std::function<double(const TestFunction&)>;

struct LocalCounterterm {
  std::vector<double> coeff;  // coeff[k] multiplies the k-th derivative mass
  double residual = 0;
};

// Least-squares fit of t2 - t1 = sum_k coeff[k] (k-th derivative point mass)
// over the probe basis. Throws when the residual shows the difference is not
// supported at 0.
LocalCounterterm fit_counterterm(const Evaluator& t1, const Evaluator& t2, int m,
                                 const std::vector<TestFunction>& probes,
                                 double tol = 1e-6);

// Boundary moment pairing -<T, chi' P_m(omega)>. The sign is fixed by the
// defining equation on the Heaviside benchmark: d(R H) recovers the unit
// point mass.
double residue_d(const dist::SampledDistribution& T, const CutoffPair& pair, int m,
                 const TestFunction& omega, double tol = 1e-9);

// -<T a, chi' P_m(omega)> for the line chart, X = a(h) d/dh acting on the
// 1-form with density T; m < 0 returns 0 (no subtraction, no anomaly).
double anomaly_1d(const dist::SampledDistribution& T, const std::function<double(double)>& a,
                  const CutoffPair& pair, int m, const TestFunction& omega,
                  double tol = 1e-9);

// Top-form 2D chart (x, h) with singular line {h = 0}: T = t(h) dx dh,
// X with normal component Xh(x, h) d/dh which must vanish on the line,
// omega(x,h) = omega_x(x) omega_h(h). Returns
// -int t(h) Xh(x,h) chi'(h) omega_x(x) P_m(omega_h)(h) dx dh.
double anomaly_2d(const dist::SampledDistribution& T,
                  const std::function<double(double, double)>& Xh, const CutoffPair& pair,
                  int m, const TestFunction& omega_x, const TestFunction& omega_h,
                  double tol = 1e-8);

}  // namespace renorm::ext
