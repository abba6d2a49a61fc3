#pragma once

// Scale-weighted (Mellin) regularization of log-power symbols on the line:
// the weighted scale integral T^mu, its meromorphic continuation, Laurent
// coefficients by contour integration, the pole-subtracted limit extension,
// the Euler-scaling residue, and the one-parameter flow of the extension
// under rescaling of the cutoff.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "renorm/distributions.hpp"
#include "renorm/minitoml.hpp"
#include "renorm/testfunc.hpp"

namespace renorm::mel {

using Complex = std::complex<double>;

// One exactly-scaling building block  coef * |h|^(omega + k) * log^logpow|h|
// on one side of 0. Under h -> lambda h it reproduces itself times
// lambda^(omega+k) up to lower log powers, which is the graded (Jordan)
// scaling the module is built around.
struct SymbolTerm {
  double coef = 1.0;
  int k = 0;        // grade: exponent is omega + k
  int logpow = 0;   // 0..2
  bool negative_side = false;
};

// A truncated scaling expansion t = sum of terms + remainder, where the
// remainder is an explicit density whose scaling degree is at least
// omega + trunc + 1. The terms are evaluable everywhere off 0 and carry the
// entire pole structure of the regularization.
struct LogPowerSymbol {
  double omega = 0.0;  // leading degree
  int trunc = 0;       // highest grade k present
  int jordan = 1;      // 1 + max log power, bounded by 3
  std::vector<SymbolTerm> terms;
  std::function<double(double)> remainder;  // optional; null means none
  double remainder_degree = 0.0;            // scaling-degree lower bound

  double density(double h) const;  // total density, h != 0

  // coef * |h|^alpha (* log|h| if logpow = 1) on the chosen side(s);
  // omega = alpha, trunc = 0.
  static LogPowerSymbol power(double alpha, int logpow = 0,
                              dist::Support side = dist::Support::positive,
                              double coef = 1.0);
};

// Checks the graded scaling relations of every term at lambda in {1/2, 1/4}
// on a sample grid, and the remainder bound |r(lambda h)| <~
// lambda^remainder_degree |r(h)|. Returns false when either fails.
bool verify_scaling(const LogPowerSymbol& t, double tol = 1e-9);

// Distance from mu to the nearest pole -(omega + k + m + 1) of the
// regularization (scan depth covers every pole that the truncation resolves).
double pole_distance(const LogPowerSymbol& t, Complex mu);

// Evaluation route for the weighted scale integral. `automatic` picks the
// direct quadrature when it converges with margin and the continuation
// otherwise; forcing a branch is how the overlap strip gets cross-checked.
enum class Branch { automatic, direct, continued };

// <T^mu, omega> = int_0^1 dl/l l^mu <t psi(./l), omega>. Direct quadrature
// when the integral converges with margin; otherwise the continuation built
// from the graded expansion: explicit rational pole part plus a holomorphic
// rest. The two branches agree on the overlap strip; probes supported away
// from the singular point give an entire function and accept any mu. Throws
// domain_error within 1e-6 of a pole (probe touching the singular point),
// below the continuation range of the truncation, or when a forced direct
// branch does not converge.
Complex mellin(const LogPowerSymbol& t, const CutoffPair& pair, const TestFunction& omega,
               Complex mu, double tol = 1e-10, Branch branch = Branch::automatic);

struct LaurentSeries {
  double center = 0.0;
  int kmin = 0;  // lowest power kept
  std::vector<Complex> coeff;  // coeff[i] multiplies (mu - center)^(kmin + i)
  int points = 0;              // contour points at convergence
  double radius = 0.0;

  // Coefficient of (mu - center)^k: zero below kmin (the order is bounded),
  // out_of_range above the computed top.
  Complex at(int k) const;
};

// Laurent coefficients of mu -> <T^mu, omega> about `center` by trapezoidal
// contour sums on |mu - center| = radius, doubling the point count until the
// coefficients are stable to 1e-8. radius <= 0 picks half the gap to the
// nearest pole away from the center. Throws runtime_error when doubling
// never stabilizes (radius reaching another pole).
LaurentSeries laurent(const LogPowerSymbol& t, const CutoffPair& pair,
                      const TestFunction& omega, double center = 0.0, double radius = 0.0,
                      int kmax = 2);

// Pole-subtracted limit extension: lim_{mu->0} (T^mu - sum_{k<0} mu^k T^(k))
// evaluated on the four-point ring {+-r, +-ir} (r = 0.02), whose average
// cancels the quadratic term of the limit exactly, plus the outer pairing
// <t (1-chi), omega>.
class RieszExtension {
 public:
  RieszExtension(LogPowerSymbol t, CutoffPair pair);

  const LogPowerSymbol& base() const { return t_; }
  const CutoffPair& cutoff() const { return pair_; }

  dist::PairResult evaluate(const TestFunction& omega, double tol = 1e-9) const;

 private:
  LogPowerSymbol t_;
  CutoffPair pair_;
};

RieszExtension riesz_extend(const LogPowerSymbol& t, const CutoffPair& pair);

// Euler operator h d/dh applied grade-by-grade:
// rho(c |h|^a log^p) = a c |h|^a log^p + p c |h|^a log^(p-1). Requires a
// term-only symbol (no numeric remainder).
LogPowerSymbol symbol_rho(const LogPowerSymbol& t);

// The k = -1 Laurent coefficient at 0, the scaling anomaly of the extension.
double residue_rho(const LogPowerSymbol& t, const CutoffPair& pair,
                   const TestFunction& omega);

// Defining equation rho(R t) - R(rho t) with rho moved to the probe by
// duality in the first term: -R t((1 + h d/dh) omega) - R(rho t)(omega).
double residue_defining(const LogPowerSymbol& t, const CutoffPair& pair,
                        const TestFunction& omega, double tol = 1e-9);

struct FlowFit {
  std::vector<double> coeff;  // coeff[j] multiplies log(ell)^j
  double residual = 0.0;
  std::vector<double> values;  // extension value per grid point
};

// Extension value as a function of the cutoff scale ell, where the scaled
// scheme replaces chi(.) by chi(ell .): the window shrinks as ell grows.
// Least-squares polynomial in log(ell) of the given degree; throws
// runtime_error when the residual exceeds tol (flow not polynomial).
FlowFit rg_flow(const LogPowerSymbol& t, const CutoffPair& pair, const TestFunction& omega,
                const std::vector<double>& ells, int degree, double tol = 1e-6);

// [symbol] with keys omega (required), trunc, jordan, then one subsection
// per term, [symbol.term1], [symbol.term2], ..., with keys coef, k, logpow,
// side = "h>0" | "h<0". Unknown keys are rejected.
LogPowerSymbol symbol_from_toml(const toml::Table& tbl,
                                const std::string& section = "symbol");

}  // namespace renorm::mel
