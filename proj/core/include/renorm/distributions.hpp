#pragma once

// Distributions on the line with one singular point at 0, realized either as
// sampled densities or as symbolic point masses: quadrature pairings with
// annular refinement toward the singularity, the scaling action, scaling
// degree estimation by log-log regression, and the telescoping cutoff
// identity check.

#include <functional>
#include <string>
#include <vector>

#include "renorm/minitoml.hpp"
#include "renorm/quadrature.hpp"
#include "renorm/testfunc.hpp"

namespace renorm::dist {

enum class Support { full, positive, negative };

struct SampledDistribution {
  std::function<double(double)> density;  // evaluated only off 0
  double degree = 0;                      // claimed scaling degree s
  Support support = Support::full;
  int d = 1;                              // codimension of the singular point
  bool is_delta = false;                  // symbolic point mass
  int delta_order = 0;

  static SampledDistribution power(double exponent, Support sup = Support::full);
  // |h|^exponent log|h| on the chosen side(s)
  static SampledDistribution power_log(double exponent, Support sup = Support::full);
  static SampledDistribution delta(int order = 0, int d = 1);
  static SampledDistribution from_density(std::function<double(double)> f, double degree,
                                          Support sup = Support::full);
};

struct PairResult {
  double value = 0;
  double err = 0;
  bool converged = true;
  bool diverged = false;  // non-integrable near the singular point
};

// Integrate f over [-R_neg, 0) u (0, R_pos] with dyadic annular refinement
// toward 0 and honest divergence detection. A side with R <= 0 is skipped;
// claimed_sigma <= 0 (degree + codimension of the integrand) short-circuits
// to the diverged flag.
PairResult integrate_singular(const RealFn& f, double R_neg, double R_pos,
                              double claimed_sigma, double tol);

// <t, phi> by adaptive quadrature, dyadic annuli toward 0. Point masses are
// evaluated symbolically.
PairResult pair(const SampledDistribution& t, const TestFunction& phi, double tol = 1e-9);

// <t_lambda, phi> = integral of density(lambda h) phi(h); lambda in (0,1].
PairResult scale_pair(const SampledDistribution& t, const TestFunction& phi, double lambda,
                      double tol = 1e-9);

struct ScalingReport {
  double slope = 0;       // estimated degree s*
  double r2 = 0;
  bool log_correction = false;
  bool confident = false; // power-law fit quality above threshold
};

// Minimum over probes of the log-log regression slope of |<t_lambda, phi>|
// on a log-spaced lambda grid.
ScalingReport scaling_degree(const SampledDistribution& t,
                             const std::vector<TestFunction>& probes,
                             int grid_points = 40, double lam_lo = 1e-4,
                             double lam_hi = 1.0, double tol = 1e-9);

// max_h |chi(h) - int_0^1 dl/l psi(h/l)| over the grid, h != 0.
double lp_identity_check(const CutoffPair& pair, const std::vector<double>& hgrid,
                         double tol = 1e-12);

// [distribution] kind="power"|"power_log"|"delta", exponent=..., order=...,
// support="full"|"h>0"|"h<0".
SampledDistribution dist_from_toml(const toml::Table& tbl,
                                   const std::string& section = "distribution");

}  // namespace renorm::dist
