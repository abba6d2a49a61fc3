#pragma once

// Conic subsets of the punctured cotangent bundle T*R^d as predicate plus
// sampler pairs, with the operations needed to track singular directions of
// distributions: conormal bundles of sampled zero sets, landing estimates
// near a distinguished submanifold {h = 0}, fiberwise sums with angular-gap
// separation, transport under diffeomorphisms, and an energy-sign
// classifier for covector tuples over a causal order. Set-level claims are
// sampled at explicit resolution: predicates are exact where a closed form
// exists and resolution-certified otherwise.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "renorm/causal.hpp"
#include "renorm/minitoml.hpp"
#include "renorm/rng.hpp"

namespace renorm::mic {

// One point of T*R^d with covector xi != 0; samplers emit |xi| = 1.
struct ConePoint {
  std::vector<double> x;
  std::vector<double> xi;
};

// Sampling range for one coordinate. Plain axes draw uniformly in [lo, hi].
// Log-magnitude axes draw |v| log-uniformly in [mag_floor, max(|lo|, |hi|)]
// with the sign picked among the signs the interval allows, so every dyadic
// shell near v = 0 receives samples.
struct AxisRange {
  double lo = -1.0;
  double hi = 1.0;
  bool log_magnitude = false;
  double mag_floor = 1e-8;
};
using Box = std::vector<AxisRange>;

std::vector<double> draw_point(const Box& box, Rng& g);

// Scalar field with analytic gradient.
struct ScalarField {
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
};

// Closed conic set: membership predicate (invariant under positive scaling
// of the covector) plus a deterministic seeded sampler. The fiber sampler
// returns unit covectors of the fiber over a fixed base point, or an empty
// list when the cone has no fiber there; sums and disjointness use it.
struct Cone {
  int dim = 0;
  std::string tag;  // optional closed-form tag: "conormal", "graph", ...
  std::function<bool(const std::vector<double>& x, const std::vector<double>& xi)> member;
  std::function<std::vector<ConePoint>(std::uint64_t seed, int count)> sample;
  std::function<std::vector<std::vector<double>>(const std::vector<double>& x,
                                                 std::uint64_t seed, int count)>
      fiber;
};

// Membership of every sample survives covector scaling by 2 and 10.
bool conic_on_samples(const Cone& c, std::uint64_t seed, int count);

// Conormal bundle of {f_1 = ... = f_m = 0}: base on the zero set, covector a
// nonzero combination of the df_i. Base samples are Gauss-Newton projections
// of box draws onto the zero set. Throws std::invalid_argument when the
// differentials fail a sampled independence check on the zero set.
Cone conormal(int dim, std::vector<ScalarField> defining, Box box, double tol = 1e-7,
              std::uint64_t check_seed = 1);

// Landing-bounded graph cone over a split chart (x in R^base_dim, h in
// R^trans_dim): covectors (k, xi) whose transverse part xi lies in the
// closed angular cap of half-angle cap around the unit direction u and whose
// base part is pinned to k = |h| |xi| slope(x, h). The landing ratio
// |k| / (|h||xi|) is |slope| by construction.
Cone graph_cone(int base_dim, int trans_dim,
                std::function<std::vector<double>(const std::vector<double>&)> slope,
                std::vector<double> cap_direction, double cap_half_angle, Box box,
                double tol = 1e-9);

// Steepening family over (x, h) in R^2, h > 0: covectors proportional to
// (1, h^-exponent). Its landing ratio is h^(exponent - 1), so every exponent
// below 1 blows up toward h = 0 while the closure over {h = 0} still sits
// inside {k-axis}. The exponent 1/2 is the stock counterexample.
Cone steep_cone(double exponent, Box box, double tol = 1e-9);

// Cone determined by a finite set of unit-cosphere samples: membership is
// distance to the nearest sample below match_tol (base distance plus
// covector chord distance), closed within that resolution.
Cone cone_from_samples(int dim, std::vector<ConePoint> samples, double match_tol);

// Landing estimate |k| <= delta |h| |xi| on {0 < |h| <= eps}, where the
// first base_dim coordinates are x and the rest are h (covectors split the
// same way). Samples are binned by dyadic |h| shells; the verdict is
// accepted iff the per-shell maximum ratio shows no sustained growth as
// |h| -> 0 (a supremum over finitely many samples is always finite, so
// boundedness must be judged from shell growth). delta reports the observed
// supremum; rejection returns the worst deep-shell sample as witness.
struct SoftLandingReport {
  bool ok = false;
  double delta = 0.0;
  double eps = 0.0;
  double growth_per_octave = 0.0;  // fitted log2 ratio slope per shell
  std::vector<double> shell_h;     // outer |h| of each populated shell
  std::vector<double> shell_ratio; // max ratio seen in that shell
  std::optional<ConePoint> witness;
};

SoftLandingReport soft_landing_check(const Cone& c, int base_dim, double eps,
                                     std::uint64_t seed, int samples = 20000,
                                     int shells = 13);

std::string to_json(const SoftLandingReport& r);

// Minimum cosphere separation between c1 and the antipode of c2 over shared
// base points. Disjoint when the gap clears 1e-3 (closed cones need a
// strict angular gap). When the sampled bases never meet, no cancellation
// is possible and the gap reports the sphere diameter 2.
struct DisjointnessReport {
  bool disjoint = false;
  double gap = 0.0;
  int common_base_points = 0;
  std::optional<ConePoint> close1, close2;  // realizing pair when bases meet
};

DisjointnessReport hormander_disjoint(const Cone& c1, const Cone& c2, std::uint64_t seed,
                                      int base_samples = 200, int fiber_samples = 32);

std::string to_json(const DisjointnessReport& r);

// Union-plus-fiberwise-sum cone G1 u G2 u (G1 + G2), where xi in (G1+G2)|_x
// means xi = xi1 + xi2 with xi_i in G_i|_x. Membership tests the union parts
// exactly and the sum part by decomposing xi over sampled fiber direction
// pairs (least squares in each 2-plane, nonnegative coefficients).
Cone cone_sum(const Cone& c1, const Cone& c2, int decomposition_samples = 48,
              double tol = 1e-6);

// Diffeomorphism with analytic Jacobian; jacobian returns the matrix of
// d(forward) at x in row-major order (row i = gradient of component i).
struct Diffeo {
  int dim = 0;
  std::function<std::vector<double>(const std::vector<double>&)> forward;
  std::function<std::vector<double>(const std::vector<double>&)> inverse;
  std::function<std::vector<double>(const std::vector<double>&)> jacobian;
};

// Transport Phi*G = {(x; dPhi_x^T xi) : (Phi(x), xi) in G}. Membership
// pushes the query forward through the inverse transpose Jacobian; samples
// are inverse images of target samples.
Cone pullback_cone(const Diffeo& phi, const Cone& c);

// Constant-metric context for the energy classifier: `order` is the
// (possibly widened) causal order used for maximality, `energy` the covector
// form whose { q(xi, xi) >= 0, xi_0 > 0 } cone is the positive-energy cone.
// zero_tol decides when a summed covector counts as zero relative to the
// largest summand at that point.
struct PolarizationContext {
  causal::CausalStructure order;
  causal::CausalStructure energy;
  double zero_tol = 1e-10;
};

// Closed cone membership: q(xi, xi) >= 0 and xi_0 > 0.
bool positive_energy(const PolarizationContext& ctx, const std::vector<double>& xi);

// Tuple of base points with one covector each; repeats are allowed and the
// trace groups coincident points and sums their covectors.
struct CotangentTuple {
  std::vector<causal::Point> x;
  std::vector<std::vector<double>> xi;
};

// Indexwise covector sum over the same base configuration; throws
// std::invalid_argument when the configurations differ.
CotangentTuple tuple_sum(const CotangentTuple& a, const CotangentTuple& b);

// Energy-sign classification of a covector tuple. Group indices by
// coincident base point; keep the points carrying some nonzero covector;
// among those, look at the maximal points for ctx.order. strict: every
// maximal point's summed covector has strictly negative energy. weak: the
// sums are negative-energy or zero with at least one zero. no: anything
// else. Throws std::invalid_argument when every covector vanishes.
enum class Polarization { strict, weak, no };

Polarization is_polarized(const CotangentTuple& p, const PolarizationContext& ctx);

// Build a cone from a parsed [cone] table. Common keys: kind, dim, box_lo,
// box_hi (arrays of length dim), optional box_log (array of 0/1 flags),
// base_dim. Kind-specific keys: "conormal" takes defining = array of
// coordinate names ("x1".. for the first base_dim axes, "h1".. after) or
// "Q" (signature (+,-,..,-) form on the transverse block); "steep" takes
// exponent; "graph" takes slope (constant landing ratio), cap_dir (array,
// transverse), cap_angle. Unknown keys are rejected.
Cone cone_from_toml(const toml::Table& root);

}  // namespace renorm::mic
