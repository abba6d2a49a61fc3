#pragma once

// Constant-metric causal order on R^{1+p} with an adjustable cone widening,
// coincidence-class Hasse diagrams, the admissible-splitting predicate for
// point configurations, a smooth partition of unity on the unit sphere of
// relative coordinates subordinate to the splitting regions, and the
// recursive assembly of time-ordered amplitudes from factorized pieces.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace renorm::causal {

using Point = std::vector<double>;
using Config = std::vector<Point>;

// Signature (+,-,...,-). The widened form adds c^2 (dx^0)^2, so larger c
// means a wider future cone and more related pairs.
struct CausalStructure {
  int space_dim = 1;
  double c = 0.0;

  int dim() const { return space_dim + 1; }

  double q(const Point& v) const {
    double t = v[0];
    double s = (1.0 + c * c) * t * t;
    for (int i = 1; i <= space_dim; ++i) s -= v[i] * v[i];
    return s;
  }
};

// y - x lies in the closed future cone; x == y counts as related.
bool leq(const CausalStructure& cs, const Point& x, const Point& y);

// Positive exactly when NOT leq(x, y), zero on the cone boundary, and
// continuous; used to calibrate the sphere partition.
double not_leq_margin(const CausalStructure& cs, const Point& x, const Point& y);

struct HasseDiagram {
  std::vector<std::vector<int>> classes;        // coincidence classes
  std::vector<std::pair<int, int>> edges;       // covering edges, earlier -> later
};

HasseDiagram hasse(const CausalStructure& cs, const Config& cfg);
std::string hasse_dot(const HasseDiagram& d);

bool is_thin_diagonal(const Config& cfg);

// I as 0-based indices. Throws std::invalid_argument unless I is a proper
// nonempty subset. True when no point of I precedes a point of the
// complement.
bool in_region(const CausalStructure& cs, const Config& cfg, const std::vector<int>& I);

// All proper nonempty admissible I, ascending in the subset bitmask. Empty
// exactly on the thin diagonal.
std::vector<std::vector<int>> admissible_sets(const CausalStructure& cs, const Config& cfg);

std::string config_to_json(const Config& cfg);
Config config_from_json(const std::string& text);

// Smooth partition of unity indexed by proper subsets I of an n-point
// configuration, depending only on the scale- and translation-invariant
// sphere projection of the relative coordinates, hence exactly invariant
// under translations and positive rescalings about the first point.
//
// Each piece is a product over pairs (i in I, j outside I) of exponential
// smoothstep bumps that vanish identically unless the pair is unrelated for
// the widened order with margin at least eps, so every nonzero chi_I
// certifies that the I-factorization is valid at that configuration. The
// margin threshold eps is calibrated once by rejection sampling of the
// sphere (the worst best-subset margin over the samples, shrunk by an
// inflation factor for unsampled gaps) and then verified on a fresh batch;
// the family is immutable afterwards and safe for concurrent reads.
class SpherePartition {
 public:
  // widen_delta is added to cs.c for the support regions; it must be > 0 so
  // supports are strictly inside the unwidened regions.
  SpherePartition(CausalStructure cs, int npoints, std::uint64_t seed,
                  double widen_delta = 0.25);

  int npoints() const { return n_; }
  double margin_threshold() const { return eps_; }
  // Subsets whose robust region was hit during calibration; a cover of the
  // sphere together with the thresholds.
  std::vector<std::uint32_t> cover_masks() const;

  // chi_I at the configuration; throws std::domain_error on the thin
  // diagonal. Sum over proper subsets is 1 by construction.
  double chi(const Config& cfg, const std::vector<int>& I) const;

  // All nonzero chi values keyed by subset bitmask.
  std::map<std::uint32_t, double> chi_all(const Config& cfg) const;

  static std::uint32_t mask_of(const std::vector<int>& I);

 private:
  std::vector<double> project(const Config& cfg) const;
  double bump(const std::vector<double>& u, std::uint32_t mask) const;

  CausalStructure base_;
  CausalStructure widened_;
  int n_ = 0;
  double eps_ = 0;
  std::vector<std::uint32_t> cover_;
};

// Recursive assembly of the numerical amplitude for one vertex power per
// point, using a symmetric propagator. Every subset level is glued with its
// own sphere partition; the top level also reports the spread between the
// factorized values of all admissible splittings, which must vanish for a
// symmetric propagator. Throws std::domain_error when two points coincide.
struct AssemblyReport {
  double value = 0;
  double factorization_spread = 0;
  int admissible_count = 0;
};

AssemblyReport assemble_tn(
    const CausalStructure& cs, const Config& cfg, const std::vector<int>& powers,
    const std::function<double(const Point&, const Point&)>& prop,
    std::uint64_t partition_seed);

}  // namespace renorm::causal
