#pragma once

// Phase functions S(x, theta), homogeneous of degree one in the fiber
// variable, used as finite parametrizations of conic sets: the critical set
// {d_theta S = 0} is sampled by damped Gauss-Newton from deterministic
// seeds, its image under (x, theta) -> (x, d_x S) forms a cone, and sums of
// families track bookkeeping components so the count of strata survives
// composition. The fiber of a family is a product of blocks; each summand
// contributes its block or its zero section, so a sum of families with
// n_1, ..., n_k components has (n_1 + 1)...(n_k + 1) - 1 of them.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "renorm/cones.hpp"

namespace renorm::mic {

// One fiber block R^dim \ 0; one_sided restricts to theta[0] > 0 (a
// half-line for dim 1), which is how single-orientation covector families
// are parametrized.
struct FiberBlock {
  int dim = 1;
  bool one_sided = false;
};

// S and grad take the full fiber vector (blocks laid out consecutively);
// grad fills d_x S (size base_dim) and d_theta S (size fiber_dim()).
// components lists the active-block masks, none of them all-zero; a mask
// selects which blocks are away from their zero section on that piece.
struct MorseFamily {
  int base_dim = 0;
  std::vector<FiberBlock> blocks;
  std::function<double(const std::vector<double>& x, const std::vector<double>& th)> S;
  std::function<void(const std::vector<double>& x, const std::vector<double>& th,
                     std::vector<double>& dx, std::vector<double>& dth)>
      grad;
  std::vector<std::vector<char>> components;

  int fiber_dim() const {
    int k = 0;
    for (const auto& b : blocks) k += b.dim;
    return k;
  }
};

int component_count(const MorseFamily& f);

// S = sum_i theta_i f_i(x) over one block of dimension defining.size();
// parametrizes the conormal bundle of the joint zero set.
MorseFamily defining_family(int base_dim, std::vector<ScalarField> defining,
                            bool one_sided = false);

// Sampled homogeneity S(x, s theta) = s S(x, s) for s in {2, 10} and a
// lower bound on |dS| over box draws; throws std::invalid_argument on
// failure. Guards the construction-level invariants.
void validate_family(const MorseFamily& f, const Box& base_box, std::uint64_t seed,
                     int samples = 200);

// Sum family on the barred fiber product: blocks concatenate, components
// combine each factor's pieces with the added zero sections (minus the
// joint zero section). The gradient of the sum can only vanish when the
// image cones meet antipodally, so the construction first runs
// hormander_disjoint on the sampled images over base_box and throws
// std::domain_error when the gap closes.
MorseFamily morse_sum(const MorseFamily& a, const MorseFamily& b, const Box& base_box,
                      std::uint64_t seed);

struct CriticalPoint {
  std::vector<double> x;
  std::vector<double> theta;  // unit length over the active blocks
  int component = 0;
};

// Solve d_theta S = 0 per component with theta on the unit sphere of the
// active blocks: damped Gauss-Newton (least-squares step, halving line
// search) started from a base grid times a deterministic fiber-sphere
// lattice (2 seeds for S^0, 32 for S^1, up to 1024 for higher spheres),
// converged roots kept inside the box and merged at distance 1e-6.
std::vector<CriticalPoint> morse_critical(const MorseFamily& f, const Box& base_box,
                                          std::uint64_t seed, int base_grid = 4);

// One Gauss-Newton run from a caller-supplied seed; lets callers verify
// that a prescribed point is attained without dense coverage.
std::optional<CriticalPoint> refine_critical(const MorseFamily& f, int component,
                                             const std::vector<double>& x0,
                                             const std::vector<double>& theta0);

// (x; d_x S) at the critical samples, covector normalized.
std::vector<ConePoint> lagrange_map(const MorseFamily& f,
                                    const std::vector<CriticalPoint>& crit);

Cone lagrange_cone(const MorseFamily& f, const std::vector<CriticalPoint>& crit,
                   double match_tol);

// Largest |omega(u, v)| over pushed-forward tangent pairs of the critical
// set at one sample, with omega the canonical two-form on T*R^n. Tangent
// directions come from the numerical kernel of d(d_theta S); curves are
// stepped and reprojected onto the critical set before differencing, so the
// value measures the isotropy of the image rather than finite-step drift.
double symplectic_residual(const MorseFamily& f, const CriticalPoint& p,
                           double fd_step = 1e-5);

}  // namespace renorm::mic
