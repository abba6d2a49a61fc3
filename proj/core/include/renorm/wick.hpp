#pragma once

// Exact symbolic Wick calculus for powers of one scalar field at labeled
// points. The commutative algebra is spanned by monomials phi^{a_1}(x_1)...
// phi^{a_r}(x_r); the coalgebra structure is the binomial coproduct, and the
// operator product is the commutative product twisted by the contraction
// pairing generated by (phi(x)|phi(y)) = D(x,y). Everything here is exact
// over the rationals; numbers only appear in eval_amplitude.

#include "renorm/rational.hpp"

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace renorm::wick {

// point label -> exponent; absent label means exponent 0. Labels are the
// 1-based indices used in D(i,j).
using Monomial = std::map<int, int>;

// One propagator product: ordered pair (i,j) -> power. Pairs keep the order
// they were produced in (left factor first); canon_symmetric folds (j,i)
// onto (i,j) when the propagator is symmetric.
using PropProduct = std::map<std::pair<int, int>, int>;

// Rational linear combination of propagator products; the empty product is
// the constant 1.
using Amplitude = std::map<PropProduct, Rational>;

// monomial -> amplitude coefficient.
using FieldPoly = std::map<Monomial, Amplitude>;

struct TensorTerm {
  Monomial left;
  Monomial right;
  Rational coef;
};
using TensorSum = std::vector<TensorTerm>;

// Symmetric, zero-diagonal multiplicity matrix whose row sums are the field
// powers; each matrix is one contraction pattern of the full vacuum pairing.
struct GraphMatrix {
  int n = 0;
  std::vector<std::vector<int>> m;
};

int mono_degree(const Monomial& m);
Monomial mono_mul(const Monomial& a, const Monomial& b);
bool points_disjoint(const Monomial& a, const Monomial& b);

void amp_accumulate(Amplitude& into, const Amplitude& add, const Rational& scale = 1);
Amplitude amp_mul(const Amplitude& a, const Amplitude& b);
PropProduct props_canon_symmetric(const PropProduct& p);
Amplitude amp_canon_symmetric(const Amplitude& a);
bool amp_equal_symmetric(const Amplitude& a, const Amplitude& b);

// Binomial coproduct, extended multiplicatively over points:
// phi^n -> sum_k C(n,k) phi^k (x) phi^{n-k}.
TensorSum coproduct(const Monomial& m);

// Counit: 1 on the empty monomial, 0 otherwise; on a polynomial it returns
// the amplitude attached to the empty monomial.
Rational counit(const Monomial& m);
Amplitude counit(const FieldPoly& p);

// Contraction pairing. Throws std::invalid_argument when the point sets
// meet: contractions only couple fields at distinct points.
Amplitude laplace(const Monomial& a, const Monomial& b);
Amplitude laplace(const FieldPoly& a, const FieldPoly& b);

// Twisted product A*B = sum (A(1)|B(1)) A(2) B(2).
FieldPoly star(const FieldPoly& a, const FieldPoly& b);

FieldPoly poly_one();
FieldPoly poly_power(int point, int power);

// Left-associated chain phi^{p_1}(x_1) * ... * phi^{p_n}(x_n).
FieldPoly star_chain(const std::vector<int>& powers);

// Vacuum expectation of the chain, three independent ways. All return pairs
// (i,j) with i<j so results compare directly.
Amplitude vev_star(const std::vector<int>& powers);
Amplitude vev_graphs(const std::vector<int>& powers);
Amplitude vev_pairings(const std::vector<int>& powers);  // brute-force matchings

// All contraction matrices for the given powers, lexicographic in the
// row-major upper triangle, duplicate-free by construction.
std::vector<GraphMatrix> enumerate_graphs(const std::vector<int>& powers);

// Substitutes prop(points[i-1], points[j-1]) for D(i,j). Throws
// std::domain_error when a contracted pair of points coincides (the
// propagator is singular there) and std::invalid_argument on label range
// errors. The empty amplitude evaluates to 0.
double eval_amplitude(
    const Amplitude& amp, const std::vector<std::vector<double>>& points,
    const std::function<double(const std::vector<double>&, const std::vector<double>&)>& prop);

// "2*D(1,2)^2 + ..." with terms in key order; "0" for the empty amplitude.
std::string amp_to_string(const Amplitude& amp);

// {"terms":[{"monomial":{"1":2},"amp":[{"props":[[1,2],[1,2]],"coef":"2"}]}]}
// props lists one [i,j] entry per propagator power.
std::string poly_to_json(const FieldPoly& p);
FieldPoly poly_from_json(const std::string& text);

}  // namespace renorm::wick
