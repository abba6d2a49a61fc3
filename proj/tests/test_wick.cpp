#include "doctest.h"

#include "renorm/rng.hpp"
#include "renorm/wick.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

using namespace renorm;
using namespace renorm::wick;

namespace {

Monomial mono(std::initializer_list<std::pair<int, int>> entries) {
  Monomial m;
  for (auto& [pt, e] : entries)
    if (e != 0) m[pt] = e;
  return m;
}

PropProduct props(std::initializer_list<std::tuple<int, int, int>> entries) {
  PropProduct p;
  for (auto& [i, j, k] : entries)
    if (k != 0) p[{i, j}] = k;
  return p;
}

Amplitude amp_const(long v) {
  Amplitude a;
  if (v != 0) a[{}] = Rational(v);
  return a;
}

// Random polynomial supported on the given points, small exponents and
// integer coefficients; exact arithmetic keeps the checks equality checks.
FieldPoly random_poly(Rng& g, const std::vector<int>& pts) {
  std::uniform_int_distribution<int> nterms(1, 3), expo(0, 3), coefd(-4, 4);
  FieldPoly out;
  int made = nterms(g);
  for (int t = 0; t < made; ++t) {
    Monomial m;
    for (int p : pts) {
      int e = expo(g);
      if (e != 0) m[p] = e;
    }
    int c = coefd(g);
    if (c == 0) c = 1;
    Amplitude a;
    a[{}] = Rational(c);
    amp_accumulate(out[m], a);
    if (out[m].empty()) out.erase(m);
  }
  return out;
}

}  // namespace

TEST_CASE("coproduct is the binomial split, multiplicative over points") {
  // phi^2 -> 1 (x) phi^2 + 2 phi (x) phi + phi^2 (x) 1
  auto ts = coproduct(mono({{1, 2}}));
  std::map<std::pair<Monomial, Monomial>, Rational> got;
  for (auto& t : ts) got[{t.left, t.right}] += t.coef;
  CHECK(got.size() == 3);
  CHECK(got[{mono({}), mono({{1, 2}})}] == Rational(1));
  CHECK(got[{mono({{1, 1}}), mono({{1, 1}})}] == Rational(2));
  CHECK(got[{mono({{1, 2}}), mono({})}] == Rational(1));

  // two points: coefficients are products of binomials
  auto ts2 = coproduct(mono({{1, 2}, {2, 1}}));
  std::map<std::pair<Monomial, Monomial>, Rational> got2;
  for (auto& t : ts2) got2[{t.left, t.right}] += t.coef;
  CHECK(got2.size() == 6);
  CHECK(got2[{mono({{1, 1}, {2, 1}}), mono({{1, 1}})}] == Rational(2));
}

TEST_CASE("counit picks the empty monomial") {
  CHECK(counit(mono({})) == Rational(1));
  CHECK(counit(mono({{3, 1}})) == Rational(0));
  FieldPoly p;
  p[mono({})] = amp_const(7);
  p[mono({{1, 2}})] = amp_const(3);
  CHECK(counit(p) == amp_const(7));
  Amplitude pair_vac;
  pair_vac[props({{1, 2, 1}})] = Rational(1);
  CHECK(counit(star_chain({1, 1})) == pair_vac);
  CHECK(counit(star_chain({1, 1, 1})).empty());  // odd total degree
}

TEST_CASE("counit and coassociativity axioms on assorted monomials") {
  std::vector<Monomial> samples = {
      mono({}),           mono({{1, 1}}),         mono({{1, 4}}),
      mono({{1, 8}}),     mono({{1, 3}, {2, 2}}), mono({{1, 2}, {2, 2}, {5, 3}}),
      mono({{2, 1}, {7, 4}, {9, 3}})};
  for (auto& m : samples) {
    // (counit (x) id) after coproduct returns the monomial itself
    std::map<Monomial, Rational> collapsed;
    for (auto& t : coproduct(m)) collapsed[t.right] += counit(t.left) * t.coef;
    for (auto it = collapsed.begin(); it != collapsed.end();)
      it = (it->second == 0) ? collapsed.erase(it) : std::next(it);
    REQUIRE(collapsed.size() == 1);
    CHECK(collapsed.begin()->first == m);
    CHECK(collapsed.begin()->second == Rational(1));

    // (coproduct (x) id) and (id (x) coproduct) agree termwise
    using Triple = std::tuple<Monomial, Monomial, Monomial>;
    std::map<Triple, Rational> lhs, rhs;
    for (auto& t : coproduct(m))
      for (auto& u : coproduct(t.left)) lhs[{u.left, u.right, t.right}] += u.coef * t.coef;
    for (auto& t : coproduct(m))
      for (auto& u : coproduct(t.right)) rhs[{t.left, u.left, u.right}] += u.coef * t.coef;
    CHECK(lhs == rhs);
  }
}

TEST_CASE("contraction pairing closed forms") {
  // (phi^k | phi^l) = delta_{kl} k! D^k
  for (int k = 0; k <= 5; ++k) {
    for (int l = 0; l <= 5; ++l) {
      Amplitude got = laplace(mono({{1, k}}), mono({{2, l}}));
      if (k != l) {
        CHECK(got.empty());
        continue;
      }
      Amplitude want;
      if (k == 0)
        want = amp_const(1);
      else
        want[props({{1, 2, k}})] = Rational(factorial(k));
      CHECK(got == want);
    }
  }

  // (phi_1^2 | phi_2 phi_3) = 2 D(1,2) D(1,3)
  Amplitude got = laplace(mono({{1, 2}}), mono({{2, 1}, {3, 1}}));
  Amplitude want;
  want[props({{1, 2, 1}, {1, 3, 1}})] = Rational(2);
  CHECK(got == want);

  CHECK_THROWS_AS((void)laplace(mono({{1, 1}}), mono({{1, 1}})), std::invalid_argument);
}

TEST_CASE("star product expansions at low order") {
  auto term = [](const FieldPoly& p, const Monomial& m) -> Amplitude {
    auto it = p.find(m);
    return it == p.end() ? Amplitude{} : it->second;
  };

  SUBCASE("phi^2 * phi^2") {
    FieldPoly s = star(poly_power(1, 2), poly_power(2, 2));
    REQUIRE(s.size() == 3);
    CHECK(term(s, mono({{1, 2}, {2, 2}})) == amp_const(1));
    Amplitude mid;
    mid[props({{1, 2, 1}})] = Rational(4);
    CHECK(term(s, mono({{1, 1}, {2, 1}})) == mid);
    Amplitude full;
    full[props({{1, 2, 2}})] = Rational(2);
    CHECK(term(s, mono({})) == full);
  }

  SUBCASE("phi^3 * phi^3 coefficients 1, 9, 18, 6") {
    FieldPoly s = star(poly_power(1, 3), poly_power(2, 3));
    REQUIRE(s.size() == 4);
    CHECK(term(s, mono({{1, 3}, {2, 3}})) == amp_const(1));
    Amplitude a1, a2, a3;
    a1[props({{1, 2, 1}})] = Rational(9);
    a2[props({{1, 2, 2}})] = Rational(18);
    a3[props({{1, 2, 3}})] = Rational(6);
    CHECK(term(s, mono({{1, 2}, {2, 2}})) == a1);
    CHECK(term(s, mono({{1, 1}, {2, 1}})) == a2);
    CHECK(term(s, mono({})) == a3);
  }

  SUBCASE("phi_1^2 * (phi_2 phi_3) mixes both partners") {
    FieldPoly b;
    b[mono({{2, 1}, {3, 1}})] = amp_const(1);
    FieldPoly s = star(poly_power(1, 2), b);
    REQUIRE(s.size() == 4);
    CHECK(term(s, mono({{1, 2}, {2, 1}, {3, 1}})) == amp_const(1));
    Amplitude c12, c13, cfull;
    c12[props({{1, 2, 1}})] = Rational(2);
    c13[props({{1, 3, 1}})] = Rational(2);
    cfull[props({{1, 2, 1}, {1, 3, 1}})] = Rational(2);
    CHECK(term(s, mono({{1, 1}, {3, 1}})) == c12);
    CHECK(term(s, mono({{1, 1}, {2, 1}})) == c13);
    CHECK(term(s, mono({})) == cfull);
  }

  SUBCASE("shared point rejected") {
    CHECK_THROWS_AS((void)star(poly_power(1, 2), poly_power(1, 1)), std::invalid_argument);
  }
}

TEST_CASE("star product is associative (randomized, exact)") {
  Rng g = make_rng(20240811);
  for (int trial = 0; trial < 200; ++trial) {
    FieldPoly a = random_poly(g, {1, 2});
    FieldPoly b = random_poly(g, {3});
    FieldPoly c = random_poly(g, {4, 5});
    CHECK(star(star(a, b), c) == star(a, star(b, c)));
  }
}

TEST_CASE("star chain against the normal-ordered expansion") {
  // The coefficient of phi^{p-k} in the chain is prod C(p_i,k_i) times the
  // vacuum amplitude of the contracted part; this is the Wick theorem with
  // the symmetric-algebra monomials playing the normal-ordered products.
  std::vector<std::vector<int>> cases = {{2, 2}, {1, 1, 2}, {2, 2, 2}, {3, 1, 2}};
  for (auto& p : cases) {
    FieldPoly chain = star_chain(p);
    int n = static_cast<int>(p.size());
    std::vector<int> k(n, 0);
    for (;;) {
      std::vector<int> kfull(k);
      Amplitude vac = vev_star(kfull);
      Rational w = 1;
      for (int i = 0; i < n; ++i) w *= Rational(binomial(p[i], k[i]));
      Monomial rest;
      for (int i = 0; i < n; ++i)
        if (p[i] - k[i] != 0) rest[i + 1] = p[i] - k[i];
      Amplitude want;
      amp_accumulate(want, vac, w);
      auto it = chain.find(rest);
      Amplitude got = (it == chain.end()) ? Amplitude{} : it->second;
      CHECK(amp_equal_symmetric(got, want));
      int i = 0;
      for (; i < n; ++i) {
        if (k[i] < p[i]) {
          ++k[i];
          break;
        }
        k[i] = 0;
      }
      if (i == n) break;
    }
  }
}

TEST_CASE("vacuum expectations: frozen low-order values") {
  SUBCASE("pair of squares") {
    Amplitude want;
    want[props({{1, 2, 2}})] = Rational(2);
    CHECK(vev_star({2, 2}) == want);
  }
  SUBCASE("phi phi phi^2") {
    Amplitude want;
    want[props({{1, 3, 1}, {2, 3, 1}})] = Rational(2);
    CHECK(vev_star({1, 1, 2}) == want);
  }
  SUBCASE("sunset 2,2,2 has weight 8") {
    Amplitude want;
    want[props({{1, 2, 1}, {1, 3, 1}, {2, 3, 1}})] = Rational(8);
    CHECK(vev_star({2, 2, 2}) == want);
  }
  SUBCASE("odd total degree vanishes") {
    CHECK(vev_star({1, 1, 1}).empty());
    CHECK(vev_graphs({1, 1, 1}).empty());
    CHECK(vev_pairings({1, 1, 1}).empty());
    CHECK(vev_star({3, 2}).empty());
  }
  SUBCASE("single point has no contractions") {
    CHECK(vev_star({4}).empty());
    CHECK(vev_star({0}) == amp_const(1));
  }
}

TEST_CASE("three vacuum routes agree for all powers n <= 4, p_i <= 4") {
  for (int n = 2; n <= 4; ++n) {
    std::vector<int> p(n, 0);
    for (;;) {
      Amplitude a = vev_star(p);
      Amplitude b = vev_graphs(p);
      Amplitude c = vev_pairings(p);
      CHECK(amp_equal_symmetric(a, b));
      CHECK(amp_equal_symmetric(b, c));
      int i = 0;
      for (; i < n; ++i) {
        if (p[i] < 4) {
          ++p[i];
          break;
        }
        p[i] = 0;
      }
      if (i == n) break;
    }
  }
}

TEST_CASE("graph enumeration") {
  SUBCASE("2,2 forces the double edge") {
    auto gs = enumerate_graphs({2, 2});
    REQUIRE(gs.size() == 1);
    CHECK(gs[0].m[0][1] == 2);
    CHECK(gs[0].m[1][0] == 2);
    CHECK(gs[0].m[0][0] == 0);
  }
  SUBCASE("odd sums admit no graph") {
    CHECK(enumerate_graphs({1, 2}).empty());
    CHECK(enumerate_graphs({1, 1, 1}).empty());
  }
  SUBCASE("1,1,2 and 2,2,2 are rigid") {
    auto gs = enumerate_graphs({1, 1, 2});
    REQUIRE(gs.size() == 1);
    CHECK(gs[0].m[0][2] == 1);
    CHECK(gs[0].m[1][2] == 1);
    CHECK(gs[0].m[0][1] == 0);
    auto hs = enumerate_graphs({2, 2, 2});
    REQUIRE(hs.size() == 1);
    CHECK(hs[0].m[0][1] == 1);
    CHECK(hs[0].m[0][2] == 1);
    CHECK(hs[0].m[1][2] == 1);
  }
  SUBCASE("row sums are reproduced") {
    for (auto& g : enumerate_graphs({2, 4, 2, 2})) {
      std::vector<int> want = {2, 4, 2, 2};
      for (int i = 0; i < g.n; ++i) {
        int s = 0;
        for (int j = 0; j < g.n; ++j) s += g.m[i][j];
        CHECK(s == want[i]);
        CHECK(g.m[i][i] == 0);
      }
    }
  }
}

TEST_CASE("amplitude evaluation and printing") {
  Amplitude a;
  a[props({{1, 2, 2}})] = Rational(2);
  CHECK(amp_to_string(a) == "2*D(1,2)^2");
  CHECK(amp_to_string(vev_star({1, 1, 2})) == "2*D(1,3)*D(2,3)");
  CHECK(amp_to_string(Amplitude{}) == "0");

  std::vector<std::vector<double>> pts = {{0.0, 0.0}, {1.0, 0.5}};
  auto prop = [](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::exp(-0.5 * s);
  };
  double d = prop(pts[0], pts[1]);
  CHECK(eval_amplitude(a, pts, prop) == doctest::Approx(2 * d * d).epsilon(1e-14));
  CHECK(eval_amplitude(Amplitude{}, pts, prop) == 0.0);

  std::vector<std::vector<double>> bad = {{0.0, 0.0}, {0.0, 0.0}};
  CHECK_THROWS_AS((void)eval_amplitude(a, bad, prop), std::domain_error);

  Amplitude out_of_range;
  out_of_range[props({{1, 7, 1}})] = Rational(1);
  CHECK_THROWS_AS((void)eval_amplitude(out_of_range, pts, prop), std::invalid_argument);
}

TEST_CASE("polynomial JSON round trip") {
  FieldPoly p = star_chain({2, 2});
  CHECK(poly_from_json(poly_to_json(p)) == p);
  FieldPoly q = star_chain({3, 1, 2});
  CHECK(poly_from_json(poly_to_json(q)) == q);
  CHECK(poly_from_json(poly_to_json(FieldPoly{})) == FieldPoly{});
  CHECK_THROWS_AS((void)poly_from_json("{\"bogus\":1}"), std::invalid_argument);
}
