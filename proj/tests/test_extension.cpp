#include "doctest.h"

#include "renorm/distributions.hpp"
#include "renorm/extension.hpp"
#include "renorm/testfunc.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace renorm;
using dist::SampledDistribution;
using dist::Support;
using ext::ExtendedDistribution;

namespace {

double gauss_range(const TestFunction& phi) {
  return phi.compact() ? std::max(std::abs(phi.support_lo()), phi.support_hi())
                       : 26.0 * phi.width() + std::abs(phi.center());
}

// oracle for the improper but convergent case: plain tanh-sinh up to the
// endpoint singularity, no subtraction involved
double improper_oracle(const std::function<double(double)>& density, const TestFunction& phi,
                       double R) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double pos = ts.integrate([&](double h) { return density(h) * phi(h); }, 0.0, R);
  double neg = ts.integrate([&](double h) { return density(-h) * phi(-h); }, 0.0, R);
  return pos + neg;
}

// oracle for the finite part of int_0^inf phi(h)/h dh with the plateau
// convention: subtract phi(0) where chi = 1 and nothing outside, written in
// the independent decomposition
//   int_0^1 (phi - phi(0))/h + int_1^R phi/h
//   + phi(0) [ int_0^1 (1 - chi)/h - int_1^R chi/h ].
double finite_part_oracle(const TestFunction& phi, const CutoffPair& cp, double R) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double core = ts.integrate([&](double h) { return (phi(h) - phi(0.0)) / h; }, 0.0, 1.0);
  double tail = ts.integrate([&](double h) { return phi(h) / h; }, 1.0, R);
  double corr = ts.integrate([&](double h) { return (1.0 - cp.chi(h)) / h; }, 0.0, 1.0) -
                ts.integrate([&](double h) { return cp.chi(h) / h; }, 1.0, R);
  return core + tail + phi(0.0) * corr;
}

}  // namespace

TEST_CASE("subtraction order bookkeeping") {
  CHECK(ext::subtraction_order(-0.5, 1) == -1);  // s + d > 0: nothing to do
  CHECK(ext::subtraction_order(0.5, 1) == -1);
  CHECK(ext::subtraction_order(-1.0, 1) == 0);
  CHECK(ext::subtraction_order(-1.7, 1) == 0);
  CHECK(ext::subtraction_order(-2.0, 1) == 1);
  CHECK(ext::subtraction_order(-2.5, 1) == 1);
  CHECK(ext::subtraction_order(-3.0, 1) == 2);
  CHECK(ext::subtraction_order(-1.0, 2) == -1);
  CHECK(ext::subtraction_order(-2.0, 2) == 0);

  CHECK(!ext::degree_demoted(-0.5, 1));
  CHECK(ext::degree_demoted(-1.0, 1));
  CHECK(!ext::degree_demoted(-1.5, 1));
  CHECK(ext::degree_demoted(-2.0, 1));
  CHECK(ext::degree_demoted(-2.0, 2));
}

TEST_CASE("convergent case: extension agrees with the improper integral") {
  SampledDistribution t = SampledDistribution::power(-0.5);
  CutoffPair cp(1.0, 2.0);
  ExtendedDistribution e = ext::extend(t, -0.5, cp);
  CHECK(e.order() == -1);
  CHECK(!e.demoted());

  for (const TestFunction& phi :
       {TestFunction::bump(0.0, 1.5), TestFunction::gaussian(0.0, 1.0, {1.0, 0.2, 0.1})}) {
    double want = improper_oracle(t.density, phi, gauss_range(phi));
    auto p = e.evaluate(phi, 1e-10);
    CHECK(!p.diverged);
    CHECK(p.value == doctest::Approx(want).epsilon(1e-7));
  }

  SUBCASE("uniqueness: the cutoff leaves no trace when s + d > 0") {
    TestFunction phi = TestFunction::gaussian(0.0, 1.2);
    ExtendedDistribution e2 = ext::extend(t, -0.5, CutoffPair(0.25, 0.5));
    CHECK(e.evaluate(phi, 1e-11).value ==
          doctest::Approx(e2.evaluate(phi, 1e-11).value).epsilon(1e-8));
    CHECK(ext::extension_difference_chi(t, -0.5, cp, CutoffPair(0.25, 0.5), phi) == 0.0);
  }
}

TEST_CASE("step over h: renormalized 1/h against the finite-part oracle") {
  SampledDistribution t = SampledDistribution::power(-1.0, Support::positive);
  CutoffPair cp(1.0, 2.0);
  ExtendedDistribution e = ext::extend(t, -1.0, cp);
  CHECK(e.order() == 0);
  CHECK(e.demoted());

  for (const TestFunction& phi :
       {TestFunction::gaussian(0.0, 1.0), TestFunction::bump(0.0, 3.0),
        TestFunction::gaussian(0.0, 0.8, {1.0, -0.3, 0.05})}) {
    double want = finite_part_oracle(phi, cp, gauss_range(phi));
    auto p = e.evaluate(phi, 1e-10);
    CHECK(!p.diverged);
    CHECK(p.value == doctest::Approx(want).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("extension restricted away from the singular point is the original") {
  SampledDistribution t = SampledDistribution::power(-2.0);
  CutoffPair cp(0.5, 1.0);
  ExtendedDistribution e = ext::extend(t, -2.0, cp);
  CHECK(e.order() == 1);
  TestFunction away = TestFunction::bump(2.0, 0.6);  // support [1.4, 2.6], chi = 0 there
  double want = dist::pair(t, away, 1e-11).value;
  CHECK(e.evaluate(away, 1e-11).value == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("the three evaluation routes agree") {
  CutoffPair cp(1.0, 2.0);
  struct Case {
    SampledDistribution t;
    double s;
  };
  std::vector<Case> cases = {{SampledDistribution::power(-0.5), -0.5},
                             {SampledDistribution::power(-1.0, Support::positive), -1.0},
                             {SampledDistribution::power(-1.5), -1.5}};
  TestFunction phi = TestFunction::gaussian(0.0, 1.0, {1.0, 0.4});
  for (auto& c : cases) {
    ExtendedDistribution e = ext::extend(c.t, c.s, cp);
    auto direct = e.evaluate(phi, 1e-10);
    auto scale = e.evaluate_scale_integral(phi, 1e-9);
    auto shell = e.evaluate_epsilon_limit(phi, 1e-7);
    CHECK(!direct.diverged);
    CHECK(scale.value == doctest::Approx(direct.value).epsilon(1e-6).scale(1.0));
    CHECK(shell.value == doctest::Approx(direct.value).epsilon(1e-5).scale(1.0));
    CHECK(std::abs(shell.value - direct.value) <= std::max(10 * shell.err, 1e-4));
  }
}

TEST_CASE("ambiguity pairing") {
  CutoffPair cp(1.0, 2.0);
  TestFunction phi = TestFunction::gaussian(0.0, 1.0, {1.0, 0.7});

  SUBCASE("point mass reproduces itself") {
    auto p = ext::ambiguity(SampledDistribution::delta(0), cp, 0, phi);
    CHECK(p.value == phi(0.0));
    auto p1 = ext::ambiguity(SampledDistribution::delta(1), cp, 1, phi);
    CHECK(p1.value == -phi.deriv(0.0, 1));
    // order above the allowance contributes nothing
    auto p2 = ext::ambiguity(SampledDistribution::delta(1), cp, 0, phi);
    CHECK(p2.value == 0.0);
  }

  SUBCASE("step times the plateau integrates chi") {
    SampledDistribution h = SampledDistribution::power(0.0, Support::positive);
    boost::math::quadrature::tanh_sinh<double> ts;
    double chi_mass = ts.integrate([&](double x) { return cp.chi(x); }, 0.0, 2.0);
    auto p = ext::ambiguity(h, cp, 0, phi);
    CHECK(p.value == doctest::Approx(phi(0.0) * chi_mass).epsilon(1e-9));
  }

  SUBCASE("non-integrable moment is flagged divergent") {
    SampledDistribution t = SampledDistribution::power(-1.0, Support::positive);
    auto p = ext::ambiguity(t, cp, 0, phi);
    CHECK(p.diverged);
  }

  SUBCASE("negative order means no ambiguity") {
    auto p = ext::ambiguity(SampledDistribution::power(-0.5), cp, -1, phi);
    CHECK(p.value == 0.0);
    CHECK(!p.diverged);
  }
}

TEST_CASE("difference of two renormalizations is the fitted local counterterm") {
  SampledDistribution t = SampledDistribution::power(-1.0, Support::positive);
  CutoffPair c1(1.0, 2.0), c2(0.5, 0.75);
  ExtendedDistribution e1 = ext::extend(t, -1.0, c1);
  ExtendedDistribution e2 = ext::extend(t, -1.0, c2);

  // c = int_0^inf (chi2 - chi1)/h dh, the coefficient of the point mass in
  // (R1 - R2); quadrature over the union of the cutoff annuli
  boost::math::quadrature::tanh_sinh<double> ts;
  double c = ts.integrate([&](double h) { return (c2.chi(h) - c1.chi(h)) / h; }, 0.25, 4.0);

  TestFunction phi = TestFunction::gaussian(0.0, 1.0, {1.0, -0.2});
  SUBCASE("three routes to the difference agree") {
    double via_eval = e1.evaluate(phi, 1e-10).value - e2.evaluate(phi, 1e-10).value;
    double via_moment = ext::extension_difference_chi(t, -1.0, c1, c2, phi);
    CHECK(via_eval == doctest::Approx(c * phi(0.0)).epsilon(1e-7).scale(1.0));
    CHECK(via_moment == doctest::Approx(c * phi(0.0)).epsilon(1e-7).scale(1.0));
  }

  SUBCASE("fit recovers the planted coefficient") {
    std::vector<TestFunction> probes = {
        TestFunction::gaussian(0.0, 1.0),  TestFunction::gaussian(0.0, 0.5, {1.0, 1.0}),
        TestFunction::bump(0.0, 2.0),      TestFunction::gaussian(0.2, 0.8),
        TestFunction::gaussian(0.0, 1.5, {0.0, 1.0})};
    auto eval1 = [&](const TestFunction& f) { return e2.evaluate(f, 1e-10).value; };
    auto eval2 = [&](const TestFunction& f) { return e1.evaluate(f, 1e-10).value; };
    // t2 - t1 = R1 - R2 = c delta
    auto fit = ext::fit_counterterm(eval1, eval2, 0, probes);
    REQUIRE(fit.coeff.size() == 1);
    CHECK(fit.coeff[0] == doctest::Approx(c).epsilon(1e-6));
    CHECK(fit.residual < 1e-6);
  }
}

TEST_CASE("counterterm fitting on synthetic data") {
  std::vector<TestFunction> probes = {
      TestFunction::gaussian(0.0, 1.0),        TestFunction::gaussian(0.0, 0.5),
      TestFunction::gaussian(0.0, 1.0, {0, 1}), TestFunction::bump(0.0, 1.0),
      TestFunction::gaussian(0.3, 0.9),        TestFunction::gaussian(0.0, 2.0, {1, 1}),
      TestFunction::bump(0.0, 0.5, 2.0),       TestFunction::gaussian(-0.4, 1.1)};
  SampledDistribution t = SampledDistribution::power(-0.5);
  CutoffPair cp(1.0, 2.0);
  ExtendedDistribution e = ext::extend(t, -0.5, cp);
  auto base = [&](const TestFunction& f) { return e.evaluate(f, 1e-10).value; };

  SUBCASE("planted first-derivative mass is recovered") {
    auto shifted = [&](const TestFunction& f) { return base(f) + 2.0 * (-f.deriv(0.0, 1)); };
    auto fit = ext::fit_counterterm(base, shifted, 1, probes);
    REQUIRE(fit.coeff.size() == 2);
    CHECK(fit.coeff[0] == doctest::Approx(0.0).epsilon(1e-8).scale(1.0));
    CHECK(fit.coeff[1] == doctest::Approx(2.0).epsilon(1e-6));
  }

  SUBCASE("identical evaluators give the zero counterterm") {
    auto fit = ext::fit_counterterm(base, base, 1, probes);
    CHECK(std::abs(fit.coeff[0]) < 1e-10);
    CHECK(std::abs(fit.coeff[1]) < 1e-10);
  }

  SUBCASE("a non-local difference is rejected") {
    auto nonlocal = [&](const TestFunction& f) {
      return base(f) + dist::pair(SampledDistribution::power(0.0), f, 1e-10).value;
    };
    CHECK_THROWS_WITH_AS((void)ext::fit_counterterm(base, nonlocal, 1, probes),
                         "difference not supported at the singular point",
                         std::runtime_error);
  }

  SUBCASE("too few probes throw") {
    CHECK_THROWS_AS(
        (void)ext::fit_counterterm(base, base, 2, {TestFunction::gaussian(0.0, 1.0)}),
        std::invalid_argument);
  }
}

TEST_CASE("boundary residues of the graded pairing") {
  CutoffPair cp(1.0, 2.0);
  TestFunction omega = TestFunction::gaussian(0.0, 1.0, {1.0, 0.3});

  SUBCASE("derivative of the renormalized step is the point mass") {
    // d(R H) = delta: residue pairing gives omega(0), and the defining
    // equation -<R H, omega'> reproduces it independently
    SampledDistribution h = SampledDistribution::power(0.0, Support::positive);
    double res = ext::residue_d(h, cp, 0, omega);
    CHECK(res == doctest::Approx(omega(0.0)).epsilon(1e-8));
    ExtendedDistribution rh = ext::extend(h, 0.0, cp);  // s + d > 0: plain extension
    double lhs = -rh.evaluate(omega.derivative(), 1e-11).value;
    CHECK(lhs == doctest::Approx(res).epsilon(1e-8));
  }

  SUBCASE("inverse modulus: defining equation fixes the first-order moment") {
    SampledDistribution t = SampledDistribution::power(-1.0);
    // d(R t) - R(d t) with d t carried by density -sgn(h)/h^2, degree -2
    ExtendedDistribution rt = ext::extend(t, -1.0, cp);
    SampledDistribution dt = SampledDistribution::from_density(
        [](double h) { return (h > 0 ? -1.0 : 1.0) / (h * h); }, -2.0);
    ExtendedDistribution rdt = ext::extend(dt, -2.0, cp);
    CHECK(rdt.order() == 1);
    double defining = -rt.evaluate(omega.derivative(), 1e-11).value -
                      rdt.evaluate(omega, 1e-11).value;
    // the boundary moment acts on the original density, at the subtraction
    // order of the extended derivative
    double res = ext::residue_d(t, cp, 1, omega);
    CHECK(res == doctest::Approx(defining).epsilon(1e-7).scale(1.0));
    // frozen closed form for an even plateau: 2 omega'(0)
    CHECK(res == doctest::Approx(2.0 * omega.deriv(0.0, 1)).epsilon(1e-8));
  }

  SUBCASE("even cutoff kills the zeroth moment of an even density") {
    SampledDistribution t = SampledDistribution::power(-1.0);
    CHECK(ext::residue_d(t, cp, 0, omega) == doctest::Approx(0.0).epsilon(1e-10));
    // an asymmetric cutoff leaves the expected chi'-weighted moment
    CutoffPair asym(1.0, 2.0, 0.5, 0.75);
    boost::math::quadrature::tanh_sinh<double> ts;
    double want = -omega(0.0) *
                  (ts.integrate([&](double h) { return asym.chi_prime(h) / h; }, 1.0, 2.0) +
                   ts.integrate([&](double h) { return asym.chi_prime(h) / -h; }, -0.75, -0.5));
    CHECK(ext::residue_d(t, asym, 0, omega) == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("vector-field anomalies") {
  CutoffPair cp(1.0, 2.0);
  TestFunction omega = TestFunction::gaussian(0.0, 1.0, {1.0, 0.25});

  SUBCASE("line chart: translation field against the step") {
    SampledDistribution h = SampledDistribution::power(0.0, Support::positive);
    auto ones = [](double) { return 1.0; };
    CHECK(ext::anomaly_1d(h, ones, cp, 0, omega) == doctest::Approx(omega(0.0)).epsilon(1e-8));
    CHECK(ext::anomaly_1d(h, ones, cp, -1, omega) == 0.0);

    // chi-independence of the zero-order anomaly for this field
    CutoffPair cp2(0.5, 0.8);
    CHECK(ext::anomaly_1d(h, ones, cp2, 0, omega) ==
          doctest::Approx(ext::anomaly_1d(h, ones, cp, 0, omega)).epsilon(1e-8));
  }

  SUBCASE("scaling field against the renormalized 1/h profile") {
    SampledDistribution t = SampledDistribution::power(-1.0, Support::positive);
    auto scaling = [](double, double hh) { return hh; };
    TestFunction omega_x = TestFunction::gaussian(0.0, 1.0);
    TestFunction omega_h = TestFunction::gaussian(0.0, 1.0, {1.0, -0.1});
    double got = ext::anomaly_2d(t, scaling, cp, 0, omega_x, omega_h);
    // the h-profile contributes omega_h(0) int_0^inf chi' = -omega_h(0) with
    // the overall minus sign, so the anomaly is + omega_h(0) int omega_x
    double mass_x = dist::pair(SampledDistribution::power(0.0), omega_x, 1e-11).value;
    CHECK(got == doctest::Approx(omega_h(0.0) * mass_x).epsilon(1e-8));
  }

  SUBCASE("fields transverse to the singular line are rejected") {
    SampledDistribution t = SampledDistribution::power(-1.0, Support::positive);
    auto transverse = [](double, double) { return 1.0; };
    CHECK_THROWS_WITH_AS((void)ext::anomaly_2d(t, transverse, cp, 0,
                                               TestFunction::gaussian(0.0, 1.0),
                                               TestFunction::gaussian(0.0, 1.0)),
                         "vector field not tangent to the singular line",
                         std::invalid_argument);
  }
}
