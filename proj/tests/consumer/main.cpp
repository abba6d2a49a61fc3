#include <renorm/mellin.hpp>
#include <renorm/testfunc.hpp>

#include <cstdio>

int main() {
  using namespace renorm;
  CutoffPair cp(1.0, 2.0);
  mel::LogPowerSymbol t = mel::LogPowerSymbol::power(-1.0);
  TestFunction w = TestFunction::gaussian(0.0, 1.0, {1.0, 0.4});
  double res = mel::residue_rho(t, cp, w);
  auto r = mel::riesz_extend(t, cp).evaluate(w);
  std::printf("residue %.12g (expect %.12g), riesz %.12g, converged %d\n", res,
              w.value(0.0), r.value, (int)r.converged);
  return (std::abs(res - w.value(0.0)) < 1e-8 && r.converged) ? 0 : 1;
}
