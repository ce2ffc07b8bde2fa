// One period of a vacuum plane wave, compared against the exact solution.
#include <cmath>
#include <cstdio>

#include "symmax/integrate.hpp"
#include "symmax/maxwell.hpp"

using namespace symmax;

int main() {
  const Grid3 grid({64, 4, 4}, {0, 0, 0}, {2 * pi, 1, 1}, /*stencil_order=*/4);
  const auto op = build_maxwell_operator(Chart::cartesian(), Medium::vacuum(), grid, 1.0);

  FieldState q(grid);
  q.fill([](const Point3 &x) {
    const double v = std::cos(x[0]);
    return std::array<double, 6>{0, v, 0, 0, 0, v}; // E2 and H3
  });
  const DoubledState st0(q, FieldState(grid));

  StepperSpec spec;
  spec.method = Method::rk4;
  spec.dt = 2 * pi / 2000;
  const RunResult result = run(op, st0, spec, 2000, 500);

  for (const MonitorRecord &r : result.series)
    std::printf("t = %.4f  energy = %.15f  div_b = %.1e  div_d = %.1e\n", r.t, r.energy,
                r.div_b, r.div_d);

  // After one period the wave is back where it started.
  double num = 0.0, den = 0.0;
  for (int n = 0; n < FieldState::components; ++n)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = result.final_state.q.at(n, i) - q.at(n, i);
      num += d * d;
      den += q.at(n, i) * q.at(n, i);
    }
  std::printf("relative L2 error after one period: %.3e\n", std::sqrt(num / den));
  return 0;
}
