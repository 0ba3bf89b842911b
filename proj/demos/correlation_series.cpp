// Prints h(4^-j, t) next to the 4^j / j comparator, then the running time
// integral against the harmonic numbers.
#include <cmath>
#include <cstdio>

#include "nsblowup/nsblowup.hpp"

int main() {
  using namespace nsblowup;
  const double t = 0.25;
  const auto spec = FlowSpec::up_to(6);

  std::printf("%3s %12s %14s %10s\n", "j", "s", "h(s,t)", "j h/4^j");
  for (int j = 2; j <= 6; ++j) {
    const double s = std::ldexp(1.0, -2 * j);
    const auto c = h_st_closed(spec, s, t, 6);
    std::printf("%3d %12.6g %14.8g %10.5f\n", j, s, c.value, j * c.value / std::ldexp(1.0, 2 * j));
  }

  const auto rep = partial_blowup_integral(spec, t, 6);
  std::printf("\n%3s %12s %12s\n", "J", "I(J)", "H(J)");
  for (const auto& r : rep.rows) std::printf("%3d %12.6f %12.6f\n", r.J, r.I, r.H);
  std::printf("slope %.4f  r^2 %.4f\n", rep.fit.slope, rep.fit.r_squared);
}
