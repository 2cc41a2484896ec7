// Sweeps the probe amplitude and prints the optimal conclusive-probability
// bound for discriminating N symmetric displacements, together with the
// squared reciprocal-state coefficients that realize it.
//
// Usage: demo_bound_curve [N]
#include <cstdio>
#include <cstdlib>

#include "udsim/udsim.hpp"

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 4;
  std::printf("alpha,p_con_bound");
  for (int k = 0; k < n; ++k) std::printf(",c_sq_%d", k);
  std::printf("\n");
  for (double alpha = 0.2; alpha <= 2.0 + 1e-12; alpha += 0.1) {
    const auto [bound, c_sq] = udsim::symmetric_ud_bound(alpha, n);
    std::printf("%.3f,%.12g", alpha, bound);
    for (double c : c_sq) std::printf(",%.12g", c);
    std::printf("\n");
  }
  return 0;
}
