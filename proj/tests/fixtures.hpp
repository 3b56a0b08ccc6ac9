#pragma once

#include <vector>

#include "crnkit/network.hpp"

namespace crn::fixtures {

// A, B, C, AC with ∅→A, B→∅, A+C→AC, AC→2B+C.
inline Network catalyst(double ra = 1.0, double rb = 1.0, double rg = 1.0, double rd = 1.0) {
  return Network({"A", "B", "C", "AC"}, {
                                            {{0, 0, 0, 0}, {1, 0, 0, 0}, ra, "alpha"},
                                            {{0, 1, 0, 0}, {0, 0, 0, 0}, rb, "beta"},
                                            {{1, 0, 1, 0}, {0, 0, 0, 1}, rg, "gamma"},
                                            {{0, 0, 0, 1}, {0, 2, 1, 0}, rd, "delta"},
                                        });
}

// X1 → 2 X2 @ alpha, 2 X2 → X1 @ beta.
inline Network diatomic(double alpha = 2.0, double beta = 1.0) {
  return Network({"X1", "X2"}, {{{1, 0}, {0, 2}, alpha, {}}, {{0, 2}, {1, 0}, beta, {}}});
}

// ∅ → A @ kappa, A → ∅ @ gamma.
inline Network birth_death(double kappa = 3.0, double gamma = 1.0) {
  return Network({"A"}, {{{0}, {1}, kappa, {}}, {{1}, {0}, gamma, {}}});
}

// A → ∅ @ rate.
inline Network decay(double rate = 1.0) { return Network({"A"}, {{{1}, {0}, rate, {}}}); }

}  // namespace crn::fixtures
