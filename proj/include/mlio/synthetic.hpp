#pragma once

#include <cstdint>

#include "mlio/clustering.hpp"
#include "mlio/diet.hpp"
#include "mlio/polytope.hpp"

namespace mlio {

// Demo box polytope in the plane: 1 <= x1 <= 5, 1 <= x2 <= 10, x1 + x2 <= 15.
FeasibleSet demo2d_polytope();

// Mixture of three Gaussian preference groups over the demo polytope; some
// draws land outside it, which is the point of fitting through a feasible
// set.
ObservationSet gen2d_observations(int count, std::uint64_t seed);

struct DietData {
  NutrientSpec spec;
  ObservationSet observations;
};

// Synthetic serving histories for a small food menu: latent taste groups with
// noisy daily menus, calibrated so group averages stay near the nutrient box
// but typical sodium runs above its cap.
DietData gen_diet(int count, std::uint64_t seed);

}  // namespace mlio
