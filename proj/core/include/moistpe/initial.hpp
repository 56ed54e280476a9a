#pragma once

#include <cstdint>
#include <stdexcept>

#include "moistpe/config.hpp"
#include "moistpe/grid.hpp"
#include "moistpe/state.hpp"

namespace moistpe {

/// Builds the initial state named by cfg.initial.recipe:
///   quiescent             u = v = 0, every scalar equal to its surface target
///   supersaturated-bubble stratified T with a smooth anomaly, qv = rh qvs plus a
///                         supersaturated blob at mid-domain, qc = qr = 0, smooth flow
///   dry-dynamics          as the bubble recipe with qv = qc = qr = 0
///   random                seeded smooth random modes in every field
/// The velocity is projected so that its vertical mean is discretely divergence free.
/// Throws std::invalid_argument for an unknown recipe.
State make_initial_state(const RunConfig& cfg, const Grid& grid, std::uint64_t seed);

/// Smooth single-mode field in [-1, 1] with a phase drawn from the seed.
Array3 smooth_mode(const Grid& grid, std::uint64_t seed);

/// qv += delta * smooth_mode(grid, seed).
void perturb_vapour(State& state, const Grid& grid, double delta, std::uint64_t seed);

}  // namespace moistpe
