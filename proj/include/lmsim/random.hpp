#pragma once

#include <cstdint>
#include <random>

namespace lmsim {

/// Random source used throughout the simulator. Every run owns exactly one.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace lmsim
