#pragma once

#include <cstdint>
#include <random>

#include "diamondrec/linalg.hpp"

namespace diamondrec {

/// One stream per caller; never shared across threads.
using Rng = std::mt19937_64;

enum class Field { Real, Complex };

/// Entries i.i.d. N(0,1); for Complex both real and imaginary parts are N(0,1).
ComplexMatrix gaussian_matrix(Index rows, Index cols, Field field, Rng& rng);
ComplexVector gaussian_vector(Index n, Field field, Rng& rng);

/// Uniform on the unit sphere of R^n or C^n.
ComplexVector random_unit_vector(Index n, Field field, Rng& rng);

/// One SplitMix64 step (golden-ratio increment, then finalizer); a bijection on uint64.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace diamondrec
