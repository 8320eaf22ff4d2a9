#pragma once

// Seeded samplers shared by the simulators and Monte Carlo checks. Every
// stream is an mt19937_64 seeded from derive_seed, so results depend only on
// the seed and never on thread scheduling.

#include "gclust/types.hpp"

#include <cstdint>
#include <random>

namespace gclust {

using Rng = std::mt19937_64;

/// Uniform on [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Independent Poisson draws with the given entrywise means (mean 0 gives 0).
Matrix poisson_matrix(const Matrix& mean, Rng& rng);

Matrix standard_normal_matrix(Index rows, Index cols, Rng& rng);

/// Symmetric 0/1 matrix with independent entries on and above the diagonal,
/// P(A_ij = 1) = P_ij.
Matrix bernoulli_symmetric(const Matrix& P, Rng& rng);

/// n rows drawn uniformly from the probability simplex in R^r (flat Dirichlet).
Matrix simplex_positions(Index n, Index r, Rng& rng);

}  // namespace gclust
