#pragma once

// Seeded generators for randomized checks. Everything draws from a
// std::mt19937_64 passed by reference so a seed fixes every sample.

#include <cstdint>
#include <random>

#include "ergodix/operator.hpp"
#include "ergodix/systems.hpp"

namespace ergodix {

using Rng = std::mt19937_64;

/// Entries with independent standard normal real and imaginary parts.
Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Vector random_vector(Rng& rng, Eigen::Index dim);
Matrix random_hermitian(Rng& rng, Eigen::Index dim);
/// a* a for a Gaussian a.
Matrix random_positive(Rng& rng, Eigen::Index dim);
/// Haar unitary: QR of a Gaussian matrix with the phases of R divided out.
Matrix random_unitary(Rng& rng, Eigen::Index dim);
/// Faithful density matrix.
Matrix random_density(Rng& rng, Eigen::Index dim);
double random_uniform(Rng& rng, double lo, double hi);
std::int64_t random_int(Rng& rng, std::int64_t lo, std::int64_t hi);

/// M_N with q commuting unitaries diagonal in a common random basis. The
/// state is the normalized trace when `tracial`, otherwise a random faithful
/// density diagonal in the same basis (so it is invariant).
FiniteSystem random_finite_system(Rng& rng, Eigen::Index dim, std::size_t q, bool tracial);

}  // namespace ergodix
