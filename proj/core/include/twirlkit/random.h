#pragma once

#include <random>

#include "twirlkit/qops.h"

namespace twirlkit {

using Rng = std::mt19937_64;

Matrix random_ginibre(int rows, int cols, Rng& rng);
/// Haar-distributed unitary.
Matrix random_unitary(int d, Rng& rng);
/// Haar-distributed real orthogonal matrix.
RealMatrix random_orthogonal(int d, Rng& rng);
Matrix random_hermitian(int d, Rng& rng);
/// Density matrix of the given rank (full rank when rank <= 0).
Matrix random_density(int d, Rng& rng, int rank = 0);
Matrix random_real_density(int d, Rng& rng);
/// Eigenvalues uniform in [0, 1] with a Haar eigenbasis.
Matrix random_effect(int d, Rng& rng);
/// CPTP map from a random Stinespring isometry.
Superoperator random_channel(const Factors& in, const Factors& out, Rng& rng, int kraus_rank = 0);
/// CPTP map with real Kraus operators, hence a real Choi matrix.
Superoperator random_real_channel(const Factors& in, const Factors& out, Rng& rng);
/// Random probability vector (flat Dirichlet).
std::vector<double> random_probabilities(int n, Rng& rng);

}  // namespace twirlkit
