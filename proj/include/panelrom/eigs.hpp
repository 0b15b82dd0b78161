#pragma once

#include "panelrom/types.hpp"

namespace panelrom {

struct EigPairs {
  Vec lambda; // ascending generalized eigenvalues of (K, M); omega = sqrt(lambda)
  Mat phi;    // columns M-orthonormal
};

// Lowest n_modes of K phi = lambda M phi with K symmetric >= 0 and M
// symmetric > 0. Dense solve for small problems, shift-inverted subspace
// iteration otherwise. Deterministic (fixed-seed start block).
EigPairs eig_lowest(const SpMat& K, const SpMat& M, Index n_modes, double tol = 1e-10);

struct BucklingResult {
  bool buckles = false;
  double gamma = std::numeric_limits<double>::infinity(); // smallest positive factor
  Vec mode; // buckling shape (empty if no buckling)
};

// Smallest positive gamma with (K + gamma * KG) phi = 0, K symmetric > 0.
// Reports "no buckling" when no positive eigenvalue exists below gamma_max.
BucklingResult buckling_factor(const SpMat& K, const SpMat& KG, double gamma_max = 1e8);

} // namespace panelrom
