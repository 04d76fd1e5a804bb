#pragma once

// Symmetric generalized eigensolver contract: the algebraically smallest k
// eigenpairs of (A, M) with M positive definite, optionally restricted to
// the subspace {u : c^T u = 0}. Dense below a size threshold, otherwise
// shift-invert Lanczos (full reorthogonalization, deterministic given the
// seed). Returned eigenvalues are the Rayleigh quotients of the returned
// vectors, so value/vector consistency is exact by construction.

#include "cmcix/dec.hpp"

namespace cmcix {

struct EigOptions {
  int k = 8;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  int dense_threshold = 3000;
};

struct EigResult {
  VecX values;   // ascending
  MatX vectors;  // n x k, M-orthonormal, c^T u = 0 when constrained
  bool converged = true;
  double max_residual = 0;  // ||A u - lambda M u|| / ||u|| scale, sparse path
  int subspace_dim = 0;
};

EigResult smallest_eigenpairs(const SpMat& A, const SpMat& M,
                              const VecX* constraint, const EigOptions& opts);

}  // namespace cmcix
