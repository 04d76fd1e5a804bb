#pragma once

// Second-variation quadratic form Q(u,u) = int |grad u|^2
//   - int (Ric_M(N,N) + |A|^2) u^2 - int_{boundary} h_dM(N,N) u^2
// assembled with piecewise-linear elements, and the volume-constrained
// (twisted) eigenproblem on the mass-orthogonal complement of constants.

#include "cmcix/eigs.hpp"
#include "cmcix/geometry.hpp"
#include "cmcix/harmonic.hpp"

namespace cmcix {

// Ric_M(N,N) two ways: from the ambient closed form and from the Gauss
// rearrangement R/2 - |A|^2/2 + H^2/2 - K. Boundary vertices are skipped
// in the discrepancy norm (the angle-defect K is not meaningful there).
struct RicNormal {
  VecX closed_form;
  VecX gauss_form;
  double l2_discrepancy = 0;  // relative to the ingredient scale
};
RicNormal ric_normal(const ImmersedMesh& mesh, const SurfaceGeometry& geom);

struct JacobiAssembly {
  SpMat mass;       // consistent P1 mass
  SpMat stiffness;  // cotan Dirichlet form
  SpMat potential;  // int (Ric + |A|^2) u v
  SpMat robin;      // int_{dS} h_dM(N,N) u v
  VecX potential_values;  // per-vertex Ric + |A|^2
  VecX constraint;        // mass * 1 (admissibility functional)
  VecX lumped_mass;
  bool has_boundary_term = false;

  SpMat quadratic_form() const { return stiffness - potential - robin; }
};

JacobiAssembly assemble(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                        bool lumped_mass = false);

struct SpectrumOptions {
  int k = 8;
  std::uint64_t seed = 0;
  double eps_rel = 0.02;  // eigenvalue tolerance relative to the mode scale
  bool lumped_mass = false;
  double tol = 1e-9;
};

struct TwistedSpectrum {
  VecX eigenvalues;    // ascending
  MatX eigenfunctions; // V x k, mass-orthonormal, zero mean
  int index = 0;       // # eigenvalues < -eps
  int nullity = 0;     // # |eigenvalues| <= eps
  double eps = 0;      // eps_rel x mean |lambda| of the first 8 modes
  double max_mean_residual = 0;  // max |int u| over eigenfunctions
  bool converged = true;
};

TwistedSpectrum twisted_spectrum(const JacobiAssembly& assembly,
                                 const SpectrumOptions& opts);

// Index/nullity with enough eigenpairs solved to see the first
// non-negative eigenvalue.
TwistedSpectrum cmc_index(const JacobiAssembly& assembly, SpectrumOptions opts);

}  // namespace cmcix
