#pragma once

// Machine checks for the identities, spectral concentration statements and
// genus-linear index bounds: admissibility of coordinate test functions,
// the pointwise shape-operator identity, the coordinate-sum identity for
// the second variation, the curvature hypothesis pencil over a harmonic
// subspace, the zero-boundary-mean subspace, and the index bounds with
// their mean-curvature thresholds.

#include "cmcix/generate.hpp"
#include "cmcix/jacobi.hpp"

namespace cmcix {

struct CheckItem {
  std::string name;
  std::string anchor;  // stable identifier of the identity being checked
  double residual = 0;
  double threshold = 0;
  std::string verdict;  // pass | fail | not-applicable
  std::map<std::string, double> values;
  std::string note;
};

struct VerificationReport {
  std::vector<CheckItem> items;
  std::string summary;  // pass | fail | not-applicable
  // provenance
  std::string space_json;
  std::string family;
  int resolution = 0;
  std::uint64_t seed = 0;
  // geometry summary
  int genus = 0;
  int boundary_components = 0;
  double area = 0;
  double h_min = 0, h_max = 0, h_mean = 0;
  // spectrum block, when the surface admits one
  std::optional<TwistedSpectrum> spectrum;
  // space threshold block
  double threshold_H2 = 0;
  bool threshold_none_required = false;

  bool any(const std::string& verdict) const {
    for (const auto& it : items)
      if (it.verdict == verdict) return true;
    return false;
  }
};

struct HypothesisPencil {
  MatX L_mat;  // curvature/boundary functional, polarized
  MatX R_mat;  // 2 int <xi, zeta>
  double eta_star = 0;
  int q = 0;
  bool with_boundary = false;
};

CheckItem check_admissibility(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                              const WhitneyEval& eval,
                              const std::vector<HarmonicField>& basis);

CheckItem check_pointwise_A_identity(const ImmersedMesh& mesh,
                                     const SurfaceGeometry& geom,
                                     const std::vector<HarmonicField>& basis);

// Independent two-sided evaluation of the coordinate-sum identity; returns
// the worst relative discrepancy over the basis fields and their rotations.
CheckItem check_coordinate_identity(const ImmersedMesh& mesh,
                                    const SurfaceGeometry& geom,
                                    const JacobiAssembly& assembly,
                                    const std::vector<HarmonicField>& basis,
                                    bool with_boundary, double tol = 0.02);

HypothesisPencil hypothesis_pencil(const ImmersedMesh& mesh,
                                   const SurfaceGeometry& geom,
                                   const std::vector<HarmonicField>& basis,
                                   bool with_boundary);

// Sub-basis of fields whose rotated coordinate integrals all vanish;
// dimension is at least q - d.
struct ZeroBoundaryMean {
  std::vector<HarmonicField> sub_basis;
  double max_constraint_residual = 0;
  int dim = 0;
};
ZeroBoundaryMean zero_boundary_mean_subspace(const ImmersedMesh& mesh,
                                             const SurfaceGeometry& geom,
                                             const DecOperators& dec,
                                             const WhitneyEval& eval,
                                             const std::vector<HarmonicField>& basis);

CheckItem verify_index_bound(const GenusBoundary& gb, int ambient_dim,
                             const HypothesisPencil& pencil,
                             const TwistedSpectrum& spectrum);

CheckItem concentration_count(const HypothesisPencil& pencil,
                              const TwistedSpectrum& spectrum, double eta,
                              int ambient_dim, int zbm_dim = -1);

// Threshold report for a space: whether H^2 clears the index-estimate
// threshold, plus the candidate-radii consistency data for the hexagonal
// preset and the minimal-slice note for the product sphere space.
CheckItem threshold_report(const AmbientSpace& space, double H, bool has_H);

struct VerifyOptions {
  std::vector<std::string> checks;  // empty: all applicable
  std::vector<double> etas{0.0};    // concentration thresholds
  int k = 8;
  std::uint64_t seed = 0;
  double eps_rel = 0.02;
  double prop32_tol = 0.02;
};

VerificationReport run_verification(const ImmersedMesh& mesh,
                                    const VerifyOptions& opts);

}  // namespace cmcix
