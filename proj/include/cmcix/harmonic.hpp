#pragma once

// Harmonic vector fields on immersed meshes. Closed surfaces carry a
// 2g-dimensional space (div xi = div *xi = 0); surfaces with boundary
// carry a (2g+r-1)-dimensional space of harmonic fields tangent along the
// boundary. Bases are built from tree-cotree (co)homology generators
// followed by a Hodge projection, with lexicographic tie-breaking so runs
// are reproducible.
//
// A field is stored as a per-edge 1-form plus a rotation flag: when
// form_is_rotated is set the stored form is (*xi)^flat and the field value
// is the -90 degree rotation of its Whitney interpolant (this is how
// tangential fields are represented, since their rotated form is the
// relative cocycle the solver works with). The edge form is the source of
// truth for all integrals; vertex vectors are face-averaged samples.

#include "cmcix/dec.hpp"

namespace cmcix {

struct HarmonicField {
  VecX form;                     // per-edge scalars
  bool form_is_rotated = false;  // stored form belongs to *xi
  MatX vertex_frame;             // V x 2, components in the geometry frame
  MatX vertex_ambient;           // V x d
  double residual_div = 0;       // ||div xi||_L2
  double residual_codiv = 0;     // ||div *xi||_L2 (interior for tangential)
  bool tangential = false;
};

class WhitneyEval {
 public:
  WhitneyEval(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
              const DecOperators& dec);

  // ambient value of the field at barycentric lambda on face f
  VecX value(const HarmonicField& field, int f, const Vec3& lambda) const;
  // ambient value of *field (pointwise +90 degree rotation)
  VecX value_rotated(const HarmonicField& field, int f, const Vec3& lambda) const;
  // chart coordinates of the point, unwrapped across periodic seams
  Vec3 chart_point(int f, const Vec3& lambda) const;

  double face_area(int f) const { return area_[f]; }
  int num_faces() const { return int(area_.size()); }
  // edge-midpoint quadrature (exact for quadratics)
  static const std::array<Vec3, 3>& midpoints();

  double l2_norm(const HarmonicField& field) const;
  double inner(const HarmonicField& a, const HarmonicField& b) const;

 private:
  VecX whitney(const VecX& form, int f, const Vec3& lambda) const;
  VecX rotate90(int f, const VecX& x) const;

  const ImmersedMesh* mesh_;
  const DecOperators* dec_;
  std::vector<std::array<VecX, 3>> grad_lambda_;  // per face
  std::vector<std::array<VecX, 2>> face_frame_;   // oriented orthonormal pair
  std::vector<Mat3> chart_corners_;               // unwrapped, rows = corners
  VecX area_;
};

std::vector<HarmonicField> harmonic_basis(const ImmersedMesh& mesh,
                                          const SurfaceGeometry& geom,
                                          const DecOperators& dec);

std::vector<HarmonicField> tangential_harmonic_basis(const ImmersedMesh& mesh,
                                                     const SurfaceGeometry& geom,
                                                     const DecOperators& dec);

HarmonicField star_rotate(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                          const DecOperators& dec, const HarmonicField& field);

// u_j = <xi, E_j> per vertex for the canonical ambient basis; V x d.
// With rotated=true returns the coordinates of *xi instead.
MatX coordinate_functions(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                          const HarmonicField& field, bool rotated = false);

// Linear combination sum_i coef[i] * fields[i] with refreshed vertex data
// and residuals; all inputs must share the same storage convention.
HarmonicField combine_fields(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                             const DecOperators& dec,
                             const std::vector<HarmonicField>& fields,
                             const VecX& coef);

}  // namespace cmcix
