#pragma once

// Extrinsic/intrinsic geometry of an immersed mesh: per-vertex unit normal
// N (tangent to M, orthogonal to the surface), orthonormal tangent frames,
// the shape operator of the surface inside M, mean/Gauss curvature and
// area elements.
//
// The shape operator comes from a local polynomial fit of the N-component
// of the ambient second-order jet over the vertex 2-ring (the B_M part of
// the ambient Hessian lives in the other normal directions and drops out).

#include "cmcix/mesh.hpp"

namespace cmcix {

struct SurfaceGeometry {
  MatX normal;   // V x d
  MatX frame1;   // V x d, (frame1, frame2) positively oriented
  MatX frame2;   // V x d
  MatX shape;    // V x 3: (h11, h12, h22) in the frame
  VecX mean_curv;     // H = h11 + h22 (trace convention)
  VecX gauss_curv;    // angle defect / vertex area
  VecX sff_norm_sq;   // |A|^2 = h11^2 + 2 h12^2 + h22^2
  VecX vertex_area;   // barycentric (1/3 of incident face areas)
  VecX face_area;

  double area() const { return face_area.sum(); }
};

SurfaceGeometry compute_geometry(const ImmersedMesh& mesh);

// Deviation of the surface/boundary-wall angle from pi/2 (radians) for
// free-boundary families in the ball, measured two ways: from the mesh
// (fitted tangent planes, central-difference boundary tangents) and from
// the family's analytic conormal.
struct FreeBoundaryAngle {
  double max_dev_mesh = 0;
  double max_dev_analytic = 0;
};
FreeBoundaryAngle free_boundary_angle(const ImmersedMesh& mesh,
                                      const SurfaceGeometry& geom);

// Integrated residual of D_X Y = grad^S_X Y + A(X,Y) N + B_M(X,Y) over
// smooth test fields (projections of ambient axes), relative to the scale
// of the terms. Converges to zero under refinement on smooth families.
double decomposition_residual(const ImmersedMesh& mesh,
                              const SurfaceGeometry& geom);

}  // namespace cmcix
