#pragma once

// Discrete exterior calculus operators on an immersed mesh: signed
// incidence maps d0, d1 and diagonal cotan Hodge stars. Negative star1
// entries are kept (no clamping) and counted as a mesh-quality metric.

#include "cmcix/geometry.hpp"
#include "cmcix/mesh.hpp"

#include <Eigen/Sparse>

namespace cmcix {

using SpMat = Eigen::SparseMatrix<double>;

struct DecOperators {
  SpMat d0;    // E x V: head minus tail
  SpMat d1;    // F x E: oriented face circulation
  VecX star0;  // V: barycentric vertex areas
  VecX star1;  // E: cotan weights
  VecX star2;  // F: 1 / face area
  MeshConnectivity conn;
  int negative_star1_count = 0;
};

DecOperators build_dec(const ImmersedMesh& mesh, const SurfaceGeometry& geom);

// Vertex Laplacian d0^T star1 d0 (positive semidefinite).
SpMat laplacian0(const DecOperators& dec);

}  // namespace cmcix
