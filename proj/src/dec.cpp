#include "cmcix/dec.hpp"

#include <vector>

namespace cmcix {

DecOperators build_dec(const ImmersedMesh& mesh, const SurfaceGeometry& geom) {
  DecOperators dec;
  dec.conn = build_connectivity(mesh);
  const int V = mesh.num_vertices();
  const int E = dec.conn.num_edges();
  const int F = mesh.num_faces();

  std::vector<Eigen::Triplet<double>> t0, t1;
  t0.reserve(2 * E);
  for (int e = 0; e < E; ++e) {
    t0.emplace_back(e, dec.conn.edges(e, 0), -1.0);
    t0.emplace_back(e, dec.conn.edges(e, 1), 1.0);
  }
  dec.d0.resize(E, V);
  dec.d0.setFromTriplets(t0.begin(), t0.end());

  t1.reserve(3 * F);
  for (int f = 0; f < F; ++f)
    for (int i = 0; i < 3; ++i)
      t1.emplace_back(f, dec.conn.face_edges(f, i),
                      double(dec.conn.face_edge_sign(f, i)));
  dec.d1.resize(F, E);
  dec.d1.setFromTriplets(t1.begin(), t1.end());

  dec.star0 = geom.vertex_area;
  dec.star2 = geom.face_area.cwiseInverse();

  dec.star1 = VecX::Zero(E);
  for (int f = 0; f < F; ++f) {
    for (int i = 0; i < 3; ++i) {
      // cotangent at the corner opposite edge i
      const int a = mesh.faces(f, i);
      const int b = mesh.faces(f, (i + 1) % 3);
      const int c = mesh.faces(f, (i + 2) % 3);
      const VecX u = (mesh.pos.row(b) - mesh.pos.row(a)).transpose();
      const VecX w = (mesh.pos.row(c) - mesh.pos.row(a)).transpose();
      const double cross_sq =
          std::max(u.squaredNorm() * w.squaredNorm() - u.dot(w) * u.dot(w), 0.0);
      const double cot = u.dot(w) / std::sqrt(std::max(cross_sq, 1e-300));
      dec.star1[dec.conn.face_edges(f, i)] += 0.5 * cot;
    }
  }
  for (int e = 0; e < E; ++e)
    if (dec.star1[e] < 0) ++dec.negative_star1_count;
  return dec;
}

SpMat laplacian0(const DecOperators& dec) {
  return dec.d0.transpose() * dec.star1.asDiagonal() * dec.d0;
}

}  // namespace cmcix
