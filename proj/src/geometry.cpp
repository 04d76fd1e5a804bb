#include "cmcix/geometry.hpp"

#include "cmcix/generate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cmcix {

namespace {

double triangle_area(const VecX& e1, const VecX& e2) {
  const double g11 = e1.squaredNorm(), g22 = e2.squaredNorm(), g12 = e1.dot(e2);
  const double det = g11 * g22 - g12 * g12;
  return 0.5 * std::sqrt(std::max(det, 0.0));
}

// Rings of a vertex (excluding the vertex itself).
std::vector<int> k_ring(const MeshConnectivity& conn, int v, int k) {
  std::set<int> out, frontier{v};
  for (int step = 0; step < k; ++step) {
    std::set<int> next;
    for (int w : frontier)
      for (int u : conn.vertex_neighbors[w])
        if (u != v && !out.count(u)) next.insert(u);
    out.insert(next.begin(), next.end());
    frontier = std::move(next);
  }
  return {out.begin(), out.end()};
}

struct VertexJet {
  VecX E1, E2;      // orthonormal tangent frame (ambient coords)
  MatX normals;     // d x (d-2) orthonormal normal basis of the surface
  MatX hess;        // (d-2) x 3 rows (h11, h12, h22) per normal direction
  MatX tilt;        // (d-2) x 2 residual linear coefficients
};

// Vector-valued local polynomial fit of the surface over the vertex
// neighborhood: heights in every normal direction as functions of the
// tangent coordinates. Quartic terms are kept when the stencil allows so
// the curvature coefficients stay high-order on structured meshes.
void fit_jet(const ImmersedMesh& mesh, const std::vector<int>& ring, int v,
             VertexJet& jet) {
  const int n = int(ring.size());
  const int d = mesh.ambient_dim();
  const int nn = d - 2;
  int order = 2;
  if (n >= 18) order = 4;
  else if (n >= 12) order = 3;
  const int m = order == 4 ? 14 : (order == 3 ? 9 : 5);

  double scale = 0;
  for (int r = 0; r < n; ++r)
    scale += (mesh.pos.row(ring[r]) - mesh.pos.row(v)).norm();
  scale = std::max(scale / n, 1e-300);

  MatX A(n, m);
  MatX rhs(n, nn);
  for (int r = 0; r < n; ++r) {
    const VecX delta = (mesh.pos.row(ring[r]) - mesh.pos.row(v)).transpose();
    const double x = delta.dot(jet.E1) / scale;
    const double y = delta.dot(jet.E2) / scale;
    A(r, 0) = x;
    A(r, 1) = y;
    A(r, 2) = 0.5 * x * x;
    A(r, 3) = x * y;
    A(r, 4) = 0.5 * y * y;
    if (order >= 3) {
      A(r, 5) = x * x * x;
      A(r, 6) = x * x * y;
      A(r, 7) = x * y * y;
      A(r, 8) = y * y * y;
    }
    if (order >= 4) {
      A(r, 9) = x * x * x * x;
      A(r, 10) = x * x * x * y;
      A(r, 11) = x * x * y * y;
      A(r, 12) = x * y * y * y;
      A(r, 13) = y * y * y * y;
    }
    for (int k = 0; k < nn; ++k) rhs(r, k) = delta.dot(jet.normals.col(k)) / scale;
  }
  const MatX c = A.colPivHouseholderQr().solve(rhs);  // m x nn
  jet.hess.resize(nn, 3);
  jet.tilt.resize(nn, 2);
  for (int k = 0; k < nn; ++k) {
    jet.tilt(k, 0) = c(0, k);
    jet.tilt(k, 1) = c(1, k);
    jet.hess(k, 0) = c(2, k) / scale;
    jet.hess(k, 1) = c(3, k) / scale;
    jet.hess(k, 2) = c(4, k) / scale;
  }
}

// Orthonormal basis of the orthogonal complement of (E1, E2) in R^d.
MatX normal_complement(const VecX& E1, const VecX& E2) {
  const int d = int(E1.size());
  MatX T(d, 2);
  T.col(0) = E1;
  T.col(1) = E2;
  const Eigen::HouseholderQR<MatX> qr(T);
  const MatX Q = qr.householderQ() * MatX::Identity(d, d);
  MatX N = Q.rightCols(d - 2);
  return N;
}

}  // namespace

SurfaceGeometry compute_geometry(const ImmersedMesh& mesh) {
  const int V = mesh.num_vertices();
  const int F = mesh.num_faces();
  const int d = mesh.ambient_dim();
  const MeshConnectivity conn = build_connectivity(mesh);

  SurfaceGeometry g;
  g.face_area.resize(F);
  g.vertex_area = VecX::Zero(V);
  for (int f = 0; f < F; ++f) {
    const VecX e1 = (mesh.pos.row(mesh.faces(f, 1)) - mesh.pos.row(mesh.faces(f, 0))).transpose();
    const VecX e2 = (mesh.pos.row(mesh.faces(f, 2)) - mesh.pos.row(mesh.faces(f, 0))).transpose();
    const double area = triangle_area(e1, e2);
    const double longest = std::max(e1.norm(), std::max(e2.norm(), (e1 - e2).norm()));
    if (!(area > longest * longest / 1e6))
      throw Error(Error::InvalidArgument, "degenerate triangle " + std::to_string(f));
    g.face_area[f] = area;
    for (int i = 0; i < 3; ++i) g.vertex_area[mesh.faces(f, i)] += area / 3.0;
  }

  g.normal.resize(V, d);
  g.frame1.resize(V, d);
  g.frame2.resize(V, d);
  g.shape.resize(V, 3);
  g.mean_curv.resize(V);
  g.gauss_curv.resize(V);
  g.sff_norm_sq.resize(V);

  for (int v = 0; v < V; ++v) {
    const Vec3 p = mesh.chart.row(v).transpose();
    const MatX PM = mesh.space->tangent_projector(p);
    const MatX J = mesh.space->jacobian(p);

    // tangent plane of the surface within T_pM from the projected 1-ring
    const auto& nbrs = conn.vertex_neighbors[v];
    MatX edges(int(nbrs.size()), d);
    for (size_t i = 0; i < nbrs.size(); ++i)
      edges.row(int(i)) =
          (PM * (mesh.pos.row(nbrs[i]) - mesh.pos.row(v)).transpose()).transpose();
    Eigen::JacobiSVD<MatX> svd(edges, Eigen::ComputeThinV);
    VecX t1 = svd.matrixV().col(0);
    VecX t2 = svd.matrixV().col(1);

    // frame by Gram-Schmidt on chart coordinate directions inside the plane
    auto project_to_plane = [&](const VecX& x) -> VecX {
      return t1 * t1.dot(x) + t2 * t2.dot(x);
    };
    VecX E1, E2;
    {
      int best = 0;
      double best_norm = -1;
      for (int i = 0; i < 3; ++i) {
        const double nn = project_to_plane(J.col(i)).norm();
        if (nn > best_norm) { best_norm = nn; best = i; }
      }
      E1 = project_to_plane(J.col(best)).normalized();
      E2 = (t2 - E1 * E1.dot(t2));
      if (E2.norm() < 1e-12) E2 = (t1 - E1 * E1.dot(t1));
      E2.normalize();
    }
    // orient (E1, E2) with the face orientation
    double orient = 0;
    for (int f : conn.vertex_faces[v]) {
      const VecX u = (mesh.pos.row(mesh.faces(f, 1)) - mesh.pos.row(mesh.faces(f, 0))).transpose();
      const VecX w = (mesh.pos.row(mesh.faces(f, 2)) - mesh.pos.row(mesh.faces(f, 0))).transpose();
      orient += u.dot(E1) * w.dot(E2) - u.dot(E2) * w.dot(E1);
    }
    if (orient < 0) E2 = -E2;

    // vector jet fit with one tangent-plane refinement pass
    const std::vector<int> ring =
        k_ring(conn, v, conn.boundary_vertex[v] ? 3 : 2);
    VertexJet jet;
    jet.E1 = E1;
    jet.E2 = E2;
    jet.normals = normal_complement(E1, E2);
    fit_jet(mesh, ring, v, jet);
    {
      VecX E1n = jet.E1, E2n = jet.E2;
      for (int k = 0; k < jet.normals.cols(); ++k) {
        E1n += jet.tilt(k, 0) * jet.normals.col(k);
        E2n += jet.tilt(k, 1) * jet.normals.col(k);
      }
      E1n.normalize();
      E2n = (E2n - E2n.dot(E1n) * E1n).normalized();
      jet.E1 = E1n;
      jet.E2 = E2n;
      jet.normals = normal_complement(E1n, E2n);
      fit_jet(mesh, ring, v, jet);
    }

    // the surface normal inside T_pM: remaining direction of the projector
    MatX R = PM - jet.E1 * jet.E1.transpose() - jet.E2 * jet.E2.transpose();
    int ncol = 0;
    double best = -1;
    for (int i = 0; i < d; ++i) {
      const double nn = R.col(i).norm();
      if (nn > best) { best = nn; ncol = i; }
    }
    if (best < 1e-10)
      throw Error(Error::InvalidArgument, "normal undefined at vertex " + std::to_string(v));
    VecX N = R.col(ncol).normalized();
    // consistent sign: (E1, E2, N) positively oriented in the chart frame
    {
      const Mat3 ginv = mesh.space->metric(p).inverse();
      Mat3 B;
      B.col(0) = ginv * (J.transpose() * jet.E1);
      B.col(1) = ginv * (J.transpose() * jet.E2);
      B.col(2) = ginv * (J.transpose() * N);
      if (B.determinant() < 0) N = -N;
    }

    // shape operator of the surface inside M: the N-component of the
    // fitted second-order jet (the other normal directions carry B_M)
    Eigen::Vector3d h = Eigen::Vector3d::Zero();
    double K = 0;
    for (int k = 0; k < jet.normals.cols(); ++k) {
      h += N.dot(jet.normals.col(k)) * jet.hess.row(k).transpose();
      // intrinsic curvature from the full second fundamental form in R^d
      K += jet.hess(k, 0) * jet.hess(k, 2) - jet.hess(k, 1) * jet.hess(k, 1);
    }

    g.normal.row(v) = N.transpose();
    g.frame1.row(v) = jet.E1.transpose();
    g.frame2.row(v) = jet.E2.transpose();
    g.shape.row(v) << h[0], h[1], h[2];
    g.gauss_curv[v] = K;
  }

  // sign convention: analytic family normal when one exists, else H >= 0
  const bool has_reference = family_reference_normal(mesh, 0).size() != 0;
  if (has_reference) {
    for (int v = 0; v < V; ++v) {
      const VecX ref = family_reference_normal(mesh, v);
      if (ref.dot(g.normal.row(v).transpose()) < 0) {
        g.normal.row(v) = -g.normal.row(v);
        g.shape.row(v) = -g.shape.row(v);
      }
    }
  }
  for (int v = 0; v < V; ++v) {
    g.mean_curv[v] = g.shape(v, 0) + g.shape(v, 2);
    g.sff_norm_sq[v] = g.shape(v, 0) * g.shape(v, 0) +
                       2.0 * g.shape(v, 1) * g.shape(v, 1) +
                       g.shape(v, 2) * g.shape(v, 2);
  }
  if (!has_reference) {
    double total = 0;
    for (int v = 0; v < V; ++v) total += g.vertex_area[v] * g.mean_curv[v];
    if (total < 0) {
      g.normal = -g.normal;
      g.shape = -g.shape;
      g.mean_curv = -g.mean_curv;
    }
  }
  return g;
}

FreeBoundaryAngle free_boundary_angle(const ImmersedMesh& mesh,
                                      const SurfaceGeometry& geom) {
  if (mesh.boundary_loops.empty() || mesh.space->kind() != SpaceKind::Ball)
    throw Error(Error::InvalidArgument,
                "free-boundary angle needs a boundary mesh in the ball");
  FreeBoundaryAngle out;
  for (const auto& loop : mesh.boundary_loops) {
    const int n = int(loop.size());
    for (int i = 0; i < n; ++i) {
      const int v = loop[i];
      const Vec3 x = mesh.chart.row(v).transpose();
      if (!mesh.space->on_boundary(x, 1e-6)) continue;  // loop interior to M
      const Vec3 radial = x.normalized();
      // mesh route: conormal = in-plane direction orthogonal to the
      // boundary tangent, outward
      const Vec3 tangent =
          (mesh.chart.row(loop[(i + 1) % n]) - mesh.chart.row(loop[(i - 1 + n) % n]))
              .transpose()
              .normalized();
      const Vec3 N = geom.normal.row(v).transpose().head<3>();
      Vec3 eta = tangent.cross(N);
      if (eta.dot(radial) < 0) eta = -eta;
      out.max_dev_mesh =
          std::max(out.max_dev_mesh,
                   std::abs(std::asin(std::clamp(eta.cross(radial).norm(), 0.0, 1.0))));
      // analytic route
      const Vec3 eta_ref = family_boundary_conormal(mesh, v);
      out.max_dev_analytic =
          std::max(out.max_dev_analytic,
                   std::abs(std::asin(std::clamp(eta_ref.cross(radial).norm(), 0.0, 1.0))));
    }
  }
  return out;
}

double decomposition_residual(const ImmersedMesh& mesh,
                              const SurfaceGeometry& geom) {
  const int V = mesh.num_vertices();
  const int d = mesh.ambient_dim();
  const MeshConnectivity conn = build_connectivity(mesh);

  // smooth tangent test fields: projections of ambient coordinate axes
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {1, 2}, {2, 0}}};
  double resid = 0, scale = 0;

  for (auto [ja, jb] : pairs) {
    // per-vertex fields X = P(E_ja), Y = P(E_jb) restricted to the surface
    MatX X(V, d), Y(V, d);
    for (int v = 0; v < V; ++v) {
      const VecX E1 = geom.frame1.row(v).transpose();
      const VecX E2 = geom.frame2.row(v).transpose();
      auto proj = [&](int axis) {
        return (E1 * E1[axis] + E2 * E2[axis]).transpose();
      };
      X.row(v) = proj(ja);
      Y.row(v) = proj(jb);
    }
    for (int v = 0; v < V; ++v) {
      if (conn.boundary_vertex[v]) continue;
      const auto& nbrs = conn.vertex_neighbors[v];
      const VecX E1 = geom.frame1.row(v).transpose();
      const VecX E2 = geom.frame2.row(v).transpose();
      const VecX N = geom.normal.row(v).transpose();
      // LSQ directional derivative of Y along the surface
      MatX A(int(nbrs.size()), 2);
      MatX B(int(nbrs.size()), d);
      for (size_t i = 0; i < nbrs.size(); ++i) {
        const VecX delta = (mesh.pos.row(nbrs[i]) - mesh.pos.row(v)).transpose();
        A(int(i), 0) = delta.dot(E1);
        A(int(i), 1) = delta.dot(E2);
        B.row(int(i)) = Y.row(nbrs[i]) - Y.row(v);
      }
      const MatX G = A.colPivHouseholderQr().solve(B);  // 2 x d gradient
      const Eigen::Vector2d xf(X.row(v).dot(E1.transpose()), X.row(v).dot(E2.transpose()));
      const VecX DXY = (G.transpose() * xf);
      // decomposition pieces
      const VecX tangential = E1 * DXY.dot(E1) + E2 * DXY.dot(E2);
      const Eigen::Vector2d yf(Y.row(v).dot(E1.transpose()), Y.row(v).dot(E2.transpose()));
      const double hxy = xf[0] * yf[0] * geom.shape(v, 0) +
                         (xf[0] * yf[1] + xf[1] * yf[0]) * geom.shape(v, 1) +
                         xf[1] * yf[1] * geom.shape(v, 2);
      const VecX Bm = mesh.space->sff(mesh.chart.row(v).transpose(),
                                      X.row(v).transpose(), Y.row(v).transpose());
      const VecX gap = DXY - tangential - hxy * N - Bm;
      resid += geom.vertex_area[v] * gap.norm();
      scale += geom.vertex_area[v] * (DXY.norm() + Bm.norm() + std::abs(hxy));
    }
  }
  return resid / std::max(scale, 1e-300);
}

}  // namespace cmcix
