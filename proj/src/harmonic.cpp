#include "cmcix/harmonic.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <deque>
#include <numeric>

namespace cmcix {

namespace {

// ---------------------------------------------------------------------
// tree-cotree machinery

struct DualTree {
  std::vector<char> edge_in_dual;   // E flags
  std::vector<int> parent_face;     // F, -1 at root
  std::vector<int> parent_edge;     // F, edge shared with parent
  std::vector<int> bfs_order;       // root first
};

// Spanning tree of the dual graph crossing interior edges only, BFS from
// face 0 with faces/edges visited in index order.
DualTree build_dual_tree(const MeshConnectivity& conn, int num_faces,
                         const std::vector<char>& edge_blocked) {
  const int E = conn.num_edges();
  std::vector<std::array<int, 2>> edge_faces(E, {-1, -1});
  for (int f = 0; f < num_faces; ++f)
    for (int i = 0; i < 3; ++i) {
      auto& ef = edge_faces[conn.face_edges(f, i)];
      (ef[0] < 0 ? ef[0] : ef[1]) = f;
    }
  DualTree t;
  t.edge_in_dual.assign(E, 0);
  t.parent_face.assign(num_faces, -1);
  t.parent_edge.assign(num_faces, -1);
  std::vector<char> seen(num_faces, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    t.bfs_order.push_back(f);
    for (int i = 0; i < 3; ++i) {
      const int e = conn.face_edges(f, i);
      if (conn.boundary_edge[e] || edge_blocked[e]) continue;
      const int g = edge_faces[e][0] == f ? edge_faces[e][1] : edge_faces[e][0];
      if (g < 0 || seen[g]) continue;
      seen[g] = 1;
      t.edge_in_dual[e] = 1;
      t.parent_face[g] = f;
      t.parent_edge[g] = e;
      queue.push_back(g);
    }
  }
  if (int(t.bfs_order.size()) != num_faces)
    throw Error(Error::Internal, "dual graph disconnected");
  return t;
}

// Closed cocycle supported on the leftover edge plus dual-tree edges,
// built leaves-first so every face circulation vanishes exactly.
VecX closed_cocycle(const MeshConnectivity& conn, const DualTree& dual,
                    int num_faces, int generator_edge) {
  VecX sigma = VecX::Zero(conn.num_edges());
  sigma[generator_edge] = 1.0;
  for (auto it = dual.bfs_order.rbegin(); it != dual.bfs_order.rend(); ++it) {
    const int f = *it;
    const int pe = dual.parent_edge[f];
    if (pe < 0) continue;  // root
    double acc = 0;
    int psign = 0;
    for (int i = 0; i < 3; ++i) {
      const int e = conn.face_edges(f, i);
      const int s = conn.face_edge_sign(f, i);
      if (e == pe) psign = s;
      else acc += s * sigma[e];
    }
    sigma[pe] = -acc / psign;
  }
  return sigma;
}

Eigen::VectorXi primal_tree_closed(const MeshConnectivity& conn, int V) {
  // returns per-edge flag; BFS from vertex 0 in edge index order
  Eigen::VectorXi in_tree = Eigen::VectorXi::Zero(conn.num_edges());
  std::vector<std::vector<std::pair<int, int>>> adj(V);  // (edge, other)
  for (int e = 0; e < conn.num_edges(); ++e) {
    adj[conn.edges(e, 0)].push_back({e, conn.edges(e, 1)});
    adj[conn.edges(e, 1)].push_back({e, conn.edges(e, 0)});
  }
  std::vector<char> seen(V, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (auto [e, w] : adj[v]) {
      if (seen[w]) continue;
      seen[w] = 1;
      in_tree[e] = 1;
      queue.push_back(w);
    }
  }
  return in_tree;
}

// Boundary-relative spanning tree: all boundary vertices act as a single
// pre-connected root; only non-boundary edges may enter the tree.
Eigen::VectorXi primal_tree_relative(const MeshConnectivity& conn, int V) {
  Eigen::VectorXi in_tree = Eigen::VectorXi::Zero(conn.num_edges());
  std::vector<std::vector<std::pair<int, int>>> adj(V);
  for (int e = 0; e < conn.num_edges(); ++e) {
    if (conn.boundary_edge[e]) continue;
    adj[conn.edges(e, 0)].push_back({e, conn.edges(e, 1)});
    adj[conn.edges(e, 1)].push_back({e, conn.edges(e, 0)});
  }
  std::vector<char> seen(V, 0);
  std::deque<int> queue;
  for (int v = 0; v < V; ++v)
    if (conn.boundary_vertex[v]) { seen[v] = 1; queue.push_back(v); }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (auto [e, w] : adj[v]) {
      if (seen[w]) continue;
      seen[w] = 1;
      in_tree[e] = 1;
      queue.push_back(w);
    }
  }
  return in_tree;
}

// Solve A x = b for sparse symmetric A; LDLT with LU fallback.
VecX sparse_solve(const SpMat& A, const VecX& b) {
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  if (ldlt.info() == Eigen::Success) {
    VecX x = ldlt.solve(b);
    if (ldlt.info() == Eigen::Success) return x;
  }
  Eigen::SparseLU<SpMat> lu(A);
  if (lu.info() != Eigen::Success)
    throw Error(Error::Solver, "sparse factorization failed");
  return lu.solve(b);
}

SpMat drop_index(const SpMat& A, int drop) {
  // remove one row/col (used to pin the constant null space)
  const int n = int(A.rows());
  std::vector<Eigen::Triplet<double>> tr;
  tr.reserve(A.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      if (it.row() == drop || it.col() == drop) continue;
      tr.emplace_back(it.row() - (it.row() > drop), it.col() - (it.col() > drop),
                      it.value());
    }
  SpMat B(n - 1, n - 1);
  B.setFromTriplets(tr.begin(), tr.end());
  return B;
}

}  // namespace

// ---------------------------------------------------------------------
// WhitneyEval

WhitneyEval::WhitneyEval(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                         const DecOperators& dec)
    : mesh_(&mesh), dec_(&dec) {
  const int F = mesh.num_faces();
  grad_lambda_.resize(F);
  face_frame_.resize(F);
  chart_corners_.resize(F);
  area_ = geom.face_area;
  const auto periods = mesh.space->chart_periods();

  for (int f = 0; f < F; ++f) {
    const VecX p0 = mesh.pos.row(mesh.faces(f, 0)).transpose();
    const VecX u = mesh.pos.row(mesh.faces(f, 1)).transpose() - p0;
    const VecX w = mesh.pos.row(mesh.faces(f, 2)).transpose() - p0;
    Eigen::Matrix2d G;
    G << u.squaredNorm(), u.dot(w), u.dot(w), w.squaredNorm();
    const Eigen::Matrix2d Gi = G.inverse();
    const VecX g1 = Gi(0, 0) * u + Gi(0, 1) * w;
    const VecX g2 = Gi(1, 0) * u + Gi(1, 1) * w;
    grad_lambda_[f] = {VecX(-g1 - g2), g1, g2};
    const VecX e1 = u.normalized();
    VecX e2 = w - w.dot(e1) * e1;
    e2.normalize();
    face_frame_[f] = {e1, e2};

    // unwrap chart corners against corner 0
    Mat3 cc;
    cc.row(0) = mesh.chart.row(mesh.faces(f, 0));
    for (int i = 1; i < 3; ++i) {
      Vec3 best = mesh.chart.row(mesh.faces(f, i)).transpose();
      const Vec3 base = cc.row(0).transpose();
      if (!periods.empty()) {
        double best_dist = (best - base).norm();
        const int np = int(periods.size());
        const int lim = 1;
        std::array<int, 3> n{0, 0, 0};
        for (n[0] = -lim; n[0] <= lim; ++n[0])
          for (n[1] = (np > 1 ? -lim : 0); n[1] <= (np > 1 ? lim : 0); ++n[1])
            for (n[2] = (np > 2 ? -lim : 0); n[2] <= (np > 2 ? lim : 0); ++n[2]) {
              Vec3 cand = mesh.chart.row(mesh.faces(f, i)).transpose();
              for (int q = 0; q < np; ++q) cand += double(n[q]) * periods[q];
              const double dd = (cand - base).norm();
              if (dd < best_dist) { best_dist = dd; best = cand; }
            }
      }
      cc.row(i) = best.transpose();
    }
    chart_corners_[f] = cc;
  }
}

const std::array<Vec3, 3>& WhitneyEval::midpoints() {
  static const std::array<Vec3, 3> m = {Vec3(0.5, 0.5, 0.0), Vec3(0.0, 0.5, 0.5),
                                        Vec3(0.5, 0.0, 0.5)};
  return m;
}

VecX WhitneyEval::whitney(const VecX& form, int f, const Vec3& lambda) const {
  const auto& gl = grad_lambda_[f];
  VecX W = VecX::Zero(gl[0].size());
  for (int i = 0; i < 3; ++i) {
    const int e = dec_->conn.face_edges(f, i);
    const double s = dec_->conn.face_edge_sign(f, i);
    const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
    W += form[e] * s * (lambda[i1] * gl[i2] - lambda[i2] * gl[i1]);
  }
  return W;
}

VecX WhitneyEval::rotate90(int f, const VecX& x) const {
  const auto& fr = face_frame_[f];
  return fr[1] * fr[0].dot(x) - fr[0] * fr[1].dot(x);
}

VecX WhitneyEval::value(const HarmonicField& field, int f, const Vec3& lambda) const {
  const VecX W = whitney(field.form, f, lambda);
  if (!field.form_is_rotated) return W;
  return -rotate90(f, W);  // xi = J^T (rho sharp)
}

VecX WhitneyEval::value_rotated(const HarmonicField& field, int f,
                                const Vec3& lambda) const {
  return rotate90(f, value(field, f, lambda));
}

Vec3 WhitneyEval::chart_point(int f, const Vec3& lambda) const {
  return chart_corners_[f].transpose() * lambda;
}

double WhitneyEval::l2_norm(const HarmonicField& field) const {
  return std::sqrt(inner(field, field));
}

double WhitneyEval::inner(const HarmonicField& a, const HarmonicField& b) const {
  double acc = 0;
  for (int f = 0; f < num_faces(); ++f) {
    double fa = 0;
    for (const auto& m : midpoints()) fa += value(a, f, m).dot(value(b, f, m));
    acc += area_[f] / 3.0 * fa;
  }
  return acc;
}

// ---------------------------------------------------------------------
// basis construction

namespace {

void fill_vertex_vectors(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                         const WhitneyEval& eval, HarmonicField& field) {
  const int V = mesh.num_vertices();
  const int d = mesh.ambient_dim();
  MatX acc = MatX::Zero(V, d);
  VecX wsum = VecX::Zero(V);
  static const std::array<Vec3, 3> corners = {Vec3(1, 0, 0), Vec3(0, 1, 0),
                                              Vec3(0, 0, 1)};
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const double w = eval.face_area(f) / 3.0;
    for (int i = 0; i < 3; ++i) {
      const int v = mesh.faces(f, i);
      acc.row(v) += w * eval.value(field, f, corners[i]).transpose();
      wsum[v] += w;
    }
  }
  field.vertex_frame.resize(V, 2);
  field.vertex_ambient.resize(V, d);
  for (int v = 0; v < V; ++v) {
    const VecX raw = acc.row(v).transpose() / wsum[v];
    const VecX E1 = geom.frame1.row(v).transpose();
    const VecX E2 = geom.frame2.row(v).transpose();
    const double c1 = raw.dot(E1), c2 = raw.dot(E2);
    field.vertex_frame.row(v) << c1, c2;
    field.vertex_ambient.row(v) = (c1 * E1 + c2 * E2).transpose();
  }
}

void fill_residuals(const DecOperators& dec, const WhitneyEval& eval,
                    HarmonicField& field) {
  const VecX& sigma = field.form;
  const VecX div_vertex = dec.d0.transpose() * (dec.star1.asDiagonal() * sigma);
  const VecX curl_face = dec.d1 * sigma;
  double div_l2 = 0;
  for (int v = 0; v < dec.star0.size(); ++v) {
    if (field.tangential && dec.conn.boundary_vertex[v]) continue;
    div_l2 += div_vertex[v] * div_vertex[v] / dec.star0[v];
  }
  div_l2 = std::sqrt(div_l2);
  double curl_l2 = 0;
  for (int f = 0; f < dec.star2.size(); ++f)
    curl_l2 += curl_face[f] * curl_face[f] * dec.star2[f];
  curl_l2 = std::sqrt(curl_l2);
  if (field.form_is_rotated) {
    field.residual_div = curl_l2;   // div xi  ~ d(rho)
    field.residual_codiv = div_l2;  // div *xi ~ delta(rho), interior
  } else {
    field.residual_div = div_l2;
    field.residual_codiv = curl_l2;
  }
}

void orthonormalize(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                    const DecOperators& dec, const WhitneyEval& eval,
                    std::vector<HarmonicField>& fields) {
  const int q = int(fields.size());
  if (q == 0) return;
  // star0 inner products of the vertex representation
  MatX G(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j) {
      double acc = 0;
      for (int v = 0; v < mesh.num_vertices(); ++v)
        acc += dec.star0[v] *
               fields[i].vertex_ambient.row(v).dot(fields[j].vertex_ambient.row(v));
      G(i, j) = G(j, i) = acc;
    }
  Eigen::SelfAdjointEigenSolver<MatX> es(G);
  if (es.eigenvalues().minCoeff() <= 0)
    throw Error(Error::Solver, "dependent harmonic basis");
  const MatX W = es.eigenvectors() *
                 es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal();
  std::vector<HarmonicField> out(q);
  for (int j = 0; j < q; ++j) {
    out[j].form = VecX::Zero(fields[0].form.size());
    out[j].form_is_rotated = fields[0].form_is_rotated;
    out[j].tangential = fields[0].tangential;
    for (int i = 0; i < q; ++i) out[j].form += W(i, j) * fields[i].form;
    fill_vertex_vectors(mesh, geom, eval, out[j]);
    fill_residuals(dec, eval, out[j]);
  }
  fields = std::move(out);
}

}  // namespace

std::vector<HarmonicField> harmonic_basis(const ImmersedMesh& mesh,
                                          const SurfaceGeometry& geom,
                                          const DecOperators& dec) {
  if (!mesh.boundary_loops.empty())
    throw Error(Error::InvalidArgument, "harmonic_basis requires a closed mesh");
  const int V = mesh.num_vertices();
  const Eigen::VectorXi in_tree = primal_tree_closed(dec.conn, V);
  std::vector<char> blocked(dec.conn.num_edges(), 0);
  for (int e = 0; e < dec.conn.num_edges(); ++e) blocked[e] = in_tree[e] != 0;
  const DualTree dual = build_dual_tree(dec.conn, mesh.num_faces(), blocked);

  std::vector<int> generators;
  for (int e = 0; e < dec.conn.num_edges(); ++e)
    if (!in_tree[e] && !dual.edge_in_dual[e]) generators.push_back(e);

  const SpMat L0 = laplacian0(dec);
  const SpMat L0r = drop_index(L0, 0);
  Eigen::SimplicialLDLT<SpMat> solver(L0r);
  if (solver.info() != Eigen::Success)
    throw Error(Error::Solver, "Laplacian factorization failed");

  const WhitneyEval eval(mesh, geom, dec);
  std::vector<HarmonicField> fields;
  for (int ge : generators) {
    VecX sigma = closed_cocycle(dec.conn, dual, mesh.num_faces(), ge);
    // subtract the exact part (delta-solve on vertices, vertex 0 pinned)
    VecX rhs = dec.d0.transpose() * (dec.star1.asDiagonal() * sigma);
    VecX alpha = VecX::Zero(V);
    alpha.segment(1, V - 1) = solver.solve(rhs.segment(1, V - 1));
    sigma -= dec.d0 * alpha;
    // subtract the coexact part (curl-solve on faces); the cocycle is
    // exactly closed so this is a certificate, not a correction
    VecX curl = dec.d1 * sigma;
    if (curl.lpNorm<Eigen::Infinity>() > 1e-12 * sigma.lpNorm<Eigen::Infinity>()) {
      const SpMat L2 = dec.d1 * dec.star1.cwiseInverse().asDiagonal() *
                       SpMat(dec.d1.transpose());
      const VecX y = sparse_solve(drop_index(L2, 0), curl.segment(1, curl.size() - 1));
      VecX yfull = VecX::Zero(curl.size());
      yfull.segment(1, curl.size() - 1) = y;
      sigma -= dec.star1.cwiseInverse().asDiagonal() * (dec.d1.transpose() * yfull);
    }
    HarmonicField field;
    field.form = sigma;
    field.form_is_rotated = false;
    field.tangential = false;
    fill_vertex_vectors(mesh, geom, eval, field);
    fill_residuals(dec, eval, field);
    fields.push_back(std::move(field));
  }
  orthonormalize(mesh, geom, dec, eval, fields);
  return fields;
}

std::vector<HarmonicField> tangential_harmonic_basis(const ImmersedMesh& mesh,
                                                     const SurfaceGeometry& geom,
                                                     const DecOperators& dec) {
  if (mesh.boundary_loops.empty())
    throw Error(Error::InvalidArgument,
                "tangential_harmonic_basis requires a boundary mesh");
  const int V = mesh.num_vertices();
  const int E = dec.conn.num_edges();

  const DualTree dual = build_dual_tree(dec.conn, mesh.num_faces(),
                                        std::vector<char>(E, 0));
  // relative primal tree avoiding dual-tree edges
  Eigen::VectorXi in_tree = Eigen::VectorXi::Zero(E);
  {
    std::vector<std::vector<std::pair<int, int>>> adj(V);
    for (int e = 0; e < E; ++e) {
      if (dec.conn.boundary_edge[e] || dual.edge_in_dual[e]) continue;
      adj[dec.conn.edges(e, 0)].push_back({e, dec.conn.edges(e, 1)});
      adj[dec.conn.edges(e, 1)].push_back({e, dec.conn.edges(e, 0)});
    }
    std::vector<char> seen(V, 0);
    std::deque<int> queue;
    for (int v = 0; v < V; ++v)
      if (dec.conn.boundary_vertex[v]) { seen[v] = 1; queue.push_back(v); }
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (auto [e, w] : adj[v]) {
        if (seen[w]) continue;
        seen[w] = 1;
        in_tree[e] = 1;
        queue.push_back(w);
      }
    }
    for (int v = 0; v < V; ++v)
      if (!seen[v]) throw Error(Error::Internal, "relative tree incomplete");
  }

  std::vector<int> generators;
  for (int e = 0; e < E; ++e)
    if (!dec.conn.boundary_edge[e] && !dual.edge_in_dual[e] && !in_tree[e])
      generators.push_back(e);

  // Dirichlet Laplacian on interior vertices
  std::vector<int> interior, index_of(V, -1);
  for (int v = 0; v < V; ++v)
    if (!dec.conn.boundary_vertex[v]) {
      index_of[v] = int(interior.size());
      interior.push_back(v);
    }
  const SpMat L0 = laplacian0(dec);
  std::vector<Eigen::Triplet<double>> tr;
  for (int k = 0; k < L0.outerSize(); ++k)
    for (SpMat::InnerIterator it(L0, k); it; ++it) {
      const int ri = index_of[int(it.row())], ci = index_of[int(it.col())];
      if (ri >= 0 && ci >= 0) tr.emplace_back(ri, ci, it.value());
    }
  SpMat L0i(int(interior.size()), int(interior.size()));
  L0i.setFromTriplets(tr.begin(), tr.end());
  Eigen::SimplicialLDLT<SpMat> solver(L0i);
  if (solver.info() != Eigen::Success)
    throw Error(Error::Solver, "Dirichlet Laplacian factorization failed");

  const WhitneyEval eval(mesh, geom, dec);
  std::vector<HarmonicField> fields;
  for (int ge : generators) {
    VecX rho = closed_cocycle(dec.conn, dual, mesh.num_faces(), ge);
    const VecX div_all = dec.d0.transpose() * (dec.star1.asDiagonal() * rho);
    VecX rhs(int(interior.size()));
    for (size_t i = 0; i < interior.size(); ++i) rhs[int(i)] = div_all[interior[i]];
    const VecX alpha_i = solver.solve(rhs);
    VecX alpha = VecX::Zero(V);
    for (size_t i = 0; i < interior.size(); ++i) alpha[interior[i]] = alpha_i[int(i)];
    rho -= dec.d0 * alpha;  // stays zero on boundary edges (alpha = 0 there)
    HarmonicField field;
    field.form = rho;
    field.form_is_rotated = true;
    field.tangential = true;
    fill_vertex_vectors(mesh, geom, eval, field);
    fill_residuals(dec, eval, field);
    fields.push_back(std::move(field));
  }
  orthonormalize(mesh, geom, dec, eval, fields);
  return fields;
}

HarmonicField star_rotate(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                          const DecOperators& dec, const HarmonicField& field) {
  HarmonicField out;
  if (field.form_is_rotated) {
    out.form = field.form;
    out.form_is_rotated = false;
  } else {
    out.form = -field.form;
    out.form_is_rotated = true;
  }
  out.tangential = false;  // the rotation of a tangential field is normal
  const WhitneyEval eval(mesh, geom, dec);
  fill_vertex_vectors(mesh, geom, eval, out);
  fill_residuals(dec, eval, out);
  return out;
}

HarmonicField combine_fields(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                             const DecOperators& dec,
                             const std::vector<HarmonicField>& fields,
                             const VecX& coef) {
  if (fields.empty() || coef.size() != int(fields.size()))
    throw Error(Error::InvalidArgument, "combine_fields: bad coefficients");
  HarmonicField out;
  out.form = VecX::Zero(fields[0].form.size());
  out.form_is_rotated = fields[0].form_is_rotated;
  out.tangential = fields[0].tangential;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].form_is_rotated != out.form_is_rotated)
      throw Error(Error::InvalidArgument, "combine_fields: mixed conventions");
    out.form += coef[int(i)] * fields[i].form;
  }
  const WhitneyEval eval(mesh, geom, dec);
  fill_vertex_vectors(mesh, geom, eval, out);
  fill_residuals(dec, eval, out);
  return out;
}

MatX coordinate_functions(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                          const HarmonicField& field, bool rotated) {
  if (!mesh.space->has_embedding())
    throw Error(Error::ClosedFormOnly, "closed-form-only space");
  if (!rotated) return field.vertex_ambient;
  const int V = mesh.num_vertices();
  MatX u(V, mesh.ambient_dim());
  for (int v = 0; v < V; ++v) {
    const double a = field.vertex_frame(v, 0), b = field.vertex_frame(v, 1);
    u.row(v) = -b * geom.frame1.row(v) + a * geom.frame2.row(v);
  }
  return u;
}

}  // namespace cmcix
