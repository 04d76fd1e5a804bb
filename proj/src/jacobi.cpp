#include "cmcix/jacobi.hpp"

namespace cmcix {

RicNormal ric_normal(const ImmersedMesh& mesh, const SurfaceGeometry& geom) {
  if (!mesh.space->has_embedding())
    throw Error(Error::ClosedFormOnly, "closed-form-only space");
  const int V = mesh.num_vertices();
  const MeshConnectivity conn = build_connectivity(mesh);
  RicNormal out;
  out.closed_form.resize(V);
  out.gauss_form.resize(V);
  const double R = mesh.space->scalar_curvature(Vec3::Zero());
  double num = 0, den = 0;
  for (int v = 0; v < V; ++v) {
    out.closed_form[v] = mesh.space->ric_normal(mesh.chart.row(v).transpose(),
                                                geom.normal.row(v).transpose());
    const double H = geom.mean_curv[v];
    out.gauss_form[v] = 0.5 * R - 0.5 * geom.sff_norm_sq[v] + 0.5 * H * H -
                        geom.gauss_curv[v];
    if (conn.boundary_vertex[v]) continue;
    const double diff = out.closed_form[v] - out.gauss_form[v];
    const double scale = 0.5 * std::abs(R) + 0.5 * geom.sff_norm_sq[v] +
                         0.5 * H * H + std::abs(geom.gauss_curv[v]);
    num += geom.vertex_area[v] * diff * diff;
    den += geom.vertex_area[v] * std::max(scale, 1e-12) * std::max(scale, 1e-12);
  }
  out.l2_discrepancy = std::sqrt(num / std::max(den, 1e-300));
  return out;
}

JacobiAssembly assemble(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                        bool /*lumped_mass*/) {
  const int V = mesh.num_vertices();
  const int F = mesh.num_faces();
  JacobiAssembly a;

  const RicNormal ric = ric_normal(mesh, geom);
  a.potential_values = ric.closed_form + geom.sff_norm_sq;

  std::vector<Eigen::Triplet<double>> tm, tp;
  tm.reserve(9 * F);
  tp.reserve(9 * F);
  for (int f = 0; f < F; ++f) {
    const double A = geom.face_area[f];
    const int vv[3] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    const double q[3] = {a.potential_values[vv[0]], a.potential_values[vv[1]],
                         a.potential_values[vv[2]]};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        tm.emplace_back(vv[i], vv[j], (i == j ? 2.0 : 1.0) * A / 12.0);
        // int q_h phi_i phi_j with P1 q: exact third-order moments
        double pij = 0;
        for (int c = 0; c < 3; ++c) {
          double w;
          if (i == j && j == c) w = A / 10.0;
          else if (i == j || j == c || i == c) w = A / 30.0;
          else w = A / 60.0;
          pij += q[c] * w;
        }
        tp.emplace_back(vv[i], vv[j], pij);
      }
  }
  a.mass.resize(V, V);
  a.mass.setFromTriplets(tm.begin(), tm.end());
  a.potential.resize(V, V);
  a.potential.setFromTriplets(tp.begin(), tp.end());

  // stiffness: identical to the cotan Laplacian
  {
    const DecOperators dec = build_dec(mesh, geom);
    a.stiffness = laplacian0(dec);
  }

  // Robin boundary form
  a.robin.resize(V, V);
  if (!mesh.boundary_loops.empty()) {
    if (!mesh.space->has_boundary())
      throw Error(Error::InvalidArgument,
                  "surface has boundary but the space carries no boundary data");
    for (const auto& loop : mesh.boundary_loops)
      for (int v : loop)
        if (!mesh.space->on_boundary(mesh.chart.row(v).transpose(), 1e-8))
          throw Error(Error::InvalidArgument,
                      "boundary mesh inside a space with no boundary wall there");
    std::vector<Eigen::Triplet<double>> tb;
    for (const auto& loop : mesh.boundary_loops) {
      const int n = int(loop.size());
      for (int i = 0; i < n; ++i) {
        const int va = loop[i], vb = loop[(i + 1) % n];
        const double L = (mesh.pos.row(va) - mesh.pos.row(vb)).norm();
        const double ha = mesh.space->boundary_h_NN(
            mesh.chart.row(va).transpose(), geom.normal.row(va).transpose());
        const double hb = mesh.space->boundary_h_NN(
            mesh.chart.row(vb).transpose(), geom.normal.row(vb).transpose());
        tb.emplace_back(va, va, L * (ha / 4.0 + hb / 12.0));
        tb.emplace_back(vb, vb, L * (ha / 12.0 + hb / 4.0));
        tb.emplace_back(va, vb, L * (ha + hb) / 12.0);
        tb.emplace_back(vb, va, L * (ha + hb) / 12.0);
      }
    }
    a.robin.setFromTriplets(tb.begin(), tb.end());
    a.has_boundary_term = true;
  }

  a.lumped_mass = geom.vertex_area;
  a.constraint = a.mass * VecX::Ones(V);
  return a;
}

TwistedSpectrum twisted_spectrum(const JacobiAssembly& assembly,
                                 const SpectrumOptions& opts) {
  SpMat A = assembly.quadratic_form();
  SpMat M = assembly.mass;
  if (opts.lumped_mass) {
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < assembly.lumped_mass.size(); ++i)
      t.emplace_back(i, i, assembly.lumped_mass[i]);
    M.setZero();
    M.setFromTriplets(t.begin(), t.end());
  }
  EigOptions eopts;
  eopts.k = opts.k;
  eopts.seed = opts.seed;
  eopts.tol = opts.tol;
  const VecX c = M * VecX::Ones(M.rows());
  const EigResult res = smallest_eigenpairs(A, M, &c, eopts);

  TwistedSpectrum out;
  out.eigenvalues = res.values;
  out.eigenfunctions = res.vectors;
  out.converged = res.converged;
  const int k = int(res.values.size());
  const int navg = std::min(8, k);
  double scale = 0;
  for (int i = 0; i < navg; ++i) scale += std::abs(res.values[i]);
  scale /= std::max(navg, 1);
  out.eps = opts.eps_rel * scale;
  for (int i = 0; i < k; ++i) {
    if (res.values[i] < -out.eps) ++out.index;
    else if (std::abs(res.values[i]) <= out.eps) ++out.nullity;
  }
  for (int i = 0; i < k; ++i)
    out.max_mean_residual =
        std::max(out.max_mean_residual, std::abs(c.dot(res.vectors.col(i))));
  return out;
}

TwistedSpectrum cmc_index(const JacobiAssembly& assembly, SpectrumOptions opts) {
  const int n = int(assembly.mass.rows());
  for (;;) {
    TwistedSpectrum s = twisted_spectrum(assembly, opts);
    const int k = int(s.eigenvalues.size());
    if (k == 0) return s;
    if (s.eigenvalues[k - 1] >= -s.eps || k >= n - 1) return s;
    opts.k = std::min(2 * opts.k, n - 1);  // all computed modes negative
  }
}

}  // namespace cmcix
