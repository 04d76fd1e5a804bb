#include "cmcix/verifier.hpp"

#include <algorithm>
#include <cmath>

namespace cmcix {

namespace {

int ceil_div_nonneg(long num, long den) {
  if (num <= 0) return 0;
  return int((num + den - 1) / den);
}

Eigen::Vector2d rotate_frame(const Eigen::Vector2d& c) {
  return Eigen::Vector2d(-c[1], c[0]);
}

// sum_i |B(E_i, X)|^2 at a vertex, and the bilinear pairing with a second
// ambient tangent vector.
double sff_pairing(const ImmersedMesh& mesh, const SurfaceGeometry& geom, int v,
                   const VecX& X, const VecX& Y) {
  const Vec3 p = mesh.chart.row(v).transpose();
  double acc = 0;
  for (int i = 0; i < 2; ++i) {
    const VecX Ei =
        (i == 0 ? geom.frame1.row(v) : geom.frame2.row(v)).transpose();
    acc += mesh.space->sff(p, Ei, X).dot(mesh.space->sff(p, Ei, Y));
  }
  return acc;
}

double boundary_integral_H(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                           const VecX& vertex_scalar) {
  double acc = 0;
  for (const auto& loop : mesh.boundary_loops) {
    const int n = int(loop.size());
    for (int i = 0; i < n; ++i) {
      const int a = loop[i], b = loop[(i + 1) % n];
      const double L = (mesh.pos.row(a) - mesh.pos.row(b)).norm();
      const double Ha = mesh.space->boundary_H(mesh.chart.row(a).transpose());
      const double Hb = mesh.space->boundary_H(mesh.chart.row(b).transpose());
      acc += 0.5 * L * (Ha * vertex_scalar[a] + Hb * vertex_scalar[b]);
    }
  }
  return acc;
}

}  // namespace

CheckItem check_admissibility(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                              const WhitneyEval& eval,
                              const std::vector<HarmonicField>& basis) {
  CheckItem item;
  item.name = "admissible";
  item.anchor = "constant-vector-coordinate-integrals";
  const double area = geom.area();
  const int d = mesh.ambient_dim();
  const Vec3 bary(1.0 / 3, 1.0 / 3, 1.0 / 3);
  double worst = 0, worst_rotated = 0;
  for (const auto& field : basis) {
    VecX I = VecX::Zero(d), Istar = VecX::Zero(d);
    for (int f = 0; f < mesh.num_faces(); ++f) {
      I += eval.face_area(f) * eval.value(field, f, bary);
      Istar += eval.face_area(f) * eval.value_rotated(field, f, bary);
    }
    const double scale = std::sqrt(area) * eval.l2_norm(field);
    worst = std::max(worst, I.lpNorm<Eigen::Infinity>() / scale);
    worst_rotated =
        std::max(worst_rotated, Istar.lpNorm<Eigen::Infinity>() / scale);
  }
  item.threshold = 1e-8;
  const bool closed = mesh.boundary_loops.empty();
  item.residual = closed ? std::max(worst, worst_rotated) : worst;
  item.values["max_coord_integral"] = worst;
  item.values["max_rotated_coord_integral"] = worst_rotated;
  item.values["basis_dim"] = double(basis.size());
  if (basis.empty()) {
    item.verdict = "pass";
    item.note = "empty basis; vacuous";
  } else {
    item.verdict = item.residual < item.threshold ? "pass" : "fail";
    if (!closed)
      item.note = "rotated integrals reported, not asserted (boundary case)";
  }
  return item;
}

CheckItem check_pointwise_A_identity(const ImmersedMesh& mesh,
                                     const SurfaceGeometry& geom,
                                     const std::vector<HarmonicField>& basis) {
  CheckItem item;
  item.name = "keystep";
  item.anchor = "pointwise-shape-operator-identity";
  item.threshold = 1e-10;
  double worst = 0;
  int skipped = 0, tested = 0;
  for (const auto& field : basis) {
    double maxnorm = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v)
      maxnorm = std::max(maxnorm, field.vertex_frame.row(v).norm());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const Eigen::Vector2d xi = field.vertex_frame.row(v).transpose();
      if (xi.norm() <= 1e-10 * maxnorm) { ++skipped; continue; }
      ++tested;
      Eigen::Matrix2d S;
      S << geom.shape(v, 0), geom.shape(v, 1), geom.shape(v, 1), geom.shape(v, 2);
      const double lhs =
          (S * xi).squaredNorm() + (S * rotate_frame(xi)).squaredNorm();
      const double rhs = geom.sff_norm_sq[v] * xi.squaredNorm();
      const double scale = std::max(
          {std::abs(rhs), geom.sff_norm_sq[v] * maxnorm * maxnorm * 1e-8, 1e-300});
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
  }
  item.residual = worst;
  item.values["skipped_vertices"] = double(skipped);
  item.values["tested_vertices"] = double(tested);
  item.values["basis_dim"] = double(basis.size());
  item.verdict =
      basis.empty() || worst < item.threshold ? "pass" : "fail";
  if (basis.empty()) item.note = "empty basis; vacuous";
  return item;
}

namespace {

// right side of the coordinate-sum identity for one field
double identity_rhs(const ImmersedMesh& mesh, const SurfaceGeometry& geom,
                    const HarmonicField& field, bool rotated, bool with_boundary) {
  const double R = mesh.space->scalar_curvature(Vec3::Zero());
  double acc = 0;
  VecX xi_sq(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    Eigen::Vector2d c = field.vertex_frame.row(v).transpose();
    if (rotated) c = rotate_frame(c);
    const VecX E1 = geom.frame1.row(v).transpose();
    const VecX E2 = geom.frame2.row(v).transpose();
    const VecX xi = c[0] * E1 + c[1] * E2;
    xi_sq[v] = xi.squaredNorm();
    Eigen::Matrix2d S;
    S << geom.shape(v, 0), geom.shape(v, 1), geom.shape(v, 1), geom.shape(v, 2);
    const double a_term = (S * c).squaredNorm();
    const double b_term = sff_pairing(mesh, geom, v, xi, xi);
    const double H = geom.mean_curv[v];
    const double pot =
        0.5 * geom.sff_norm_sq[v] + 0.5 * R + 0.5 * H * H;
    acc += geom.vertex_area[v] * (b_term + a_term - pot * xi_sq[v]);
  }
  if (with_boundary) acc -= boundary_integral_H(mesh, geom, xi_sq);
  return acc;
}

}  // namespace

CheckItem check_coordinate_identity(const ImmersedMesh& mesh,
                                    const SurfaceGeometry& geom,
                                    const JacobiAssembly& assembly,
                                    const std::vector<HarmonicField>& basis,
                                    bool with_boundary, double tol) {
  CheckItem item;
  item.name = "prop32";
  item.anchor = "coordinate-sum-identity";
  item.threshold = tol;
  const SpMat Q = assembly.quadratic_form();
  double worst = 0;
  int which = 0;
  for (const auto& field : basis) {
    for (bool rotated : {false, true}) {
      const MatX u = coordinate_functions(mesh, geom, field, rotated);
      double lhs = 0;
      for (int j = 0; j < u.cols(); ++j) {
        const VecX uj = u.col(j);
        lhs += uj.dot(Q * uj);
      }
      const double rhs = identity_rhs(mesh, geom, field, rotated, with_boundary);
      const double rel =
          std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-12});
      if (rel > worst) worst = rel;
      item.values["lhs_" + std::to_string(which)] = lhs;
      item.values["rhs_" + std::to_string(which)] = rhs;
      ++which;
    }
  }
  item.residual = worst;
  item.values["basis_dim"] = double(basis.size());
  if (basis.empty()) {
    item.verdict = "pass";
    item.note = "empty basis; vacuous";
  } else {
    item.verdict = worst < tol ? "pass" : "fail";
  }
  return item;
}

HypothesisPencil hypothesis_pencil(const ImmersedMesh& mesh,
                                   const SurfaceGeometry& geom,
                                   const std::vector<HarmonicField>& basis,
                                   bool with_boundary) {
  HypothesisPencil pencil;
  pencil.q = int(basis.size());
  pencil.with_boundary = with_boundary;
  if (basis.empty()) return pencil;
  const int q = pencil.q;
  const double R = mesh.space->scalar_curvature(Vec3::Zero());
  pencil.L_mat = MatX::Zero(q, q);
  pencil.R_mat = MatX::Zero(q, q);

  const int V = mesh.num_vertices();
  for (int a = 0; a < q; ++a) {
    for (int b = a; b < q; ++b) {
      double L = 0, Rm = 0;
      VecX pair_sq(V);
      for (int v = 0; v < V; ++v) {
        const VecX E1 = geom.frame1.row(v).transpose();
        const VecX E2 = geom.frame2.row(v).transpose();
        const Eigen::Vector2d ca = basis[a].vertex_frame.row(v).transpose();
        const Eigen::Vector2d cb = basis[b].vertex_frame.row(v).transpose();
        const VecX xa = ca[0] * E1 + ca[1] * E2;
        const VecX xb = cb[0] * E1 + cb[1] * E2;
        const Eigen::Vector2d ra = rotate_frame(ca), rb = rotate_frame(cb);
        const VecX sa = ra[0] * E1 + ra[1] * E2;
        const VecX sb = rb[0] * E1 + rb[1] * E2;
        const double H = geom.mean_curv[v];
        const double dot = xa.dot(xb);
        pair_sq[v] = dot;
        const double term = sff_pairing(mesh, geom, v, xa, xb) +
                            sff_pairing(mesh, geom, v, sa, sb) -
                            (R + H * H) * dot;
        L += geom.vertex_area[v] * term;
        Rm += 2.0 * geom.vertex_area[v] * dot;
      }
      if (with_boundary) L -= 2.0 * boundary_integral_H(mesh, geom, pair_sq);
      pencil.L_mat(a, b) = pencil.L_mat(b, a) = L;
      pencil.R_mat(a, b) = pencil.R_mat(b, a) = Rm;
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(pencil.L_mat, pencil.R_mat);
  if (es.info() != Eigen::Success)
    throw Error(Error::Solver, "pencil eigensolve failed (dependent basis?)");
  pencil.eta_star = es.eigenvalues().maxCoeff();
  return pencil;
}

ZeroBoundaryMean zero_boundary_mean_subspace(const ImmersedMesh& mesh,
                                             const SurfaceGeometry& geom,
                                             const DecOperators& dec,
                                             const WhitneyEval& eval,
                                             const std::vector<HarmonicField>& basis) {
  ZeroBoundaryMean out;
  if (mesh.boundary_loops.empty()) {
    out.sub_basis = basis;  // no constraints on a closed surface
    out.dim = int(basis.size());
    return out;
  }
  if (basis.empty()) return out;
  const int q = int(basis.size());
  const int d = mesh.ambient_dim();
  const Vec3 bary(1.0 / 3, 1.0 / 3, 1.0 / 3);
  MatX G(q, d);
  for (int m = 0; m < q; ++m) {
    VecX I = VecX::Zero(d);
    for (int f = 0; f < mesh.num_faces(); ++f)
      I += eval.face_area(f) * eval.value_rotated(basis[m], f, bary);
    G.row(m) = I.transpose();
  }
  Eigen::JacobiSVD<MatX> svd(G.transpose(), Eigen::ComputeFullV);
  const double scale = std::max(std::sqrt(geom.area()), 1e-12);
  const double tol_sv = 1e-8 * scale;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol_sv) ++rank;
  out.dim = q - rank;
  for (int i = rank; i < q; ++i) {
    const VecX coef = svd.matrixV().col(i);
    HarmonicField combo = combine_fields(mesh, geom, dec, basis, coef);
    out.max_constraint_residual = std::max(
        out.max_constraint_residual, (G.transpose() * coef).lpNorm<Eigen::Infinity>());
    out.sub_basis.push_back(std::move(combo));
  }
  return out;
}

CheckItem verify_index_bound(const GenusBoundary& gb, int ambient_dim,
                             const HypothesisPencil& pencil,
                             const TwistedSpectrum& spectrum) {
  CheckItem item;
  item.name = "bound";
  item.anchor = "genus-linear-index-bound";
  const bool closed = gb.boundary_components == 0;
  const long d = ambient_dim;
  const int bound =
      closed ? ceil_div_nonneg(gb.genus, d)
             : ceil_div_nonneg(2L * gb.genus + gb.boundary_components - 1 - d,
                               2 * d);
  item.values["bound"] = double(bound);
  item.values["index"] = double(spectrum.index);
  item.values["genus"] = double(gb.genus);
  item.values["boundary_components"] = double(gb.boundary_components);
  item.values["ambient_dim"] = double(d);
  item.values["eta_star"] = pencil.eta_star;
  if (pencil.q == 0) {
    item.verdict = spectrum.index >= bound ? "pass" : "fail";
    item.note = "empty harmonic space; hypothesis vacuous";
    return item;
  }
  if (pencil.eta_star >= 0) {
    item.verdict = "not-applicable";
    item.note = "curvature hypothesis fails at eta = 0 (eta_star >= 0)";
    return item;
  }
  item.residual = double(bound) - double(spectrum.index);
  item.verdict = spectrum.index >= bound ? "pass" : "fail";
  return item;
}

CheckItem concentration_count(const HypothesisPencil& pencil,
                              const TwistedSpectrum& spectrum, double eta,
                              int ambient_dim, int zbm_dim) {
  CheckItem item;
  item.name = "concentration";
  item.anchor = "spectral-concentration-count";
  const long d = ambient_dim;
  item.values["eta"] = eta;
  item.values["eta_star"] = pencil.eta_star;
  item.values["q"] = double(pencil.q);
  if (pencil.q == 0) {
    item.verdict = "pass";
    item.note = "empty harmonic space; vacuous";
    return item;
  }
  if (!(eta > pencil.eta_star)) {
    item.verdict = "not-applicable";
    item.note = "eta must exceed eta_star for the hypothesis to hold";
    return item;
  }
  const int required =
      pencil.with_boundary
          ? ceil_div_nonneg(long(pencil.q) - d, 2 * d)
          : ceil_div_nonneg(long(pencil.q), 2 * d);
  int count = 0;
  for (int i = 0; i < spectrum.eigenvalues.size(); ++i)
    if (spectrum.eigenvalues[i] < eta - spectrum.eps) ++count;
  item.values["required"] = double(required);
  item.values["count"] = double(count);
  if (pencil.with_boundary && zbm_dim >= 0)
    item.values["zero_boundary_mean_dim"] = double(zbm_dim);
  item.verdict = count >= required ? "pass" : "fail";
  if (count == int(spectrum.eigenvalues.size()))
    item.note = "all computed eigenvalues below eta; count is a lower bound";
  return item;
}

CheckItem threshold_report(const AmbientSpace& space, double H, bool has_H) {
  CheckItem item;
  item.name = "threshold";
  item.anchor = "mean-curvature-threshold";
  const ThresholdInfo t = space.threshold_H2();
  item.values["threshold"] = t.value;
  item.values["none_required"] = t.none_required ? 1.0 : 0.0;
  item.values["index_denominator"] = t.index_denominator;
  item.values["sup_sff_norm_sq"] = space.sup_sff_norm_sq();
  if (space.has_embedding()) item.values["inf_scalar"] = space.inf_scalar();
  if (has_H) {
    item.values["H"] = H;
    item.values["applies"] = (H * H > t.value) ? 1.0 : 0.0;
  }
  if (space.kind() == SpaceKind::S2xR)
    item.note =
        "for H = 0 the only closed minimal surfaces here are horizontal "
        "slices; the genus bound covers every H != 0";
  if (const auto* rc = space.candidate_consistency()) {
    item.values["candidate_residual"] = rc->residual;
    item.values["candidate_dilation"] = rc->dilation;
    item.values["candidate_residual_after_dilation"] = rc->residual_after_dilation;
    TorusEmbeddingData with_candidates = *space.torus_data();
    with_candidates.C2 = rc->candidate;
    item.values["threshold_quoted_radii"] = torus_sff_norm_sq(with_candidates);
  }
  item.verdict = "pass";
  return item;
}

VerificationReport run_verification(const ImmersedMesh& mesh,
                                    const VerifyOptions& opts) {
  VerificationReport report;
  report.space_json = mesh.space->spec().to_json();
  report.family = mesh.tag.family;
  report.resolution = mesh.tag.resolution;
  report.seed = opts.seed;
  {
    const ThresholdInfo t = mesh.space->threshold_H2();
    report.threshold_H2 = t.value;
    report.threshold_none_required = t.none_required;
  }

  auto wants = [&](const std::string& name) {
    return opts.checks.empty() ||
           std::find(opts.checks.begin(), opts.checks.end(), name) !=
               opts.checks.end();
  };

  const SurfaceGeometry geom = compute_geometry(mesh);
  const DecOperators dec = build_dec(mesh, geom);
  const WhitneyEval eval(mesh, geom, dec);
  const GenusBoundary gb = genus_and_boundary(mesh);
  const bool closed = gb.boundary_components == 0;
  report.genus = gb.genus;
  report.boundary_components = gb.boundary_components;
  report.area = geom.area();
  report.h_min = geom.mean_curv.minCoeff();
  report.h_max = geom.mean_curv.maxCoeff();
  report.h_mean = geom.mean_curv.sum() / double(geom.mean_curv.size());

  bool wall_ok = closed;
  if (!closed && mesh.space->has_boundary()) {
    wall_ok = true;
    for (const auto& loop : mesh.boundary_loops)
      for (int v : loop)
        wall_ok = wall_ok &&
                  mesh.space->on_boundary(mesh.chart.row(v).transpose(), 1e-8);
  }

  std::vector<HarmonicField> basis =
      closed ? harmonic_basis(mesh, geom, dec)
             : tangential_harmonic_basis(mesh, geom, dec);

  std::optional<JacobiAssembly> assembly;
  std::optional<TwistedSpectrum> spectrum;
  if (closed || wall_ok) {
    assembly = assemble(mesh, geom);
    SpectrumOptions sopts;
    sopts.k = opts.k;
    sopts.seed = opts.seed;
    sopts.eps_rel = opts.eps_rel;
    spectrum = cmc_index(*assembly, sopts);
    report.spectrum = spectrum;
  }

  if (wants("admissible"))
    report.items.push_back(check_admissibility(mesh, geom, eval, basis));
  if (wants("keystep"))
    report.items.push_back(check_pointwise_A_identity(mesh, geom, basis));
  if (wants("prop32")) {
    if (assembly) {
      report.items.push_back(check_coordinate_identity(
          mesh, geom, *assembly, basis, !closed, opts.prop32_tol));
    } else {
      CheckItem item;
      item.name = "prop32";
      item.anchor = "coordinate-sum-identity";
      item.verdict = "not-applicable";
      item.note = "surface boundary not on the space boundary";
      report.items.push_back(item);
    }
  }

  std::optional<HypothesisPencil> pencil;
  std::optional<ZeroBoundaryMean> zbm;
  if (wants("pencil") || wants("bound") || wants("concentration")) {
    if (closed || wall_ok) {
      pencil = hypothesis_pencil(mesh, geom, basis, !closed);
      if (!closed) zbm = zero_boundary_mean_subspace(mesh, geom, dec, eval, basis);
      CheckItem item;
      item.name = "pencil";
      item.anchor = "curvature-hypothesis-pencil";
      item.values["q"] = double(pencil->q);
      item.values["eta_star"] = pencil->eta_star;
      item.values["hypothesis_at_eta0"] =
          (pencil->q > 0 && pencil->eta_star < 0) ? 1.0 : 0.0;
      if (zbm) {
        item.values["zero_boundary_mean_dim"] = double(zbm->dim);
        item.values["zbm_constraint_residual"] = zbm->max_constraint_residual;
      }
      item.verdict = pencil->q == 0 ? "not-applicable" : "pass";
      if (pencil->q == 0) item.note = "empty harmonic space";
      else if (pencil->eta_star >= 0)
        item.note = "hypothesis fails at eta = 0";
      if (wants("pencil")) report.items.push_back(item);
    } else if (wants("pencil")) {
      CheckItem item;
      item.name = "pencil";
      item.anchor = "curvature-hypothesis-pencil";
      item.verdict = "not-applicable";
      item.note = "surface boundary not on the space boundary";
      report.items.push_back(item);
    }
  }

  if (wants("bound")) {
    if (pencil && spectrum) {
      report.items.push_back(
          verify_index_bound(gb, mesh.space->dim(), *pencil, *spectrum));
    } else {
      CheckItem item;
      item.name = "bound";
      item.anchor = "genus-linear-index-bound";
      item.verdict = "not-applicable";
      item.note = "no spectrum available for this surface";
      report.items.push_back(item);
    }
  }
  if (wants("concentration")) {
    for (double eta : opts.etas) {
      if (pencil && spectrum) {
        CheckItem item = concentration_count(*pencil, *spectrum, eta,
                                             mesh.space->dim(),
                                             zbm ? zbm->dim : -1);
        item.name = "concentration@" + std::to_string(eta);
        report.items.push_back(item);
      } else {
        CheckItem item;
        item.name = "concentration@" + std::to_string(eta);
        item.anchor = "spectral-concentration-count";
        item.verdict = "not-applicable";
        item.note = "no spectrum available for this surface";
        report.items.push_back(item);
      }
    }
  }

  bool any_fail = false, any_pass = false;
  for (const auto& it : report.items) {
    any_fail = any_fail || it.verdict == "fail";
    any_pass = any_pass || it.verdict == "pass";
  }
  report.summary = any_fail ? "fail" : (any_pass ? "pass" : "not-applicable");
  return report;
}

}  // namespace cmcix
