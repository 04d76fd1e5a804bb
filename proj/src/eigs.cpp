#include "cmcix/eigs.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <numeric>
#include <random>

namespace cmcix {

namespace {

EigResult dense_path(const SpMat& A, const SpMat& M, const VecX* constraint,
                     const EigOptions& opts) {
  const int n = int(A.rows());
  MatX Ad = MatX(A), Md = MatX(M);
  MatX Z;  // basis of the feasible subspace
  if (constraint) {
    // Householder reflector sending c to ||c|| e1; columns 2..n span c-perp
    VecX v = *constraint;
    v[0] += (v[0] >= 0 ? 1.0 : -1.0) * constraint->norm();
    v.normalize();
    MatX H = MatX::Identity(n, n) - 2.0 * v * v.transpose();
    Z = H.rightCols(n - 1);
  } else {
    Z = MatX::Identity(n, n);
  }
  const MatX Ar = Z.transpose() * Ad * Z;
  const MatX Mr = Z.transpose() * Md * Z;
  Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(Ar, Mr);
  if (es.info() != Eigen::Success)
    throw Error(Error::Solver, "dense generalized eigensolver failed");
  const int k = std::min(opts.k, int(Ar.rows()));
  EigResult out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  out.subspace_dim = int(Ar.rows());
  for (int i = 0; i < k; ++i) {
    VecX u = Z * es.eigenvectors().col(i);
    u /= std::sqrt(u.dot(Md * u));
    // deterministic sign
    int arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u[arg] < 0) u = -u;
    out.vectors.col(i) = u;
    out.values[i] = u.dot(Ad * u);
  }
  return out;
}

EigResult lanczos_path(const SpMat& A, const SpMat& M, const VecX* constraint,
                       const EigOptions& opts) {
  const int n = int(A.rows());
  const int sub_dim = n - (constraint ? 1 : 0);
  const int k = std::min(opts.k, sub_dim);

  // shift below the full-pencil spectrum so A - sigma*M is positive definite
  double sigma = -1.0;
  {
    double worst = 0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(A.coeff(i, i)) /
                                   std::max(M.coeff(i, i), 1e-300));
    sigma = -2.0 * worst - 1.0;
  }
  Eigen::SimplicialLDLT<SpMat> ldlt;
  for (int attempt = 0;; ++attempt) {
    SpMat S = A - sigma * M;
    ldlt.compute(S);
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
      const VecX D = ldlt.vectorD();
      ok = (D.array() > 0).all();
    }
    if (ok) break;
    if (attempt > 60) throw Error(Error::Solver, "could not find definite shift");
    sigma = 2.0 * sigma - 1.0;
  }

  const VecX s_c = constraint ? VecX(ldlt.solve(*constraint)) : VecX();
  const double c_sc = constraint ? constraint->dot(s_c) : 0.0;
  auto apply = [&](const VecX& x) {
    VecX w = ldlt.solve(M * x);
    if (constraint) w -= (constraint->dot(w) / c_sc) * s_c;
    return w;
  };
  auto project = [&](VecX& x) {
    if (constraint) x -= (constraint->dot(x) / constraint->squaredNorm()) * *constraint;
  };

  std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + 17);
  std::normal_distribution<double> gauss;
  VecX v0(n);
  for (int i = 0; i < n; ++i) v0[i] = gauss(rng);
  project(v0);
  v0 /= std::sqrt(v0.dot(M * v0));

  const int mmax = std::min(sub_dim, std::max(4 * k + 60, 80));
  std::vector<VecX> basis{v0};
  std::vector<double> alpha, beta;
  MatX ritz_vec;
  VecX ritz_val;
  int converged_k = 0;

  auto tridiag_ritz = [&](int m) {
    MatX T = MatX::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<MatX> es(T);
    ritz_val = es.eigenvalues();
    ritz_vec = es.eigenvectors();
  };

  int m = 0;
  while (m < mmax) {
    VecX w = apply(basis[m]);
    const VecX Mw0 = M * w;
    double a = basis[m].dot(Mw0);
    alpha.push_back(a);
    w -= a * basis[m];
    if (m > 0) w -= beta[m - 1] * basis[m - 1];
    // full reorthogonalization (CGS, two passes)
    for (int pass = 0; pass < 2; ++pass) {
      const VecX Mw = M * w;
      VecX coef(m + 1);
      for (int i = 0; i <= m; ++i) coef[i] = basis[i].dot(Mw);
      for (int i = 0; i <= m; ++i) w -= coef[i] * basis[i];
    }
    project(w);
    const double b = std::sqrt(std::max(w.dot(M * w), 0.0));
    ++m;
    if (m >= k + 2 && (m % 10 == 0 || b < 1e-12 || m == mmax)) {
      tridiag_ritz(m);
      // largest theta <-> smallest lambda; residual ~ beta * |last row|
      converged_k = 0;
      for (int i = 0; i < k; ++i) {
        const int idx = m - 1 - i;
        if (idx < 0) break;
        const double theta = ritz_val[idx];
        if (theta <= 0) break;
        const double resid = b * std::abs(ritz_vec(m - 1, idx)) / (theta * theta);
        const double lam = sigma + 1.0 / theta;
        if (resid <= opts.tol * std::max(1.0, std::abs(lam))) ++converged_k;
        else break;
      }
      if (converged_k >= k || b < 1e-12) break;
    }
    if (b < 1e-12) { tridiag_ritz(m); break; }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  if (ritz_val.size() == 0) tridiag_ritz(m);

  EigResult out;
  const int avail = std::min(k, int(ritz_val.size()));
  out.values.resize(avail);
  out.vectors.resize(n, avail);
  out.subspace_dim = sub_dim;
  out.converged = converged_k >= avail;
  for (int i = 0; i < avail; ++i) {
    const int idx = int(ritz_val.size()) - 1 - i;
    VecX u = VecX::Zero(n);
    for (int j = 0; j < int(basis.size()) && j < ritz_vec.rows(); ++j)
      u += ritz_vec(j, idx) * basis[j];
    project(u);
    u /= std::sqrt(u.dot(M * u));
    int arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u[arg] < 0) u = -u;
    const double lam = u.dot(A * u);
    out.values[i] = lam;
    out.vectors.col(i) = u;
    out.max_residual =
        std::max(out.max_residual, (A * u - lam * (M * u)).norm() /
                                       std::max(1.0, std::abs(lam)));
  }
  // ascending eigenvalue order
  std::vector<int> perm(avail);
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(),
            [&](int a, int b) { return out.values[a] < out.values[b]; });
  VecX vals(avail);
  MatX vecs(n, avail);
  for (int i = 0; i < avail; ++i) {
    vals[i] = out.values[perm[i]];
    vecs.col(i) = out.vectors.col(perm[i]);
  }
  out.values = vals;
  out.vectors = vecs;
  return out;
}

}  // namespace

EigResult smallest_eigenpairs(const SpMat& A, const SpMat& M,
                              const VecX* constraint, const EigOptions& opts) {
  if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows())
    throw Error(Error::InvalidArgument, "eigensolver: dimension mismatch");
  if (int(A.rows()) <= opts.dense_threshold) return dense_path(A, M, constraint, opts);
  return lanczos_path(A, M, constraint, opts);
}

}  // namespace cmcix
