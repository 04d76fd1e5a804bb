#pragma once

// Catalog of ambient 3-manifolds with explicit Euclidean embeddings and
// closed-form curvature data. Every space is immutable after construction
// and all member functions are pure, so instances may be shared freely
// across threads.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmcix {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Error with a stable machine-readable code (mirrored by the C API).
class Error : public std::runtime_error {
 public:
  enum Code {
    InvalidArgument,
    InvalidParameter,
    WindowViolation,
    NoPositiveSolution,
    ClosedFormOnly,
    FamilySpaceMismatch,
    Parse,
    Io,
    Solver,
    Internal,
  };
  Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

enum class SpaceKind {
  R3,        // flat R^3, identity embedding, d = 3
  Ball,      // closed unit ball in R^3; boundary sphere is mean convex
  S2xR,      // S^2(r) x R in R^4
  T2xR,      // flat torus T^2(alpha,beta) x R in R^7 (three-circle embedding)
  RectT2xR,  // rectangular torus T^2(0,beta) x R in R^5 (two-circle embedding)
  T3,        // S^1(1) x S^1(r1) x S^1(r2) in R^6
  S3,        // unit 3-sphere in R^4
  Berger,    // Berger sphere: curvature data only, no embedding map
};

const char* space_kind_name(SpaceKind k);
SpaceKind space_kind_from_name(const std::string& name);

// Frequencies, radii and diagnostics of the three-circle flat torus
// embedding. Frequencies follow the printed closed forms; squared radii
// solve the 3x3 isometry system against the unit chart metric.
struct TorusEmbeddingData {
  double a1 = 0, a2 = 0;       // u-frequencies, a_i = 2*pi*k_i
  double b1 = 0, b2 = 0, b3 = 0;
  std::array<double, 3> C2{};  // squared radii C_1^2, C_2^2, C_3^2
  int k1 = 0, l1 = 0, k2 = 0, l2 = 0;
  double residual = 0;           // |M*C2 - g| of the isometry system
  int solution_manifold_dim = 0;  // 3 - rank of the system
  bool window_as_printed_ok = false;  // both printed inequalities on l1/k1
};

// Solve for the embedding data of T^2(alpha,beta). Enforces the frequency
// windows with the i-th inequality applied to l_i/k_i (the printed text
// repeats l1/k1; taken literally the two windows are mutually exclusive,
// so the as-printed verdict is recorded in the data instead of enforced).
TorusEmbeddingData torus_embedding_data(double alpha, double beta,
                                        int k1, int l1, int k2, int l2);

// |B_M|^2 of the three-circle torus embedding for given frequencies/radii:
// C1^2(a1^2+b1^2)^2 + C2^2(a2^2+b2^2)^2 + C3^2 b3^4.
double torus_sff_norm_sq(const TorusEmbeddingData& t);

// How well candidate squared radii solve the isometry system, allowing a
// global dilation of the target metric (least-squares scale).
struct RadiiConsistency {
  std::array<double, 3> candidate{};
  double residual = 0;           // |M*cand - g|
  double dilation = 0;           // best-fit lambda in M*cand ~ lambda*g
  double residual_after_dilation = 0;  // |M*cand - lambda*g| / |M*cand|
};
RadiiConsistency check_candidate_radii(const TorusEmbeddingData& t,
                                       const std::array<double, 3>& candidate);

struct SpaceSpec {
  SpaceKind kind = SpaceKind::R3;
  double r = 1.0;           // S2xR sphere radius
  double alpha = 0.5;       // T2xR lattice
  double beta = 0.8660254037844386;
  int k1 = 1, l1 = 1, k2 = 2, l2 = 1;
  double r1 = 1.0, r2 = 1.0;  // T3 circle radii
  double kappa = 8.0, tau = 1.0;  // Berger
  bool hexagonal_preset = false;  // carries the quoted candidate radii

  std::string to_json() const;
  static SpaceSpec from_json(const std::string& json_text);
  static SpaceSpec preset(const std::string& name);  // "hexagonal", ...
};

struct ThresholdInfo {
  double value = 0;          // least H^2 beyond which the bound applies
  bool none_required = false;  // value <= 0: every H passes the strict test
  double index_denominator = 1;  // index >= genus / this, when applicable
};

// Closed-form threshold for the pinched-ambient statements.
//  kind "scalar":  returns |H_M|^2 (1 - 2C), needs R_M > C |H_M|^2
//  kind "convex":  returns 3 k1^2 (C^2 - 2),  needs k3/k1 < C
ThresholdInfo pinched_threshold(const std::string& kind, double C,
                                double sup_mean_vec_norm_sq, double k1);

// Pointwise curvature record; constant on every catalog space.
struct CurvatureData {
  double scalar = 0;            // R_M
  double sff_norm_sq = 0;       // |B_M|^2
  double mean_vec_norm_sq = 0;  // |H_M|^2
};

class AmbientSpace {
 public:
  explicit AmbientSpace(const SpaceSpec& spec);

  const SpaceSpec& spec() const { return spec_; }
  SpaceKind kind() const { return spec_.kind; }
  std::string name() const { return space_kind_name(spec_.kind); }
  int dim() const { return d_; }
  bool has_embedding() const { return spec_.kind != SpaceKind::Berger; }
  bool has_boundary() const { return spec_.kind == SpaceKind::Ball; }

  // Chart box used for sampling; identifications are periodic in the
  // coordinates flagged below. For Ball the box is a cube inscribed in
  // the ball and samples are kept inside the domain.
  Vec3 chart_lo() const { return chart_lo_; }
  Vec3 chart_hi() const { return chart_hi_; }
  Vec3 random_chart_point(std::uint64_t seed, int index) const;

  Mat3 metric(const Vec3& p) const;
  VecX embed(const Vec3& p) const;
  MatX jacobian(const Vec3& p) const;     // d x 3, closed form
  MatX jacobian_fd(const Vec3& p) const;  // d x 3, central differences
  // Hessians of the embedding components: hess[a](i,j) = d2 f_a / dp_i dp_j.
  std::vector<Mat3> hessian(const Vec3& p) const;
  std::vector<Mat3> hessian_fd(const Vec3& p) const;

  // Second fundamental form B_M(X,Y) at p for ambient-coordinate tangent
  // vectors X,Y (members of the image of jacobian(p)). Returns a vector in
  // R^d normal to T_pM. The closed form uses the product-of-circles /
  // sphere structure of the embeddings and is regular everywhere, including
  // chart poles; sff_fd is the independent finite-difference route.
  VecX sff(const Vec3& p, const VecX& X, const VecX& Y) const;
  VecX sff_fd(const Vec3& p, const VecX& X, const VecX& Y) const;

  // Orthogonal projector of R^d onto T_pM, regular on the whole chart.
  MatX tangent_projector(const Vec3& p) const;

  // Period vectors of the chart identifications (empty for r3/ball).
  std::vector<Vec3> chart_periods() const;

  double scalar_curvature(const Vec3& p) const;
  // Ric_M(N,N) for a unit ambient-coordinate vector N tangent to M.
  double ric_normal(const Vec3& p, const VecX& N) const;
  CurvatureData curvature(const Vec3& p) const;

  double sup_sff_norm_sq() const;
  double inf_scalar() const;
  ThresholdInfo threshold_H2() const;

  // Boundary data (Ball only): the scalar second fundamental form of the
  // boundary with respect to the inward normal, evaluated on N, and the
  // trace mean curvature of the boundary.
  double boundary_h_NN(const Vec3& p, const VecX& N) const;
  double boundary_H(const Vec3& p) const;
  bool on_boundary(const Vec3& p, double tol = 1e-8) const;

  const TorusEmbeddingData* torus_data() const {
    return torus_.has_value() ? &*torus_ : nullptr;
  }
  const RadiiConsistency* candidate_consistency() const {
    return candidate_.has_value() ? &*candidate_ : nullptr;
  }

 private:
  void require_embedding() const;

  SpaceSpec spec_;
  int d_ = 3;
  Vec3 chart_lo_ = Vec3::Zero();
  Vec3 chart_hi_ = Vec3::Ones();
  std::optional<TorusEmbeddingData> torus_;
  std::optional<RadiiConsistency> candidate_;
};

// Build a catalog space from a name plus parameter spec ("s2xr", "t2xr",
// "rect", "t3", "s3", "r3", "ball", "berger", preset "hexagonal").
AmbientSpace catalog_space(const SpaceSpec& spec);
AmbientSpace catalog_space_from_json(const std::string& json_text);

}  // namespace cmcix
