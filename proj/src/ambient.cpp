#include "cmcix/ambient.hpp"

#include <json.hpp>

#include <cmath>
#include <random>

namespace cmcix {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Chart coordinates are all O(1) to O(2*pi), so a unit scale is used for
// the difference steps: eps^(1/3) for first derivatives, eps^(1/4) for
// second derivatives.
const double kFdStep1 = std::cbrt(std::numeric_limits<double>::epsilon());
const double kFdStep2 = std::pow(std::numeric_limits<double>::epsilon(), 0.25);

}  // namespace

const char* space_kind_name(SpaceKind k) {
  switch (k) {
    case SpaceKind::R3: return "r3";
    case SpaceKind::Ball: return "ball";
    case SpaceKind::S2xR: return "s2xr";
    case SpaceKind::T2xR: return "t2xr";
    case SpaceKind::RectT2xR: return "rect";
    case SpaceKind::T3: return "t3";
    case SpaceKind::S3: return "s3";
    case SpaceKind::Berger: return "berger";
  }
  return "unknown";
}

SpaceKind space_kind_from_name(const std::string& name) {
  if (name == "r3") return SpaceKind::R3;
  if (name == "ball") return SpaceKind::Ball;
  if (name == "s2xr") return SpaceKind::S2xR;
  if (name == "t2xr" || name == "hexagonal") return SpaceKind::T2xR;
  if (name == "rect") return SpaceKind::RectT2xR;
  if (name == "t3") return SpaceKind::T3;
  if (name == "s3") return SpaceKind::S3;
  if (name == "berger") return SpaceKind::Berger;
  throw Error(Error::InvalidParameter, "unknown space name: " + name);
}

TorusEmbeddingData torus_embedding_data(double alpha, double beta,
                                        int k1, int l1, int k2, int l2) {
  if (!(alpha >= 0.0 && alpha <= 0.5) || !(beta > 0.0) ||
      !(alpha * alpha + beta * beta >= 1.0 - 1e-14)) {
    throw Error(Error::InvalidParameter,
                "t2xr requires 0 <= alpha <= 1/2, beta > 0, alpha^2+beta^2 >= 1");
  }
  if (k1 < 1 || l1 < 1 || k2 < 1 || l2 < 1) {
    throw Error(Error::InvalidParameter, "torus lattice integers must be positive");
  }

  TorusEmbeddingData t;
  t.k1 = k1; t.l1 = l1; t.k2 = k2; t.l2 = l2;
  const double s = std::sqrt(alpha * alpha + beta * beta);
  const double s0 = (alpha / beta) * s;
  t.a1 = kTwoPi * k1;
  t.a2 = kTwoPi * k2;
  t.b1 = (kTwoPi / s) * (l1 - k1 * s0);
  t.b2 = (kTwoPi / s) * (l2 - k2 * s0);
  t.b3 = kTwoPi / s;

  // Window i applied to l_i/k_i; equivalent to 0 < b1 < a1 and -a2 < b2 < 0,
  // which is exactly what makes the radii system solvable with positive radii.
  const double q1 = double(l1) / k1;
  const double q2 = double(l2) / k2;
  const bool w1 = (s0 < q1) && (q1 < s0 + s);
  const bool w2 = (s0 - s < q2) && (q2 < s0);
  t.window_as_printed_ok = w1 && ((s0 - s < q1) && (q1 < s0));
  if (!w1 || !w2) {
    throw Error(Error::WindowViolation,
                "frequency window violated: need alpha/beta*s < l1/k1 < (alpha/beta+1)*s "
                "and (alpha/beta-1)*s < l2/k2 < alpha/beta*s");
  }

  Mat3 M;
  M << t.a1 * t.a1, t.a2 * t.a2, 0.0,
       t.a1 * t.b1, t.a2 * t.b2, 0.0,
       t.b1 * t.b1, t.b2 * t.b2, t.b3 * t.b3;
  const Vec3 g(1.0, 0.0, 1.0);

  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  const int rank = int(svd.rank());
  Vec3 x = svd.solve(g);  // least-norm solution
  if (rank < 3) {
    // Minimize |x| over the feasible segment of the 1-dim solution manifold.
    if (rank < 2) throw Error(Error::Internal, "torus radii system rank < 2");
    const Vec3 n = svd.matrixV().col(2);
    double tlo = -std::numeric_limits<double>::infinity();
    double thi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      if (std::abs(n[i]) < 1e-14) {
        if (x[i] < 0) { tlo = 1; thi = 0; break; }
        continue;
      }
      const double bound = -x[i] / n[i];
      if (n[i] > 0) tlo = std::max(tlo, bound);
      else thi = std::min(thi, bound);
    }
    if (tlo > thi) throw Error(Error::NoPositiveSolution,
                               "isometry system admits no nonnegative radii");
    const double tstar = std::clamp(-x.dot(n) / n.squaredNorm(), tlo, thi);
    x += tstar * n;
  }
  if (!(x[0] > 1e-14 && x[1] > 1e-14 && x[2] > 1e-14)) {
    throw Error(Error::NoPositiveSolution,
                "isometry system admits no positive squared radii");
  }
  t.C2 = {x[0], x[1], x[2]};
  t.residual = (M * x - g).norm();
  t.solution_manifold_dim = 3 - rank;
  return t;
}

double torus_sff_norm_sq(const TorusEmbeddingData& t) {
  const double p1 = t.a1 * t.a1 + t.b1 * t.b1;
  const double p2 = t.a2 * t.a2 + t.b2 * t.b2;
  return t.C2[0] * p1 * p1 + t.C2[1] * p2 * p2 + t.C2[2] * std::pow(t.b3, 4);
}

RadiiConsistency check_candidate_radii(const TorusEmbeddingData& t,
                                       const std::array<double, 3>& candidate) {
  Mat3 M;
  M << t.a1 * t.a1, t.a2 * t.a2, 0.0,
       t.a1 * t.b1, t.a2 * t.b2, 0.0,
       t.b1 * t.b1, t.b2 * t.b2, t.b3 * t.b3;
  const Vec3 g(1.0, 0.0, 1.0);
  const Vec3 c(candidate[0], candidate[1], candidate[2]);
  RadiiConsistency rc;
  rc.candidate = candidate;
  const Vec3 mc = M * c;
  rc.residual = (mc - g).norm();
  rc.dilation = mc.dot(g) / g.squaredNorm();
  rc.residual_after_dilation = (mc - rc.dilation * g).norm() / mc.norm();
  return rc;
}

ThresholdInfo pinched_threshold(const std::string& kind, double C,
                                double sup_mean_vec_norm_sq, double k1) {
  ThresholdInfo out;
  if (kind == "scalar" || kind == "scalar-pinched") {
    if (!(C > 0)) throw Error(Error::InvalidParameter, "pinching constant C must be > 0");
    if (!(sup_mean_vec_norm_sq >= 0))
      throw Error(Error::InvalidParameter, "sup |H_M|^2 must be >= 0");
    out.value = sup_mean_vec_norm_sq * (1.0 - 2.0 * C);
    out.index_denominator = 0;  // generic d, not pinned by this formula
  } else if (kind == "convex" || kind == "convex-hypersurface") {
    if (!(C > 0)) throw Error(Error::InvalidParameter, "pinching constant C must be > 0");
    out.value = 3.0 * k1 * k1 * (C * C - 2.0);
    out.index_denominator = 4;
  } else {
    throw Error(Error::InvalidParameter, "pinched kind must be scalar or convex");
  }
  out.none_required = out.value <= 0.0;
  return out;
}

std::string SpaceSpec::to_json() const {
  json j;
  j["name"] = hexagonal_preset ? "hexagonal" : space_kind_name(kind);
  switch (kind) {
    case SpaceKind::S2xR: j["r"] = r; break;
    case SpaceKind::T2xR:
      j["alpha"] = alpha; j["beta"] = beta;
      j["k1"] = k1; j["l1"] = l1; j["k2"] = k2; j["l2"] = l2;
      break;
    case SpaceKind::RectT2xR: j["beta"] = beta; break;
    case SpaceKind::T3: j["r1"] = r1; j["r2"] = r2; break;
    case SpaceKind::Berger: j["kappa"] = kappa; j["tau"] = tau; break;
    default: break;
  }
  return j.dump();
}

SpaceSpec SpaceSpec::from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Error::Parse, std::string("bad space spec JSON: ") + e.what());
  }
  if (!j.contains("name")) throw Error(Error::Parse, "space spec missing name");
  const std::string name = j["name"].get<std::string>();
  SpaceSpec s = (name == "hexagonal") ? preset("hexagonal") : SpaceSpec{};
  if (name != "hexagonal") s.kind = space_kind_from_name(name);
  auto get = [&](const char* key, double dflt) {
    return j.contains(key) ? j[key].get<double>() : dflt;
  };
  auto geti = [&](const char* key, int dflt) {
    return j.contains(key) ? j[key].get<int>() : dflt;
  };
  s.r = get("r", s.r);
  s.alpha = get("alpha", s.alpha);
  s.beta = get("beta", s.beta);
  s.k1 = geti("k1", s.k1); s.l1 = geti("l1", s.l1);
  s.k2 = geti("k2", s.k2); s.l2 = geti("l2", s.l2);
  s.r1 = get("r1", s.r1); s.r2 = get("r2", s.r2);
  s.kappa = get("kappa", s.kappa); s.tau = get("tau", s.tau);
  return s;
}

SpaceSpec SpaceSpec::preset(const std::string& name) {
  if (name == "hexagonal") {
    SpaceSpec s;
    s.kind = SpaceKind::T2xR;
    s.alpha = 0.5;
    s.beta = std::sqrt(3.0) / 2.0;
    s.k1 = 1; s.l1 = 1; s.k2 = 2; s.l2 = 1;
    s.hexagonal_preset = true;
    return s;
  }
  throw Error(Error::InvalidParameter, "unknown preset: " + name);
}

AmbientSpace::AmbientSpace(const SpaceSpec& spec) : spec_(spec) {
  switch (spec_.kind) {
    case SpaceKind::R3:
      d_ = 3;
      chart_lo_ = Vec3(-1, -1, -1);
      chart_hi_ = Vec3(1, 1, 1);
      break;
    case SpaceKind::Ball:
      d_ = 3;
      chart_lo_ = Vec3(-0.57, -0.57, -0.57);
      chart_hi_ = Vec3(0.57, 0.57, 0.57);
      break;
    case SpaceKind::S2xR:
      if (!(spec_.r > 0)) throw Error(Error::InvalidParameter, "s2xr requires r > 0");
      d_ = 4;
      chart_lo_ = Vec3(0.3, 0.0, -1.0);
      chart_hi_ = Vec3(kPi - 0.3, kTwoPi, 1.0);
      break;
    case SpaceKind::T2xR: {
      torus_ = torus_embedding_data(spec_.alpha, spec_.beta,
                                    spec_.k1, spec_.l1, spec_.k2, spec_.l2);
      if (spec_.hexagonal_preset) {
        const double s3 = std::sqrt(3.0);
        candidate_ = check_candidate_radii(
            *torus_, {1.0, (s3 - 1.0) / 2.0, (11.0 + 2.0 * s3) / 6.0});
      }
      d_ = 7;
      const double s = std::sqrt(spec_.alpha * spec_.alpha + spec_.beta * spec_.beta);
      chart_lo_ = Vec3(0, 0, -1);
      chart_hi_ = Vec3(1, s, 1);  // period lattice of the embedding
      break;
    }
    case SpaceKind::RectT2xR:
      if (!(spec_.beta >= 1.0))
        throw Error(Error::InvalidParameter, "rect requires beta >= 1");
      d_ = 5;
      chart_lo_ = Vec3(0, 0, -1);
      chart_hi_ = Vec3(1, spec_.beta, 1);
      break;
    case SpaceKind::T3:
      if (!(spec_.r1 > 0 && spec_.r2 > 0))
        throw Error(Error::InvalidParameter, "t3 requires r1, r2 > 0");
      d_ = 6;
      chart_lo_ = Vec3(0, 0, 0);
      chart_hi_ = Vec3(kTwoPi, kTwoPi * spec_.r1, kTwoPi * spec_.r2);
      break;
    case SpaceKind::S3:
      d_ = 4;
      chart_lo_ = Vec3(0.25, 0.0, 0.0);
      chart_hi_ = Vec3(kPi / 2 - 0.25, kTwoPi, kTwoPi);
      break;
    case SpaceKind::Berger:
      if (!(spec_.kappa - 4.0 * spec_.tau * spec_.tau > 0))
        throw Error(Error::InvalidParameter, "berger requires kappa - 4 tau^2 > 0");
      d_ = 8;
      break;
  }
}

void AmbientSpace::require_embedding() const {
  if (!has_embedding())
    throw Error(Error::ClosedFormOnly, "closed-form-only space: " + name());
}

Vec3 AmbientSpace::random_chart_point(std::uint64_t seed, int index) const {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + std::uint64_t(index) + 1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vec3 p;
  for (int i = 0; i < 3; ++i) {
    p[i] = chart_lo_[i] + (chart_hi_[i] - chart_lo_[i]) * uni(rng);
  }
  return p;
}

Mat3 AmbientSpace::metric(const Vec3& p) const {
  Mat3 g = Mat3::Identity();
  switch (spec_.kind) {
    case SpaceKind::S2xR:
      g(0, 0) = spec_.r * spec_.r;
      g(1, 1) = spec_.r * spec_.r * std::sin(p[0]) * std::sin(p[0]);
      break;
    case SpaceKind::S3:
      g(1, 1) = std::cos(p[0]) * std::cos(p[0]);
      g(2, 2) = std::sin(p[0]) * std::sin(p[0]);
      break;
    case SpaceKind::Berger:
      throw Error(Error::ClosedFormOnly, "closed-form-only space: berger");
    default:
      break;  // flat charts
  }
  return g;
}

VecX AmbientSpace::embed(const Vec3& p) const {
  require_embedding();
  VecX f(d_);
  switch (spec_.kind) {
    case SpaceKind::R3:
    case SpaceKind::Ball:
      f = p;
      break;
    case SpaceKind::S2xR: {
      const double r = spec_.r;
      f << r * std::sin(p[0]) * std::cos(p[1]),
           r * std::sin(p[0]) * std::sin(p[1]),
           r * std::cos(p[0]),
           p[2];
      break;
    }
    case SpaceKind::T2xR: {
      const auto& t = *torus_;
      const double C1 = std::sqrt(t.C2[0]), C2c = std::sqrt(t.C2[1]), C3 = std::sqrt(t.C2[2]);
      const double th1 = t.a1 * p[0] + t.b1 * p[1];
      const double th2 = t.a2 * p[0] + t.b2 * p[1];
      const double th3 = t.b3 * p[1];
      f << C1 * std::cos(th1), C1 * std::sin(th1),
           C2c * std::cos(th2), C2c * std::sin(th2),
           C3 * std::cos(th3), C3 * std::sin(th3),
           p[2];
      break;
    }
    case SpaceKind::RectT2xR: {
      const double b = spec_.beta;
      f << std::cos(kTwoPi * p[0]) / kTwoPi, std::sin(kTwoPi * p[0]) / kTwoPi,
           b * std::cos(kTwoPi * p[1] / b) / kTwoPi, b * std::sin(kTwoPi * p[1] / b) / kTwoPi,
           p[2];
      break;
    }
    case SpaceKind::T3: {
      const double r1 = spec_.r1, r2 = spec_.r2;
      f << std::cos(p[0]), std::sin(p[0]),
           r1 * std::cos(p[1] / r1), r1 * std::sin(p[1] / r1),
           r2 * std::cos(p[2] / r2), r2 * std::sin(p[2] / r2);
      break;
    }
    case SpaceKind::S3: {
      const double ce = std::cos(p[0]), se = std::sin(p[0]);
      f << ce * std::cos(p[1]), ce * std::sin(p[1]),
           se * std::cos(p[2]), se * std::sin(p[2]);
      break;
    }
    case SpaceKind::Berger:
      break;  // unreachable
  }
  return f;
}

MatX AmbientSpace::jacobian(const Vec3& p) const {
  require_embedding();
  MatX J = MatX::Zero(d_, 3);
  switch (spec_.kind) {
    case SpaceKind::R3:
    case SpaceKind::Ball:
      J = Mat3::Identity();
      break;
    case SpaceKind::S2xR: {
      const double r = spec_.r;
      const double st = std::sin(p[0]), ct = std::cos(p[0]);
      const double sp = std::sin(p[1]), cp = std::cos(p[1]);
      J(0, 0) = r * ct * cp; J(0, 1) = -r * st * sp;
      J(1, 0) = r * ct * sp; J(1, 1) = r * st * cp;
      J(2, 0) = -r * st;
      J(3, 2) = 1;
      break;
    }
    case SpaceKind::T2xR: {
      const auto& t = *torus_;
      const double C1 = std::sqrt(t.C2[0]), C2c = std::sqrt(t.C2[1]), C3 = std::sqrt(t.C2[2]);
      const double th1 = t.a1 * p[0] + t.b1 * p[1];
      const double th2 = t.a2 * p[0] + t.b2 * p[1];
      const double th3 = t.b3 * p[1];
      J(0, 0) = -C1 * t.a1 * std::sin(th1); J(0, 1) = -C1 * t.b1 * std::sin(th1);
      J(1, 0) = C1 * t.a1 * std::cos(th1); J(1, 1) = C1 * t.b1 * std::cos(th1);
      J(2, 0) = -C2c * t.a2 * std::sin(th2); J(2, 1) = -C2c * t.b2 * std::sin(th2);
      J(3, 0) = C2c * t.a2 * std::cos(th2); J(3, 1) = C2c * t.b2 * std::cos(th2);
      J(4, 1) = -C3 * t.b3 * std::sin(th3);
      J(5, 1) = C3 * t.b3 * std::cos(th3);
      J(6, 2) = 1;
      break;
    }
    case SpaceKind::RectT2xR: {
      const double b = spec_.beta;
      J(0, 0) = -std::sin(kTwoPi * p[0]);
      J(1, 0) = std::cos(kTwoPi * p[0]);
      J(2, 1) = -std::sin(kTwoPi * p[1] / b);
      J(3, 1) = std::cos(kTwoPi * p[1] / b);
      J(4, 2) = 1;
      break;
    }
    case SpaceKind::T3: {
      J(0, 0) = -std::sin(p[0]);
      J(1, 0) = std::cos(p[0]);
      J(2, 1) = -std::sin(p[1] / spec_.r1);
      J(3, 1) = std::cos(p[1] / spec_.r1);
      J(4, 2) = -std::sin(p[2] / spec_.r2);
      J(5, 2) = std::cos(p[2] / spec_.r2);
      break;
    }
    case SpaceKind::S3: {
      const double ce = std::cos(p[0]), se = std::sin(p[0]);
      const double cu = std::cos(p[1]), su = std::sin(p[1]);
      const double cv = std::cos(p[2]), sv = std::sin(p[2]);
      J(0, 0) = -se * cu; J(0, 1) = -ce * su;
      J(1, 0) = -se * su; J(1, 1) = ce * cu;
      J(2, 0) = ce * cv;  J(2, 2) = -se * sv;
      J(3, 0) = ce * sv;  J(3, 2) = se * cv;
      break;
    }
    case SpaceKind::Berger:
      break;
  }
  return J;
}

MatX AmbientSpace::jacobian_fd(const Vec3& p) const {
  require_embedding();
  MatX J(d_, 3);
  const double h = kFdStep1;
  for (int i = 0; i < 3; ++i) {
    Vec3 pp = p, pm = p;
    pp[i] += h;
    pm[i] -= h;
    J.col(i) = (embed(pp) - embed(pm)) / (2.0 * h);
  }
  return J;
}

std::vector<Mat3> AmbientSpace::hessian(const Vec3& p) const {
  require_embedding();
  std::vector<Mat3> H(d_, Mat3::Zero());
  auto set_circle = [&](int row_cos, double amp, double w0, double w1,
                        double theta) {
    // component rows (row_cos, row_cos+1) = amp*(cos, sin) of theta with
    // d(theta) = (w0, w1, 0)
    const double c = std::cos(theta), s = std::sin(theta);
    const double w[2] = {w0, w1};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        H[row_cos](i, j) = -amp * c * w[i] * w[j];
        H[row_cos + 1](i, j) = -amp * s * w[i] * w[j];
      }
  };
  switch (spec_.kind) {
    case SpaceKind::R3:
    case SpaceKind::Ball:
      break;
    case SpaceKind::S2xR: {
      const double r = spec_.r;
      const double st = std::sin(p[0]), ct = std::cos(p[0]);
      const double sp = std::sin(p[1]), cp = std::cos(p[1]);
      H[0] << -r * st * cp, -r * ct * sp, 0, -r * ct * sp, -r * st * cp, 0, 0, 0, 0;
      H[1] << -r * st * sp, r * ct * cp, 0, r * ct * cp, -r * st * sp, 0, 0, 0, 0;
      H[2] << -r * ct, 0, 0, 0, 0, 0, 0, 0, 0;
      break;
    }
    case SpaceKind::T2xR: {
      const auto& t = *torus_;
      set_circle(0, std::sqrt(t.C2[0]), t.a1, t.b1, t.a1 * p[0] + t.b1 * p[1]);
      set_circle(2, std::sqrt(t.C2[1]), t.a2, t.b2, t.a2 * p[0] + t.b2 * p[1]);
      set_circle(4, std::sqrt(t.C2[2]), 0.0, t.b3, t.b3 * p[1]);
      break;
    }
    case SpaceKind::RectT2xR: {
      const double b = spec_.beta;
      H[0](0, 0) = -kTwoPi * std::cos(kTwoPi * p[0]);
      H[1](0, 0) = -kTwoPi * std::sin(kTwoPi * p[0]);
      H[2](1, 1) = -(kTwoPi / b) * std::cos(kTwoPi * p[1] / b);
      H[3](1, 1) = -(kTwoPi / b) * std::sin(kTwoPi * p[1] / b);
      break;
    }
    case SpaceKind::T3: {
      H[0](0, 0) = -std::cos(p[0]);
      H[1](0, 0) = -std::sin(p[0]);
      H[2](1, 1) = -std::cos(p[1] / spec_.r1) / spec_.r1;
      H[3](1, 1) = -std::sin(p[1] / spec_.r1) / spec_.r1;
      H[4](2, 2) = -std::cos(p[2] / spec_.r2) / spec_.r2;
      H[5](2, 2) = -std::sin(p[2] / spec_.r2) / spec_.r2;
      break;
    }
    case SpaceKind::S3: {
      const double ce = std::cos(p[0]), se = std::sin(p[0]);
      const double cu = std::cos(p[1]), su = std::sin(p[1]);
      const double cv = std::cos(p[2]), sv = std::sin(p[2]);
      H[0] << -ce * cu, se * su, 0, se * su, -ce * cu, 0, 0, 0, 0;
      H[1] << -ce * su, -se * cu, 0, -se * cu, -ce * su, 0, 0, 0, 0;
      H[2] << -se * cv, 0, -ce * sv, 0, 0, 0, -ce * sv, 0, -se * cv;
      H[3] << -se * sv, 0, ce * cv, 0, 0, 0, ce * cv, 0, -se * sv;
      break;
    }
    case SpaceKind::Berger:
      break;
  }
  return H;
}

std::vector<Mat3> AmbientSpace::hessian_fd(const Vec3& p) const {
  require_embedding();
  std::vector<Mat3> H(d_, Mat3::Zero());
  const double h = kFdStep2;
  const VecX f0 = embed(p);
  for (int i = 0; i < 3; ++i) {
    Vec3 pp = p, pm = p;
    pp[i] += h;
    pm[i] -= h;
    const VecX fii = (embed(pp) - 2.0 * f0 + embed(pm)) / (h * h);
    for (int a = 0; a < d_; ++a) H[a](i, i) = fii[a];
    for (int j = i + 1; j < 3; ++j) {
      Vec3 ppp = p, ppm = p, pmp = p, pmm = p;
      ppp[i] += h; ppp[j] += h;
      ppm[i] += h; ppm[j] -= h;
      pmp[i] -= h; pmp[j] += h;
      pmm[i] -= h; pmm[j] -= h;
      const VecX fij =
          (embed(ppp) - embed(ppm) - embed(pmp) + embed(pmm)) / (4.0 * h * h);
      for (int a = 0; a < d_; ++a) {
        H[a](i, j) = fij[a];
        H[a](j, i) = fij[a];
      }
    }
  }
  return H;
}

namespace {

VecX sff_from_hessian(const MatX& J, const std::vector<Mat3>& H,
                      const Mat3& g, const VecX& X, const VecX& Y) {
  const Mat3 ginv = g.inverse();
  const Vec3 xh = ginv * (J.transpose() * X);
  const Vec3 yh = ginv * (J.transpose() * Y);
  const int d = int(J.rows());
  VecX W(d);
  for (int a = 0; a < d; ++a) W[a] = xh.dot(H[a] * yh);
  // remove the tangential part
  W -= J * (ginv * (J.transpose() * W));
  return W;
}

// B of a circle factor of radius R occupying ambient components (i, i+1):
// -<X_pair, Y_pair> * radial / R^2, with radial read off the position.
void add_circle_sff(VecX& B, const VecX& pos, const VecX& X, const VecX& Y,
                    int i, double R) {
  const double dot = X[i] * Y[i] + X[i + 1] * Y[i + 1];
  B[i] -= dot * pos[i] / (R * R);
  B[i + 1] -= dot * pos[i + 1] / (R * R);
}

}  // namespace

VecX AmbientSpace::sff(const Vec3& p, const VecX& X, const VecX& Y) const {
  require_embedding();
  VecX B = VecX::Zero(d_);
  switch (spec_.kind) {
    case SpaceKind::R3:
    case SpaceKind::Ball:
      break;
    case SpaceKind::S2xR: {
      const VecX pos = embed(p);
      const double r = spec_.r;
      const double dot = X.head(3).dot(Y.head(3));
      B.head(3) = -dot * pos.head(3) / (r * r);
      break;
    }
    case SpaceKind::T2xR: {
      const VecX pos = embed(p);
      const auto& t = *torus_;
      add_circle_sff(B, pos, X, Y, 0, std::sqrt(t.C2[0]));
      add_circle_sff(B, pos, X, Y, 2, std::sqrt(t.C2[1]));
      add_circle_sff(B, pos, X, Y, 4, std::sqrt(t.C2[2]));
      break;
    }
    case SpaceKind::RectT2xR: {
      const VecX pos = embed(p);
      add_circle_sff(B, pos, X, Y, 0, 1.0 / kTwoPi);
      add_circle_sff(B, pos, X, Y, 2, spec_.beta / kTwoPi);
      break;
    }
    case SpaceKind::T3: {
      const VecX pos = embed(p);
      add_circle_sff(B, pos, X, Y, 0, 1.0);
      add_circle_sff(B, pos, X, Y, 2, spec_.r1);
      add_circle_sff(B, pos, X, Y, 4, spec_.r2);
      break;
    }
    case SpaceKind::S3: {
      const VecX pos = embed(p);
      B = -X.dot(Y) * pos;
      break;
    }
    case SpaceKind::Berger:
      break;  // unreachable: require_embedding throws
  }
  return B;
}

MatX AmbientSpace::tangent_projector(const Vec3& p) const {
  require_embedding();
  if (spec_.kind == SpaceKind::S2xR) {
    // chart poles make the jacobian rank-deficient; use the radial normal
    const VecX pos = embed(p);
    MatX P = MatX::Identity(d_, d_);
    const Eigen::Vector3d n = pos.head(3) / spec_.r;
    P.topLeftCorner(3, 3) -= n * n.transpose();
    return P;
  }
  const MatX J = jacobian(p);
  return J * metric(p).inverse() * J.transpose();
}

VecX AmbientSpace::sff_fd(const Vec3& p, const VecX& X, const VecX& Y) const {
  require_embedding();
  const MatX J = jacobian_fd(p);
  return sff_from_hessian(J, hessian_fd(p), J.transpose() * J, X, Y);
}

double AmbientSpace::scalar_curvature(const Vec3&) const {
  switch (spec_.kind) {
    case SpaceKind::R3:
    case SpaceKind::Ball:
    case SpaceKind::T2xR:
    case SpaceKind::RectT2xR:
    case SpaceKind::T3:
      return 0.0;
    case SpaceKind::S2xR:
      return 2.0 / (spec_.r * spec_.r);
    case SpaceKind::S3:
      return 6.0;
    case SpaceKind::Berger:
      return 2.0 * (spec_.kappa - spec_.tau * spec_.tau);
  }
  return 0.0;
}

double AmbientSpace::ric_normal(const Vec3&, const VecX& N) const {
  switch (spec_.kind) {
    case SpaceKind::R3:
    case SpaceKind::Ball:
    case SpaceKind::T2xR:
    case SpaceKind::RectT2xR:
    case SpaceKind::T3:
      return 0.0;
    case SpaceKind::S2xR: {
      // product metric: only the spherical part of N sees curvature
      const double nt = N[3];
      return (N.squaredNorm() - nt * nt) / (spec_.r * spec_.r);
    }
    case SpaceKind::S3:
      return 2.0 * N.squaredNorm();
    case SpaceKind::Berger:
      throw Error(Error::ClosedFormOnly, "closed-form-only space: berger");
  }
  return 0.0;
}

CurvatureData AmbientSpace::curvature(const Vec3& p) const {
  CurvatureData c;
  c.scalar = scalar_curvature(p);
  c.sff_norm_sq = sup_sff_norm_sq();  // constant on every catalog space
  switch (spec_.kind) {
    case SpaceKind::R3:
    case SpaceKind::Ball:
      c.mean_vec_norm_sq = 0.0;
      break;
    case SpaceKind::S2xR:
      c.mean_vec_norm_sq = 4.0 / (spec_.r * spec_.r);
      break;
    case SpaceKind::T2xR:
    case SpaceKind::RectT2xR:
    case SpaceKind::T3:
      c.mean_vec_norm_sq = c.sff_norm_sq;  // flat: R = |H|^2 - |B|^2 = 0
      break;
    case SpaceKind::S3:
      c.mean_vec_norm_sq = 9.0;
      break;
    case SpaceKind::Berger:
      throw Error(Error::ClosedFormOnly, "closed-form-only space: berger");
  }
  return c;
}

double AmbientSpace::sup_sff_norm_sq() const {
  switch (spec_.kind) {
    case SpaceKind::R3:
    case SpaceKind::Ball:
      return 0.0;
    case SpaceKind::S2xR:
      return 2.0 / (spec_.r * spec_.r);
    case SpaceKind::T2xR:
      return torus_sff_norm_sq(*torus_);
    case SpaceKind::RectT2xR:
      return kTwoPi * kTwoPi * (1.0 + 1.0 / (spec_.beta * spec_.beta));
    case SpaceKind::T3:
      return 1.0 + 1.0 / (spec_.r1 * spec_.r1) + 1.0 / (spec_.r2 * spec_.r2);
    case SpaceKind::S3:
      return 3.0;
    case SpaceKind::Berger: {
      // sup over C^2 in [0,1] of the restricted tangent-plane sum,
      // attained at C^2 = 0
      const double k = spec_.kappa, t2 = spec_.tau * spec_.tau;
      const double x = k / (4.0 * t2) - 1.0;
      return 2.0 * k - 6.0 * t2 + t2 * x * x;
    }
  }
  return 0.0;
}

double AmbientSpace::inf_scalar() const { return scalar_curvature(Vec3::Zero()); }

ThresholdInfo AmbientSpace::threshold_H2() const {
  ThresholdInfo out;
  if (spec_.kind == SpaceKind::Berger) {
    const double t2 = spec_.tau * spec_.tau;
    const double x = spec_.kappa / (4.0 * t2);
    out.value = t2 * (x - 3.0) * (x + 1.0);
  } else {
    out.value = sup_sff_norm_sq() - inf_scalar();
  }
  out.none_required = out.value <= 0.0;
  out.index_denominator = double(d_);
  return out;
}

std::vector<Vec3> AmbientSpace::chart_periods() const {
  switch (spec_.kind) {
    case SpaceKind::R3:
    case SpaceKind::Ball:
    case SpaceKind::Berger:
      return {};
    case SpaceKind::S2xR:
      return {Vec3(0, kTwoPi, 0)};
    case SpaceKind::T2xR: {
      const double s = std::sqrt(spec_.alpha * spec_.alpha + spec_.beta * spec_.beta);
      const double s0 = (spec_.alpha / spec_.beta) * s;
      return {Vec3(1, 0, 0), Vec3(s0, s, 0)};
    }
    case SpaceKind::RectT2xR:
      return {Vec3(1, 0, 0), Vec3(0, spec_.beta, 0)};
    case SpaceKind::T3:
      return {Vec3(kTwoPi, 0, 0), Vec3(0, kTwoPi * spec_.r1, 0),
              Vec3(0, 0, kTwoPi * spec_.r2)};
    case SpaceKind::S3:
      return {Vec3(0, kTwoPi, 0), Vec3(0, 0, kTwoPi)};
  }
  return {};
}

double AmbientSpace::boundary_h_NN(const Vec3&, const VecX& N) const {
  if (!has_boundary())
    throw Error(Error::InvalidArgument, "space has no boundary: " + name());
  // unit sphere with inward normal: h(X,Y) = <X,Y>
  return N.squaredNorm();
}

double AmbientSpace::boundary_H(const Vec3&) const {
  if (!has_boundary())
    throw Error(Error::InvalidArgument, "space has no boundary: " + name());
  return 2.0;
}

bool AmbientSpace::on_boundary(const Vec3& p, double tol) const {
  if (!has_boundary()) return false;
  return std::abs(p.norm() - 1.0) <= tol;
}

AmbientSpace catalog_space(const SpaceSpec& spec) { return AmbientSpace(spec); }

AmbientSpace catalog_space_from_json(const std::string& json_text) {
  return AmbientSpace(SpaceSpec::from_json(json_text));
}

}  // namespace cmcix
