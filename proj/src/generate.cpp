#include "cmcix/generate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace cmcix {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

struct Grid3 {
  MatX points;            // n x 3
  Eigen::MatrixXi faces;  // m x 3
};

// Cube-sphere with equal-angle projection: N segments per cube edge,
// roughly 4N segments around a great circle.
Grid3 cube_sphere(int N) {
  std::map<std::array<int, 3>, int> index;
  std::vector<Vec3> pts;
  std::vector<std::array<int, 3>> tris;

  auto param = [&](int i) { return std::tan(kPi / 4.0 * (2.0 * i / N - 1.0)); };

  for (int axis = 0; axis < 3; ++axis) {
    for (int sign = -1; sign <= 1; sign += 2) {
      const int b = (axis + 1) % 3, c = (axis + 2) % 3;
      auto vid = [&](int i, int j) {
        std::array<int, 3> key{};
        key[axis] = sign * N;
        key[b] = 2 * i - N;
        key[c] = 2 * j - N;
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        Vec3 p;
        p[axis] = double(sign);
        p[b] = param(i);
        p[c] = param(j);
        p.normalize();
        const int id = int(pts.size());
        pts.push_back(p);
        index.emplace(key, id);
        return id;
      };
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
          int v00 = vid(i, j), v10 = vid(i + 1, j);
          int v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
          auto push = [&](int a_, int b_, int c_) {
            if (sign < 0) std::swap(b_, c_);
            tris.push_back({a_, b_, c_});
          };
          if ((i + j) % 2 == 0) {
            push(v00, v10, v11);
            push(v00, v11, v01);
          } else {
            push(v00, v10, v01);
            push(v10, v11, v01);
          }
        }
      }
    }
  }
  Grid3 g;
  g.points.resize(int(pts.size()), 3);
  for (size_t i = 0; i < pts.size(); ++i) g.points.row(int(i)) = pts[i];
  g.faces.resize(int(tris.size()), 3);
  for (size_t i = 0; i < tris.size(); ++i)
    g.faces.row(int(i)) << tris[i][0], tris[i][1], tris[i][2];
  return g;
}

// Structured torus topology: nu x nv grid with both directions wrapped.
Eigen::MatrixXi torus_faces(int nu, int nv) {
  Eigen::MatrixXi F(2 * nu * nv, 3);
  int f = 0;
  auto vid = [&](int i, int j) { return ((i + nu) % nu) * nv + ((j + nv) % nv); };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      F.row(f++) << vid(i, j), vid(i + 1, j), vid(i + 1, j + 1);
      F.row(f++) << vid(i, j), vid(i + 1, j + 1), vid(i, j + 1);
    }
  return F;
}

// Polar disk/annulus/cap topology. rings >= 1 rings of `sectors` vertices;
// with_center adds a pole vertex fanned to ring 1.
struct PolarGrid {
  Eigen::MatrixXi faces;
  int num_vertices = 0;
  bool with_center = false;
  int sectors = 0;
  int vid(int ring, int s) const {  // ring is 1-based when with_center
    const int base = with_center ? 1 : 0;
    const int r0 = with_center ? 1 : 0;
    return base + (ring - r0) * sectors + ((s % sectors + sectors) % sectors);
  }
};

PolarGrid polar_grid(int rings, int sectors, bool with_center) {
  PolarGrid g;
  g.with_center = with_center;
  g.sectors = sectors;
  g.num_vertices = (with_center ? 1 : 0) + rings * sectors;
  std::vector<std::array<int, 3>> tris;
  const int first_ring = with_center ? 1 : 0;
  if (with_center) {
    for (int s = 0; s < sectors; ++s)
      tris.push_back({0, g.vid(1, s), g.vid(1, s + 1)});
  }
  for (int r = first_ring; r < first_ring + rings - 1; ++r) {
    for (int s = 0; s < sectors; ++s) {
      const int v00 = g.vid(r, s), v01 = g.vid(r, s + 1);
      const int v10 = g.vid(r + 1, s), v11 = g.vid(r + 1, s + 1);
      if (s % 2 == 0) {
        tris.push_back({v00, v10, v11});
        tris.push_back({v00, v11, v01});
      } else {
        tris.push_back({v00, v10, v01});
        tris.push_back({v10, v11, v01});
      }
    }
  }
  g.faces.resize(int(tris.size()), 3);
  for (size_t i = 0; i < tris.size(); ++i)
    g.faces.row(int(i)) << tris[i][0], tris[i][1], tris[i][2];
  return g;
}

double get_param(const FamilySpec& fs, const std::string& key, double dflt) {
  auto it = fs.params.find(key);
  return it == fs.params.end() ? dflt : it->second;
}

void finalize(ImmersedMesh& mesh, const FamilySpec& fs) {
  mesh.tag.family = canonical_family_name(fs.family);
  mesh.tag.params = fs.params;
  mesh.tag.resolution = fs.resolution;
  mesh.tag.seed = fs.seed;
  const int V = mesh.num_vertices();
  mesh.pos.resize(V, mesh.space->dim());
  for (int v = 0; v < V; ++v)
    mesh.pos.row(v) = mesh.space->embed(mesh.chart.row(v).transpose()).transpose();
  if (mesh.boundary_loops.empty()) mesh.boundary_loops = trace_boundary_loops(mesh);
  validate_mesh(mesh);
}

// On-space jitter of the chart coordinates; boundary vertices stay put.
void apply_jitter(ImmersedMesh& mesh, double amount, std::uint64_t seed) {
  if (amount <= 0) return;
  const MeshConnectivity c = build_connectivity(mesh);
  // local scale: mean incident chart edge length per vertex
  std::vector<double> h(mesh.num_vertices(), 0.0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    double acc = 0;
    for (int w : c.vertex_neighbors[v])
      acc += (mesh.chart.row(v) - mesh.chart.row(w)).norm();
    h[v] = c.vertex_neighbors[v].empty() ? 0 : acc / c.vertex_neighbors[v].size();
  }
  std::mt19937_64 rng(seed ^ 0xc0ffee123456789ULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    Vec3 dp(uni(rng), uni(rng), uni(rng));
    if (c.boundary_vertex[v]) continue;
    mesh.chart.row(v) += (amount * h[v] * dp).transpose();
  }
}

ImmersedMesh make_sphere(std::shared_ptr<const AmbientSpace> space,
                         const FamilySpec& fs) {
  const double rho = get_param(fs, "radius", 1.0);
  if (!(rho > 0)) throw Error(Error::InvalidParameter, "sphere radius must be > 0");
  const SpaceKind k = space->kind();
  if (k != SpaceKind::R3 && k != SpaceKind::Ball && k != SpaceKind::RectT2xR &&
      k != SpaceKind::T2xR && k != SpaceKind::T3)
    throw Error(Error::FamilySpaceMismatch,
                "sphere family needs a flat chart (r3, ball, rect, t2xr, t3)");
  const Vec3 lo = space->chart_lo(), hi = space->chart_hi();
  Vec3 center = 0.5 * (lo + hi);
  if (k == SpaceKind::R3 || k == SpaceKind::Ball) center = Vec3::Zero();
  if (k != SpaceKind::R3) {
    // must fit inside the fundamental domain / unit ball
    double room = std::numeric_limits<double>::infinity();
    if (k == SpaceKind::Ball) room = 1.0;
    else
      for (int i = 0; i < 2; ++i) room = std::min(room, (hi[i] - lo[i]) / 2.0);
    if (rho >= 0.98 * room)
      throw Error(Error::InvalidParameter,
                  "radius too large to embed in fundamental domain");
  }
  const Grid3 g = cube_sphere(std::max(2, fs.resolution / 4));
  ImmersedMesh mesh;
  mesh.space = std::move(space);
  mesh.chart = (g.points * rho).rowwise() + center.transpose();
  mesh.faces = g.faces;
  return mesh;
}

ImmersedMesh make_slice_sphere(std::shared_ptr<const AmbientSpace> space,
                               const FamilySpec& fs) {
  if (space->kind() != SpaceKind::S2xR)
    throw Error(Error::FamilySpaceMismatch, "slice-sphere lives in s2xr");
  const double t0 = get_param(fs, "t", 0.0);
  const Grid3 g = cube_sphere(std::max(2, fs.resolution / 4));
  ImmersedMesh mesh;
  mesh.space = std::move(space);
  const int V = int(g.points.rows());
  mesh.chart.resize(V, 3);
  for (int v = 0; v < V; ++v) {
    const Vec3 dir = g.points.row(v).transpose();
    const double theta = std::acos(std::clamp(dir[2], -1.0, 1.0));
    double phi = std::atan2(dir[1], dir[0]);
    if (phi < 0) phi += kTwoPi;
    mesh.chart.row(v) << theta, phi, t0;
  }
  mesh.faces = g.faces;
  return mesh;
}

ImmersedMesh make_slice_torus(std::shared_ptr<const AmbientSpace> space,
                              const FamilySpec& fs) {
  const SpaceKind k = space->kind();
  if (k != SpaceKind::RectT2xR && k != SpaceKind::T2xR)
    throw Error(Error::FamilySpaceMismatch, "slice-torus lives in rect or t2xr");
  const double t0 = get_param(fs, "t", 0.0);
  const double span_u = space->chart_hi()[0] - space->chart_lo()[0];
  const double span_v = space->chart_hi()[1] - space->chart_lo()[1];
  const int nu = std::max(3, fs.resolution);
  const int nv = std::max(3, int(std::lround(fs.resolution * span_v / span_u)));
  ImmersedMesh mesh;
  mesh.space = std::move(space);
  mesh.chart.resize(nu * nv, 3);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j)
      mesh.chart.row(i * nv + j) << span_u * i / nu, span_v * j / nv, t0;
  mesh.faces = torus_faces(nu, nv);
  return mesh;
}

ImmersedMesh make_subtorus(std::shared_ptr<const AmbientSpace> space,
                           const FamilySpec& fs) {
  if (space->kind() != SpaceKind::T3)
    throw Error(Error::FamilySpaceMismatch, "subtorus lives in t3");
  const double w0 = get_param(fs, "w", 0.0);
  const double r1 = space->spec().r1;
  const int nu = std::max(3, fs.resolution);
  const int nv = std::max(3, int(std::lround(fs.resolution * r1)));
  ImmersedMesh mesh;
  mesh.space = std::move(space);
  mesh.chart.resize(nu * nv, 3);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j)
      mesh.chart.row(i * nv + j) << kTwoPi * i / nu, kTwoPi * r1 * j / nv, w0;
  mesh.faces = torus_faces(nu, nv);
  return mesh;
}

ImmersedMesh make_clifford(std::shared_ptr<const AmbientSpace> space,
                           const FamilySpec& fs) {
  if (space->kind() != SpaceKind::S3)
    throw Error(Error::FamilySpaceMismatch, "clifford lives in s3");
  const int n = std::max(3, fs.resolution);
  ImmersedMesh mesh;
  mesh.space = std::move(space);
  mesh.chart.resize(n * n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      mesh.chart.row(i * n + j) << kPi / 4.0, kTwoPi * i / n, kTwoPi * j / n;
  mesh.faces = torus_faces(n, n);
  return mesh;
}

// Spherical cap of mean curvature H (trace convention) meeting the unit
// sphere orthogonally: sphere radius rho = 2/H centered at c = sqrt(1+rho^2)
// on the z-axis, polar angle up to acos(rho/c).
ImmersedMesh make_cap(std::shared_ptr<const AmbientSpace> space,
                      const FamilySpec& fs) {
  if (space->kind() != SpaceKind::Ball)
    throw Error(Error::FamilySpaceMismatch, "cap lives in ball");
  const double H = get_param(fs, "H", 1.0);
  if (!(H > 0)) throw Error(Error::InvalidParameter, "cap needs H > 0");
  const double rho = 2.0 / H;
  const double c = std::sqrt(1.0 + rho * rho);
  const double psi_max = std::acos(rho / c);
  const int sectors = std::max(8, fs.resolution);
  const double rim = kTwoPi * rho * std::sin(psi_max);
  const int rings = std::max(3, int(std::lround(sectors * rho * psi_max / rim)));
  const PolarGrid g = polar_grid(rings, sectors, true);
  ImmersedMesh mesh;
  mesh.space = std::move(space);
  mesh.chart.resize(g.num_vertices, 3);
  mesh.chart.row(0) << 0.0, 0.0, c - rho;
  for (int r = 1; r <= rings; ++r) {
    const double psi = psi_max * r / rings;
    for (int s = 0; s < sectors; ++s) {
      const double phi = kTwoPi * s / sectors;
      mesh.chart.row(g.vid(r, s)) << rho * std::sin(psi) * std::cos(phi),
          rho * std::sin(psi) * std::sin(phi), c - rho * std::cos(psi);
    }
  }
  mesh.faces = g.faces;
  return mesh;
}

ImmersedMesh make_disk_or_annulus(std::shared_ptr<const AmbientSpace> space,
                                  const FamilySpec& fs, bool annulus) {
  if (space->kind() != SpaceKind::Ball)
    throw Error(Error::FamilySpaceMismatch, "disk/annulus live in ball");
  const double inner = annulus ? get_param(fs, "inner", 0.4) : 0.0;
  if (annulus && !(inner > 0 && inner < 1))
    throw Error(Error::InvalidParameter, "annulus inner radius must be in (0,1)");
  const int sectors = std::max(8, fs.resolution);
  const double radial = 1.0 - inner;
  const int rings = std::max(3, int(std::lround(sectors * radial / kTwoPi)));
  const PolarGrid g = polar_grid(annulus ? rings + 1 : rings, sectors, !annulus);
  ImmersedMesh mesh;
  mesh.space = std::move(space);
  mesh.chart.resize(g.num_vertices, 3);
  if (!annulus) mesh.chart.row(0) << 0.0, 0.0, 0.0;
  const int first = annulus ? 0 : 1;
  const int last = annulus ? rings : rings;
  for (int r = first; r <= last; ++r) {
    const double rad = annulus ? inner + radial * r / rings : double(r) / rings;
    for (int s = 0; s < sectors; ++s) {
      const double phi = kTwoPi * s / sectors;
      mesh.chart.row(g.vid(r, s)) << rad * std::cos(phi), rad * std::sin(phi), 0.0;
    }
  }
  mesh.faces = g.faces;
  return mesh;
}

MatX donut_points(int nu, int nv, double R, double rho, const Vec3& center) {
  MatX P(nu * nv, 3);
  for (int i = 0; i < nu; ++i) {
    const double phi = kTwoPi * i / nu;
    for (int j = 0; j < nv; ++j) {
      const double th = kTwoPi * j / nv;
      P.row(i * nv + j) << center[0] + (R + rho * std::cos(th)) * std::cos(phi),
          center[1] + (R + rho * std::cos(th)) * std::sin(phi),
          center[2] + rho * std::sin(th);
    }
  }
  return P;
}

ImmersedMesh make_torus_r3(std::shared_ptr<const AmbientSpace> space,
                           const FamilySpec& fs) {
  if (space->kind() != SpaceKind::R3)
    throw Error(Error::FamilySpaceMismatch, "torus family lives in r3");
  const double R = get_param(fs, "R", 1.0);
  const double rho = get_param(fs, "rho", 0.35);
  const int nu = std::max(8, fs.resolution);
  const int nv = std::max(6, int(std::lround(fs.resolution * rho / R)));
  ImmersedMesh mesh;
  mesh.space = std::move(space);
  mesh.chart = donut_points(nu, nv, R, rho, Vec3::Zero());
  mesh.faces = torus_faces(nu, nv);
  return mesh;
}

// Two donut tori with one vertex star removed from each, joined by a
// triangulated cylinder between the hexagonal holes.
ImmersedMesh make_genus2(std::shared_ptr<const AmbientSpace> space,
                         const FamilySpec& fs) {
  if (space->kind() != SpaceKind::R3)
    throw Error(Error::FamilySpaceMismatch, "genus2 family lives in r3");
  const double R = 1.0, rho = 0.35;
  int nu = std::max(8, fs.resolution);
  nu += nu % 2;  // want phi = 0 and phi = pi on-grid
  const int nv = std::max(6, int(std::lround(nu * rho / R)));
  const double gap = 0.25 * rho;
  const double cx = R + rho + gap / 2;

  const Eigen::MatrixXi F0 = torus_faces(nu, nv);
  const MatX P1 = donut_points(nu, nv, R, rho, Vec3(-cx, 0, 0));
  const MatX P2 = donut_points(nu, nv, R, rho, Vec3(+cx, 0, 0));

  // remove the star of (i*, j*): torus 1 faces +x at phi=0, torus 2 at phi=pi
  auto star_ring = [&](int i, int j) {
    auto vid = [&](int a, int b) { return ((a + nu) % nu) * nv + ((b + nv) % nv); };
    return std::vector<int>{vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1),
                            vid(i - 1, j), vid(i - 1, j - 1), vid(i, j - 1)};
  };
  const int rm1 = 0 * nv + 0;
  const int rm2 = (nu / 2) * nv + 0;
  std::vector<int> ring1 = star_ring(0, 0), ring2 = star_ring(nu / 2, 0);

  // concatenate vertices, dropping the removed ones
  const int V0 = nu * nv;
  std::vector<int> remap1(V0, -1), remap2(V0, -1);
  std::vector<Vec3> pts;
  for (int v = 0; v < V0; ++v)
    if (v != rm1) { remap1[v] = int(pts.size()); pts.push_back(P1.row(v)); }
  for (int v = 0; v < V0; ++v)
    if (v != rm2) { remap2[v] = int(pts.size()); pts.push_back(P2.row(v)); }

  std::vector<std::array<int, 3>> tris;
  for (int f = 0; f < F0.rows(); ++f) {
    const int a = F0(f, 0), b = F0(f, 1), c = F0(f, 2);
    if (a != rm1 && b != rm1 && c != rm1)
      tris.push_back({remap1[a], remap1[b], remap1[c]});
    if (a != rm2 && b != rm2 && c != rm2)
      tris.push_back({remap2[a], remap2[b], remap2[c]});
  }

  auto build_bridge = [&](bool reverse) {
    std::vector<std::array<int, 3>> bridge;
    const int n = int(ring1.size());
    std::vector<int> rb(n);
    for (int i = 0; i < n; ++i)
      rb[i] = reverse ? ring2[(2 * n - i) % n] : ring2[i];
    // rotate rb to minimize total strut length
    int best_off = 0;
    double best_len = std::numeric_limits<double>::infinity();
    for (int off = 0; off < n; ++off) {
      double len = 0;
      for (int i = 0; i < n; ++i)
        len += (pts[remap1[ring1[i]]] - pts[remap2[rb[(i + off) % n]]]).norm();
      if (len < best_len) { best_len = len; best_off = off; }
    }
    for (int i = 0; i < n; ++i) {
      const int a0 = remap1[ring1[i]], a1 = remap1[ring1[(i + 1) % n]];
      const int b0 = remap2[rb[(i + best_off) % n]];
      const int b1 = remap2[rb[(i + 1 + best_off) % n]];
      // traverse a0 -> a1 so the strut opposes the torus faces on ring A;
      // the reverse flag settles the ring B direction
      bridge.push_back({a0, a1, b1});
      bridge.push_back({a0, b1, b0});
    }
    return bridge;
  };

  auto assemble = [&](const std::vector<std::array<int, 3>>& bridge) {
    ImmersedMesh mesh;
    mesh.space = space;
    mesh.chart.resize(int(pts.size()), 3);
    for (size_t i = 0; i < pts.size(); ++i) mesh.chart.row(int(i)) = pts[i];
    mesh.faces.resize(int(tris.size() + bridge.size()), 3);
    int f = 0;
    for (const auto& t : tris) mesh.faces.row(f++) << t[0], t[1], t[2];
    for (const auto& t : bridge) mesh.faces.row(f++) << t[0], t[1], t[2];
    return mesh;
  };

  for (bool reverse : {true, false}) {
    ImmersedMesh mesh = assemble(build_bridge(reverse));
    try {
      mesh.pos = mesh.chart;
      mesh.boundary_loops = trace_boundary_loops(mesh);
      validate_mesh(mesh);
      return mesh;
    } catch (const Error&) {
      continue;  // bridge orientation mismatched; try the other winding
    }
  }
  throw Error(Error::Internal, "genus2 bridge construction failed");
}

}  // namespace

std::string canonical_family_name(const std::string& name) {
  if (name == "round-sphere" || name == "sphere") return "sphere";
  if (name == "slice-sphere") return "slice-sphere";
  if (name == "slice-torus") return "slice-torus";
  if (name == "subtorus-cylinder" || name == "subtorus") return "subtorus";
  if (name == "clifford-torus" || name == "clifford") return "clifford";
  if (name == "spherical-cap" || name == "cap") return "cap";
  if (name == "flat-disk" || name == "disk") return "disk";
  if (name == "annulus") return "annulus";
  if (name == "torus") return "torus";
  if (name == "genus2") return "genus2";
  throw Error(Error::InvalidParameter, "unknown family: " + name);
}

ImmersedMesh generate_surface(std::shared_ptr<const AmbientSpace> space,
                              const FamilySpec& fs) {
  if (!space->has_embedding())
    throw Error(Error::ClosedFormOnly, "closed-form-only space: " + space->name());
  const std::string fam = canonical_family_name(fs.family);
  ImmersedMesh mesh;
  if (fam == "sphere") mesh = make_sphere(space, fs);
  else if (fam == "slice-sphere") mesh = make_slice_sphere(space, fs);
  else if (fam == "slice-torus") mesh = make_slice_torus(space, fs);
  else if (fam == "subtorus") mesh = make_subtorus(space, fs);
  else if (fam == "clifford") mesh = make_clifford(space, fs);
  else if (fam == "cap") mesh = make_cap(space, fs);
  else if (fam == "disk") mesh = make_disk_or_annulus(space, fs, false);
  else if (fam == "annulus") mesh = make_disk_or_annulus(space, fs, true);
  else if (fam == "torus") mesh = make_torus_r3(space, fs);
  else if (fam == "genus2") mesh = make_genus2(space, fs);
  apply_jitter(mesh, get_param(fs, "jitter", 0.0), fs.seed);
  finalize(mesh, fs);
  return mesh;
}

VecX family_reference_normal(const ImmersedMesh& mesh, int vertex) {
  const std::string& fam = mesh.tag.family;
  const int d = mesh.ambient_dim();
  const Vec3 p = mesh.chart.row(vertex).transpose();
  VecX N = VecX::Zero(d);
  if (fam == "slice-sphere" || fam == "slice-torus") {
    N[d - 1] = 1.0;  // the R-factor direction
    return N;
  }
  if (fam == "subtorus") {
    // unit tangent of the third circle
    const double r2 = mesh.space->spec().r2;
    N[4] = -std::sin(p[2] / r2);
    N[5] = std::cos(p[2] / r2);
    return N;
  }
  if (fam == "clifford") {
    const double cu = std::cos(p[1]), su = std::sin(p[1]);
    const double cv = std::cos(p[2]), sv = std::sin(p[2]);
    N << -cu, -su, cv, sv;
    N /= std::sqrt(2.0);
    return N;
  }
  if (fam == "disk" || fam == "annulus") {
    N[2] = 1.0;
    return N;
  }
  return VecX();  // orient by the H >= 0 rule
}

Vec3 family_boundary_conormal(const ImmersedMesh& mesh, int vertex) {
  const std::string& fam = mesh.tag.family;
  const Vec3 p = mesh.chart.row(vertex).transpose();
  if (fam == "cap") {
    const double H = mesh.tag.params.count("H") ? mesh.tag.params.at("H") : 1.0;
    const double rho = 2.0 / H;
    const double c = std::sqrt(1.0 + rho * rho);
    const double psi = std::acos(std::clamp((c - p[2]) / rho, -1.0, 1.0));
    const double phi = std::atan2(p[1], p[0]);
    return Vec3(std::cos(psi) * std::cos(phi), std::cos(psi) * std::sin(phi),
                std::sin(psi));
  }
  if (fam == "disk" || fam == "annulus") {
    const double rr = std::hypot(p[0], p[1]);
    const Vec3 radial(p[0] / rr, p[1] / rr, 0.0);
    if (fam == "annulus" && rr < 0.5 * (1.0 + mesh.tag.params.at("inner")))
      return -radial;  // inner rim: outward conormal points towards the hole
    return radial;
  }
  throw Error(Error::InvalidArgument,
              "no analytic boundary conormal for family " + fam);
}

}  // namespace cmcix
