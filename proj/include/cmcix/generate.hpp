#pragma once

// Model CMC surface families immersed in catalog spaces.
//
//   sphere        round sphere of radius rho (r3, ball, rect, t2xr, t3)
//   slice-sphere  S^2(r) x {t} in s2xr
//   slice-torus   T^2 x {t} in rect / t2xr
//   subtorus      S^1(1) x S^1(r1) x {w} in t3
//   clifford      Clifford torus in s3
//   cap           free boundary spherical cap of mean curvature H in ball
//   disk          equatorial unit disk in ball (testing)
//   annulus       planar annulus z=0, radii [inner, 1] in ball (testing)
//   torus         donut torus in r3 (testing)
//   genus2        two glued donut tori in r3 (testing)
//
// Optional params: "jitter" displaces interior vertices on-space by the
// given fraction of the local edge length (deterministic in the seed).

#include "cmcix/mesh.hpp"

#include <memory>

namespace cmcix {

struct FamilySpec {
  std::string family;
  std::map<std::string, double> params;
  int resolution = 32;
  std::uint64_t seed = 0;
};

ImmersedMesh generate_surface(std::shared_ptr<const AmbientSpace> space,
                              const FamilySpec& fs);

// Analytic unit normal used to fix the sign convention on minimal families
// (returns an empty vector for families oriented by the H >= 0 rule).
VecX family_reference_normal(const ImmersedMesh& mesh, int vertex);

// Analytic outward conormal of the boundary for the cap/disk/annulus
// families, used by the free-boundary checks.
Vec3 family_boundary_conormal(const ImmersedMesh& mesh, int vertex);

std::string canonical_family_name(const std::string& name);

}  // namespace cmcix
