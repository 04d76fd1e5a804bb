#pragma once

// IMESH text format:
//   line 1:  IMESH 1
//   line 2:  JSON header {family, params, resolution, seed, space}
//   V n      followed by n lines "u v x_1 ... x_d"
//   F m      followed by m lines of three 0-based CCW vertex indices
//   B r      (optional) followed by r boundary loops, one index list per line
// Floats are printed with 17 significant digits; save/load/save is
// byte-identical.

#include "cmcix/mesh.hpp"

#include <iosfwd>
#include <string>

namespace cmcix {

void save_imesh(const ImmersedMesh& mesh, const std::string& path);
std::string imesh_to_string(const ImmersedMesh& mesh);

ImmersedMesh load_imesh(const std::string& path);
ImmersedMesh imesh_from_string(const std::string& text);

}  // namespace cmcix
