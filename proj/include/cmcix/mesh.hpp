#pragma once

// Triangulated surfaces immersed in a catalog space. Vertices carry both
// their 3-coordinate chart point in M and the ambient position in R^d.

#include "cmcix/ambient.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cmcix {

struct FamilyTag {
  std::string family;                    // generator identifier
  std::map<std::string, double> params;  // generator parameters
  int resolution = 0;
  std::uint64_t seed = 0;
};

struct ImmersedMesh {
  std::shared_ptr<const AmbientSpace> space;
  MatX chart;      // V x 3 chart coordinates
  MatX pos;        // V x d ambient positions
  Eigen::MatrixXi faces;  // F x 3, CCW w.r.t. the surface orientation
  std::vector<std::vector<int>> boundary_loops;
  FamilyTag tag;

  int num_vertices() const { return int(chart.rows()); }
  int num_faces() const { return int(faces.rows()); }
  int ambient_dim() const { return int(pos.cols()); }
};

// Edge-based connectivity derived from the face list. Edge endpoints are
// stored with tail < head; the intrinsic orientation of edge e is tail->head.
struct MeshConnectivity {
  Eigen::MatrixXi edges;        // E x 2 (tail, head), tail < head
  Eigen::MatrixXi face_edges;   // F x 3: edge index opposite local vertex i
  Eigen::MatrixXi face_edge_sign;  // F x 3: +1 if face traverses tail->head
  std::vector<char> boundary_edge;   // E flags
  std::vector<char> boundary_vertex; // V flags
  std::vector<std::vector<int>> vertex_faces;  // incident faces per vertex
  std::vector<std::vector<int>> vertex_neighbors;
  int num_edges() const { return int(edges.rows()); }
};

MeshConnectivity build_connectivity(const ImmersedMesh& mesh);

// Checks: orientability/consistent orientation, every edge on <= 2 faces,
// boundary edges exactly those in boundary_loops, Euler characteristic
// consistent, and ambient positions matching the embedding of the chart
// coordinates to relative 1e-10. Throws on violation.
void validate_mesh(const ImmersedMesh& mesh);

struct GenusBoundary {
  int genus = 0;
  int boundary_components = 0;
  int euler = 0;
};

GenusBoundary genus_and_boundary(const ImmersedMesh& mesh);

// Boundary loops recovered from the face list (each boundary edge lies on
// exactly one face); loops are ordered along the induced orientation.
std::vector<std::vector<int>> trace_boundary_loops(const ImmersedMesh& mesh);

}  // namespace cmcix
