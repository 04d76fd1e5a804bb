#include "cmcix/mesh.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace cmcix {

MeshConnectivity build_connectivity(const ImmersedMesh& mesh) {
  const int V = mesh.num_vertices();
  const int F = mesh.num_faces();
  MeshConnectivity c;

  std::map<std::pair<int, int>, int> edge_index;
  std::vector<std::array<int, 2>> edge_list;
  std::vector<int> edge_face_count;
  c.face_edges.resize(F, 3);
  c.face_edge_sign.resize(F, 3);

  for (int f = 0; f < F; ++f) {
    for (int i = 0; i < 3; ++i) {
      // edge opposite local vertex i runs v_{i+1} -> v_{i+2}
      const int a = mesh.faces(f, (i + 1) % 3);
      const int b = mesh.faces(f, (i + 2) % 3);
      if (a == b || a < 0 || b < 0 || a >= V || b >= V)
        throw Error(Error::InvalidArgument, "degenerate or out-of-range face");
      const auto key = std::minmax(a, b);
      auto it = edge_index.find(key);
      int e;
      if (it == edge_index.end()) {
        e = int(edge_list.size());
        edge_index.emplace(key, e);
        edge_list.push_back({key.first, key.second});
        edge_face_count.push_back(0);
      } else {
        e = it->second;
      }
      if (++edge_face_count[e] > 2)
        throw Error(Error::InvalidArgument, "non-manifold edge (3+ faces)");
      c.face_edges(f, i) = e;
      c.face_edge_sign(f, i) = (a == key.first) ? 1 : -1;
    }
  }

  const int E = int(edge_list.size());
  c.edges.resize(E, 2);
  for (int e = 0; e < E; ++e) {
    c.edges(e, 0) = edge_list[e][0];
    c.edges(e, 1) = edge_list[e][1];
  }
  c.boundary_edge.assign(E, 0);
  c.boundary_vertex.assign(V, 0);
  for (int e = 0; e < E; ++e) {
    if (edge_face_count[e] == 1) {
      c.boundary_edge[e] = 1;
      c.boundary_vertex[c.edges(e, 0)] = 1;
      c.boundary_vertex[c.edges(e, 1)] = 1;
    }
  }
  c.vertex_faces.assign(V, {});
  c.vertex_neighbors.assign(V, {});
  for (int f = 0; f < F; ++f)
    for (int i = 0; i < 3; ++i) c.vertex_faces[mesh.faces(f, i)].push_back(f);
  std::vector<std::set<int>> nbr(V);
  for (int e = 0; e < E; ++e) {
    nbr[c.edges(e, 0)].insert(c.edges(e, 1));
    nbr[c.edges(e, 1)].insert(c.edges(e, 0));
  }
  for (int v = 0; v < V; ++v)
    c.vertex_neighbors[v].assign(nbr[v].begin(), nbr[v].end());
  return c;
}

std::vector<std::vector<int>> trace_boundary_loops(const ImmersedMesh& mesh) {
  const MeshConnectivity c = build_connectivity(mesh);
  // Directed boundary halfedges: a boundary edge belongs to one face; the
  // loop direction opposes the face traversal so loops follow the induced
  // boundary orientation.
  std::map<int, int> next_vertex;  // boundary successor
  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int i = 0; i < 3; ++i) {
      const int e = c.face_edges(f, i);
      if (!c.boundary_edge[e]) continue;
      const int a = mesh.faces(f, (i + 1) % 3);
      const int b = mesh.faces(f, (i + 2) % 3);
      next_vertex[a] = b;
    }
  }
  std::vector<std::vector<int>> loops;
  std::set<int> visited;
  for (const auto& [start, _] : next_vertex) {
    if (visited.count(start)) continue;
    std::vector<int> loop;
    int v = start;
    do {
      loop.push_back(v);
      visited.insert(v);
      auto it = next_vertex.find(v);
      if (it == next_vertex.end())
        throw Error(Error::InvalidArgument, "open boundary chain");
      v = it->second;
    } while (v != start);
    loops.push_back(std::move(loop));
  }
  return loops;
}

void validate_mesh(const ImmersedMesh& mesh) {
  const int V = mesh.num_vertices();
  if (V == 0 || mesh.num_faces() == 0)
    throw Error(Error::InvalidArgument, "empty mesh");
  if (mesh.pos.rows() != V)
    throw Error(Error::InvalidArgument, "chart/position count mismatch");
  if (mesh.space && int(mesh.pos.cols()) != mesh.space->dim())
    throw Error(Error::InvalidArgument, "ambient dimension mismatch");

  const MeshConnectivity c = build_connectivity(mesh);

  // Consistent orientation: interior edges are traversed in opposite
  // directions by their two faces, i.e. the per-face signs differ.
  std::vector<int> sign_seen(c.num_edges(), 0);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int i = 0; i < 3; ++i) {
      const int e = c.face_edges(f, i);
      const int s = c.face_edge_sign(f, i);
      if (sign_seen[e] == 0) sign_seen[e] = s;
      else if (sign_seen[e] == s)
        throw Error(Error::InvalidArgument, "inconsistently oriented mesh");
    }
  }

  // Boundary loops must cover exactly the boundary edges.
  auto loops = trace_boundary_loops(mesh);
  std::set<std::pair<int, int>> from_faces, declared;
  for (const auto& loop : loops)
    for (size_t i = 0; i < loop.size(); ++i) {
      auto key = std::minmax(loop[i], loop[(i + 1) % loop.size()]);
      from_faces.insert(key);
    }
  for (const auto& loop : mesh.boundary_loops)
    for (size_t i = 0; i < loop.size(); ++i) {
      auto key = std::minmax(loop[i], loop[(i + 1) % loop.size()]);
      declared.insert(key);
    }
  if (from_faces != declared)
    throw Error(Error::InvalidArgument,
                "declared boundary loops do not match boundary edges");

  // Euler characteristic must be consistent with an orientable surface.
  const int E = c.num_edges();
  const int chi = V - E + mesh.num_faces();
  const int r = int(loops.size());
  if ((2 - chi - r) % 2 != 0 || 2 - chi - r < 0)
    throw Error(Error::InvalidArgument, "Euler characteristic inconsistent");

  // Positions must re-evaluate through the embedding map.
  if (mesh.space && mesh.space->has_embedding()) {
    double worst = 0;
    for (int v = 0; v < V; ++v) {
      const VecX f = mesh.space->embed(mesh.chart.row(v).transpose());
      const double scale = std::max(1.0, f.norm());
      worst = std::max(worst, (f - mesh.pos.row(v).transpose()).norm() / scale);
    }
    if (worst > 1e-10)
      throw Error(Error::InvalidArgument,
                  "ambient positions deviate from the embedded space (" +
                      std::to_string(worst) + ")");
  }
}

GenusBoundary genus_and_boundary(const ImmersedMesh& mesh) {
  validate_mesh(mesh);
  const MeshConnectivity c = build_connectivity(mesh);
  GenusBoundary gb;
  gb.euler = mesh.num_vertices() - c.num_edges() + mesh.num_faces();
  gb.boundary_components = int(mesh.boundary_loops.size());
  gb.genus = (2 - gb.euler - gb.boundary_components) / 2;
  return gb;
}

}  // namespace cmcix
