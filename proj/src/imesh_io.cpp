#include "cmcix/imesh_io.hpp"

#include "cmcix/generate.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cmcix {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Which two chart coordinates the stored surface parameters occupy, and
// the value of the remaining (fixed) coordinate.
struct ParamSlots {
  int a = 0, b = 1, fixed = 2;
  double fixed_value = 0;
};

ParamSlots param_slots(const std::string& family,
                       const std::map<std::string, double>& params) {
  auto param = [&](const std::string& key, double dflt) {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  const std::string fam = canonical_family_name(family);
  ParamSlots s;
  if (fam == "slice-sphere" || fam == "slice-torus") {
    s.fixed_value = param("t", 0.0);
  } else if (fam == "subtorus") {
    s.fixed_value = param("w", 0.0);
  } else if (fam == "clifford") {
    s = {1, 2, 0, kPi / 4.0};
  }
  return s;  // d = 3 families: chart equals position, slots cosmetic
}

}  // namespace

std::string imesh_to_string(const ImmersedMesh& mesh) {
  std::ostringstream out;
  out << "IMESH 1\n";
  json header;
  header["family"] = mesh.tag.family;
  header["params"] = json::object();
  for (const auto& [k, v] : mesh.tag.params) header["params"][k] = v;
  header["resolution"] = mesh.tag.resolution;
  header["seed"] = mesh.tag.seed;
  header["space"] = json::parse(mesh.space->spec().to_json());
  out << header.dump() << "\n";

  const int V = mesh.num_vertices();
  const int d = mesh.ambient_dim();
  const ParamSlots slots = param_slots(mesh.tag.family, mesh.tag.params);
  out << "V " << V << "\n";
  for (int v = 0; v < V; ++v) {
    out << fmt_double(mesh.chart(v, slots.a)) << " "
        << fmt_double(mesh.chart(v, slots.b));
    for (int a = 0; a < d; ++a) out << " " << fmt_double(mesh.pos(v, a));
    out << "\n";
  }
  out << "F " << mesh.num_faces() << "\n";
  for (int f = 0; f < mesh.num_faces(); ++f)
    out << mesh.faces(f, 0) << " " << mesh.faces(f, 1) << " " << mesh.faces(f, 2)
        << "\n";
  if (!mesh.boundary_loops.empty()) {
    out << "B " << mesh.boundary_loops.size() << "\n";
    for (const auto& loop : mesh.boundary_loops) {
      for (size_t i = 0; i < loop.size(); ++i)
        out << (i ? " " : "") << loop[i];
      out << "\n";
    }
  }
  return out.str();
}

void save_imesh(const ImmersedMesh& mesh, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Error::Io, "cannot open for writing: " + path);
  f << imesh_to_string(mesh);
  if (!f) throw Error(Error::Io, "write failed: " + path);
}

ImmersedMesh imesh_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "IMESH 1")
    throw Error(Error::Parse, "bad IMESH magic");
  if (!std::getline(in, line)) throw Error(Error::Parse, "missing header");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(Error::Parse, std::string("bad IMESH header: ") + e.what());
  }

  ImmersedMesh mesh;
  mesh.space = std::make_shared<AmbientSpace>(
      SpaceSpec::from_json(header.at("space").dump()));
  mesh.tag.family = header.at("family").get<std::string>();
  mesh.tag.resolution = header.value("resolution", 0);
  mesh.tag.seed = header.value("seed", std::uint64_t(0));
  if (header.contains("params"))
    for (auto it = header["params"].begin(); it != header["params"].end(); ++it)
      mesh.tag.params[it.key()] = it.value().get<double>();

  const int d = mesh.space->dim();
  const ParamSlots slots = param_slots(mesh.tag.family, mesh.tag.params);
  std::string tok;
  int count = 0;
  if (!(in >> tok >> count) || tok != "V")
    throw Error(Error::Parse, "missing vertex section");
  mesh.chart.resize(count, 3);
  mesh.pos.resize(count, d);
  for (int v = 0; v < count; ++v) {
    double u, w;
    if (!(in >> u >> w)) throw Error(Error::Parse, "truncated vertex line");
    for (int a = 0; a < d; ++a)
      if (!(in >> mesh.pos(v, a))) throw Error(Error::Parse, "truncated vertex line");
    if (d == 3) {
      mesh.chart.row(v) = mesh.pos.row(v);
    } else {
      mesh.chart(v, slots.a) = u;
      mesh.chart(v, slots.b) = w;
      mesh.chart(v, slots.fixed) = slots.fixed_value;
    }
  }
  if (!(in >> tok >> count) || tok != "F")
    throw Error(Error::Parse, "missing face section");
  mesh.faces.resize(count, 3);
  for (int f = 0; f < count; ++f)
    if (!(in >> mesh.faces(f, 0) >> mesh.faces(f, 1) >> mesh.faces(f, 2)))
      throw Error(Error::Parse, "truncated face line");
  if (in >> tok) {
    if (tok != "B") throw Error(Error::Parse, "unexpected section " + tok);
    if (!(in >> count)) throw Error(Error::Parse, "bad boundary count");
    std::getline(in, line);  // consume rest of the B line
    for (int l = 0; l < count; ++l) {
      if (!std::getline(in, line)) throw Error(Error::Parse, "missing loop line");
      std::istringstream ls(line);
      std::vector<int> loop;
      int idx;
      while (ls >> idx) loop.push_back(idx);
      if (loop.empty()) throw Error(Error::Parse, "empty boundary loop");
      mesh.boundary_loops.push_back(std::move(loop));
    }
  }
  validate_mesh(mesh);
  return mesh;
}

ImmersedMesh load_imesh(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Error::Io, "cannot open: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return imesh_from_string(buf.str());
}

}  // namespace cmcix
