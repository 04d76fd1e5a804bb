#include "cmcix/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace cmcix {

using nlohmann::json;

namespace {

json config_to_json_obj(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (!c.space_json.empty()) j["space"] = json::parse(c.space_json);
  if (!c.family.empty()) {
    j["family"] = c.family;
    j["family_params"] = json::object();
    for (const auto& [k, v] : c.family_params) j["family_params"][k] = v;
    j["resolution"] = c.resolution;
  }
  j["k"] = c.k;
  j["eps_rel"] = c.eps_rel;
  j["prop32_tol"] = c.prop32_tol;
  j["etas"] = c.etas;
  j["checks"] = c.checks;
  if (!c.output.empty()) j["output"] = c.output;
  j["seed"] = c.seed;
  return j;
}

json spectrum_obj(const TwistedSpectrum& s) {
  json j;
  j["eigenvalues"] = std::vector<double>(
      s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
  j["index"] = s.index;
  j["nullity"] = s.nullity;
  j["eps"] = s.eps;
  j["residuals"] = {{"max_mean", s.max_mean_residual}};
  j["converged"] = s.converged;
  return j;
}

json item_obj(const CheckItem& it) {
  json j;
  j["name"] = it.name;
  j["anchor"] = it.anchor;
  j["residual"] = it.residual;
  j["threshold"] = it.threshold;
  j["verdict"] = it.verdict;
  if (!it.note.empty()) j["note"] = it.note;
  if (!it.values.empty()) {
    j["values"] = json::object();
    for (const auto& [k, v] : it.values) j["values"][k] = v;
  }
  return j;
}

}  // namespace

std::string RunConfig::to_json() const { return config_to_json_obj(*this).dump(2); }

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Error::Parse, std::string("bad config JSON: ") + e.what());
  }
  RunConfig c;
  c.command = j.value("command", "");
  if (j.contains("space")) c.space_json = j["space"].dump();
  c.family = j.value("family", "");
  if (j.contains("family_params"))
    for (auto it = j["family_params"].begin(); it != j["family_params"].end(); ++it)
      c.family_params[it.key()] = it.value().get<double>();
  c.resolution = j.value("resolution", 32);
  c.k = j.value("k", 8);
  c.eps_rel = j.value("eps_rel", 0.02);
  c.prop32_tol = j.value("prop32_tol", 0.02);
  if (j.contains("etas")) c.etas = j["etas"].get<std::vector<double>>();
  if (j.contains("checks")) c.checks = j["checks"].get<std::vector<std::string>>();
  c.output = j.value("output", "");
  c.seed = j.value("seed", std::uint64_t(0));
  return c;
}

std::string spectrum_json(const TwistedSpectrum& spectrum, const RunConfig& config) {
  json j;
  j["provenance"] = {{"config", config_to_json_obj(config)}};
  j["spectrum"] = spectrum_obj(spectrum);
  return j.dump(2);
}

std::string report_json(const VerificationReport& report, const RunConfig& config) {
  json j;
  j["provenance"] = {{"config", config_to_json_obj(config)},
                     {"space", json::parse(report.space_json)},
                     {"family", report.family},
                     {"resolution", report.resolution},
                     {"seed", report.seed}};
  j["geometry"] = {{"genus", report.genus},
                   {"r", report.boundary_components},
                   {"area", report.area},
                   {"H_stats",
                    {{"min", report.h_min},
                     {"max", report.h_max},
                     {"mean", report.h_mean}}}};
  if (report.spectrum) j["spectrum"] = spectrum_obj(*report.spectrum);
  j["checks"] = json::array();
  for (const auto& it : report.items) j["checks"].push_back(item_obj(it));
  j["thresholds"] = {{"H2", report.threshold_H2},
                     {"none_required", report.threshold_none_required}};
  j["summary"] = report.summary;
  return j.dump(2);
}

std::string threshold_json(const CheckItem& item, const SpaceSpec& spec, double H,
                           bool has_H) {
  json j;
  j["space"] = json::parse(spec.to_json());
  if (has_H) j["H"] = H;
  j["threshold"] = item_obj(item);
  return j.dump(2);
}

std::string pinched_json(const std::string& kind, double C, const ThresholdInfo& t) {
  json j;
  j["kind"] = kind;
  j["C"] = C;
  j["threshold"] = t.value;
  j["none_required"] = t.none_required;
  return j.dump(2);
}

std::string mesh_info_json(const ImmersedMesh& mesh) {
  const GenusBoundary gb = genus_and_boundary(mesh);
  const MeshConnectivity conn = build_connectivity(mesh);
  json j;
  j["space"] = json::parse(mesh.space->spec().to_json());
  j["family"] = mesh.tag.family;
  j["resolution"] = mesh.tag.resolution;
  j["vertices"] = mesh.num_vertices();
  j["edges"] = conn.num_edges();
  j["faces"] = mesh.num_faces();
  j["genus"] = gb.genus;
  j["boundary_components"] = gb.boundary_components;
  j["euler"] = gb.euler;
  return j.dump(2);
}

std::string error_json(int code, const std::string& name, const std::string& message) {
  json j;
  j["error"] = {{"code", code}, {"name", name}, {"message", message}};
  return j.dump();
}

void export_basis(const std::string& path, const ImmersedMesh& mesh,
                  const DecOperators& dec, const std::vector<HarmonicField>& basis) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Error::Io, "cannot open for writing: " + path);
  const int E = dec.conn.num_edges();
  f << "CMCIX-BASIS 1\n";
  f << "edges " << E << " fields " << basis.size() << "\n";
  char buf[40];
  for (int e = 0; e < E; ++e) {
    f << dec.conn.edges(e, 0) << " " << dec.conn.edges(e, 1);
    for (const auto& field : basis) {
      std::snprintf(buf, sizeof(buf), "%.17g", field.form[e]);
      f << " " << buf;
    }
    f << "\n";
  }
  for (const auto& field : basis)
    f << (field.form_is_rotated ? "rotated" : "direct") << " "
      << (field.tangential ? "tangential" : "free") << "\n";
  if (!f) throw Error(Error::Io, "write failed: " + path);
}

}  // namespace cmcix
