#pragma once

// JSON report emission and the serializable run configuration. Identical
// configuration and seed produce byte-identical JSON; no wall-clock data
// is embedded.

#include "cmcix/harmonic.hpp"
#include "cmcix/verifier.hpp"

#include <string>

namespace cmcix {

struct RunConfig {
  std::string command;
  std::string space_json;   // SpaceSpec JSON
  std::string family;
  std::map<std::string, double> family_params;
  int resolution = 32;
  int k = 8;
  double eps_rel = 0.02;
  double prop32_tol = 0.02;
  std::vector<double> etas{0.0};
  std::vector<std::string> checks;
  std::string output;
  std::uint64_t seed = 0;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
};

std::string spectrum_json(const TwistedSpectrum& spectrum, const RunConfig& config);

// Full verification report: provenance, geometry summary, spectrum block,
// check items, thresholds.
std::string report_json(const VerificationReport& report, const RunConfig& config);

std::string threshold_json(const CheckItem& item, const SpaceSpec& spec, double H,
                           bool has_H);
std::string pinched_json(const std::string& kind, double C, const ThresholdInfo& t);

std::string mesh_info_json(const ImmersedMesh& mesh);

std::string error_json(int code, const std::string& name, const std::string& message);

// Per-edge scalar table of a harmonic basis next to the IMESH file.
void export_basis(const std::string& path, const ImmersedMesh& mesh,
                  const DecOperators& dec, const std::vector<HarmonicField>& basis);

}  // namespace cmcix
