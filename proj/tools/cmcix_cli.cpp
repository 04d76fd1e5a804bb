// Batch CLI for the cmc-index-lab engine. All functionality is reached
// through the shared-library C API (cmcix.h).
//
// Exit codes: 0 pass, 2 fail, 3 not-applicable-only, 4 input error.

#include "cmcix.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 2;
constexpr int kExitNotApplicable = 3;
constexpr int kExitInputError = 4;

struct SpaceFlags {
  std::string name;
  double r = 1.0;
  double alpha = 0.5, beta = 0.8660254037844386;
  int k1 = 1, l1 = 1, k2 = 2, l2 = 1;
  double r1 = 1.0, r2 = 1.0;
  double kappa = 8.0, tau = 1.0;
};

void add_space_flags(CLI::App* cmd, SpaceFlags& sf) {
  cmd->add_option("--space", sf.name, "space name (r3, ball, s2xr, t2xr, rect, t3, s3, berger, hexagonal)")
      ->required();
  cmd->add_option("--r", sf.r, "sphere-factor radius (s2xr)");
  cmd->add_option("--alpha", sf.alpha, "torus lattice alpha (t2xr)");
  cmd->add_option("--beta", sf.beta, "torus lattice beta (t2xr, rect)");
  cmd->add_option("--k1", sf.k1, "lattice integer k1 (t2xr)");
  cmd->add_option("--l1", sf.l1, "lattice integer l1 (t2xr)");
  cmd->add_option("--k2", sf.k2, "lattice integer k2 (t2xr)");
  cmd->add_option("--l2", sf.l2, "lattice integer l2 (t2xr)");
  cmd->add_option("--r1", sf.r1, "first circle radius (t3)");
  cmd->add_option("--r2", sf.r2, "second circle radius (t3)");
  cmd->add_option("--kappa", sf.kappa, "Berger kappa");
  cmd->add_option("--tau", sf.tau, "Berger tau");
}

std::string space_spec_json(const SpaceFlags& sf) {
  json j;
  j["name"] = sf.name;
  if (sf.name == "s2xr") j["r"] = sf.r;
  if (sf.name == "t2xr") {
    j["alpha"] = sf.alpha;
    j["beta"] = sf.beta;
    j["k1"] = sf.k1; j["l1"] = sf.l1; j["k2"] = sf.k2; j["l2"] = sf.l2;
  }
  if (sf.name == "rect") j["beta"] = sf.beta;
  if (sf.name == "t3") { j["r1"] = sf.r1; j["r2"] = sf.r2; }
  if (sf.name == "berger") { j["kappa"] = sf.kappa; j["tau"] = sf.tau; }
  return j.dump();
}

int fail_with(cmcix_status status) {
  std::cerr << "{\"error\":{\"code\":" << int(status) << ",\"name\":\""
            << cmcix_status_name(status) << "\",\"message\":"
            << json(std::string(cmcix_last_error())).dump() << "}}\n";
  return kExitInputError;
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(output, std::ios::binary);
  f << text << "\n";
}

struct StringOut {
  char* ptr = nullptr;
  ~StringOut() { cmcix_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

int run_mesh(const SpaceFlags& sf, const std::string& family, int res,
             std::uint64_t seed, const json& params, const std::string& output) {
  cmcix_space* space = nullptr;
  cmcix_status st = cmcix_space_create(space_spec_json(sf).c_str(), &space);
  if (st != CMCIX_OK) return fail_with(st);
  std::unique_ptr<cmcix_space, decltype(&cmcix_space_destroy)> space_guard(
      space, &cmcix_space_destroy);

  json fam;
  fam["family"] = family;
  fam["resolution"] = res;
  fam["seed"] = seed;
  fam["params"] = params;
  cmcix_mesh* mesh = nullptr;
  st = cmcix_mesh_generate(space, fam.dump().c_str(), &mesh);
  if (st != CMCIX_OK) return fail_with(st);
  std::unique_ptr<cmcix_mesh, decltype(&cmcix_mesh_destroy)> mesh_guard(
      mesh, &cmcix_mesh_destroy);

  if (!output.empty()) {
    st = cmcix_mesh_save(mesh, output.c_str());
    if (st != CMCIX_OK) return fail_with(st);
  }
  StringOut info;
  st = cmcix_mesh_info(mesh, &info.ptr);
  if (st != CMCIX_OK) return fail_with(st);
  std::cout << info.str() << "\n";
  return kExitPass;
}

int report_exit_code(const std::string& report_text) {
  json j = json::parse(report_text);
  const std::string summary = j.value("summary", "pass");
  if (summary == "fail") return kExitFail;
  if (summary == "not-applicable") return kExitNotApplicable;
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cmc-index-lab: spectral checks for CMC surfaces in embedded 3-manifolds"};
  app.require_subcommand(1);

  // ---- mesh ----
  auto* mesh_cmd = app.add_subcommand("mesh", "generate a model surface mesh");
  SpaceFlags mesh_space;
  std::string family, mesh_output;
  int mesh_res = 32;
  std::uint64_t mesh_seed = 0;
  double radius = 1.0, slice_t = 0.0, slice_w = 0.0, cap_H = 1.0, inner = 0.4,
         jitter = 0.0;
  add_space_flags(mesh_cmd, mesh_space);
  mesh_cmd->add_option("--family", family, "surface family")->required();
  mesh_cmd->add_option("--res", mesh_res, "resolution");
  mesh_cmd->add_option("--seed", mesh_seed, "seed");
  mesh_cmd->add_option("--radius", radius, "sphere radius");
  mesh_cmd->add_option("--t", slice_t, "slice coordinate");
  mesh_cmd->add_option("--w", slice_w, "subtorus coordinate");
  mesh_cmd->add_option("--H", cap_H, "cap mean curvature");
  mesh_cmd->add_option("--inner", inner, "annulus inner radius");
  mesh_cmd->add_option("--jitter", jitter, "on-space vertex jitter fraction");
  mesh_cmd->add_option("-o,--output", mesh_output, "output IMESH path");

  // ---- spectrum ----
  auto* spec_cmd = app.add_subcommand("spectrum", "twisted Jacobi spectrum of a mesh");
  std::string spec_input, spec_output, spec_config;
  int spec_k = 8;
  std::uint64_t spec_seed = 0;
  double spec_eps = 0.02;
  spec_cmd->add_option("mesh", spec_input, "IMESH file")->required();
  spec_cmd->add_option("-k,--eigenpairs", spec_k, "number of eigenpairs");
  spec_cmd->add_option("--seed", spec_seed, "seed");
  spec_cmd->add_option("--eps-rel", spec_eps, "eigenvalue tolerance, relative");
  spec_cmd->add_option("--config", spec_config, "RunConfig JSON file (overrides flags)");
  spec_cmd->add_option("-o,--output", spec_output, "output JSON path");

  // ---- verify ----
  auto* verify_cmd = app.add_subcommand("verify", "run the identity/bound checks");
  std::string verify_input, verify_output, verify_checks, verify_config,
      verify_basis;
  int verify_k = 8;
  std::uint64_t verify_seed = 0;
  double verify_eps = 0.02, verify_tol = 0.02;
  std::vector<double> verify_etas;
  verify_cmd->add_option("mesh", verify_input, "IMESH file")->required();
  verify_cmd->add_option("--checks", verify_checks,
                         "comma list: admissible,prop32,keystep,pencil,bound,concentration");
  verify_cmd->add_option("--eta", verify_etas, "concentration threshold (repeatable)");
  verify_cmd->add_option("-k,--eigenpairs", verify_k, "number of eigenpairs");
  verify_cmd->add_option("--seed", verify_seed, "seed");
  verify_cmd->add_option("--eps-rel", verify_eps, "eigenvalue tolerance, relative");
  verify_cmd->add_option("--prop32-tol", verify_tol, "identity tolerance, relative");
  verify_cmd->add_option("--config", verify_config, "RunConfig JSON file (overrides flags)");
  verify_cmd->add_option("--export-basis", verify_basis,
                         "write the harmonic basis per-edge table here");
  verify_cmd->add_option("-o,--output", verify_output, "output JSON path");

  // ---- threshold ----
  auto* thr_cmd = app.add_subcommand("threshold", "mean-curvature thresholds");
  SpaceFlags thr_space;
  double thr_H = 0.0, thr_C = 0.5, thr_HM2 = 1.0, thr_k1 = 1.0;
  std::string thr_kind = "scalar", thr_output;
  bool thr_has_H = false;
  thr_cmd->add_option("--space", thr_space.name,
                      "space name or 'pinched'")->required();
  thr_cmd->add_option("--r", thr_space.r, "sphere-factor radius (s2xr)");
  thr_cmd->add_option("--alpha", thr_space.alpha, "torus lattice alpha");
  thr_cmd->add_option("--beta", thr_space.beta, "torus lattice beta");
  thr_cmd->add_option("--k1", thr_space.k1, "lattice integer k1");
  thr_cmd->add_option("--l1", thr_space.l1, "lattice integer l1");
  thr_cmd->add_option("--k2", thr_space.k2, "lattice integer k2");
  thr_cmd->add_option("--l2", thr_space.l2, "lattice integer l2");
  thr_cmd->add_option("--r1", thr_space.r1, "first circle radius (t3)");
  thr_cmd->add_option("--r2", thr_space.r2, "second circle radius (t3)");
  thr_cmd->add_option("--kappa", thr_space.kappa, "Berger kappa");
  thr_cmd->add_option("--tau", thr_space.tau, "Berger tau");
  auto* h_opt = thr_cmd->add_option("--H", thr_H, "mean curvature to test");
  thr_cmd->add_option("--kind", thr_kind, "pinched kind: scalar or convex");
  thr_cmd->add_option("--C", thr_C, "pinching constant");
  thr_cmd->add_option("--HM2", thr_HM2, "sup |H_M|^2 (scalar pinched)");
  thr_cmd->add_option("--kmin", thr_k1, "smallest principal curvature (convex pinched)");
  thr_cmd->add_option("-o,--output", thr_output, "output JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "{\"error\":{\"code\":" << kExitInputError
              << ",\"name\":\"usage\",\"message\":" << json(std::string(e.what())).dump()
              << "}}\n";
    return kExitInputError;
  }

  if (mesh_cmd->parsed()) {
    json params = json::object();
    if (mesh_cmd->count("--radius")) params["radius"] = radius;
    if (mesh_cmd->count("--t")) params["t"] = slice_t;
    if (mesh_cmd->count("--w")) params["w"] = slice_w;
    if (mesh_cmd->count("--H")) params["H"] = cap_H;
    if (mesh_cmd->count("--inner")) params["inner"] = inner;
    if (mesh_cmd->count("--jitter")) params["jitter"] = jitter;
    return run_mesh(mesh_space, family, mesh_res, mesh_seed, params, mesh_output);
  }

  if (spec_cmd->parsed()) {
    cmcix_mesh* mesh = nullptr;
    cmcix_status st = cmcix_mesh_load(spec_input.c_str(), &mesh);
    if (st != CMCIX_OK) return fail_with(st);
    std::unique_ptr<cmcix_mesh, decltype(&cmcix_mesh_destroy)> guard(
        mesh, &cmcix_mesh_destroy);
    json opts;
    if (!spec_config.empty()) {
      std::ifstream f(spec_config);
      if (!f) return fail_with(CMCIX_ERR_IO);
      try {
        f >> opts;
      } catch (const json::exception&) {
        return fail_with(CMCIX_ERR_PARSE);
      }
    } else {
      opts = {{"k", spec_k}, {"seed", spec_seed}, {"eps_rel", spec_eps}};
    }
    opts["command"] = "spectrum";
    StringOut out;
    st = cmcix_mesh_spectrum(mesh, opts.dump().c_str(), &out.ptr);
    if (st != CMCIX_OK) return fail_with(st);
    emit(out.str(), spec_output);
    return kExitPass;
  }

  if (verify_cmd->parsed()) {
    cmcix_mesh* mesh = nullptr;
    cmcix_status st = cmcix_mesh_load(verify_input.c_str(), &mesh);
    if (st != CMCIX_OK) return fail_with(st);
    std::unique_ptr<cmcix_mesh, decltype(&cmcix_mesh_destroy)> guard(
        mesh, &cmcix_mesh_destroy);
    json opts;
    if (!verify_config.empty()) {
      std::ifstream f(verify_config);
      if (!f) return fail_with(CMCIX_ERR_IO);
      try {
        f >> opts;
      } catch (const json::exception&) {
        return fail_with(CMCIX_ERR_PARSE);
      }
    } else {
      opts = {{"k", verify_k},
              {"seed", verify_seed},
              {"eps_rel", verify_eps},
              {"prop32_tol", verify_tol}};
      json checks = json::array();
      if (!verify_checks.empty()) {
        std::string item;
        std::istringstream ss(verify_checks);
        while (std::getline(ss, item, ',')) checks.push_back(item);
      }
      opts["checks"] = checks;
      if (!verify_etas.empty()) opts["etas"] = verify_etas;
    }
    opts["command"] = "verify";
    StringOut out;
    st = cmcix_mesh_verify(mesh, opts.dump().c_str(), &out.ptr);
    if (st != CMCIX_OK) return fail_with(st);
    if (!verify_basis.empty()) {
      st = cmcix_mesh_export_basis(mesh, verify_basis.c_str());
      if (st != CMCIX_OK) return fail_with(st);
    }
    emit(out.str(), verify_output);
    return report_exit_code(out.str());
  }

  if (thr_cmd->parsed()) {
    StringOut out;
    cmcix_status st;
    if (thr_space.name == "pinched") {
      const double aux = (thr_kind == "convex") ? thr_k1 : thr_HM2;
      st = cmcix_threshold_pinched(thr_kind.c_str(), thr_C, aux, &out.ptr);
    } else {
      cmcix_space* space = nullptr;
      st = cmcix_space_create(space_spec_json(thr_space).c_str(), &space);
      if (st != CMCIX_OK) return fail_with(st);
      std::unique_ptr<cmcix_space, decltype(&cmcix_space_destroy)> guard(
          space, &cmcix_space_destroy);
      st = cmcix_space_threshold(space, thr_H, h_opt->count() > 0 ? 1 : 0,
                                 &out.ptr);
    }
    if (st != CMCIX_OK) return fail_with(st);
    emit(out.str(), thr_output);
    return kExitPass;
  }

  return kExitInputError;
}
