#include "cmcix.h"

#include "cmcix/ambient.hpp"
#include "cmcix/generate.hpp"
#include "cmcix/imesh_io.hpp"
#include "cmcix/report.hpp"
#include "cmcix/verifier.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>

using nlohmann::json;

struct cmcix_space {
  std::shared_ptr<const cmcix::AmbientSpace> impl;
};

struct cmcix_mesh {
  cmcix::ImmersedMesh impl;
};

namespace {

thread_local std::string g_last_error;

cmcix_status status_from(const cmcix::Error& e) {
  using C = cmcix::Error;
  switch (e.code()) {
    case C::InvalidArgument: return CMCIX_ERR_INVALID_ARGUMENT;
    case C::InvalidParameter: return CMCIX_ERR_INVALID_PARAMETER;
    case C::WindowViolation: return CMCIX_ERR_WINDOW_VIOLATION;
    case C::NoPositiveSolution: return CMCIX_ERR_NO_POSITIVE_SOLUTION;
    case C::ClosedFormOnly: return CMCIX_ERR_CLOSED_FORM_ONLY;
    case C::FamilySpaceMismatch: return CMCIX_ERR_FAMILY_SPACE_MISMATCH;
    case C::Parse: return CMCIX_ERR_PARSE;
    case C::Io: return CMCIX_ERR_IO;
    case C::Solver: return CMCIX_ERR_SOLVER;
    case C::Internal: return CMCIX_ERR_INTERNAL;
  }
  return CMCIX_ERR_INTERNAL;
}

std::once_flag g_thread_init;

void init_threads() {
  std::call_once(g_thread_init, [] {
    if (const char* env = std::getenv("CMCIX_THREADS")) {
      const int n = std::atoi(env);
      if (n > 0) Eigen::setNbThreads(n);
    }
  });
}

template <typename F>
cmcix_status guarded(F&& fn) {
  try {
    init_threads();
    fn();
    return CMCIX_OK;
  } catch (const cmcix::Error& e) {
    g_last_error = e.what();
    return status_from(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CMCIX_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CMCIX_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cmcix::RunConfig config_from_options(const char* options_json,
                                     const std::string& command) {
  cmcix::RunConfig cfg;
  if (options_json && options_json[0])
    cfg = cmcix::RunConfig::from_json(options_json);
  cfg.command = command;
  return cfg;
}

}  // namespace

extern "C" {

const char* cmcix_status_name(cmcix_status status) {
  switch (status) {
    case CMCIX_OK: return "ok";
    case CMCIX_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case CMCIX_ERR_INVALID_PARAMETER: return "invalid-parameter";
    case CMCIX_ERR_WINDOW_VIOLATION: return "window-violation";
    case CMCIX_ERR_NO_POSITIVE_SOLUTION: return "no-positive-solution";
    case CMCIX_ERR_CLOSED_FORM_ONLY: return "closed-form-only";
    case CMCIX_ERR_FAMILY_SPACE_MISMATCH: return "family-space-mismatch";
    case CMCIX_ERR_PARSE: return "parse-error";
    case CMCIX_ERR_IO: return "io-error";
    case CMCIX_ERR_SOLVER: return "solver-error";
    case CMCIX_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* cmcix_last_error(void) { return g_last_error.c_str(); }

void cmcix_string_free(char* text) { std::free(text); }

cmcix_status cmcix_space_create(const char* spec_json, cmcix_space** out) {
  if (!spec_json || !out) {
    g_last_error = "null argument";
    return CMCIX_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto space = std::make_shared<cmcix::AmbientSpace>(
        cmcix::SpaceSpec::from_json(spec_json));
    *out = new cmcix_space{std::move(space)};
  });
}

void cmcix_space_destroy(cmcix_space* space) { delete space; }

cmcix_status cmcix_space_info(const cmcix_space* space, char** json_out) {
  if (!space || !json_out) return CMCIX_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const auto& s = *space->impl;
    json j;
    j["space"] = json::parse(s.spec().to_json());
    j["d"] = s.dim();
    j["has_embedding"] = s.has_embedding();
    j["has_boundary"] = s.has_boundary();
    j["sup_sff_norm_sq"] = s.sup_sff_norm_sq();
    if (s.has_embedding()) j["scalar_curvature"] = s.inf_scalar();
    else j["scalar_curvature"] = s.scalar_curvature(cmcix::Vec3::Zero());
    if (const auto* t = s.torus_data()) {
      j["torus"] = {{"a1", t->a1}, {"a2", t->a2}, {"b1", t->b1},
                    {"b2", t->b2}, {"b3", t->b3},
                    {"C2", {t->C2[0], t->C2[1], t->C2[2]}},
                    {"residual", t->residual},
                    {"solution_manifold_dim", t->solution_manifold_dim},
                    {"window_as_printed_ok", t->window_as_printed_ok}};
    }
    *json_out = dup_string(j.dump(2));
  });
}

cmcix_status cmcix_space_threshold(const cmcix_space* space, double H, int has_H,
                                   char** json_out) {
  if (!space || !json_out) return CMCIX_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const cmcix::CheckItem item =
        cmcix::threshold_report(*space->impl, H, has_H != 0);
    *json_out = dup_string(
        cmcix::threshold_json(item, space->impl->spec(), H, has_H != 0));
  });
}

cmcix_status cmcix_threshold_pinched(const char* kind, double C, double aux,
                                     char** json_out) {
  if (!kind || !json_out) return CMCIX_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const std::string k = kind;
    const cmcix::ThresholdInfo t =
        (k == "scalar" || k == "scalar-pinched")
            ? cmcix::pinched_threshold(k, C, aux, 1.0)
            : cmcix::pinched_threshold(k, C, 1.0, aux);
    *json_out = dup_string(cmcix::pinched_json(k, C, t));
  });
}

cmcix_status cmcix_mesh_generate(const cmcix_space* space, const char* family_json,
                                 cmcix_mesh** out) {
  if (!space || !family_json || !out) return CMCIX_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    json j;
    try {
      j = json::parse(family_json);
    } catch (const json::exception& e) {
      throw cmcix::Error(cmcix::Error::Parse,
                         std::string("bad family JSON: ") + e.what());
    }
    cmcix::FamilySpec fs;
    fs.family = j.at("family").get<std::string>();
    fs.resolution = j.value("resolution", 32);
    fs.seed = j.value("seed", std::uint64_t(0));
    if (j.contains("params"))
      for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
        fs.params[it.key()] = it.value().get<double>();
    *out = new cmcix_mesh{cmcix::generate_surface(space->impl, fs)};
  });
}

void cmcix_mesh_destroy(cmcix_mesh* mesh) { delete mesh; }

cmcix_status cmcix_mesh_save(const cmcix_mesh* mesh, const char* path) {
  if (!mesh || !path) return CMCIX_ERR_INVALID_ARGUMENT;
  return guarded([&] { cmcix::save_imesh(mesh->impl, path); });
}

cmcix_status cmcix_mesh_load(const char* path, cmcix_mesh** out) {
  if (!path || !out) return CMCIX_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = new cmcix_mesh{cmcix::load_imesh(path)}; });
}

cmcix_status cmcix_mesh_info(const cmcix_mesh* mesh, char** json_out) {
  if (!mesh || !json_out) return CMCIX_ERR_INVALID_ARGUMENT;
  return guarded([&] { *json_out = dup_string(cmcix::mesh_info_json(mesh->impl)); });
}

cmcix_status cmcix_mesh_spectrum(const cmcix_mesh* mesh, const char* options_json,
                                 char** json_out) {
  if (!mesh || !json_out) return CMCIX_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    cmcix::RunConfig cfg = config_from_options(options_json, "spectrum");
    const cmcix::SurfaceGeometry geom = cmcix::compute_geometry(mesh->impl);
    const cmcix::JacobiAssembly assembly = cmcix::assemble(mesh->impl, geom);
    cmcix::SpectrumOptions sopts;
    sopts.k = cfg.k;
    sopts.seed = cfg.seed;
    sopts.eps_rel = cfg.eps_rel;
    const cmcix::TwistedSpectrum spectrum = cmcix::cmc_index(assembly, sopts);
    *json_out = dup_string(cmcix::spectrum_json(spectrum, cfg));
  });
}

cmcix_status cmcix_mesh_verify(const cmcix_mesh* mesh, const char* options_json,
                               char** json_out) {
  if (!mesh || !json_out) return CMCIX_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    cmcix::RunConfig cfg = config_from_options(options_json, "verify");
    cmcix::VerifyOptions vopts;
    vopts.checks = cfg.checks;
    vopts.etas = cfg.etas;
    vopts.k = cfg.k;
    vopts.seed = cfg.seed;
    vopts.eps_rel = cfg.eps_rel;
    vopts.prop32_tol = cfg.prop32_tol;
    const cmcix::VerificationReport report =
        cmcix::run_verification(mesh->impl, vopts);
    *json_out = dup_string(cmcix::report_json(report, cfg));
  });
}

cmcix_status cmcix_mesh_export_basis(const cmcix_mesh* mesh, const char* path) {
  if (!mesh || !path) return CMCIX_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const cmcix::SurfaceGeometry geom = cmcix::compute_geometry(mesh->impl);
    const cmcix::DecOperators dec = cmcix::build_dec(mesh->impl, geom);
    const auto basis = mesh->impl.boundary_loops.empty()
                           ? cmcix::harmonic_basis(mesh->impl, geom, dec)
                           : cmcix::tangential_harmonic_basis(mesh->impl, geom, dec);
    cmcix::export_basis(path, mesh->impl, dec, basis);
  });
}

}  // extern "C"
