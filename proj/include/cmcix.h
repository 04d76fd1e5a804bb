/* C API for the cmc-index-lab engine.
 *
 * All functions return a cmcix_status; CMCIX_OK is zero. Handles are
 * opaque and must be released with their destroy function. Structured
 * results are returned as JSON strings allocated by the library; release
 * them with cmcix_string_free. On failure cmcix_last_error() returns a
 * thread-local description of the most recent error.
 */

#ifndef CMCIX_H
#define CMCIX_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cmcix_space cmcix_space;
typedef struct cmcix_mesh cmcix_mesh;

typedef enum cmcix_status {
  CMCIX_OK = 0,
  CMCIX_ERR_INVALID_ARGUMENT = 1,
  CMCIX_ERR_INVALID_PARAMETER = 2,
  CMCIX_ERR_WINDOW_VIOLATION = 3,
  CMCIX_ERR_NO_POSITIVE_SOLUTION = 4,
  CMCIX_ERR_CLOSED_FORM_ONLY = 5,
  CMCIX_ERR_FAMILY_SPACE_MISMATCH = 6,
  CMCIX_ERR_PARSE = 7,
  CMCIX_ERR_IO = 8,
  CMCIX_ERR_SOLVER = 9,
  CMCIX_ERR_INTERNAL = 10
} cmcix_status;

const char* cmcix_status_name(cmcix_status status);
const char* cmcix_last_error(void);
void cmcix_string_free(char* text);

/* Spaces. spec_json example: {"name":"s2xr","r":1.0}; presets such as
 * {"name":"hexagonal"} are accepted. */
cmcix_status cmcix_space_create(const char* spec_json, cmcix_space** out);
void cmcix_space_destroy(cmcix_space* space);
cmcix_status cmcix_space_info(const cmcix_space* space, char** json_out);
/* Threshold report; pass has_H = 0 when no mean curvature is supplied. */
cmcix_status cmcix_space_threshold(const cmcix_space* space, double H, int has_H,
                                   char** json_out);
/* Pinched-ambient thresholds. kind: "scalar" (aux = sup |H_M|^2) or
 * "convex" (aux = k1). */
cmcix_status cmcix_threshold_pinched(const char* kind, double C, double aux,
                                     char** json_out);

/* Meshes. family_json example:
 * {"family":"clifford","resolution":64,"seed":1,"params":{}} */
cmcix_status cmcix_mesh_generate(const cmcix_space* space, const char* family_json,
                                 cmcix_mesh** out);
void cmcix_mesh_destroy(cmcix_mesh* mesh);
cmcix_status cmcix_mesh_save(const cmcix_mesh* mesh, const char* path);
cmcix_status cmcix_mesh_load(const char* path, cmcix_mesh** out);
cmcix_status cmcix_mesh_info(const cmcix_mesh* mesh, char** json_out);

/* Twisted spectrum. options_json: {"k":8,"seed":0,"eps_rel":0.02} */
cmcix_status cmcix_mesh_spectrum(const cmcix_mesh* mesh, const char* options_json,
                                 char** json_out);

/* Verification report. options_json:
 * {"checks":["admissible","prop32"],"etas":[0.0],"k":8,"seed":0}
 * An empty checks list runs everything applicable. */
cmcix_status cmcix_mesh_verify(const cmcix_mesh* mesh, const char* options_json,
                               char** json_out);

/* Per-edge harmonic basis table next to an IMESH file. */
cmcix_status cmcix_mesh_export_basis(const cmcix_mesh* mesh, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* CMCIX_H */
