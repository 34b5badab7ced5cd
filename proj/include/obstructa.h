/* C API for the obstructa library: stabilizability and safety
 * obstruction tests for continuous-feedback control systems.
 *
 * All functions return OBX_OK on success. On failure they return a
 * status code and leave a human-readable message retrievable through
 * obx_last_error() (thread local). Strings returned through char**
 * parameters are heap-allocated and must be released with
 * obx_string_free(); handles must be released with the matching _free
 * function. Passing NULL handles is an error, not a crash.
 *
 * JSON option documents accepted by obx_analyze / obx_simulate /
 * obx_portrait are described in docs/formats.md.
 */
#ifndef OBSTRUCTA_H
#define OBSTRUCTA_H

#include <stddef.h>

#if defined(__GNUC__) && !defined(OBX_API)
#define OBX_API __attribute__((visibility("default")))
#elif !defined(OBX_API)
#define OBX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum obx_status {
  OBX_OK = 0,
  OBX_ERR_INVALID_ARGUMENT = 1,
  OBX_ERR_PARSE = 2,
  OBX_ERR_DOMAIN = 3,
  OBX_ERR_BLOWUP = 4,
  OBX_ERR_DEGREE = 5,
  OBX_ERR_UNSUPPORTED = 6,
  OBX_ERR_INTERNAL = 7
} obx_status;

typedef struct obx_expr obx_expr;     /* immutable scalar expression */
typedef struct obx_system obx_system; /* loaded system configuration */

OBX_API const char* obx_version(void);
OBX_API const char* obx_status_name(obx_status status);

/* Message for the most recent failure on this thread; never NULL. */
OBX_API const char* obx_last_error(void);

OBX_API void obx_string_free(char* s);

/* ----- scalar expressions ------------------------------------------- */

OBX_API obx_status obx_expr_parse(const char* text, obx_expr** out);
OBX_API void obx_expr_free(obx_expr* e);

/* Evaluate with `count` variable bindings given as parallel arrays. */
OBX_API obx_status obx_expr_eval(const obx_expr* e, const char* const* names,
                                 const double* values, size_t count,
                                 double* out);

OBX_API obx_status obx_expr_derivative(const obx_expr* e, const char* var,
                                       obx_expr** out);

OBX_API obx_status obx_expr_to_string(const obx_expr* e, char** out);

/* ----- systems -------------------------------------------------------- */

/* Builtin names: heisenberg, unicycle, ex3_field, ex4_field,
 * vertical_disk. */
OBX_API obx_status obx_system_builtin(const char* name, obx_system** out);
OBX_API obx_status obx_system_from_json(const char* config_json,
                                        obx_system** out);
OBX_API obx_status obx_system_to_json(const obx_system* sys, char** out);
OBX_API void obx_system_free(obx_system* sys);

/* ----- analyses ------------------------------------------------------- */

/* Stabilizability / safety analysis; returns the JSON report. */
OBX_API obx_status obx_analyze(const obx_system* sys,
                               const char* options_json, char** report_json);

/* Trajectory simulation; returns the CSV and a JSON summary report. */
OBX_API obx_status obx_simulate(const obx_system* sys,
                                const char* options_json, char** csv,
                                char** report_json);

/* Streamline phase portrait of a planar system as an SVG document. */
OBX_API obx_status obx_portrait(const obx_system* sys,
                                const char* options_json, char** svg);

/* Index (winding number) of the planar u = 0 section of the system about
 * (cx, cy) along a circle of the given radius. */
OBX_API obx_status obx_index(const obx_system* sys, double cx, double cy,
                             double radius, int* index);

/* ----- Euler characteristics ------------------------------------------ */

/* Finite cell complex from its JSON form; also returns the Betti numbers
 * as a JSON array (the homological route cross-checks the cell count). */
OBX_API obx_status obx_euler_complex(const char* complex_json, int* chi,
                                     char** betti_json);

OBX_API obx_status obx_euler_surface(int orientable, unsigned genus,
                                     unsigned boundary_components, int* chi);

/* Region over a declared space; OBX_ERR_UNSUPPORTED when the shape's
 * Euler characteristic is not determined by the supported rules. */
OBX_API obx_status obx_euler_region(const char* space_json,
                                    const char* region_json, int* chi);

#ifdef __cplusplus
}
#endif

#endif /* OBSTRUCTA_H */
