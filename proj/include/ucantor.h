#ifndef UCANTOR_H
#define UCANTOR_H

/* C interface of the ucantor shared library: weighted trees of ultrametric
 * Cantor sets behind opaque handles, plus a single-call report runner.
 * Every fallible function returns a status code; the message behind the
 * most recent failure is kept per thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__) && !defined(_WIN32)
#define UCANTOR_API __attribute__((visibility("default")))
#else
#define UCANTOR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  UCANTOR_OK = 0,
  UCANTOR_EINVAL = 1,    /* bad parameter value */
  UCANTOR_EDOMAIN = 2,   /* input violates a mathematical precondition */
  UCANTOR_EPARSE = 3,    /* malformed document */
  UCANTOR_EIO = 4,       /* filesystem failure */
  UCANTOR_EINTERNAL = 5  /* invariant breach inside the library */
} ucantor_status;

/* Opaque weighted rooted tree with monotone weights (a Michon tree). */
typedef struct ucantor_tree ucantor_tree;

UCANTOR_API const char* ucantor_version(void);

/* Message of this thread's most recent failing call, empty if none.
 * Valid until the thread's next library call. */
UCANTOR_API const char* ucantor_last_error(void);

/* ---- trees ---------------------------------------------------------- */

UCANTOR_API ucantor_status ucantor_tree_from_json(const char* text,
                                                  ucantor_tree** out);
UCANTOR_API ucantor_status ucantor_tree_load(const char* path,
                                             ucantor_tree** out);

/* Canonical JSON, byte-stable across runs (17 significant digits).
 * Release the text with ucantor_text_free. */
UCANTOR_API ucantor_status ucantor_tree_to_json(const ucantor_tree* t,
                                                char** out_text);
UCANTOR_API ucantor_status ucantor_tree_save(const ucantor_tree* t,
                                             const char* path);

/* Contract unary chains; boundary distances are preserved. */
UCANTOR_API ucantor_status ucantor_tree_reduce(const ucantor_tree* t,
                                               ucantor_tree** out);

/* Telescoped tree: each level-(k+1) cell is a maximal descendant whose
 * weight dropped below delta times its level-k cell. delta in (0,1). */
UCANTOR_API ucantor_status ucantor_tree_telescope(const ucantor_tree* t,
                                                  double delta,
                                                  ucantor_tree** out);

UCANTOR_API ucantor_status ucantor_tree_stats(const ucantor_tree* t,
                                              uint64_t* vertices,
                                              uint32_t* max_depth,
                                              double* root_weight,
                                              int* reduced);

/* ---- generators ------------------------------------------------------ */

/* Reduced tree of centered cylinder words of the rotation subshift.
 * alpha: "golden", "sqrt2", "e", "(p+q√d)/r", or a float in (0,1);
 * depth is the cell radius cutoff. */
UCANTOR_API ucantor_status ucantor_sturmian_tree(const char* alpha,
                                                 size_t depth,
                                                 ucantor_tree** out);

/* Michon tree of the Bratteli diagram of the substitution system described
 * by the JSON text (same document the CLI accepts). */
UCANTOR_API ucantor_status ucantor_sadic_tree(const char* system_json,
                                              size_t depth,
                                              ucantor_tree** out);

/* Galton-Watson tree with multiplicative random weights. offspring and
 * weights use the textual forms ("dirac:3", "uniform:2,3", "table:...");
 * the draw is a pure function of seed. */
UCANTOR_API ucantor_status ucantor_gw_tree(const char* offspring,
                                           const char* weights,
                                           uint32_t depth, uint64_t seed,
                                           ucantor_tree** out);

UCANTOR_API void ucantor_tree_free(ucantor_tree* t);

/* ---- reports --------------------------------------------------------- */

/* Runs the tool named by the config JSON ({"tool": "...", ...}) and returns
 * the report document. The report embeds the fully-resolved config; feeding
 * that config back reproduces the report byte for byte. Release the text
 * with ucantor_text_free. */
UCANTOR_API ucantor_status ucantor_run(const char* config_json,
                                       char** out_report);

UCANTOR_API void ucantor_text_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* UCANTOR_H */
