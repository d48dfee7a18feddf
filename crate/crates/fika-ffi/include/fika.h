#ifndef FIKA_H
#define FIKA_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible API call.
 */
typedef enum FikaStatus {
  FIKA_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  FIKA_STATUS_NULL_ARGUMENT = 1,
  /*
   An input string was not valid UTF-8.
   */
  FIKA_STATUS_INVALID_UTF8 = 2,
  /*
   The input could not be parsed; details via `fika_last_error_message`.
   */
  FIKA_STATUS_PARSE_ERROR = 3,
  /*
   Internal serialization failure.
   */
  FIKA_STATUS_SERIALIZE_ERROR = 4,
} FikaStatus;

/*
 Call graph plus the enumerated entry-to-library paths for one model.
 */
typedef struct FikaAnalysis FikaAnalysis;

/*
 Merged line coverage evidence.
 */
typedef struct FikaCoverage FikaCoverage;

/*
 Parsed, validated code model.
 */
typedef struct FikaModel FikaModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or null after a
 success. The pointer stays valid until the next failing call on the same
 thread; do not free it.
 */
const char *fika_last_error_message(void);

/*
 Releases a string returned through an out parameter.

 # Safety
 `text` must be a pointer previously returned by this library, or null.
 */
void fika_string_free(char *text);

/*
 Parses a JSON code model into a new handle.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid location.
 */
enum FikaStatus fika_model_from_json(const char *text, struct FikaModel **out);

/*
 Parses a fixture DSL code model into a new handle.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid location.
 */
enum FikaStatus fika_model_from_dsl(const char *text, struct FikaModel **out);

/*
 Releases a model handle.

 # Safety
 `model` must come from a `fika_model_from_*` call, or be null.
 */
void fika_model_free(struct FikaModel *model);

/*
 Copies the model's project identifier into `out`.

 # Safety
 `model` must be a live model handle and `out` a valid location.
 */
enum FikaStatus fika_model_project_id(const struct FikaModel *model, char **out);

/*
 Builds the call graph and shortest-path inventory for a model.

 # Safety
 `model` must be a live model handle and `out` a valid location.
 */
enum FikaStatus fika_analysis_new(const struct FikaModel *model, struct FikaAnalysis **out);

/*
 Releases an analysis handle.

 # Safety
 `analysis` must come from `fika_analysis_new`, or be null.
 */
void fika_analysis_free(struct FikaAnalysis *analysis);

/*
 Number of enumerated entry-to-library paths.

 # Safety
 `analysis` must be a live analysis handle and `out` a valid location.
 */
enum FikaStatus fika_analysis_path_count(const struct FikaAnalysis *analysis, uintptr_t *out);

/*
 Serializes the path inventory (entries, hops, sites) as JSON.

 # Safety
 `analysis` must be a live analysis handle and `out` a valid location.
 */
enum FikaStatus fika_analysis_inventory_json(const struct FikaAnalysis *analysis, char **out);

/*
 Renders the call graph edge list, one `caller -> callee @line` per line.

 # Safety
 `analysis` must be a live analysis handle and `out` a valid location.
 */
enum FikaStatus fika_analysis_graph_text(const struct FikaAnalysis *analysis, char **out);

/*
 Parses one LCOV document into a new coverage handle, labeled for
 provenance.

 # Safety
 `text` and `label` must be NUL-terminated strings and `out` a valid
 location.
 */
enum FikaStatus fika_coverage_from_lcov(const char *text,
                                        const char *label,
                                        struct FikaCoverage **out);

/*
 Merges `src` into `dst`, summing hit counts per line.

 # Safety
 Both handles must be live coverage handles.
 */
enum FikaStatus fika_coverage_merge(struct FikaCoverage *dst, const struct FikaCoverage *src);

/*
 Releases a coverage handle.

 # Safety
 `coverage` must come from `fika_coverage_from_lcov`, or be null.
 */
void fika_coverage_free(struct FikaCoverage *coverage);

/*
 Serializes the per-site coverage verdicts for a model as JSON. A null
 `coverage` is treated as empty evidence.

 # Safety
 `model` must be a live model handle, `coverage` live or null, and `out` a
 valid location.
 */
enum FikaStatus fika_coverage_report_json(const struct FikaModel *model,
                                          const struct FikaCoverage *coverage,
                                          char **out);

/*
 Evaluates a vulnerability rules file against the model with the given
 coverage evidence (null for none) and serializes the rows as JSON.

 # Safety
 `model` must be a live model handle, `coverage` live or null, `rules_text`
 a NUL-terminated string, and `out` a valid location.
 */
enum FikaStatus fika_triage_json(const struct FikaModel *model,
                                 const struct FikaCoverage *coverage,
                                 const char *rules_text,
                                 char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIKA_H */
