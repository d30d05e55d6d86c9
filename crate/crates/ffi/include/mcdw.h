#ifndef MCDW_H
#define MCDW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by every entry point.
typedef enum McdwStatus {
  MCDW_STATUS_OK = 0,
  MCDW_STATUS_NULL_POINTER = 1,
  MCDW_STATUS_INVALID_UTF8 = 2,
  MCDW_STATUS_INVALID_PARAMS = 3,
  MCDW_STATUS_INFINITE_GROUP = 4,
  MCDW_STATUS_OUT_OF_SPACE = 5,
  MCDW_STATUS_BOUND_EXCEEDED = 6,
  MCDW_STATUS_CACHE = 7,
  MCDW_STATUS_FAILED = 8,
  MCDW_STATUS_PANIC = 9,
} McdwStatus;

// Outcome of [`mcdw_iso`].
typedef enum McdwVerdict {
  MCDW_VERDICT_ISOMORPHIC = 0,
  MCDW_VERDICT_NOT_ISOMORPHIC = 1,
  MCDW_VERDICT_UNDECIDED = 2,
} McdwVerdict;

// A constructed finite group.
typedef struct McdwGroup McdwGroup;

// Builds and caches groups; safe to share between threads.
typedef struct McdwWorkbench McdwWorkbench;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next call on this thread.
const char *mcdw_last_error(void);

// Static version string.
const char *mcdw_version(void);

// `cache_dir` may be NULL to build everything in memory.
//
// # Safety
// `cache_dir` is NULL or a NUL-terminated string; `out_wb` is writable.
enum McdwStatus mcdw_workbench_new(const char *cache_dir, struct McdwWorkbench **out_wb);

// # Safety
// `wb` is NULL or a handle from [`mcdw_workbench_new`] not yet freed.
void mcdw_workbench_free(struct McdwWorkbench *wb);

// Builds (or loads) a member of `family` ("J1", "J2", "H1", ...).
//
// # Safety
// `wb` is a live handle, `family_name` a NUL-terminated string, `out_group` writable.
enum McdwStatus mcdw_group_new(const struct McdwWorkbench *wb,
                               const char *family_name,
                               uint64_t p,
                               uint32_t m,
                               int64_t ell,
                               struct McdwGroup **out_group);

// Builds the Macdonald group G(beta).
//
// # Safety
// `wb` is a live handle and `out_group` writable.
enum McdwStatus mcdw_group_macdonald(const struct McdwWorkbench *wb,
                                     int64_t beta,
                                     struct McdwGroup **out_group);

// # Safety
// `g` is NULL or a handle not yet freed.
void mcdw_group_free(struct McdwGroup *g);

// # Safety
// `g` is a live handle and `order` writable.
enum McdwStatus mcdw_group_order(const struct McdwGroup *g, uint64_t *order);

// # Safety
// `g` is a live handle and `class` writable.
enum McdwStatus mcdw_group_class(const struct McdwGroup *g, uint32_t *class_);

// Upper central series as JSON (`{"terms": [...], "class": n}`).
//
// # Safety
// `g` is a live handle and `json` writable.
enum McdwStatus mcdw_group_series_json(const struct McdwGroup *g, char **json);

// Decides whether two members of one family are isomorphic. `evidence`
// may be NULL; otherwise it receives the certificate or witness as JSON.
//
// # Safety
// `wb` is a live handle, `family_name` a NUL-terminated string, `verdict`
// writable and `evidence` NULL or writable.
enum McdwStatus mcdw_iso(const struct McdwWorkbench *wb,
                         const char *family_name,
                         uint64_t p,
                         uint32_t m,
                         int64_t ell_a,
                         int64_t ell_b,
                         enum McdwVerdict *verdict,
                         char **evidence);

// Runs the default check suite and returns the report bundle as JSON.
// `all_passed` may be NULL.
//
// # Safety
// `wb` is a live handle, `json` writable, `all_passed` NULL or writable.
enum McdwStatus mcdw_verify_default(const struct McdwWorkbench *wb, char **json, bool *all_passed);

// # Safety
// `s` is NULL or a string returned by this library, not yet freed.
void mcdw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MCDW_H */
