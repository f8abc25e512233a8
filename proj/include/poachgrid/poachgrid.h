#ifndef POACHGRID_H
#define POACHGRID_H

#include <stddef.h>
#include <stdint.h>

#if defined(POACHGRID_BUILDING)
#define PG_API __attribute__((visibility("default")))
#else
#define PG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The nonzero ones double as CLI exit codes. */
typedef enum pg_status {
  PG_OK = 0,
  PG_INVALID_ARGUMENT = 1,
  PG_CONFIG_ERROR = 2,
  PG_INPUT_ERROR = 3,
  PG_INTERNAL_ERROR = 4
} pg_status;

typedef struct pg_context pg_context;
typedef struct pg_raster pg_raster;

PG_API const char* pg_version(void);

/* A context carries the thread cap and the last error. Not thread-safe. */
PG_API pg_context* pg_context_create(void);
PG_API void pg_context_destroy(pg_context* ctx);
/* 0 means all hardware threads. */
PG_API void pg_context_set_threads(pg_context* ctx, unsigned threads);
/* Message and stage of the last failed call; "" after success. Owned by ctx. */
PG_API const char* pg_last_error(const pg_context* ctx);
PG_API const char* pg_last_stage(const pg_context* ctx);

/* Runs "featurize", "train", "predict", "evaluate" or "run" on a pipeline
 * config. `efforts` (n_efforts values) overrides the prediction efforts when
 * n_efforts > 0; `seed` overrides the training seed when non-null. */
PG_API pg_status pg_run_stage(pg_context* ctx, const char* stage, const char* config_path,
                              const double* efforts, size_t n_efforts, const uint64_t* seed);

/* Generates a synthetic park from a synth config file; `seed` overrides it. */
PG_API pg_status pg_synth(pg_context* ctx, const char* config_path, const uint64_t* seed);

PG_API pg_status pg_raster_read(pg_context* ctx, const char* path, pg_raster** out);
PG_API pg_status pg_raster_write(pg_context* ctx, const pg_raster* raster, const char* path);
PG_API void pg_raster_destroy(pg_raster* raster);
PG_API int pg_raster_width(const pg_raster* raster);
PG_API int pg_raster_height(const pg_raster* raster);
/* origin_x, origin_y, pixel_w, pixel_h */
PG_API void pg_raster_transform(const pg_raster* raster, double out[4]);
/* Row-major, width * height values owned by the raster. */
PG_API const double* pg_raster_values(const pg_raster* raster);
/* Returns 1 and stores the nodata value if the raster declares one. */
PG_API int pg_raster_nodata(const pg_raster* raster, double* out);

/* Area under the ROC curve; labels are 0 or 1. */
PG_API pg_status pg_roc_auc(pg_context* ctx, const double* scores, const uint8_t* labels,
                            size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif
