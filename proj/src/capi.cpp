#include "poachgrid/poachgrid.h"

#include <new>
#include <span>
#include <string>

#include "poachgrid/eval.hpp"
#include "poachgrid/geoformats.hpp"
#include "poachgrid/pipeline.hpp"
#include "poachgrid/synth.hpp"

struct pg_context {
  unsigned threads = 0;
  std::string error;
  std::string stage;
};

struct pg_raster {
  poachgrid::RasterDataset data;
};

namespace {

pg_status status_of(poachgrid::ErrorKind kind) {
  switch (kind) {
    case poachgrid::ErrorKind::Config: return PG_CONFIG_ERROR;
    case poachgrid::ErrorKind::Input: return PG_INPUT_ERROR;
    case poachgrid::ErrorKind::Internal: break;
  }
  return PG_INTERNAL_ERROR;
}

template <typename Fn>
pg_status guarded(pg_context* ctx, const char* stage, Fn&& fn) {
  if (!ctx) return PG_INVALID_ARGUMENT;
  ctx->error.clear();
  ctx->stage.clear();
  try {
    fn();
    return PG_OK;
  } catch (const poachgrid::StageError& e) {
    ctx->stage = e.stage();
    ctx->error = e.what();
    return status_of(e.kind());
  } catch (const poachgrid::Error& e) {
    ctx->stage = stage;
    ctx->error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    ctx->stage = stage;
    ctx->error = e.what();
    return PG_INTERNAL_ERROR;
  } catch (...) {
    ctx->stage = stage;
    ctx->error = "unknown failure";
    return PG_INTERNAL_ERROR;
  }
}

pg_status invalid(pg_context* ctx, const char* message) {
  if (ctx) {
    ctx->error = message;
    ctx->stage.clear();
  }
  return PG_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* pg_version(void) { return "0.1.0"; }

pg_context* pg_context_create(void) { return new (std::nothrow) pg_context(); }

void pg_context_destroy(pg_context* ctx) { delete ctx; }

void pg_context_set_threads(pg_context* ctx, unsigned threads) {
  if (ctx) ctx->threads = threads;
}

const char* pg_last_error(const pg_context* ctx) { return ctx ? ctx->error.c_str() : ""; }

const char* pg_last_stage(const pg_context* ctx) { return ctx ? ctx->stage.c_str() : ""; }

pg_status pg_run_stage(pg_context* ctx, const char* stage, const char* config_path,
                       const double* efforts, size_t n_efforts, const uint64_t* seed) {
  if (!stage || !config_path || (n_efforts > 0 && !efforts)) {
    return invalid(ctx, "stage, config path and efforts must not be null");
  }
  return guarded(ctx, stage, [&] {
    poachgrid::PipelineOptions options;
    options.threads = ctx->threads;
    if (seed) options.seed = *seed;
    if (n_efforts > 0) options.efforts.assign(efforts, efforts + n_efforts);
    poachgrid::run_stage(stage, config_path, options);
  });
}

pg_status pg_synth(pg_context* ctx, const char* config_path, const uint64_t* seed) {
  if (!config_path) return invalid(ctx, "config path must not be null");
  return guarded(ctx, "synth", [&] {
    poachgrid::SynthConfig cfg = poachgrid::load_synth_config(config_path);
    if (seed) cfg.seed = *seed;
    poachgrid::generate_park(cfg);
  });
}

pg_status pg_raster_read(pg_context* ctx, const char* path, pg_raster** out) {
  if (!path || !out) return invalid(ctx, "path and output must not be null");
  *out = nullptr;
  return guarded(ctx, "read", [&] {
    auto* raster = new pg_raster{poachgrid::load_geotiff(path)};
    *out = raster;
  });
}

pg_status pg_raster_write(pg_context* ctx, const pg_raster* raster, const char* path) {
  if (!raster || !path) return invalid(ctx, "raster and path must not be null");
  return guarded(ctx, "write", [&] {
    poachgrid::write_file(path, poachgrid::write_geotiff(raster->data));
  });
}

void pg_raster_destroy(pg_raster* raster) { delete raster; }

int pg_raster_width(const pg_raster* raster) { return raster ? raster->data.width : 0; }

int pg_raster_height(const pg_raster* raster) { return raster ? raster->data.height : 0; }

void pg_raster_transform(const pg_raster* raster, double out[4]) {
  if (!raster || !out) return;
  const auto& t = raster->data.transform;
  out[0] = t.origin_x;
  out[1] = t.origin_y;
  out[2] = t.pixel_w;
  out[3] = t.pixel_h;
}

const double* pg_raster_values(const pg_raster* raster) {
  return raster ? raster->data.values.data() : nullptr;
}

int pg_raster_nodata(const pg_raster* raster, double* out) {
  if (!raster || !raster->data.nodata) return 0;
  if (out) *out = *raster->data.nodata;
  return 1;
}

pg_status pg_roc_auc(pg_context* ctx, const double* scores, const uint8_t* labels, size_t n,
                     double* out) {
  if ((n > 0 && (!scores || !labels)) || !out) {
    return invalid(ctx, "scores, labels and output must not be null");
  }
  return guarded(ctx, "auc", [&] {
    for (size_t i = 0; i < n; ++i) {
      if (labels[i] > 1) throw poachgrid::input_error("labels must be 0 or 1");
    }
    *out = poachgrid::roc_auc(std::span(scores, n), std::span(labels, n));
  });
}

}  // extern "C"
