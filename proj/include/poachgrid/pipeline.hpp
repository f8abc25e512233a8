#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poachgrid/dataset.hpp"
#include "poachgrid/error.hpp"
#include "poachgrid/model.hpp"

namespace poachgrid {

/// How one static feature layer is produced.
enum class StaticRecipe {
  Raster,              // resample a GeoTIFF
  VectorDistance,      // distance to shapefile geometries
  RasterDistance,      // resample a GeoTIFF, then distance to cells passing a predicate
  Slope,               // from a DEM layer
  Aspect,              // from a DEM layer
  DrainageDirection,   // D8 codes from a DEM layer
  FlowAccumulation,    // D8 accumulation from a DEM layer
  CellDistance,        // distance to cells of an earlier layer passing a predicate
};

struct StaticFeatureConfig {
  std::string name;
  FeatureSource source = FeatureSource::RemoteSensing;
  StaticRecipe recipe = StaticRecipe::Raster;
  std::filesystem::path path;  // Raster, VectorDistance, RasterDistance
  std::string from;            // derived recipes
  RasterKind kind = RasterKind::Continuous;
  std::optional<double> threshold;  // distance predicate: value >= threshold
  std::optional<double> quantile;   // or value >= layer quantile
};

struct DynamicFeatureConfig {
  std::string name;
  FeatureSource source = FeatureSource::RemoteSensing;
  std::filesystem::path dir;  // holds <YYYY>-<MM>.tif
};

struct PipelineConfig {
  std::string park = "park";
  std::filesystem::path boundary;
  double resolution = 1000.0;
  std::vector<StaticFeatureConfig> static_features;
  std::vector<DynamicFeatureConfig> dynamic_features;
  std::filesystem::path efforts;
  std::filesystem::path activities;
  std::vector<int> test_years;
  std::vector<Condition> conditions = {Condition::Baseline, Condition::RemoteSensing,
                                       Condition::All};
  std::vector<double> prediction_efforts;
  bool standardize = false;
  TrainConfig train;
  std::filesystem::path output_dir;
};

/// Parses a version-1 config; relative paths resolve against `base_dir`.
PipelineConfig parse_pipeline_config(std::string_view json_text,
                                     const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct PipelineOptions {
  unsigned threads = 0;                // 0 = all cores
  std::optional<std::uint64_t> seed;   // overrides train.seed
  std::vector<double> efforts;         // overrides prediction_efforts
};

/// Error raised by a pipeline stage; `stage()` names it.
class StageError : public Error {
public:
  StageError(std::string stage, ErrorKind kind, const std::string& message)
      : Error(kind, message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

void run_featurize(const PipelineConfig& config, const PipelineOptions& options);
void run_train(const PipelineConfig& config, const PipelineOptions& options);
void run_predict(const PipelineConfig& config, const PipelineOptions& options);
void run_evaluate(const PipelineConfig& config, const PipelineOptions& options);
void run_all(const PipelineConfig& config, const PipelineOptions& options);

/// The observation table the train stage would build from featurize output.
AssembleResult assemble_observations(const PipelineConfig& config);

/// Dispatches "featurize", "train", "predict", "evaluate" or "run" on the
/// config at `config_path`. Failures surface as StageError.
void run_stage(std::string_view stage, const std::filesystem::path& config_path,
               const PipelineOptions& options);

std::string model_file_name(int year, Condition condition);
/// "risk-<year>-<condition>-e<effort>" without extension.
std::string risk_file_stem(int year, Condition condition, double effort);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

}  // namespace poachgrid
