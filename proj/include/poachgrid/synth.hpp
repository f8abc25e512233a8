#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

namespace poachgrid {

/// Coefficients of the true attack logit on z-scored features.
struct TruthWeights {
  double bias = -1.2;
  double elevation = -0.8;
  double npp = 0.9;
  double river_distance = -1.0;
  double road_distance = -0.4;
};

struct SynthConfig {
  std::uint64_t seed = 20190601;
  int size = 40;           // park grid cells per side
  int first_year = 2016;
  int years = 4;
  double resolution = 1000.0;
  double dem_resolution = 90.0;
  TruthWeights weights;
  double detection_rate = 0.5;    // lambda, per km of patrol
  double effort_budget = 800.0;   // km of patrol per quarter
  std::filesystem::path output_dir;

  void validate() const;
};

SynthConfig parse_synth_config(std::string_view json_text, const std::filesystem::path& base_dir);
SynthConfig load_synth_config(const std::filesystem::path& path);

struct SynthSummary {
  std::size_t masked_cells = 0;
  std::size_t patrolled_rows = 0;
  std::size_t attacks = 0;          // over all rows, patrolled or not
  std::size_t patrolled_attacks = 0;
  std::size_t positive_rows = 0;    // detected attacks
};

/// Writes boundary, roads and rivers shapefiles, the DEM, land cover and
/// surface water GeoTIFFs, monthly dynamic layers under dynamic/<name>/,
/// efforts.csv, activities.csv, manifest.json (config and ground truth) and a
/// pipeline config.json into cfg.output_dir. Output depends only on cfg.
SynthSummary generate_park(const SynthConfig& cfg);

}  // namespace poachgrid
