#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "poachgrid/grid.hpp"
#include "poachgrid/rasterops.hpp"
#include "poachgrid/temporal.hpp"

namespace poachgrid {

enum class Temporality { Static, Dynamic };

struct FeatureSpec {
  std::string name;
  FeatureSource source = FeatureSource::RemoteSensing;
  Temporality temporality = Temporality::Static;
  RasterKind kind = RasterKind::Continuous;

  bool operator==(const FeatureSpec&) const = default;
};

/// Names reserved for remote-sensing features. Remote-sensing entries must use
/// one of them and park entries must not.
const std::vector<std::string>& reserved_remote_sensing_names();
bool is_reserved_name(std::string_view name);

class FeatureCatalog {
public:
  FeatureCatalog() = default;
  explicit FeatureCatalog(std::vector<FeatureSpec> entries);

  const std::vector<FeatureSpec>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return entries_[i]; }
  std::vector<std::string> names() const;
  /// Index of the named entry; throws when absent.
  std::size_t index_of(std::string_view name) const;

  bool operator==(const FeatureCatalog&) const = default;

private:
  std::vector<FeatureSpec> entries_;
};

struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  YearMonth year_month() const { return {year, month}; }
  Quarter quarter() const { return Quarter::of(year_month()); }
};

/// Parses YYYY-MM-DD, validating the day against the month length.
Date parse_date(std::string_view text);

struct ActivityRecord {
  double x = 0.0;
  double y = 0.0;
  Date date;
};

struct EffortRecord {
  double x = 0.0;
  double y = 0.0;
  Date date;
  double effort = 0.0;
};

std::vector<ActivityRecord> read_activities_csv(const std::filesystem::path& path);
std::vector<EffortRecord> read_efforts_csv(const std::filesystem::path& path);
std::vector<ActivityRecord> parse_activities_csv(std::string_view text);
std::vector<EffortRecord> parse_efforts_csv(std::string_view text);

/// One row per (masked cell, quarter). Features are stored row-major in
/// catalog order; `missing` flags values that were nodata before imputation.
struct ObservationTable {
  FeatureCatalog catalog;
  std::vector<std::size_t> cell_ids;
  std::vector<Quarter> quarters;
  std::vector<double> efforts;
  std::vector<std::uint8_t> labels;
  std::vector<double> features;
  std::vector<std::uint8_t> missing;

  std::size_t rows() const { return cell_ids.size(); }
  std::size_t cols() const { return catalog.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * cols(), cols()};
  }
  double value(std::size_t r, std::size_t c) const { return features[r * cols() + c]; }

  ObservationTable subset_rows(const std::vector<std::size_t>& rows) const;
  ObservationTable subset_columns(const std::vector<std::size_t>& cols) const;
};

struct DynamicFeature {
  std::string name;
  FeatureSource source = FeatureSource::RemoteSensing;
  std::map<Quarter, FeatureLayer> quarters;
};

struct AssembleReport {
  std::size_t efforts_outside_grid = 0;
  std::size_t efforts_outside_park = 0;
  std::size_t efforts_outside_period = 0;
  std::size_t activities_outside_grid = 0;
  std::size_t activities_outside_park = 0;
  std::size_t activities_outside_period = 0;
};

struct AssembleResult {
  ObservationTable table;
  AssembleReport report;
};

/// Static features come first in the catalog, then dynamic ones, each in the
/// order given.
FeatureCatalog catalog_for(const std::vector<FeatureLayer>& static_layers,
                           const std::vector<DynamicFeature>& dynamic_layers);

AssembleResult assemble(const ParkGrid& grid, const std::vector<FeatureLayer>& static_layers,
                        const std::vector<DynamicFeature>& dynamic_layers,
                        const std::vector<EffortRecord>& efforts,
                        const std::vector<ActivityRecord>& activities,
                        const std::vector<Quarter>& quarters);

struct TrainTestSplit {
  ObservationTable train;
  ObservationTable test;
};

/// Train on the three years before test_year, test on test_year; rows without
/// patrol effort are dropped from both.
TrainTestSplit split_by_year(const ObservationTable& table, int test_year);

enum class Condition { Baseline, RemoteSensing, All };

std::string_view condition_name(Condition c);
Condition parse_condition(std::string_view name);

ObservationTable select_feature_set(const ObservationTable& table, Condition condition);

}  // namespace poachgrid
