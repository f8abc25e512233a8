#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "poachgrid/grid.hpp"
#include "poachgrid/rasterops.hpp"

namespace poachgrid {

struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  auto operator<=>(const YearMonth&) const = default;
};

/// Calendar quarter; index 1 covers January to March.
struct Quarter {
  int year = 0;
  int index = 1;

  auto operator<=>(const Quarter&) const = default;

  static Quarter of(const YearMonth& ym) { return {ym.year, (ym.month - 1) / 3 + 1}; }
  Quarter next() const { return index == 4 ? Quarter{year + 1, 1} : Quarter{year, index + 1}; }
  /// "2018Q2"
  std::string label() const;
};

/// Every quarter of the inclusive year range, chronological.
std::vector<Quarter> quarters_of_years(int first_year, int last_year);

struct TimeStampedLayer {
  YearMonth timestamp;
  FeatureLayer layer;
};

/// Per-cell mean over each quarter's monthly layers, nodata months skipped.
/// Cells with no valid month stay nodata; quarters without layers are absent.
std::map<Quarter, FeatureLayer> aggregate_quarters(const std::vector<TimeStampedLayer>& series,
                                                   const ParkGrid& grid);

}  // namespace poachgrid
