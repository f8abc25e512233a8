#include "poachgrid/temporal.hpp"

#include "poachgrid/error.hpp"

namespace poachgrid {

std::string Quarter::label() const { return std::to_string(year) + "Q" + std::to_string(index); }

std::vector<Quarter> quarters_of_years(int first_year, int last_year) {
  std::vector<Quarter> out;
  for (int y = first_year; y <= last_year; ++y) {
    for (int q = 1; q <= 4; ++q) out.push_back({y, q});
  }
  return out;
}

std::map<Quarter, FeatureLayer> aggregate_quarters(const std::vector<TimeStampedLayer>& series,
                                                   const ParkGrid& grid) {
  struct Accumulator {
    std::vector<double> sums;
    std::vector<int> counts;
    const TimeStampedLayer* first = nullptr;
  };
  std::map<Quarter, Accumulator> by_quarter;
  for (const auto& item : series) {
    if (item.timestamp.month < 1 || item.timestamp.month > 12) {
      throw input_error("layer '" + item.layer.name + "' has invalid month " +
                        std::to_string(item.timestamp.month));
    }
    require_aligned(item.layer, grid);
    if (item.layer.kind() != RasterKind::Continuous) {
      throw input_error("dynamic layer '" + item.layer.name + "' must be continuous");
    }
    auto& acc = by_quarter[Quarter::of(item.timestamp)];
    if (!acc.first) {
      acc.first = &item;
      acc.sums.assign(grid.size(), 0.0);
      acc.counts.assign(grid.size(), 0);
    }
    for (std::size_t id = 0; id < grid.size(); ++id) {
      if (!item.layer.valid(id)) continue;
      acc.sums[id] += item.layer.raster.values[id];
      ++acc.counts[id];
    }
  }

  std::map<Quarter, FeatureLayer> out;
  for (auto& [quarter, acc] : by_quarter) {
    FeatureLayer layer;
    layer.name = acc.first->layer.name;
    layer.source = acc.first->layer.source;
    layer.raster = grid.blank_raster(RasterKind::Continuous, kNodata);
    for (std::size_t id = 0; id < grid.size(); ++id) {
      if (acc.counts[id] > 0) layer.raster.values[id] = acc.sums[id] / acc.counts[id];
    }
    out.emplace(quarter, std::move(layer));
  }
  return out;
}

}  // namespace poachgrid
