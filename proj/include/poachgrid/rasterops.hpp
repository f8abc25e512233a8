#pragma once

#include <string>
#include <utility>
#include <vector>

#include "poachgrid/geoformats.hpp"
#include "poachgrid/grid.hpp"

namespace poachgrid {

/// Sentinel written into every derived layer outside the park.
inline constexpr double kNodata = -9999.0;

enum class FeatureSource { Park, RemoteSensing };

/// A raster aligned to the park grid. Cells outside the park hold kNodata.
struct FeatureLayer {
  std::string name;
  RasterDataset raster;
  FeatureSource source = FeatureSource::RemoteSensing;

  RasterKind kind() const { return raster.kind; }
  bool valid(std::size_t id) const { return !raster.is_nodata(raster.values[id]); }
};

/// True when the raster shares transform and shape with the grid.
bool aligned(const RasterDataset& raster, const ParkGrid& grid);
void require_aligned(const FeatureLayer& layer, const ParkGrid& grid);

/// Mean (continuous) or mode (categorical, ties to the smallest category) of
/// the source pixels whose centers fall in each masked cell.
FeatureLayer resample_to_grid(const RasterDataset& src, const ParkGrid& grid, RasterKind kind,
                              std::string name = {},
                              FeatureSource source = FeatureSource::RemoteSensing);

struct SlopeAspect {
  FeatureLayer slope;   // degrees from horizontal
  FeatureLayer aspect;  // compass bearing of steepest descent, nodata when flat
};

/// Horn's 3x3 gradient with replicate padding at the edges; nodata neighbours
/// take the center value.
SlopeAspect slope_aspect(const FeatureLayer& dem);

/// D8 codes: 1..8 = E, SE, S, SW, W, NW, N, NE; 0 = sink.
FeatureLayer d8_flow_direction(const FeatureLayer& dem);

/// Number of upstream cells whose D8 path passes through each cell.
FeatureLayer flow_accumulation(const FeatureLayer& directions);

/// Exact Euclidean distance from every masked cell center to the nearest geometry.
FeatureLayer distance_to_geometries(const ParkGrid& grid, const VectorDataset& features,
                                    std::string name = {},
                                    FeatureSource source = FeatureSource::Park);

struct CellPredicate {
  enum class Op { AtLeast, Equals };
  Op op = Op::AtLeast;
  double value = 0.0;

  bool operator()(double v) const { return op == Op::AtLeast ? v >= value : v == value; }
};

/// Distance from every masked cell center to the nearest cell satisfying the predicate.
FeatureLayer distance_to_cells(const ParkGrid& grid, const FeatureLayer& source,
                               CellPredicate predicate, std::string name = {});

/// Per-layer z-score over valid cells, population standard deviation.
std::vector<FeatureLayer> standardize(const std::vector<FeatureLayer>& layers);

/// Z-score every layer with mean and deviation pooled over all of them; used
/// for the quarterly slices of one dynamic feature.
std::vector<FeatureLayer> standardize_pooled(const std::vector<FeatureLayer>& layers);

/// 1-based order statistic max(1, ceil(q * n)) of the valid values, q in [0, 1].
double layer_quantile(const FeatureLayer& layer, double q);

double point_segment_distance(const Point& p, const Point& a, const Point& b);

}  // namespace poachgrid
