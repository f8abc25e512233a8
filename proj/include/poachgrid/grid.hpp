#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "poachgrid/geoformats.hpp"

namespace poachgrid {

struct CellIndex {
  int row = 0;
  int col = 0;

  bool operator==(const CellIndex&) const = default;
};

/// The park discretized into square cells. Cell ids are row-major indices
/// into the full width x height rectangle; only masked cells belong to the park.
class ParkGrid {
public:
  ParkGrid(GeoTransform transform, int width, int height, std::vector<bool> mask);

  const GeoTransform& transform() const { return transform_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return transform_.pixel_w; }
  std::size_t size() const { return static_cast<std::size_t>(width_) * height_; }

  bool masked(std::size_t id) const { return mask_[id]; }
  bool masked(int row, int col) const { return mask_[id_of(row, col)]; }
  const std::vector<bool>& mask() const { return mask_; }
  /// Masked cell ids in ascending order.
  const std::vector<std::size_t>& masked_ids() const { return masked_ids_; }

  std::size_t id_of(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }
  CellIndex index_of(std::size_t id) const {
    return {static_cast<int>(id / width_), static_cast<int>(id % width_)};
  }

  Point cell_center(int row, int col) const;
  Point cell_center(std::size_t id) const {
    const auto c = index_of(id);
    return cell_center(c.row, c.col);
  }

  /// Cell containing p under half-open bounds [west, east) x (south, north];
  /// nullopt outside the grid rectangle.
  std::optional<CellIndex> locate(const Point& p) const;

  /// An empty raster aligned to this grid, every cell nodata.
  RasterDataset blank_raster(RasterKind kind, double nodata) const;

private:
  GeoTransform transform_;
  int width_;
  int height_;
  std::vector<bool> mask_;
  std::vector<std::size_t> masked_ids_;
};

/// Even-odd ray casting over every ring of the polygon. A point exactly on a
/// horizontal or left edge follows the half-open rule of the crossing test.
bool point_in_polygon(const Point& p, const Geometry& polygon);

/// Cells whose centers fall inside any boundary polygon. The origin is the
/// boundary bbox min corner snapped outward to a multiple of resolution.
ParkGrid build_grid(const VectorDataset& boundary, double resolution = 1000.0);

}  // namespace poachgrid
