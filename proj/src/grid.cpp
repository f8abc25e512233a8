#include "poachgrid/grid.hpp"

#include <cmath>
#include <sstream>

#include "poachgrid/error.hpp"

namespace poachgrid {

ParkGrid::ParkGrid(GeoTransform transform, int width, int height, std::vector<bool> mask)
    : transform_(transform), width_(width), height_(height), mask_(std::move(mask)) {
  if (width_ <= 0 || height_ <= 0) throw input_error("park grid dimensions must be positive");
  if (transform_.pixel_w != transform_.pixel_h || !(transform_.pixel_w > 0.0)) {
    throw input_error("park grid cells must be square with positive size");
  }
  if (mask_.size() != size()) throw input_error("park grid mask length mismatch");
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i]) masked_ids_.push_back(i);
  }
  if (masked_ids_.empty()) throw input_error("park grid has no cell inside the boundary");
}

Point ParkGrid::cell_center(int row, int col) const {
  if (row < 0 || row >= height_ || col < 0 || col >= width_) {
    std::ostringstream msg;
    msg << "cell (" << row << ", " << col << ") outside " << height_ << "x" << width_ << " grid";
    throw input_error(msg.str());
  }
  const double res = resolution();
  return {transform_.origin_x + (col + 0.5) * res, transform_.origin_y - (row + 0.5) * res};
}

std::optional<CellIndex> ParkGrid::locate(const Point& p) const {
  const double res = resolution();
  const double c = std::floor((p.x - transform_.origin_x) / res);
  const double r = std::floor((transform_.origin_y - p.y) / res);
  if (!(c >= 0.0 && c < width_ && r >= 0.0 && r < height_)) return std::nullopt;
  return CellIndex{static_cast<int>(r), static_cast<int>(c)};
}

RasterDataset ParkGrid::blank_raster(RasterKind kind, double nodata) const {
  RasterDataset r;
  r.width = width_;
  r.height = height_;
  r.transform = transform_;
  r.values.assign(size(), nodata);
  r.nodata = nodata;
  r.kind = kind;
  return r;
}

bool point_in_polygon(const Point& p, const Geometry& polygon) {
  bool inside = false;
  for (const auto& ring : polygon.parts) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point& a = ring[i];
      const Point& b = ring[j];
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (p.x < x_cross) inside = !inside;
      }
    }
  }
  return inside;
}

namespace {

double ring_area(const std::vector<Point>& ring) {
  double twice = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    twice += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
  }
  return 0.5 * std::abs(twice);
}

}  // namespace

ParkGrid build_grid(const VectorDataset& boundary, double resolution) {
  if (!(resolution > 0.0)) throw input_error("grid resolution must be positive");
  std::vector<const Geometry*> polygons;
  for (const auto& g : boundary.geometries) {
    if (g.type != GeometryType::Polygon) throw input_error("park boundary must hold polygons");
    polygons.push_back(&g);
  }
  if (polygons.empty()) throw input_error("park boundary has no polygon");
  for (const auto* g : polygons) {
    if (g->parts.empty() || ring_area(g->parts.front()) <= 0.0) {
      throw input_error("park boundary polygon is degenerate (zero area)");
    }
  }

  const BoundingBox box = compute_bbox(boundary.geometries);
  const double min_x = std::floor(box.min_x / resolution) * resolution;
  const double min_y = std::floor(box.min_y / resolution) * resolution;
  const double max_x = std::ceil(box.max_x / resolution) * resolution;
  const double max_y = std::ceil(box.max_y / resolution) * resolution;
  const int width = std::max(1, static_cast<int>(std::llround((max_x - min_x) / resolution)));
  const int height = std::max(1, static_cast<int>(std::llround((max_y - min_y) / resolution)));
  const GeoTransform transform{min_x, max_y, resolution, resolution};

  std::vector<bool> mask(static_cast<std::size_t>(width) * height, false);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const Point center{min_x + (c + 0.5) * resolution, max_y - (r + 0.5) * resolution};
      for (const auto* g : polygons) {
        if (point_in_polygon(center, *g)) {
          mask[static_cast<std::size_t>(r) * width + c] = true;
          break;
        }
      }
    }
  }
  return ParkGrid(transform, width, height, std::move(mask));
}

}  // namespace poachgrid
