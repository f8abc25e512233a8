#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "poachgrid/geoformats.hpp"
#include "poachgrid/grid.hpp"
#include "poachgrid/rasterops.hpp"

namespace testutil {

using namespace poachgrid;

inline Geometry ring_polygon(std::vector<std::vector<Point>> rings) {
  for (auto& r : rings) {
    if (!(r.front() == r.back())) r.push_back(r.front());
  }
  return {GeometryType::Polygon, std::move(rings)};
}

inline Geometry rect(double x0, double y0, double x1, double y1) {
  return ring_polygon({{{x0, y0}, {x0, y1}, {x1, y1}, {x1, y0}}});
}

inline VectorDataset dataset(std::vector<Geometry> g) {
  VectorDataset v;
  v.bbox = compute_bbox(g);
  v.geometries = std::move(g);
  return v;
}

/// Fully masked width x height grid with its top-left corner at (0, height * res).
inline ParkGrid full_grid(int width, int height, double res = 1000.0) {
  return ParkGrid({0.0, height * res, res, res}, width, height,
                  std::vector<bool>(static_cast<std::size_t>(width) * height, true));
}

inline FeatureLayer layer_on(const ParkGrid& grid, std::vector<double> values,
                             std::string name = "layer",
                             RasterKind kind = RasterKind::Continuous) {
  FeatureLayer l;
  l.name = std::move(name);
  l.raster = grid.blank_raster(kind, kNodata);
  l.raster.values = std::move(values);
  return l;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("poachgrid-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
