#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace poachgrid {

/// North-up affine georeferencing. Origin is the top-left corner of the
/// top-left pixel; rows grow southward so pixel_h is stored positive.
struct GeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_w = 1.0;
  double pixel_h = 1.0;

  bool operator==(const GeoTransform&) const = default;
};

enum class RasterKind { Continuous, Categorical };

struct RasterDataset {
  int width = 0;
  int height = 0;
  GeoTransform transform;
  std::vector<double> values;  // row-major, width * height
  std::optional<double> nodata;
  RasterKind kind = RasterKind::Continuous;
  std::string crs_code;

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
  double& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
  bool is_nodata(double v) const;

  /// Throws if the dimensions, transform or category values are inconsistent.
  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

enum class GeometryType { Point, Polyline, Polygon };

/// A point holds one part with one vertex, a polyline one part with at least
/// two vertices, a polygon one or more closed rings with the outer ring first.
struct Geometry {
  GeometryType type = GeometryType::Point;
  std::vector<std::vector<Point>> parts;
};

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(const Point& p, double tolerance = 0.0) const {
    return p.x >= min_x - tolerance && p.x <= max_x + tolerance && p.y >= min_y - tolerance &&
           p.y <= max_y + tolerance;
  }
};

struct VectorDataset {
  std::vector<Geometry> geometries;
  BoundingBox bbox;                     // computed over every vertex
  std::optional<BoundingBox> declared;  // header bbox when read from a file

  bool empty() const { return geometries.empty(); }
};

BoundingBox compute_bbox(const std::vector<Geometry>& geometries);

RasterDataset read_geotiff(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_geotiff(const RasterDataset& raster);

VectorDataset read_shapefile(std::span<const std::uint8_t> bytes);

/// Writes a .shp main file. All geometries must share one type; polygon
/// rings are written as given.
std::vector<std::uint8_t> write_shapefile(const std::vector<Geometry>& geometries);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

inline RasterDataset load_geotiff(const std::filesystem::path& path) {
  return read_geotiff(read_file(path));
}

inline VectorDataset load_shapefile(const std::filesystem::path& path) {
  return read_shapefile(read_file(path));
}

}  // namespace poachgrid
