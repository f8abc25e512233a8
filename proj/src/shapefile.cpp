#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "poachgrid/error.hpp"
#include "poachgrid/geoformats.hpp"

namespace poachgrid {
namespace {

constexpr std::int32_t kFileCode = 9994;
constexpr std::int32_t kVersion = 1000;
constexpr std::int32_t kNullShape = 0;
constexpr std::int32_t kPointShape = 1;
constexpr std::int32_t kPolylineShape = 3;
constexpr std::int32_t kPolygonShape = 5;
constexpr std::size_t kHeaderBytes = 100;

template <typename T>
T load(std::span<const std::uint8_t> bytes, std::size_t offset, bool big_endian) {
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  if (big_endian != (std::endian::native == std::endian::big)) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    std::reverse(raw, raw + sizeof(T));
    std::memcpy(&v, raw, sizeof(T));
  }
  return v;
}

template <typename T>
void store(std::vector<std::uint8_t>& out, T v, bool big_endian) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  if (big_endian != (std::endian::native == std::endian::big)) std::reverse(raw, raw + sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

Error record_error(std::size_t record, const std::string& what) {
  return input_error("shapefile record " + std::to_string(record) + ": " + what);
}

void close_ring(std::vector<Point>& ring) {
  if (!ring.empty() && !(ring.front() == ring.back())) ring.push_back(ring.front());
}

GeometryType geometry_type(std::int32_t shape_type) {
  switch (shape_type) {
    case kPointShape: return GeometryType::Point;
    case kPolylineShape: return GeometryType::Polyline;
    case kPolygonShape: return GeometryType::Polygon;
  }
  throw input_error("unsupported shapefile shape type " + std::to_string(shape_type));
}

std::int32_t shape_code(GeometryType type) {
  switch (type) {
    case GeometryType::Point: return kPointShape;
    case GeometryType::Polyline: return kPolylineShape;
    case GeometryType::Polygon: return kPolygonShape;
  }
  return kNullShape;
}

}  // namespace

BoundingBox compute_bbox(const std::vector<Geometry>& geometries) {
  BoundingBox box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  for (const auto& g : geometries) {
    for (const auto& part : g.parts) {
      for (const auto& p : part) {
        box.min_x = std::min(box.min_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_x = std::max(box.max_x, p.x);
        box.max_y = std::max(box.max_y, p.y);
      }
    }
  }
  if (box.min_x > box.max_x) return BoundingBox{};
  return box;
}

VectorDataset read_shapefile(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw input_error("shapefile shorter than its 100-byte header");
  const auto code = load<std::int32_t>(bytes, 0, true);
  if (code != kFileCode) {
    throw input_error("not a shapefile: file code is " + std::to_string(code) + ", expected 9994");
  }
  const auto declared_words = load<std::int32_t>(bytes, 24, true);
  if (declared_words < 0 || static_cast<std::uint64_t>(declared_words) * 2 != bytes.size()) {
    std::ostringstream msg;
    msg << "shapefile header declares " << static_cast<std::int64_t>(declared_words) * 2
        << " bytes (offset 24) but file has " << bytes.size();
    throw input_error(msg.str());
  }
  if (const auto version = load<std::int32_t>(bytes, 28, false); version != kVersion) {
    throw input_error("unsupported shapefile version " + std::to_string(version));
  }
  const auto header_type = load<std::int32_t>(bytes, 32, false);
  if (header_type != kNullShape) geometry_type(header_type);

  VectorDataset out;
  out.declared = BoundingBox{load<double>(bytes, 36, false), load<double>(bytes, 44, false),
                             load<double>(bytes, 52, false), load<double>(bytes, 60, false)};

  std::optional<std::int32_t> seen_type;
  std::size_t offset = kHeaderBytes;
  for (std::size_t record = 0; offset < bytes.size(); ++record) {
    if (bytes.size() - offset < 12) throw record_error(record, "truncated record header");
    const auto content_words = load<std::int32_t>(bytes, offset + 4, true);
    if (content_words < 2 ||
        static_cast<std::uint64_t>(content_words) * 2 > bytes.size() - offset - 8) {
      throw record_error(record, "content length " + std::to_string(content_words) +
                                     " words is inconsistent with the file size");
    }
    const std::size_t content = offset + 8;
    const std::size_t content_bytes = static_cast<std::size_t>(content_words) * 2;
    const auto type = load<std::int32_t>(bytes, content, false);
    offset = content + content_bytes;
    if (type == kNullShape) continue;
    const GeometryType gtype = geometry_type(type);
    if (seen_type && *seen_type != type) {
      throw record_error(record, "shape type " + std::to_string(type) +
                                     " differs from earlier records' type " +
                                     std::to_string(*seen_type));
    }
    if (header_type != kNullShape && header_type != type) {
      throw record_error(record, "shape type " + std::to_string(type) +
                                     " differs from header type " + std::to_string(header_type));
    }
    seen_type = type;

    if (gtype == GeometryType::Point) {
      if (content_bytes < 20) throw record_error(record, "point record shorter than 20 bytes");
      Geometry g{GeometryType::Point,
                 {{Point{load<double>(bytes, content + 4, false),
                         load<double>(bytes, content + 12, false)}}}};
      out.geometries.push_back(std::move(g));
      continue;
    }

    if (content_bytes < 44) throw record_error(record, "multi-part record shorter than 44 bytes");
    const auto num_parts = load<std::int32_t>(bytes, content + 36, false);
    const auto num_points = load<std::int32_t>(bytes, content + 40, false);
    if (num_parts < 1 || num_points < 1) {
      throw record_error(record, "record has no parts or no points");
    }
    const std::uint64_t needed =
        44 + 4 * static_cast<std::uint64_t>(num_parts) + 16 * static_cast<std::uint64_t>(num_points);
    if (needed > content_bytes) {
      throw record_error(record, "content length " + std::to_string(content_bytes) +
                                     " bytes is shorter than the " + std::to_string(needed) +
                                     " its part/point counts require");
    }
    std::vector<std::int32_t> starts(static_cast<std::size_t>(num_parts));
    for (std::int32_t i = 0; i < num_parts; ++i) {
      starts[i] = load<std::int32_t>(bytes, content + 44 + 4 * static_cast<std::size_t>(i), false);
    }
    const std::size_t points_at = content + 44 + 4 * static_cast<std::size_t>(num_parts);
    std::vector<std::vector<Point>> parts;
    for (std::int32_t i = 0; i < num_parts; ++i) {
      const std::int32_t begin = starts[i];
      const std::int32_t end = i + 1 < num_parts ? starts[i + 1] : num_points;
      if (begin < 0 || end > num_points || begin >= end) {
        throw record_error(record, "part " + std::to_string(i) + " has invalid point range");
      }
      std::vector<Point> part;
      for (std::int32_t k = begin; k < end; ++k) {
        const std::size_t at = points_at + 16 * static_cast<std::size_t>(k);
        part.push_back({load<double>(bytes, at, false), load<double>(bytes, at + 8, false)});
      }
      parts.push_back(std::move(part));
    }

    if (gtype == GeometryType::Polyline) {
      for (auto& part : parts) {
        if (part.size() < 2) throw record_error(record, "polyline part has fewer than 2 vertices");
        out.geometries.push_back(Geometry{GeometryType::Polyline, {std::move(part)}});
      }
    } else {
      for (auto& ring : parts) {
        close_ring(ring);
        if (ring.size() < 4) throw record_error(record, "polygon ring has fewer than 3 vertices");
      }
      out.geometries.push_back(Geometry{GeometryType::Polygon, std::move(parts)});
    }
  }
  out.bbox = compute_bbox(out.geometries);
  return out;
}

std::vector<std::uint8_t> write_shapefile(const std::vector<Geometry>& geometries) {
  const std::int32_t type = geometries.empty() ? kNullShape : shape_code(geometries.front().type);
  for (const auto& g : geometries) {
    if (shape_code(g.type) != type) throw input_error("shapefile geometries must share one type");
  }
  const BoundingBox box = compute_bbox(geometries);

  std::vector<std::uint8_t> records;
  std::int32_t number = 1;
  for (const auto& g : geometries) {
    std::vector<std::uint8_t> content;
    store<std::int32_t>(content, type, false);
    if (g.type == GeometryType::Point) {
      const Point& p = g.parts.at(0).at(0);
      store(content, p.x, false);
      store(content, p.y, false);
    } else {
      const BoundingBox gb = compute_bbox({g});
      store(content, gb.min_x, false);
      store(content, gb.min_y, false);
      store(content, gb.max_x, false);
      store(content, gb.max_y, false);
      std::int32_t total = 0;
      for (const auto& part : g.parts) total += static_cast<std::int32_t>(part.size());
      store<std::int32_t>(content, static_cast<std::int32_t>(g.parts.size()), false);
      store<std::int32_t>(content, total, false);
      std::int32_t start = 0;
      for (const auto& part : g.parts) {
        store<std::int32_t>(content, start, false);
        start += static_cast<std::int32_t>(part.size());
      }
      for (const auto& part : g.parts) {
        for (const auto& p : part) {
          store(content, p.x, false);
          store(content, p.y, false);
        }
      }
    }
    store<std::int32_t>(records, number++, true);
    store<std::int32_t>(records, static_cast<std::int32_t>(content.size() / 2), true);
    records.insert(records.end(), content.begin(), content.end());
  }

  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + records.size());
  store<std::int32_t>(out, kFileCode, true);
  for (int i = 0; i < 5; ++i) store<std::int32_t>(out, 0, true);
  store<std::int32_t>(out, static_cast<std::int32_t>((kHeaderBytes + records.size()) / 2), true);
  store<std::int32_t>(out, kVersion, false);
  store<std::int32_t>(out, type, false);
  for (double v : {box.min_x, box.min_y, box.max_x, box.max_y, 0.0, 0.0, 0.0, 0.0}) {
    store(out, v, false);
  }
  out.insert(out.end(), records.begin(), records.end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw input_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw input_error("failed writing " + path.string());
}

}  // namespace poachgrid
