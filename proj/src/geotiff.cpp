#include "poachgrid/geoformats.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

#include "poachgrid/error.hpp"

namespace poachgrid {
namespace {

// Baseline and GeoTIFF tags this reader understands.
enum Tag : std::uint16_t {
  kImageWidth = 256,
  kImageLength = 257,
  kBitsPerSample = 258,
  kCompression = 259,
  kPhotometric = 262,
  kImageDescription = 270,
  kStripOffsets = 273,
  kSamplesPerPixel = 277,
  kRowsPerStrip = 278,
  kStripByteCounts = 279,
  kPlanarConfig = 284,
  kPredictor = 317,
  kTileWidth = 322,
  kTileLength = 323,
  kTileOffsets = 324,
  kSampleFormat = 339,
  kModelPixelScale = 33550,
  kModelTiepoint = 33922,
  kModelTransformation = 34264,
  kGeoKeyDirectory = 34735,
  kGdalNodata = 42113,
};

enum FieldType : std::uint16_t {
  kByte = 1,
  kAscii = 2,
  kShort = 3,
  kLong = 4,
  kRational = 5,
  kSByte = 6,
  kUndefined = 7,
  kSShort = 8,
  kSLong = 9,
  kSRational = 10,
  kFloat = 11,
  kDouble = 12,
};

constexpr std::uint16_t kKeyModelType = 1024;
constexpr std::uint16_t kKeyRasterType = 1025;
constexpr std::uint16_t kKeyGeographicType = 2048;
constexpr std::uint16_t kKeyProjectedType = 3072;

constexpr const char* kDescriptionPrefix = "poachgrid;kind=";

std::size_t field_size(std::uint16_t type) {
  switch (type) {
    case kByte:
    case kAscii:
    case kSByte:
    case kUndefined:
      return 1;
    case kShort:
    case kSShort:
      return 2;
    case kLong:
    case kSLong:
    case kFloat:
      return 4;
    case kRational:
    case kSRational:
    case kDouble:
      return 8;
    default:
      return 0;
  }
}

class TiffBytes {
public:
  TiffBytes(std::span<const std::uint8_t> bytes, bool big_endian)
      : bytes_(bytes), big_endian_(big_endian) {}

  void require(std::uint64_t offset, std::uint64_t length, const char* what) const {
    if (offset > bytes_.size() || length > bytes_.size() - offset) {
      std::ostringstream msg;
      msg << "GeoTIFF truncated: " << what << " needs " << length << " bytes at offset " << offset
          << " but file has " << bytes_.size() << " bytes";
      throw input_error(msg.str());
    }
  }

  template <typename T>
  T read(std::uint64_t offset) const {
    require(offset, sizeof(T), "field");
    T value;
    std::memcpy(&value, bytes_.data() + offset, sizeof(T));
    if (big_endian_ != (std::endian::native == std::endian::big)) value = swap(value);
    return value;
  }

  std::span<const std::uint8_t> slice(std::uint64_t offset, std::uint64_t length,
                                      const char* what) const {
    require(offset, length, what);
    return bytes_.subspan(offset, length);
  }

  bool big_endian() const { return big_endian_; }

  template <typename T>
  static T swap(T value) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    std::reverse(raw, raw + sizeof(T));
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

private:
  std::span<const std::uint8_t> bytes_;
  bool big_endian_;
};

struct Entry {
  std::uint16_t type = 0;
  std::uint32_t count = 0;
  std::uint64_t data_offset = 0;  // absolute offset of the value bytes
};

class Directory {
public:
  Directory(const TiffBytes& file, std::uint32_t ifd_offset) : file_(file) {
    const auto n = file.read<std::uint16_t>(ifd_offset);
    file.require(ifd_offset + 2, std::uint64_t{n} * 12, "IFD entries");
    for (std::uint16_t i = 0; i < n; ++i) {
      const std::uint64_t at = ifd_offset + 2 + std::uint64_t{i} * 12;
      Entry e;
      const auto tag = file.read<std::uint16_t>(at);
      e.type = file.read<std::uint16_t>(at + 2);
      e.count = file.read<std::uint32_t>(at + 4);
      const std::uint64_t bytes = field_size(e.type) * std::uint64_t{e.count};
      e.data_offset = bytes <= 4 ? at + 8 : file.read<std::uint32_t>(at + 8);
      entries_[tag] = e;
    }
  }

  bool has(std::uint16_t tag) const { return entries_.count(tag) != 0; }

  std::vector<std::uint64_t> uints(std::uint16_t tag) const {
    const Entry& e = get(tag);
    std::vector<std::uint64_t> out(e.count);
    for (std::uint32_t i = 0; i < e.count; ++i) {
      switch (e.type) {
        case kByte:
        case kUndefined:
          out[i] = file_.read<std::uint8_t>(e.data_offset + i);
          break;
        case kShort:
          out[i] = file_.read<std::uint16_t>(e.data_offset + 2 * std::uint64_t{i});
          break;
        case kLong:
          out[i] = file_.read<std::uint32_t>(e.data_offset + 4 * std::uint64_t{i});
          break;
        default:
          throw input_error("GeoTIFF tag " + std::to_string(tag) + " has non-integer field type " +
                            std::to_string(e.type));
      }
    }
    return out;
  }

  std::uint64_t uint(std::uint16_t tag, std::uint64_t fallback) const {
    if (!has(tag)) return fallback;
    const auto v = uints(tag);
    if (v.empty()) throw input_error("GeoTIFF tag " + std::to_string(tag) + " is empty");
    for (auto x : v) {
      if (x != v.front()) {
        throw input_error("GeoTIFF tag " + std::to_string(tag) +
                          " has differing per-sample values");
      }
    }
    return v.front();
  }

  std::vector<double> doubles(std::uint16_t tag) const {
    const Entry& e = get(tag);
    if (e.type != kDouble) {
      throw input_error("GeoTIFF tag " + std::to_string(tag) + " must be DOUBLE typed");
    }
    std::vector<double> out(e.count);
    for (std::uint32_t i = 0; i < e.count; ++i) {
      out[i] = file_.read<double>(e.data_offset + 8 * std::uint64_t{i});
    }
    return out;
  }

  std::string ascii(std::uint16_t tag) const {
    const Entry& e = get(tag);
    const auto raw = file_.slice(e.data_offset, e.count, "ASCII tag");
    std::string s(raw.begin(), raw.end());
    while (!s.empty() && s.back() == '\0') s.pop_back();
    return s;
  }

private:
  const Entry& get(std::uint16_t tag) const {
    auto it = entries_.find(tag);
    if (it == entries_.end()) {
      throw input_error("GeoTIFF is missing required tag " + std::to_string(tag));
    }
    return it->second;
  }

  const TiffBytes& file_;
  std::map<std::uint16_t, Entry> entries_;
};

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '+')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\0')) text.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::vector<std::uint8_t> inflate_strip(std::span<const std::uint8_t> compressed,
                                        std::size_t expected, std::size_t strip,
                                        std::uint64_t offset) {
  std::vector<std::uint8_t> out(expected);
  uLongf produced = static_cast<uLongf>(expected);
  const int rc = uncompress(out.data(), &produced, compressed.data(),
                            static_cast<uLong>(compressed.size()));
  if (rc == Z_BUF_ERROR && produced < expected) {
    std::ostringstream msg;
    msg << "GeoTIFF strip " << strip << " at offset " << offset << " is truncated: inflated "
        << produced << " of " << expected << " bytes";
    throw input_error(msg.str());
  }
  if (rc != Z_OK) {
    std::ostringstream msg;
    msg << "GeoTIFF strip " << strip << " at offset " << offset
        << " failed to inflate (zlib code " << rc << ")";
    throw input_error(msg.str());
  }
  if (produced != expected) {
    std::ostringstream msg;
    msg << "GeoTIFF strip " << strip << " at offset " << offset << " is truncated: inflated "
        << produced << " of " << expected << " bytes";
    throw input_error(msg.str());
  }
  return out;
}

template <typename T>
double load_sample(const std::uint8_t* p, bool swap) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if (swap) v = TiffBytes::swap(v);
  return static_cast<double>(v);
}

using SampleLoader = double (*)(const std::uint8_t*, bool);

SampleLoader pick_loader(std::uint64_t format, std::uint64_t bits) {
  if (format == 1) {
    switch (bits) {
      case 8: return &load_sample<std::uint8_t>;
      case 16: return &load_sample<std::uint16_t>;
      case 32: return &load_sample<std::uint32_t>;
      case 64: return &load_sample<std::uint64_t>;
    }
  } else if (format == 2) {
    switch (bits) {
      case 8: return &load_sample<std::int8_t>;
      case 16: return &load_sample<std::int16_t>;
      case 32: return &load_sample<std::int32_t>;
      case 64: return &load_sample<std::int64_t>;
    }
  } else if (format == 3) {
    switch (bits) {
      case 32: return &load_sample<float>;
      case 64: return &load_sample<double>;
    }
  } else {
    throw input_error("unsupported GeoTIFF SampleFormat (tag 339) value " +
                      std::to_string(format));
  }
  throw input_error("unsupported GeoTIFF BitsPerSample (tag 258) value " + std::to_string(bits) +
                    " for SampleFormat " + std::to_string(format));
}

void apply_geokeys(const Directory& ifd, RasterDataset& out, bool& pixel_is_point) {
  if (!ifd.has(kGeoKeyDirectory)) return;
  const auto keys = ifd.uints(kGeoKeyDirectory);
  if (keys.size() < 4) return;
  const std::size_t n = keys[3];
  for (std::size_t k = 0; k < n && 4 + 4 * k + 3 < keys.size(); ++k) {
    const auto id = keys[4 + 4 * k];
    const auto location = keys[4 + 4 * k + 1];
    const auto value = keys[4 + 4 * k + 3];
    if (location != 0) continue;
    if (id == kKeyRasterType) pixel_is_point = value == 2;
    if ((id == kKeyProjectedType || id == kKeyGeographicType) && value > 0 && value < 32767) {
      if (id == kKeyProjectedType || out.crs_code.empty()) {
        out.crs_code = "EPSG:" + std::to_string(value);
      }
    }
  }
}

}  // namespace

bool RasterDataset::is_nodata(double v) const {
  if (!nodata) return false;
  if (std::isnan(*nodata)) return std::isnan(v);
  return v == *nodata;
}

void RasterDataset::validate() const {
  if (width <= 0 || height <= 0) throw input_error("raster dimensions must be positive");
  if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw input_error("raster value count does not match width x height");
  }
  if (!(transform.pixel_w > 0.0) || !(transform.pixel_h > 0.0)) {
    throw input_error("raster pixel size must be positive");
  }
  if (kind == RasterKind::Categorical) {
    for (double v : values) {
      if (!is_nodata(v) && v != std::floor(v)) {
        throw input_error("categorical raster holds non-integral value " + format_double(v));
      }
    }
  }
}

RasterDataset read_geotiff(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw input_error("GeoTIFF shorter than its 8-byte header");
  bool big_endian = false;
  if (bytes[0] == 'I' && bytes[1] == 'I') {
    big_endian = false;
  } else if (bytes[0] == 'M' && bytes[1] == 'M') {
    big_endian = true;
  } else {
    throw input_error("not a TIFF file: byte-order mark is neither \"II\" nor \"MM\"");
  }
  const TiffBytes file(bytes, big_endian);
  const auto magic = file.read<std::uint16_t>(2);
  if (magic == 43) throw input_error("BigTIFF (version 43) is not supported");
  if (magic != 42) throw input_error("not a TIFF file: version field is " + std::to_string(magic));
  const Directory ifd(file, file.read<std::uint32_t>(4));

  if (ifd.has(kTileWidth) || ifd.has(kTileLength) || ifd.has(kTileOffsets)) {
    throw input_error("tiled GeoTIFF layout (tag 322 TileWidth) is not supported");
  }
  const auto compression = ifd.uint(kCompression, 1);
  if (compression != 1 && compression != 8 && compression != 32946) {
    throw input_error("unsupported GeoTIFF Compression (tag 259) value " +
                      std::to_string(compression));
  }
  if (const auto predictor = ifd.uint(kPredictor, 1); predictor != 1) {
    throw input_error("unsupported GeoTIFF Predictor (tag 317) value " +
                      std::to_string(predictor));
  }
  if (const auto spp = ifd.uint(kSamplesPerPixel, 1); spp != 1) {
    throw input_error("unsupported GeoTIFF SamplesPerPixel (tag 277) value " +
                      std::to_string(spp) + "; only single-band rasters are read");
  }
  if (!ifd.has(kBitsPerSample)) throw input_error("GeoTIFF is missing required tag 258");
  const auto bits = ifd.uint(kBitsPerSample, 0);
  const auto format = ifd.uint(kSampleFormat, 1);
  const SampleLoader loader = pick_loader(format, bits);
  const std::size_t sample_bytes = bits / 8;

  RasterDataset out;
  const auto width = ifd.uint(kImageWidth, 0);
  const auto height = ifd.uint(kImageLength, 0);
  if (width == 0 || height == 0 || width > (1u << 24) || height > (1u << 24)) {
    throw input_error("GeoTIFF has invalid dimensions (tags 256/257)");
  }
  out.width = static_cast<int>(width);
  out.height = static_cast<int>(height);

  if (!ifd.has(kModelTiepoint)) {
    throw input_error(ifd.has(kModelTransformation)
                          ? "GeoTIFF georeferencing via ModelTransformationTag (34264) is not "
                            "supported; ModelTiepointTag (33922) is required"
                          : "GeoTIFF is missing georeferencing tag 33922 (ModelTiepointTag)");
  }
  if (!ifd.has(kModelPixelScale)) {
    throw input_error("GeoTIFF is missing georeferencing tag 33550 (ModelPixelScaleTag)");
  }
  const auto tie = ifd.doubles(kModelTiepoint);
  const auto scale = ifd.doubles(kModelPixelScale);
  if (tie.size() < 6) throw input_error("GeoTIFF tag 33922 needs 6 values");
  if (scale.size() < 2) throw input_error("GeoTIFF tag 33550 needs at least 2 values");
  bool pixel_is_point = false;
  apply_geokeys(ifd, out, pixel_is_point);
  out.transform.pixel_w = scale[0];
  out.transform.pixel_h = scale[1];
  out.transform.origin_x = tie[3] - tie[0] * scale[0];
  out.transform.origin_y = tie[4] + tie[1] * scale[1];
  if (pixel_is_point) {
    out.transform.origin_x -= 0.5 * scale[0];
    out.transform.origin_y += 0.5 * scale[1];
  }
  if (!(out.transform.pixel_w > 0.0) || !(out.transform.pixel_h > 0.0)) {
    throw input_error("GeoTIFF tag 33550 must hold positive pixel sizes");
  }

  if (ifd.has(kGdalNodata)) {
    const auto text = ifd.ascii(kGdalNodata);
    const auto v = parse_double(text);
    if (!v) throw input_error("GeoTIFF tag 42113 holds unparsable nodata \"" + text + "\"");
    out.nodata = *v;
  }
  if (ifd.has(kImageDescription)) {
    const auto desc = ifd.ascii(kImageDescription);
    if (desc.rfind(kDescriptionPrefix, 0) == 0) {
      const std::string rest = desc.substr(std::strlen(kDescriptionPrefix));
      if (rest.rfind("categorical", 0) == 0) out.kind = RasterKind::Categorical;
      const auto crs_at = rest.find(";crs=");
      if (crs_at != std::string::npos) out.crs_code = rest.substr(crs_at + 5);
    }
  }

  if (!ifd.has(kStripOffsets)) throw input_error("GeoTIFF is missing required tag 273");
  if (!ifd.has(kStripByteCounts)) throw input_error("GeoTIFF is missing required tag 279");
  const auto offsets = ifd.uints(kStripOffsets);
  const auto counts = ifd.uints(kStripByteCounts);
  const auto rows_per_strip = std::min<std::uint64_t>(ifd.uint(kRowsPerStrip, height), height);
  if (rows_per_strip == 0) throw input_error("GeoTIFF RowsPerStrip (tag 278) is zero");
  const std::size_t strips = (height + rows_per_strip - 1) / rows_per_strip;
  if (offsets.size() != strips || counts.size() != strips) {
    throw input_error("GeoTIFF strip tags 273/279 list " + std::to_string(offsets.size()) +
                      " strips but the layout needs " + std::to_string(strips));
  }

  const bool swap = big_endian != (std::endian::native == std::endian::big);
  const std::size_t row_bytes = width * sample_bytes;
  out.values.resize(width * height);
  for (std::size_t s = 0; s < strips; ++s) {
    const std::size_t first_row = s * rows_per_strip;
    const std::size_t rows = std::min<std::size_t>(rows_per_strip, height - first_row);
    const std::size_t expected = rows * row_bytes;
    std::vector<std::uint8_t> inflated;
    const std::uint8_t* data = nullptr;
    if (compression == 1) {
      if (counts[s] < expected) {
        std::ostringstream msg;
        msg << "GeoTIFF strip " << s << " at offset " << offsets[s] << " is truncated: "
            << counts[s] << " of " << expected << " bytes declared";
        throw input_error(msg.str());
      }
      data = file.slice(offsets[s], expected, "strip").data();
    } else {
      inflated = inflate_strip(file.slice(offsets[s], counts[s], "compressed strip"), expected, s,
                               offsets[s]);
      data = inflated.data();
    }
    double* dst = out.values.data() + first_row * width;
    for (std::size_t i = 0; i < rows * width; ++i) dst[i] = loader(data + i * sample_bytes, swap);
  }
  return out;
}

namespace {

class TiffWriter {
public:
  void put16(std::uint16_t v) { put(&v, 2); }
  void put32(std::uint32_t v) { put(&v, 4); }
  void put(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    if constexpr (std::endian::native == std::endian::big) {
      bytes.insert(bytes.end(), std::reverse_iterator(p + n), std::reverse_iterator(p));
    } else {
      bytes.insert(bytes.end(), p, p + n);
    }
  }
  void align() {
    if (bytes.size() % 2 != 0) bytes.push_back(0);
  }
  std::uint32_t offset() const { return static_cast<std::uint32_t>(bytes.size()); }

  std::vector<std::uint8_t> bytes;
};

struct OutEntry {
  std::uint16_t tag;
  std::uint16_t type;
  std::uint32_t count;
  std::vector<std::uint8_t> payload;  // little-endian value bytes
};

template <typename T>
OutEntry make_entry(std::uint16_t tag, std::uint16_t type, const std::vector<T>& values) {
  TiffWriter w;
  for (const T& v : values) w.put(&v, sizeof(T));
  return {tag, type, static_cast<std::uint32_t>(values.size()), std::move(w.bytes)};
}

OutEntry ascii_entry(std::uint16_t tag, const std::string& text) {
  std::vector<std::uint8_t> payload(text.begin(), text.end());
  payload.push_back(0);
  const auto n = static_cast<std::uint32_t>(payload.size());
  return {tag, kAscii, n, std::move(payload)};
}

}  // namespace

std::vector<std::uint8_t> write_geotiff(const RasterDataset& raster) {
  raster.validate();
  constexpr std::uint32_t kRowsPerStripOut = 8;
  const auto width = static_cast<std::uint32_t>(raster.width);
  const auto height = static_cast<std::uint32_t>(raster.height);
  const std::uint32_t strips = (height + kRowsPerStripOut - 1) / kRowsPerStripOut;

  TiffWriter w;
  w.bytes.reserve(raster.values.size() * 8 + 512);
  w.put("II", 2);
  w.put16(42);
  w.put32(0);  // IFD offset, patched below

  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> counts;
  for (std::uint32_t s = 0; s < strips; ++s) {
    const std::uint32_t rows = std::min(kRowsPerStripOut, height - s * kRowsPerStripOut);
    offsets.push_back(w.offset());
    counts.push_back(rows * width * 8);
    const double* src = raster.values.data() + std::size_t{s} * kRowsPerStripOut * width;
    for (std::size_t i = 0; i < std::size_t{rows} * width; ++i) w.put(&src[i], 8);
  }

  const GeoTransform& t = raster.transform;
  std::vector<std::uint16_t> geokeys = {1, 1, 0, 0};
  auto add_key = [&](std::uint16_t id, std::uint16_t value) {
    geokeys.insert(geokeys.end(), {id, 0, 1, value});
    ++geokeys[3];
  };
  int epsg = 0;
  if (raster.crs_code.rfind("EPSG:", 0) == 0) {
    const auto digits = std::string_view(raster.crs_code).substr(5);
    auto res = std::from_chars(digits.data(), digits.data() + digits.size(), epsg);
    if (res.ec != std::errc() || res.ptr != digits.data() + digits.size() || epsg <= 0 ||
        epsg >= 32767) {
      epsg = 0;
    }
  }
  if (epsg != 0) add_key(kKeyModelType, 1);
  add_key(kKeyRasterType, 1);
  if (epsg != 0) add_key(kKeyProjectedType, static_cast<std::uint16_t>(epsg));

  std::vector<OutEntry> entries;
  entries.push_back(make_entry<std::uint32_t>(kImageWidth, kLong, {width}));
  entries.push_back(make_entry<std::uint32_t>(kImageLength, kLong, {height}));
  entries.push_back(make_entry<std::uint16_t>(kBitsPerSample, kShort, {64}));
  entries.push_back(make_entry<std::uint16_t>(kCompression, kShort, {1}));
  entries.push_back(make_entry<std::uint16_t>(kPhotometric, kShort, {1}));
  entries.push_back(ascii_entry(
      kImageDescription,
      std::string(kDescriptionPrefix) +
          (raster.kind == RasterKind::Categorical ? "categorical" : "continuous") +
          ";crs=" + raster.crs_code));
  entries.push_back(make_entry(kStripOffsets, kLong, offsets));
  entries.push_back(make_entry<std::uint16_t>(kSamplesPerPixel, kShort, {1}));
  entries.push_back(make_entry<std::uint32_t>(kRowsPerStrip, kLong, {kRowsPerStripOut}));
  entries.push_back(make_entry(kStripByteCounts, kLong, counts));
  entries.push_back(make_entry<std::uint16_t>(kPlanarConfig, kShort, {1}));
  entries.push_back(make_entry<std::uint16_t>(kSampleFormat, kShort, {3}));
  entries.push_back(make_entry<double>(kModelPixelScale, kDouble, {t.pixel_w, t.pixel_h, 0.0}));
  entries.push_back(
      make_entry<double>(kModelTiepoint, kDouble, {0.0, 0.0, 0.0, t.origin_x, t.origin_y, 0.0}));
  entries.push_back(make_entry(kGeoKeyDirectory, kShort, geokeys));
  if (raster.nodata) entries.push_back(ascii_entry(kGdalNodata, format_double(*raster.nodata)));

  // Out-of-line values go after the directory.
  w.align();
  const std::uint32_t ifd_at = w.offset();
  std::uint32_t extra_at = ifd_at + 2 + static_cast<std::uint32_t>(entries.size()) * 12 + 4;
  std::vector<std::uint8_t> extra;
  w.put16(static_cast<std::uint16_t>(entries.size()));
  for (const OutEntry& e : entries) {
    w.put16(e.tag);
    w.put16(e.type);
    w.put32(e.count);
    if (e.payload.size() <= 4) {
      std::uint8_t inline_value[4] = {0, 0, 0, 0};
      std::copy(e.payload.begin(), e.payload.end(), inline_value);
      w.bytes.insert(w.bytes.end(), inline_value, inline_value + 4);
    } else {
      w.put32(extra_at + static_cast<std::uint32_t>(extra.size()));
      extra.insert(extra.end(), e.payload.begin(), e.payload.end());
      if (extra.size() % 2 != 0) extra.push_back(0);
    }
  }
  w.put32(0);  // no further IFDs
  w.bytes.insert(w.bytes.end(), extra.begin(), extra.end());

  const std::uint32_t le_ifd = ifd_at;
  TiffWriter patch;
  patch.put32(le_ifd);
  std::copy(patch.bytes.begin(), patch.bytes.end(), w.bytes.begin() + 4);
  return std::move(w.bytes);
}

}  // namespace poachgrid
