#include "poachgrid/synth.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "poachgrid/dataset.hpp"
#include "poachgrid/error.hpp"
#include "poachgrid/geoformats.hpp"
#include "poachgrid/grid.hpp"
#include "poachgrid/rasterops.hpp"
#include "poachgrid/rng.hpp"
#include "poachgrid/temporal.hpp"

namespace poachgrid {

namespace fs = std::filesystem;
using nlohmann::json;

void SynthConfig::validate() const {
  if (size < 8) throw config_error("synth size must be at least 8 cells per side");
  if (years < 4) throw config_error("synth years must be at least 4");
  if (!(resolution > 0.0)) throw config_error("synth resolution must be positive");
  if (!(dem_resolution > 0.0) || dem_resolution > resolution) {
    throw config_error("synth dem_resolution must be positive and no coarser than resolution");
  }
  if (!(detection_rate > 0.0)) throw config_error("synth detection_rate must be positive");
  if (!(effort_budget > 0.0)) throw config_error("synth effort_budget must be positive");
}

SynthConfig parse_synth_config(std::string_view json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("synth config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("synth config must be a JSON object");
  SynthConfig c;
  try {
    if (j.value("version", 0) != 1) throw config_error("synth config needs \"version\": 1");
    if (j.contains("seed")) {
      const auto& s = j.at("seed");
      c.seed = s.is_string() ? std::stoull(s.get<std::string>()) : s.get<std::uint64_t>();
    }
    c.size = j.value("size", c.size);
    c.first_year = j.value("first_year", c.first_year);
    c.years = j.value("years", c.years);
    c.resolution = j.value("resolution", c.resolution);
    c.dem_resolution = j.value("dem_resolution", c.dem_resolution);
    c.detection_rate = j.value("detection_rate", c.detection_rate);
    c.effort_budget = j.value("effort_budget", c.effort_budget);
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      c.weights.bias = w.value("bias", c.weights.bias);
      c.weights.elevation = w.value("elevation", c.weights.elevation);
      c.weights.npp = w.value("npp", c.weights.npp);
      c.weights.river_distance = w.value("river_distance", c.weights.river_distance);
      c.weights.road_distance = w.value("road_distance", c.weights.road_distance);
    }
    const std::string out = j.value("output_dir", std::string("synth"));
    c.output_dir = fs::path(out).is_absolute() ? fs::path(out) : base_dir / out;
  } catch (const json::exception& e) {
    throw config_error(std::string("synth config field has the wrong type: ") + e.what());
  } catch (const std::logic_error&) {
    throw config_error("synth seed is not an unsigned integer");
  }
  c.validate();
  return c;
}

SynthConfig load_synth_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open synth config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_synth_config(ss.str(), path.parent_path());
}

namespace {

constexpr double kOriginX = 350000.0;
constexpr double kOriginY = 9950000.0;
constexpr const char* kCrs = "EPSG:32736";

// Substream labels; the second substream coordinate is a per-stream index.
enum Stream : std::uint64_t {
  kDem = 1,
  kBoundary,
  kRoads,
  kLandCover,
  kWater,
  kDynamicField,
  kDynamicNoise,
  kAttack,
  kPatrol,
  kEffortShare,
  kDetect,
  kRecords,
};

constexpr std::array<std::array<int, 2>, 8> kD8Steps = {
    {{0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}};

Rng stream(const SynthConfig& cfg, Stream s, std::uint64_t index = 0) {
  return Rng(substream_seed(cfg.seed, s, index));
}

/// Value noise on a square lattice, bilinear between lattice nodes.
class Lattice {
public:
  Lattice(Rng& rng, double spacing, double extent) : spacing_(spacing) {
    n_ = static_cast<int>(std::ceil(extent / spacing)) + 2;
    values_.resize(static_cast<std::size_t>(n_) * n_);
    for (auto& v : values_) v = rng.uniform() * 2.0 - 1.0;
  }

  double at(double u, double v) const {
    const double gx = std::clamp(u / spacing_, 0.0, n_ - 1.000001);
    const double gy = std::clamp(v / spacing_, 0.0, n_ - 1.000001);
    const int i = static_cast<int>(gx);
    const int j = static_cast<int>(gy);
    const double fx = gx - i;
    const double fy = gy - j;
    auto node = [&](int a, int b) { return values_[static_cast<std::size_t>(b) * n_ + a]; };
    const double top = node(i, j) * (1 - fx) + node(i + 1, j) * fx;
    const double bottom = node(i, j + 1) * (1 - fx) + node(i + 1, j + 1) * fx;
    return top * (1 - fy) + bottom * fy;
  }

private:
  double spacing_;
  int n_ = 0;
  std::vector<double> values_;
};

/// Three octaves at lattice spacing 8, 4 and 2 cells, persistence 0.5,
/// normalized to [-1, 1].
class FractalNoise {
public:
  FractalNoise(Rng rng, double extent)
      : octaves_{Lattice(rng, 8.0, extent), Lattice(rng, 4.0, extent), Lattice(rng, 2.0, extent)} {}

  double at(double u, double v) const {
    double sum = 0.0;
    double amplitude = 1.0;
    for (const auto& o : octaves_) {
      sum += amplitude * o.at(u, v);
      amplitude *= 0.5;
    }
    return sum / 1.75;
  }

private:
  std::array<Lattice, 3> octaves_;
};

RasterDataset frame_raster(const SynthConfig& cfg, double pixel, RasterKind kind) {
  RasterDataset r;
  r.width = r.height = static_cast<int>(std::ceil(cfg.size * cfg.resolution / pixel - 1e-9));
  r.transform = {kOriginX, kOriginY, pixel, pixel};
  r.values.assign(static_cast<std::size_t>(r.width) * r.height, 0.0);
  r.kind = kind;
  r.crs_code = kCrs;
  return r;
}

// Pixel center in park-cell units (u east, v south).
std::pair<double, double> cell_units(const SynthConfig& cfg, const RasterDataset& r, int row, int col) {
  const double px = r.transform.pixel_w;
  return {(col + 0.5) * px / cfg.resolution, (row + 0.5) * px / cfg.resolution};
}

Geometry make_boundary(const SynthConfig& cfg) {
  Rng rng = stream(cfg, kBoundary);
  const double half = 0.5 * cfg.size * cfg.resolution;
  const double radius = half - cfg.resolution;
  const double phase2 = rng.uniform() * 2.0 * std::numbers::pi;
  const double phase3 = rng.uniform() * 2.0 * std::numbers::pi;
  const Point center{kOriginX + half, kOriginY - half};
  std::vector<Point> ring;
  constexpr int kVertices = 64;
  for (int k = 0; k < kVertices; ++k) {
    // Clockwise in map coordinates, as shapefile outer rings are.
    const double theta = -2.0 * std::numbers::pi * k / kVertices;
    const double r = radius * (0.8 + 0.12 * std::sin(2.0 * theta + phase2) +
                               0.08 * std::sin(3.0 * theta + phase3));
    ring.push_back({center.x + r * std::cos(theta), center.y + r * std::sin(theta)});
  }
  ring.push_back(ring.front());
  return {GeometryType::Polygon, {ring}};
}

std::vector<Geometry> make_roads(const SynthConfig& cfg) {
  Rng rng = stream(cfg, kRoads);
  const double extent = cfg.size * cfg.resolution;
  const double amplitude = 0.12 * extent;
  const double phase = rng.uniform() * 2.0 * std::numbers::pi;
  const double base_y = kOriginY - extent * (0.35 + 0.3 * rng.uniform());
  std::vector<Point> main;
  constexpr int kSteps = 24;
  for (int k = 0; k <= kSteps; ++k) {
    const double t = static_cast<double>(k) / kSteps;
    const double jitter = (rng.uniform() - 0.5) * 0.02 * extent;
    main.push_back({kOriginX + t * extent,
                    base_y + amplitude * std::sin(2.0 * std::numbers::pi * t + phase) + jitter});
  }
  // Branch south from a point along the main road.
  const Point start = main[kSteps / 3 + rng.below(kSteps / 3)];
  std::vector<Point> branch = {start};
  const double drift = (rng.uniform() - 0.5) * 0.3 * extent;
  for (int k = 1; k <= 8; ++k) {
    const double t = k / 8.0;
    branch.push_back({start.x + drift * t + (rng.uniform() - 0.5) * 0.02 * extent,
                      start.y - t * (start.y - (kOriginY - extent))});
  }
  return {{GeometryType::Polyline, {main}}, {GeometryType::Polyline, {branch}}};
}

double distance_to(const std::vector<Geometry>& lines, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : lines) {
    for (const auto& part : g.parts) {
      for (std::size_t i = 0; i + 1 < part.size(); ++i) {
        best = std::min(best, point_segment_distance(p, part[i], part[i + 1]));
      }
    }
  }
  return best;
}

std::string real_text(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string date_text(int year, int month, int day) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

struct DynamicSpec {
  const char* name;
  double base;
  double amplitude;
  double phase;        // radians, seasonal cycle
  double field_scale;  // spatial structure
  double noise;        // per-month noise sd
  double gap_rate;     // fraction of nodata pixels per month
};

constexpr std::array<DynamicSpec, 6> kDynamic = {{
    {"temperature", 24.0, 3.0, 0.0, 2.0, 0.5, 0.0},
    {"precipitation", 90.0, 60.0, 1.5, 20.0, 10.0, 0.0},
    {"npp", 0.5, 0.15, 2.0, 0.25, 0.04, 0.0},
    {"gpp", 6.0, 1.5, 2.3, 2.0, 0.5, 0.0},
    {"aerosol", 0.3, 0.1, 4.0, 0.05, 0.03, 0.0},
    {"cirrus", 0.02, 0.01, 3.0, 0.005, 0.004, 0.03},
}};

json config_json(const SynthConfig& cfg) {
  return {{"seed", std::to_string(cfg.seed)},
          {"size", cfg.size},
          {"first_year", cfg.first_year},
          {"years", cfg.years},
          {"resolution", cfg.resolution},
          {"dem_resolution", cfg.dem_resolution},
          {"detection_rate", cfg.detection_rate},
          {"effort_budget", cfg.effort_budget},
          {"weights",
           {{"bias", cfg.weights.bias},
            {"elevation", cfg.weights.elevation},
            {"npp", cfg.weights.npp},
            {"river_distance", cfg.weights.river_distance},
            {"road_distance", cfg.weights.road_distance}}}};
}

json pipeline_json(const SynthConfig& cfg) {
  json statics = json::array({
      {{"name", "park_roads"}, {"source", "park"}, {"type", "vector_distance"}, {"path", "roads.shp"}},
      {{"name", "park_rivers"}, {"source", "park"}, {"type", "vector_distance"}, {"path", "rivers.shp"}},
      {{"name", "elevation"}, {"type", "raster"}, {"path", "dem.tif"}},
      {{"name", "land_cover"}, {"type", "raster"}, {"path", "land_cover.tif"}, {"kind", "categorical"}},
      {{"name", "surface_water"}, {"type", "raster_distance"}, {"path", "surface_water.tif"}, {"threshold", 25.0}},
      {{"name", "slope"}, {"type", "slope"}, {"from", "elevation"}},
      {{"name", "aspect"}, {"type", "aspect"}, {"from", "elevation"}},
      {{"name", "drainage_direction"}, {"type", "drainage_direction"}, {"from", "elevation"}, {"kind", "categorical"}},
      {{"name", "flow_accumulation"}, {"type", "flow_accumulation"}, {"from", "elevation"}},
      {{"name", "rivers"}, {"type", "cell_distance"}, {"from", "flow_accumulation"}, {"quantile", 0.95}},
  });
  json dynamics = json::array();
  for (const auto& d : kDynamic) {
    dynamics.push_back({{"name", d.name}, {"dir", std::string("dynamic/") + d.name}});
  }
  return {{"version", 1},
          {"park", "synthetic"},
          {"boundary", "boundary.shp"},
          {"resolution", cfg.resolution},
          {"features", {{"static", statics}, {"dynamic", dynamics}}},
          {"efforts", "efforts.csv"},
          {"activities", "activities.csv"},
          {"test_years", {cfg.first_year + cfg.years - 1}},
          {"conditions", {"baseline", "remote-sensing", "all"}},
          {"train", {{"seed", std::to_string(cfg.seed)}}},
          {"output_dir", "out"}};
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace

SynthSummary generate_park(const SynthConfig& cfg) {
  cfg.validate();
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  const double extent_cells = cfg.size;

  // Boundary and grid.
  const Geometry boundary = make_boundary(cfg);
  write_file(dir / "boundary.shp", write_shapefile({boundary}));
  const ParkGrid grid = build_grid({{boundary}, compute_bbox({boundary}), std::nullopt}, cfg.resolution);

  // DEM: fractal noise plus a regional tilt toward the south-east.
  RasterDataset dem = frame_raster(cfg, cfg.dem_resolution, RasterKind::Continuous);
  {
    const FractalNoise noise(stream(cfg, kDem), extent_cells);
    for (int r = 0; r < dem.height; ++r) {
      for (int c = 0; c < dem.width; ++c) {
        const auto [u, v] = cell_units(cfg, dem, r, c);
        dem.at(r, c) = 900.0 + 180.0 * noise.at(u, v) - 4.0 * (u + v);
      }
    }
  }
  write_file(dir / "dem.tif", write_geotiff(dem));

  // Rivers follow the top 5% of D8 accumulation on the park-resolution DEM.
  const FeatureLayer elevation = resample_to_grid(dem, grid, RasterKind::Continuous, "elevation");
  const FeatureLayer directions = d8_flow_direction(elevation);
  const FeatureLayer accumulation = flow_accumulation(directions);
  const double river_cut = layer_quantile(accumulation, 0.95);
  std::vector<Geometry> rivers;
  for (std::size_t id : grid.masked_ids()) {
    if (accumulation.raster.values[id] < river_cut) continue;
    const int code = static_cast<int>(directions.raster.values[id]);
    if (code == 0) continue;
    const CellIndex at = grid.index_of(id);
    const Point from = grid.cell_center(at.row, at.col);
    const Point to = grid.cell_center(at.row + kD8Steps[code - 1][0], at.col + kD8Steps[code - 1][1]);
    rivers.push_back({GeometryType::Polyline, {{from, to}}});
  }
  if (rivers.empty()) throw internal_error("synthetic DEM produced no river segments");
  write_file(dir / "rivers.shp", write_shapefile(rivers));

  const std::vector<Geometry> roads = make_roads(cfg);
  write_file(dir / "roads.shp", write_shapefile(roads));

  // Surface water occurrence (0..100) and land cover at DEM resolution.
  RasterDataset water = frame_raster(cfg, cfg.dem_resolution, RasterKind::Continuous);
  RasterDataset cover = frame_raster(cfg, cfg.dem_resolution, RasterKind::Categorical);
  {
    Rng wrng = stream(cfg, kWater);
    Rng lrng = stream(cfg, kLandCover);
    for (int r = 0; r < water.height; ++r) {
      for (int c = 0; c < water.width; ++c) {
        const Point p{kOriginX + (c + 0.5) * water.transform.pixel_w,
                      kOriginY - (r + 0.5) * water.transform.pixel_h};
        const bool wet = distance_to(rivers, p) < 300.0;
        water.at(r, c) = wet ? 60.0 + 40.0 * wrng.uniform() : 15.0 * wrng.uniform();
        const double z = dem.at(r, c) + 40.0 * (lrng.uniform() - 0.5);
        const double klass = wet && water.at(r, c) > 90.0 ? 5.0 : z < 800.0 ? 1.0 : z < 900.0 ? 2.0
                                                                   : z < 1000.0 ? 3.0 : 4.0;
        cover.at(r, c) = klass;
      }
    }
  }
  write_file(dir / "surface_water.tif", write_geotiff(water));
  write_file(dir / "land_cover.tif", write_geotiff(cover));

  // Monthly dynamic layers at park resolution.
  const std::vector<Quarter> quarters = quarters_of_years(cfg.first_year, cfg.first_year + cfg.years - 1);
  std::vector<DynamicFeature> dynamic;
  for (std::size_t f = 0; f < kDynamic.size(); ++f) {
    const DynamicSpec& spec = kDynamic[f];
    const FractalNoise field(stream(cfg, kDynamicField, f), extent_cells);
    Rng noise = stream(cfg, kDynamicNoise, f);
    std::vector<TimeStampedLayer> series;
    for (int year = cfg.first_year; year < cfg.first_year + cfg.years; ++year) {
      for (int month = 1; month <= 12; ++month) {
        RasterDataset layer = frame_raster(cfg, cfg.resolution, RasterKind::Continuous);
        layer.nodata = kNodata;
        const double season = std::sin(2.0 * std::numbers::pi * (month - 1) / 12.0 + spec.phase);
        for (int r = 0; r < layer.height; ++r) {
          for (int c = 0; c < layer.width; ++c) {
            const auto [u, v] = cell_units(cfg, layer, r, c);
            const double value = spec.base + spec.amplitude * season +
                                 spec.field_scale * field.at(u, v) + spec.noise * noise.normal();
            const bool gap = spec.gap_rate > 0.0 && noise.uniform() < spec.gap_rate;
            layer.at(r, c) = gap ? kNodata : value;
          }
        }
        char file[48];
        std::snprintf(file, sizeof(file), "%04d-%02d.tif", year, month);
        write_file(dir / "dynamic" / spec.name / file, write_geotiff(layer));
        if (std::string_view(spec.name) == "npp") {
          series.push_back({{year, month}, resample_to_grid(layer, grid, RasterKind::Continuous, "npp")});
        }
      }
    }
    if (!series.empty()) dynamic.push_back({"npp", FeatureSource::RemoteSensing, aggregate_quarters(series, grid)});
  }

  // Ground truth.
  const FeatureLayer z_elev = standardize({elevation}).front();
  const FeatureLayer z_river = standardize({distance_to_geometries(grid, {rivers, {}, {}})}).front();
  const FeatureLayer z_road = standardize({distance_to_geometries(grid, {roads, {}, {}})}).front();
  const FeatureLayer road_m = distance_to_geometries(grid, {roads, {}, {}});
  std::vector<FeatureLayer> npp_slices;
  for (const auto& q : quarters) npp_slices.push_back(dynamic.front().quarters.at(q));
  const std::vector<FeatureLayer> z_npp = standardize_pooled(npp_slices);

  const auto& ids = grid.masked_ids();
  SynthSummary summary;
  summary.masked_cells = ids.size();
  json truth_p = json::array();
  json truth_attack = json::array();
  json patrolled = json::array();
  std::string efforts_csv = "x,y,date,effort\n";
  std::string activities_csv = "x,y,date\n";
  const TruthWeights& w = cfg.weights;

  for (std::size_t qi = 0; qi < quarters.size(); ++qi) {
    const Quarter& q = quarters[qi];
    Rng attack_rng = stream(cfg, kAttack, qi);
    Rng patrol_rng = stream(cfg, kPatrol, qi);
    Rng share_rng = stream(cfg, kEffortShare, qi);
    Rng detect_rng = stream(cfg, kDetect, qi);
    Rng record_rng = stream(cfg, kRecords, qi);

    std::vector<double> p(ids.size());
    std::vector<std::uint8_t> attack(ids.size());
    std::vector<double> weight(ids.size(), 0.0);
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const std::size_t id = ids[k];
      const double logit = w.bias + w.elevation * z_elev.raster.values[id] +
                           w.npp * z_npp[qi].raster.values[id] +
                           w.river_distance * z_river.raster.values[id] +
                           w.road_distance * z_road.raster.values[id];
      p[k] = 1.0 / (1.0 + std::exp(-logit));
      attack[k] = attack_rng.uniform() < p[k] ? 1 : 0;
      const double access = std::exp(-road_m.raster.values[id] / 6000.0);
      const bool patrol = patrol_rng.uniform() < 0.15 + 0.6 * access;
      const double share = share_rng.uniform();
      if (patrol) {
        weight[k] = access * (0.5 + share);
        weight_sum += weight[k];
      }
    }

    json q_patrolled = json::array();
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const double detect_draw = detect_rng.uniform();
      if (weight[k] == 0.0) continue;
      const double effort = cfg.effort_budget * weight[k] / weight_sum;
      const bool detected = attack[k] && detect_draw < 1.0 - std::exp(-cfg.detection_rate * effort);
      ++summary.patrolled_rows;
      summary.patrolled_attacks += attack[k];
      summary.positive_rows += detected;
      q_patrolled.push_back(ids[k]);

      const CellIndex at = grid.index_of(ids[k]);
      const Point corner{grid.transform().origin_x + at.col * cfg.resolution,
                         grid.transform().origin_y - at.row * cfg.resolution};
      auto record = [&](std::string& csv, const std::string* amount) {
        const double x = corner.x + (0.05 + 0.9 * record_rng.uniform()) * cfg.resolution;
        const double y = corner.y - (0.05 + 0.9 * record_rng.uniform()) * cfg.resolution;
        const int month = 3 * (q.index - 1) + 1 + static_cast<int>(record_rng.below(3));
        const int day = 1 + static_cast<int>(record_rng.below(28));
        csv += real_text(x) + "," + real_text(y) + "," + date_text(q.year, month, day);
        if (amount) csv += "," + *amount;
        csv += "\n";
      };
      // Split the effort over one to three patrol records.
      const int parts = 1 + static_cast<int>(record_rng.below(3));
      double left = effort;
      for (int i = 0; i < parts; ++i) {
        const double piece = i + 1 == parts ? left : effort / parts;
        left -= piece;
        const std::string amount = real_text(piece);
        record(efforts_csv, &amount);
      }
      if (detected) record(activities_csv, nullptr);
    }
    for (std::uint8_t a : attack) summary.attacks += a;
    truth_p.push_back(p);
    truth_attack.push_back(attack);
    patrolled.push_back(std::move(q_patrolled));
  }

  write_text(dir / "efforts.csv", efforts_csv);
  write_text(dir / "activities.csv", activities_csv);

  json quarter_labels = json::array();
  for (const auto& q : quarters) quarter_labels.push_back(q.label());
  json manifest = {
      {"version", 1},
      {"config", config_json(cfg)},
      {"grid",
       {{"origin_x", grid.transform().origin_x},
        {"origin_y", grid.transform().origin_y},
        {"resolution", cfg.resolution},
        {"width", grid.width()},
        {"height", grid.height()}}},
      {"summary",
       {{"masked_cells", summary.masked_cells},
        {"patrolled_rows", summary.patrolled_rows},
        {"attacks", summary.attacks},
        {"patrolled_attacks", summary.patrolled_attacks},
        {"positive_rows", summary.positive_rows}}},
      {"truth",
       {{"quarters", quarter_labels},
        {"cell_ids", ids},
        {"p", truth_p},
        {"attack", truth_attack},
        {"patrolled", patrolled}}},
  };
  write_text(dir / "manifest.json", manifest.dump() + "\n");
  write_text(dir / "config.json", pipeline_json(cfg).dump(2) + "\n");
  return summary;
}

}  // namespace poachgrid
