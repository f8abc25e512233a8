// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any asserted criterion fails. Criterion 8 is reported only.
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "poachgrid/dataset.hpp"
#include "poachgrid/eval.hpp"
#include "poachgrid/geoformats.hpp"
#include "poachgrid/grid.hpp"
#include "poachgrid/model.hpp"
#include "poachgrid/pipeline.hpp"
#include "poachgrid/rasterops.hpp"
#include "poachgrid/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace poachgrid;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o, bool asserted = true) {
  std::printf("%s [%d] %s: %s%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(),
              asserted ? "" : " (soft, not asserted)");
  std::fflush(stdout);
  if (asserted && !o.pass) ++failures;
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("threw: ") + e.what()};
  }
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

ParkGrid random_grid(std::mt19937_64& gen, int max_side, bool full) {
  std::uniform_int_distribution<int> side(1, max_side);
  std::uniform_real_distribution<double> res(10.0, 2000.0);
  std::uniform_real_distribution<double> origin(-1e6, 1e6);
  std::bernoulli_distribution keep(0.8);
  const int w = side(gen);
  const int h = side(gen);
  std::vector<bool> mask(static_cast<std::size_t>(w) * h, true);
  if (!full) {
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = keep(gen);
    mask[0] = true;
  }
  const double r = res(gen);
  return ParkGrid({origin(gen), origin(gen), r, r}, w, h, std::move(mask));
}

FeatureLayer layer_on(const ParkGrid& grid, std::vector<double> values,
                      RasterKind kind = RasterKind::Continuous) {
  FeatureLayer l;
  l.name = "layer";
  l.raster = grid.blank_raster(kind, kNodata);
  l.raster.values = std::move(values);
  return l;
}

// ---------------------------------------------------------------------------
// 2. AUC

double auc_pairs(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      pairs += 1;
      if (s[i] > s[j]) wins += 1;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

Outcome auc_oracle() {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<int> size(2, 200);
  std::uniform_int_distribution<int> levels(2, 40);
  const auto t0 = Clock::now();
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = size(gen);
    // Coarse scores on some instances so ties are common.
    const bool coarse = trial % 2 == 0;
    const int k = levels(gen);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (int i = 0; i < n; ++i) {
      s[i] = coarse ? std::floor(u(gen) * k) : u(gen);
      y[i] = u(gen) < 0.3 ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    worst = std::max(worst, std::abs(roc_auc(s, y) - auc_pairs(s, y)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 5.0,
          fmt("1000 instances, max |d| = %.3g, %.2f s", worst, secs)};
}

// ---------------------------------------------------------------------------
// 3. Distances

double seg_dist(Point p, Point a, Point b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

// Winding number over every ring; nonzero means inside.
bool inside(Point p, const Geometry& g) {
  int wn = 0;
  for (const auto& ring : g.parts) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const Point a = ring[i], b = ring[i + 1];
      const double cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
      if (a.y <= p.y && b.y > p.y && cross > 0) ++wn;
      if (a.y > p.y && b.y <= p.y && cross < 0) --wn;
    }
  }
  return wn != 0;
}

double brute_distance(Point p, const std::vector<Geometry>& gs) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : gs) {
    if (g.type == GeometryType::Polygon && inside(p, g)) return 0.0;
    for (const auto& part : g.parts) {
      if (part.size() == 1) best = std::min(best, std::hypot(p.x - part[0].x, p.y - part[0].y));
      for (std::size_t i = 1; i < part.size(); ++i) best = std::min(best, seg_dist(p, part[i - 1], part[i]));
    }
  }
  return best;
}

std::vector<Geometry> random_geometries(std::mt19937_64& gen, const ParkGrid& grid) {
  const auto& t = grid.transform();
  const double w = grid.width() * t.pixel_w, h = grid.height() * t.pixel_h;
  std::uniform_real_distribution<double> fx(-0.2, 1.2), fy(-0.2, 1.2), u(0, 1);
  auto point = [&] { return Point{t.origin_x + fx(gen) * w, t.origin_y - fy(gen) * h}; };
  std::uniform_int_distribution<int> count(1, 20), type(0, 2), verts(2, 8);
  std::vector<Geometry> out(count(gen));
  for (auto& g : out) {
    switch (type(gen)) {
      case 0:
        g = {GeometryType::Point, {{point()}}};
        break;
      case 1: {
        std::vector<Point> line(verts(gen));
        for (auto& p : line) p = point();
        g = {GeometryType::Polyline, {line}};
        break;
      }
      default: {
        // Star-shaped ring around a center, angles sorted so it is simple.
        const Point c = point();
        const double r = (0.05 + 0.3 * u(gen)) * std::max(w, h);
        std::vector<double> ang(verts(gen) + 1);
        for (auto& a : ang) a = u(gen) * 2 * std::numbers::pi;
        std::sort(ang.begin(), ang.end());
        std::vector<Point> ring;
        for (double a : ang) {
          const double rr = r * (0.4 + 0.6 * u(gen));
          ring.push_back({c.x + rr * std::cos(a), c.y + rr * std::sin(a)});
        }
        ring.push_back(ring.front());
        g = {GeometryType::Polygon, {ring}};
      }
    }
  }
  return out;
}

Outcome distance_oracle() {
  std::mt19937_64 gen(3);
  double worst = 0;
  int trials = 0;
  for (; trials < 200; ++trials) {
    const ParkGrid grid = random_grid(gen, 50, trials % 3 == 0);
    const auto geoms = random_geometries(gen, grid);
    VectorDataset ds;
    ds.geometries = geoms;
    ds.bbox = compute_bbox(geoms);
    const auto d = distance_to_geometries(grid, ds);
    for (std::size_t id : grid.masked_ids()) {
      worst = std::max(worst, std::abs(d.raster.values[id] - brute_distance(grid.cell_center(id), geoms)));
    }
    // Cell targets: a random subset of masked cells, at least one.
    std::vector<double> v(grid.size(), kNodata);
    std::bernoulli_distribution pick(0.05 + 0.1 * (trials % 4));
    for (std::size_t id : grid.masked_ids()) v[id] = pick(gen) ? 1.0 : 0.0;
    v[grid.masked_ids().front()] = 1.0;
    const auto dc = distance_to_cells(grid, layer_on(grid, v), {CellPredicate::Op::Equals, 1.0});
    for (std::size_t id : grid.masked_ids()) {
      const Point p = grid.cell_center(id);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t s : grid.masked_ids()) {
        if (v[s] != 1.0) continue;
        const Point q = grid.cell_center(s);
        best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
      }
      worst = std::max(worst, std::abs(dc.raster.values[id] - best));
    }
  }
  return {worst <= 1e-9, fmt("%d random grids, max |d| = %.3g m", trials, worst)};
}

// ---------------------------------------------------------------------------
// 4. Terrain

Outcome terrain() {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> grad(-1.5, 1.5), u(0, 1);
  double worst_slope = 0, worst_aspect = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const ParkGrid grid = random_grid(gen, 30, true);
    if (grid.width() < 3 || grid.height() < 3) {
      --trial;
      continue;
    }
    const double a = grad(gen), b = grad(gen), c = 1000 * u(gen);
    std::vector<double> z(grid.size());
    for (std::size_t id = 0; id < grid.size(); ++id) {
      const Point p = grid.cell_center(id);
      z[id] = c + a * (p.x - grid.transform().origin_x) + b * (p.y - grid.transform().origin_y);
    }
    const auto sa = slope_aspect(layer_on(grid, z));
    const double slope = std::atan(std::hypot(a, b)) * 180 / std::numbers::pi;
    double aspect = std::atan2(-a, -b) * 180 / std::numbers::pi;
    if (aspect < 0) aspect += 360;
    for (int r = 1; r + 1 < grid.height(); ++r) {
      for (int col = 1; col + 1 < grid.width(); ++col) {
        worst_slope = std::max(worst_slope, std::abs(sa.slope.raster.at(r, col) - slope));
        double da = std::abs(sa.aspect.raster.at(r, col) - aspect);
        da = std::min(da, 360 - da);
        worst_aspect = std::max(worst_aspect, da);
      }
    }
  }
  const bool planes_ok = worst_slope <= 1e-9 && worst_aspect <= 1e-9;

  // Pit-free DEMs: a tilt of at least 10 m per cell along one axis dominates
  // noise of at most 5 m, so every interior cell has a lower neighbour.
  static const int steps[8][2] = {{0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};
  const ParkGrid grid({0, 20000, 1000, 1000}, 20, 20, std::vector<bool>(400, true));
  std::uniform_real_distribution<double> tilt(10, 20), noise(0, 5);
  int mismatches = 0;
  int pits = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double sx = (trial % 2 ? 1 : -1) * tilt(gen), sy = (trial % 4 < 2 ? 1 : -1) * tilt(gen);
    std::vector<double> z(400);
    for (int r = 0; r < 20; ++r) {
      for (int col = 0; col < 20; ++col) z[r * 20 + col] = 1000 + sx * col + sy * r + noise(gen);
    }
    // Independent D8: steepest drop per unit distance, first maximum wins.
    std::vector<int> code(400, 0);
    for (int r = 0; r < 20; ++r) {
      for (int col = 0; col < 20; ++col) {
        double best = 0;
        for (int k = 0; k < 8; ++k) {
          const int rr = r + steps[k][0], cc = col + steps[k][1];
          if (rr < 0 || rr >= 20 || cc < 0 || cc >= 20) continue;
          const double dist = (k % 2) ? std::sqrt(2.0) * 1000 : 1000;
          const double drop = (z[r * 20 + col] - z[rr * 20 + cc]) / dist;
          if (drop > best) {
            best = drop;
            code[r * 20 + col] = k + 1;
          }
        }
        if (r > 0 && r < 19 && col > 0 && col < 19 && code[r * 20 + col] == 0) ++pits;
      }
    }
    const auto dirs = d8_flow_direction(layer_on(grid, z, RasterKind::Continuous));
    const auto acc = flow_accumulation(dirs);
    std::vector<double> want(400, 0);
    for (int start = 0; start < 400; ++start) {
      int r = start / 20, col = start % 20;
      while (code[r * 20 + col] != 0) {
        const int k = code[r * 20 + col] - 1;
        r += steps[k][0];
        col += steps[k][1];
        want[r * 20 + col] += 1;
      }
    }
    for (int i = 0; i < 400; ++i) {
      if (acc.raster.values[i] != want[i] || dirs.raster.values[i] != code[i]) ++mismatches;
    }
  }
  return {planes_ok && mismatches == 0 && pits == 0,
          fmt("20 planes: max slope |d| = %.3g deg, max aspect |d| = %.3g deg; 50 DEMs: %d cell "
              "mismatches, %d interior pits",
              worst_slope, worst_aspect, mismatches, pits)};
}

// ---------------------------------------------------------------------------
// 5. Formats

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Outcome formats() {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> side(1, 64);
  std::uniform_real_distribution<double> coord(-1e7, 1e7), res(0.001, 5000);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RasterDataset r;
    r.width = side(gen);
    r.height = side(gen);
    r.transform = {coord(gen), coord(gen), res(gen), res(gen)};
    r.values.resize(static_cast<std::size_t>(r.width) * r.height);
    if (trial % 3 == 0) {
      r.kind = RasterKind::Categorical;
      for (auto& v : r.values) v = static_cast<double>(gen() % 12);
    } else {
      // Arbitrary bit patterns, NaN payloads and infinities included.
      for (auto& v : r.values) {
        const std::uint64_t bits = gen();
        std::memcpy(&v, &bits, sizeof v);
      }
    }
    if (trial % 2 == 0) r.nodata = trial % 4 == 0 ? -9999.0 : coord(gen);
    if (trial % 5 != 0) r.crs_code = "EPSG:" + std::to_string(32600 + gen() % 200);
    const RasterDataset back = read_geotiff(write_geotiff(r));
    const bool ok = back.width == r.width && back.height == r.height && back.transform == r.transform &&
                    same_bits(back.values, r.values) && back.kind == r.kind &&
                    back.crs_code == r.crs_code && back.nodata.has_value() == r.nodata.has_value() &&
                    (!r.nodata || std::memcmp(&*back.nodata, &*r.nodata, sizeof(double)) == 0);
    if (!ok) ++bad;
  }

  const fs::path fixtures = POACHGRID_FIXTURES;
  std::ifstream in(fixtures / "expected.json");
  const json e = json::parse(in);
  int checked = 0, fixture_bad = 0;
  for (const auto& [name, want] : e.at("rasters").items()) {
    ++checked;
    const RasterDataset r = load_geotiff(fixtures / name);
    bool ok = r.width == want.at("width").get<int>() && r.height == want.at("height").get<int>() &&
              r.transform.origin_x == want.at("origin_x").get<double>() &&
              r.transform.origin_y == want.at("origin_y").get<double>() &&
              r.transform.pixel_w == want.at("pixel_w").get<double>() &&
              r.transform.pixel_h == want.at("pixel_h").get<double>() &&
              r.values == want.at("values").get<std::vector<double>>();
    ok = ok && (want.at("nodata").is_null() ? !r.nodata.has_value()
                                             : r.nodata && *r.nodata == want.at("nodata").get<double>());
    if (!ok) ++fixture_bad;
  }
  for (const auto& [name, tag] : e.at("rejected").items()) {
    ++checked;
    try {
      load_geotiff(fixtures / name);
      ++fixture_bad;
    } catch (const Error& err) {
      if (std::string(err.what()).find(tag.get<std::string>()) == std::string::npos) ++fixture_bad;
    }
  }
  // Shapefiles: null shapes dropped, each polyline part its own geometry.
  for (const auto& [name, want] : e.at("shapefiles").items()) {
    ++checked;
    std::vector<Geometry> expect;
    for (const auto& shape : want.at("shapes")) {
      const int type = shape.at("type").get<int>();
      if (type == 0) continue;
      const auto pts = shape.at("points").get<std::vector<std::array<double, 2>>>();
      const auto parts = shape.at("parts").get<std::vector<std::size_t>>();
      if (type == 1) {
        expect.push_back({GeometryType::Point, {{{pts[0][0], pts[0][1]}}}});
        continue;
      }
      std::vector<std::vector<Point>> rings;
      for (std::size_t p = 0; p < parts.size(); ++p) {
        const std::size_t end = p + 1 < parts.size() ? parts[p + 1] : pts.size();
        std::vector<Point> ring;
        for (std::size_t i = parts[p]; i < end; ++i) ring.push_back({pts[i][0], pts[i][1]});
        rings.push_back(ring);
      }
      if (type == 3) {
        for (auto& r : rings) expect.push_back({GeometryType::Polyline, {r}});
      } else {
        expect.push_back({GeometryType::Polygon, rings});
      }
    }
    const VectorDataset v = load_shapefile(fixtures / name);
    bool ok = v.geometries.size() == expect.size();
    for (std::size_t g = 0; ok && g < expect.size(); ++g) {
      ok = v.geometries[g].type == expect[g].type && v.geometries[g].parts == expect[g].parts;
    }
    if (!ok) ++fixture_bad;
  }
  return {bad == 0 && fixture_bad == 0,
          fmt("100 random rasters: %d differ; %d fixtures: %d differ", bad, checked, fixture_bad)};
}

// ---------------------------------------------------------------------------
// 6. Model degeneracy

ObservationTable random_table(std::mt19937_64& gen, std::size_t n, std::size_t cols) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<FeatureSpec> specs;
  for (std::size_t c = 0; c < cols; ++c) {
    FeatureSpec s;
    s.name = "f" + std::to_string(c);
    s.source = FeatureSource::Park;
    specs.push_back(s);
  }
  ObservationTable t;
  t.catalog = FeatureCatalog(specs);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols; ++c) t.features.push_back(std::round(u(gen) * 20) / 20);
    t.labels.push_back(u(gen) < 0.15 + 0.7 * t.features[r * cols] * t.features[r * cols + cols - 1] ? 1 : 0);
    t.efforts.push_back(0.1 + std::round(u(gen) * 50) / 10);
    t.cell_ids.push_back(r);
    t.quarters.push_back({2020, 1});
    t.missing.insert(t.missing.end(), cols, 0);
  }
  return t;
}

Outcome degeneracy() {
  std::mt19937_64 gen(6);
  std::size_t compared = 0, differ = 0, leaves = 0, leaf_bad = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = random_table(gen, 100 + 20 * trial, 2 + trial % 4);
    const TrainingView view = TrainingView::of(t);
    std::vector<std::size_t> rows(t.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;

    TrainConfig cfg;
    cfg.num_bins = 1;
    cfg.trees_per_bin = 6;
    cfg.seed = 1000 + trial;
    const auto ens = train_iware(t, cfg, 1 + trial % 3);
    const auto bag = train_bagging(view, rows, cfg, 0);
    for (std::size_t r = 0; r < t.rows(); ++r) {
      for (double e : {0.0, 0.7, 2.5, 1e9}) {
        ++compared;
        if (predict_at_effort(ens, t.row(r), e) != bag.predict(t.row(r))) ++differ;
      }
    }

    cfg.trees_per_bin = 1;
    cfg.bootstrap = false;
    const auto single = train_iware(t, cfg);
    const auto tree = train_tree(view, rows, cfg);
    // Route every row down the tree and tally its leaf.
    std::map<int, std::pair<double, double>> tally;  // leaf -> (positives, rows)
    std::vector<int> leaf_of(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) {
      int node = 0;
      while (!tree.nodes[node].leaf()) {
        const auto& nd = tree.nodes[node];
        node = t.value(r, nd.feature) <= nd.threshold ? nd.left : nd.right;
      }
      leaf_of[r] = node;
      tally[node].first += t.labels[r];
      tally[node].second += 1;
    }
    for (const auto& [node, pn] : tally) {
      ++leaves;
      if (tree.nodes[node].fraction != pn.first / pn.second) ++leaf_bad;
    }
    for (std::size_t r = 0; r < t.rows(); ++r) {
      ++compared;
      const auto& pn = tally[leaf_of[r]];
      if (predict_at_effort(single, t.row(r), 1.0) != pn.first / pn.second) ++differ;
    }
  }
  return {differ == 0 && leaf_bad == 0,
          fmt("%zu predictions, %zu differ; %zu leaves, %zu fractions differ", compared, differ,
              leaves, leaf_bad)};
}

// ---------------------------------------------------------------------------
// 7-9. Synthetic park

struct Metric {
  double auc = 0;
  bool found = false;
};

std::map<std::string, Metric> read_metrics(const fs::path& path, int year) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::map<std::string, Metric> out;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string park, y, cond, auc;
    std::getline(ss, park, ',');
    std::getline(ss, y, ',');
    std::getline(ss, cond, ',');
    std::getline(ss, auc, ',');
    if (y == std::to_string(year)) out[cond] = {std::stod(auc), true};
  }
  return out;
}

std::map<std::string, double> read_roughness(const fs::path& path, int year) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::map<std::string, double> out;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string y, cond, effort, rough;
    std::getline(ss, y, ',');
    std::getline(ss, cond, ',');
    std::getline(ss, effort, ',');
    std::getline(ss, rough, ',');
    if (y == std::to_string(year)) out[cond] = std::stod(rough);
  }
  return out;
}

std::map<std::string, std::vector<std::uint8_t>> snapshot(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).string()] = read_file(entry.path());
  }
  return files;
}

int run_cli(const std::string& args, const std::string& env) {
  const std::string cmd = env + " '" POACHGRID_CLI "' " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

int main() {
  Outcome c2 = guarded(auc_oracle);
  Outcome c3 = guarded(distance_oracle);
  Outcome c4 = guarded(terrain);
  Outcome c5 = guarded(formats);
  Outcome c6 = guarded(degeneracy);

  const fs::path work = fs::temp_directory_path() / "poachgrid-acceptance";
  fs::remove_all(work);
  SynthConfig synth;
  synth.output_dir = work / "park";
  const int final_year = synth.first_year + synth.years - 1;
  const fs::path config_path = synth.output_dir / "config.json";

  Outcome c8;
  Outcome c7 = guarded([&] {
    const auto t0 = Clock::now();
    generate_park(synth);
    run_stage("run", config_path, {});
    const double secs = seconds_since(t0);
    const PipelineConfig config = load_pipeline_config(config_path);
    const auto m = read_metrics(config.output_dir / "metrics.csv", final_year);
    const Metric all = m.count("all") ? m.at("all") : Metric{};
    const Metric rs = m.count("remote-sensing") ? m.at("remote-sensing") : Metric{};

    const AssembleResult data = assemble_observations(config);
    // Null check: mean over a fixed set of training-label permutations. One
    // permutation alone scatters widely because a model fit to noise is still
    // a smooth surface that can line up with the true risk by chance.
    ExperimentOptions opts;
    opts.train = config.train;
    opts.threads = 0;
    double null_auc = 0, null_lo = 1, null_hi = 0;
    constexpr int kPermutations = 20;
    for (int k = 0; k < kPermutations; ++k) {
      opts.permute_train_labels = synth.seed + 7919 * (k + 1);
      const ExperimentCell cell = run_experiment_cell(data.table, final_year, Condition::All, opts);
      const double auc = roc_auc(cell.scores, cell.test.labels);
      null_auc += auc / kPermutations;
      null_lo = std::min(null_lo, auc);
      null_hi = std::max(null_hi, auc);
    }

    const auto rough = read_roughness(config.output_dir / "roughness.csv", final_year);
    if (rough.count("all") && rough.count("baseline")) {
      c8 = {rough.at("all") <= rough.at("baseline"),
            fmt("roughness all = %.4f, baseline = %.4f", rough.at("all"), rough.at("baseline"))};
    } else {
      c8 = {false, "roughness.csv lacks the all or baseline row"};
    }

    const bool ok = all.found && rs.found && all.auc >= 0.70 && null_auc >= 0.45 && null_auc <= 0.55 &&
                    std::abs(rs.auc - all.auc) <= 0.10 && secs < 300;
    return Outcome{ok, fmt("%d AUC all = %.4f, remote-sensing = %.4f, |d| = %.4f; permuted-label "
                           "AUC mean = %.4f over %d (range %.3f-%.3f); synth + run %.1f s",
                           final_year, all.auc, rs.auc, std::abs(rs.auc - all.auc), null_auc,
                           kPermutations, null_lo, null_hi, secs)};
  });

  Outcome c9 = guarded([&] {
    const fs::path out = synth.output_dir / "out";
    if (!fs::exists(out)) return Outcome{false, "no library run to compare against"};
    const auto reference = snapshot(out);
    std::string detail = fmt("%zu files", reference.size());
    bool ok = !reference.empty();
    for (const char* threads : {"1", "8"}) {
      fs::remove_all(out);
      const int status = run_cli("run --config '" + config_path.string() + "'",
                                 std::string("POACHGRID_THREADS=") + threads);
      const bool same = status == 0 && snapshot(out) == reference;
      ok = ok && same;
      detail += fmt("; threads=%s %s", threads, same ? "identical" : "differs");
    }
    return Outcome{ok, detail};
  });

  const bool substitutes = c2.pass && c3.pass && c4.pass && c5.pass && c6.pass && c7.pass && c9.pass;
  report(1, "published table not reproducible (proprietary patrol data)",
         {substitutes, substitutes ? "property substitutes 2-7 and 9 all pass"
                                   : "a property substitute failed"});
  report(2, "AUC matches pair counting", c2);
  report(3, "distances match brute force", c3);
  report(4, "terrain exactness", c4);
  report(5, "format roundtrip and fixtures", c5);
  report(6, "model degeneracy", c6);
  report(7, "synthetic end-to-end experiment", c7);
  report(8, "all-features map no rougher than baseline", c8, false);
  report(9, "determinism across thread counts", c9);

  fs::remove_all(work);
  return failures == 0 ? 0 : 1;
}
