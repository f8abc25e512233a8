#include "poachgrid/rasterops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "poachgrid/error.hpp"

namespace poachgrid {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

FeatureLayer make_layer(const FeatureLayer& like, RasterKind kind, std::string name) {
  FeatureLayer out;
  out.name = std::move(name);
  out.source = like.source;
  out.raster = like.raster;
  out.raster.kind = kind;
  out.raster.nodata = kNodata;
  std::fill(out.raster.values.begin(), out.raster.values.end(), kNodata);
  return out;
}

FeatureLayer grid_layer(const ParkGrid& grid, RasterKind kind, std::string name,
                        FeatureSource source) {
  FeatureLayer out;
  out.name = std::move(name);
  out.source = source;
  out.raster = grid.blank_raster(kind, kNodata);
  return out;
}

// (row, col) steps in D8 code order 1..8: E, SE, S, SW, W, NW, N, NE.
constexpr std::array<std::array<int, 2>, 8> kD8Steps = {{
    {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}};

}  // namespace

bool aligned(const RasterDataset& raster, const ParkGrid& grid) {
  return raster.width == grid.width() && raster.height == grid.height() &&
         raster.transform == grid.transform();
}

void require_aligned(const FeatureLayer& layer, const ParkGrid& grid) {
  if (!aligned(layer.raster, grid)) {
    throw input_error("layer '" + layer.name + "' is not aligned to the park grid");
  }
}

FeatureLayer resample_to_grid(const RasterDataset& src, const ParkGrid& grid, RasterKind kind,
                              std::string name, FeatureSource source) {
  src.validate();
  if (src.transform.pixel_w > grid.resolution() || src.transform.pixel_h > grid.resolution()) {
    throw input_error("source raster '" + name + "' is coarser than the park grid");
  }
  FeatureLayer out = grid_layer(grid, kind, std::move(name), source);
  std::vector<double> sums(grid.size(), 0.0);
  std::vector<std::size_t> counts(grid.size(), 0);
  std::vector<std::map<double, std::size_t>> votes(kind == RasterKind::Categorical ? grid.size()
                                                                                   : 0);
  bool any_inside = false;
  const GeoTransform& t = src.transform;
  for (int r = 0; r < src.height; ++r) {
    const double y = t.origin_y - (r + 0.5) * t.pixel_h;
    for (int c = 0; c < src.width; ++c) {
      const auto cell = grid.locate({t.origin_x + (c + 0.5) * t.pixel_w, y});
      if (!cell) continue;
      any_inside = true;
      const std::size_t id = grid.id_of(cell->row, cell->col);
      const double v = src.at(r, c);
      if (!grid.masked(id) || src.is_nodata(v) || std::isnan(v)) continue;
      if (kind == RasterKind::Categorical) {
        ++votes[id][std::round(v)];
      } else {
        sums[id] += v;
      }
      ++counts[id];
    }
  }
  if (!any_inside) {
    throw input_error("source raster '" + out.name + "' lies entirely outside the park grid");
  }
  for (std::size_t id : grid.masked_ids()) {
    if (counts[id] == 0) continue;
    if (kind == RasterKind::Categorical) {
      // std::map iterates ascending, so the first maximum is the smallest category.
      double best = 0.0;
      std::size_t best_count = 0;
      for (const auto& [category, n] : votes[id]) {
        if (n > best_count) {
          best = category;
          best_count = n;
        }
      }
      out.raster.values[id] = best;
    } else {
      out.raster.values[id] = sums[id] / static_cast<double>(counts[id]);
    }
  }
  return out;
}

SlopeAspect slope_aspect(const FeatureLayer& dem) {
  const RasterDataset& z = dem.raster;
  if (dem.kind() != RasterKind::Continuous) throw input_error("slope needs a continuous DEM");
  SlopeAspect out{make_layer(dem, RasterKind::Continuous, "slope"),
                  make_layer(dem, RasterKind::Continuous, "aspect")};
  const double res = z.transform.pixel_w;
  for (int r = 0; r < z.height; ++r) {
    for (int c = 0; c < z.width; ++c) {
      const double center = z.at(r, c);
      if (z.is_nodata(center)) continue;
      auto v = [&](int dr, int dc) {
        const int rr = std::clamp(r + dr, 0, z.height - 1);
        const int cc = std::clamp(c + dc, 0, z.width - 1);
        const double x = z.at(rr, cc);
        return z.is_nodata(x) ? center : x;
      };
      const double z1 = v(-1, -1), z2 = v(-1, 0), z3 = v(-1, 1);
      const double z4 = v(0, -1), z6 = v(0, 1);
      const double z7 = v(1, -1), z8 = v(1, 0), z9 = v(1, 1);
      const double dzdx = ((z3 + 2 * z6 + z9) - (z1 + 2 * z4 + z7)) / (8 * res);
      const double dzdy = ((z7 + 2 * z8 + z9) - (z1 + 2 * z2 + z3)) / (8 * res);
      const std::size_t id = static_cast<std::size_t>(r) * z.width + c;
      out.slope.raster.values[id] = std::atan(std::hypot(dzdx, dzdy)) * kRadToDeg;
      if (dzdx == 0.0 && dzdy == 0.0) continue;
      // dzdy grows southward, so the descent vector is (-dzdx east, +dzdy north).
      double bearing = std::atan2(-dzdx, dzdy) * kRadToDeg;
      if (bearing < 0.0) bearing += 360.0;
      if (bearing >= 360.0) bearing -= 360.0;
      out.aspect.raster.values[id] = bearing;
    }
  }
  return out;
}

FeatureLayer d8_flow_direction(const FeatureLayer& dem) {
  const RasterDataset& z = dem.raster;
  FeatureLayer out = make_layer(dem, RasterKind::Categorical, "drainage_direction");
  const double res = z.transform.pixel_w;
  const double diagonal = res * std::numbers::sqrt2;
  for (int r = 0; r < z.height; ++r) {
    for (int c = 0; c < z.width; ++c) {
      const double here = z.at(r, c);
      if (z.is_nodata(here)) continue;
      int best_code = 0;
      double best_rate = 0.0;
      for (int k = 0; k < 8; ++k) {
        const int rr = r + kD8Steps[k][0];
        const int cc = c + kD8Steps[k][1];
        if (rr < 0 || rr >= z.height || cc < 0 || cc >= z.width) continue;
        const double there = z.at(rr, cc);
        if (z.is_nodata(there)) continue;
        const double rate = (here - there) / (k % 2 == 0 ? res : diagonal);
        if (rate > best_rate) {
          best_rate = rate;
          best_code = k + 1;
        }
      }
      out.raster.values[static_cast<std::size_t>(r) * z.width + c] = best_code;
    }
  }
  return out;
}

FeatureLayer flow_accumulation(const FeatureLayer& directions) {
  const RasterDataset& d = directions.raster;
  FeatureLayer out = make_layer(directions, RasterKind::Continuous, "flow_accumulation");
  const std::size_t n = d.values.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> downstream(n, kNone);
  std::vector<std::size_t> indegree(n, 0);
  std::size_t valid = 0;
  for (int r = 0; r < d.height; ++r) {
    for (int c = 0; c < d.width; ++c) {
      const std::size_t id = static_cast<std::size_t>(r) * d.width + c;
      const double code = d.values[id];
      if (d.is_nodata(code)) continue;
      ++valid;
      if (code != std::floor(code) || code < 0 || code > 8) {
        throw input_error("flow direction code " + std::to_string(code) + " is not in 0..8");
      }
      if (code == 0) continue;
      const auto& step = kD8Steps[static_cast<int>(code) - 1];
      const int rr = r + step[0];
      const int cc = c + step[1];
      if (rr < 0 || rr >= d.height || cc < 0 || cc >= d.width) continue;
      const std::size_t to = static_cast<std::size_t>(rr) * d.width + cc;
      if (d.is_nodata(d.values[to])) continue;
      downstream[id] = to;
      ++indegree[to];
    }
  }

  std::vector<double> acc(n, 0.0);
  std::vector<std::size_t> ready;
  for (std::size_t id = 0; id < n; ++id) {
    if (!d.is_nodata(d.values[id]) && indegree[id] == 0) ready.push_back(id);
  }
  std::size_t processed = 0;
  while (!ready.empty()) {
    const std::size_t id = ready.back();
    ready.pop_back();
    ++processed;
    const std::size_t to = downstream[id];
    if (to == kNone) continue;
    acc[to] += acc[id] + 1.0;
    if (--indegree[to] == 0) ready.push_back(to);
  }
  if (processed != valid) {
    throw input_error("flow directions contain a cycle (" + std::to_string(valid - processed) +
                      " cells never drained)");
  }
  for (std::size_t id = 0; id < n; ++id) {
    if (!d.is_nodata(d.values[id])) out.raster.values[id] = acc[id];
  }
  return out;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

namespace {

double distance_to(const Point& p, const Geometry& g) {
  double best = std::numeric_limits<double>::infinity();
  switch (g.type) {
    case GeometryType::Point:
      for (const auto& part : g.parts) {
        for (const auto& q : part) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
      }
      break;
    case GeometryType::Polygon:
      if (point_in_polygon(p, g)) return 0.0;
      [[fallthrough]];
    case GeometryType::Polyline:
      for (const auto& part : g.parts) {
        if (part.size() == 1) best = std::min(best, std::hypot(p.x - part[0].x, p.y - part[0].y));
        for (std::size_t i = 1; i < part.size(); ++i) {
          best = std::min(best, point_segment_distance(p, part[i - 1], part[i]));
        }
      }
      break;
  }
  return best;
}

}  // namespace

FeatureLayer distance_to_geometries(const ParkGrid& grid, const VectorDataset& features,
                                    std::string name, FeatureSource source) {
  if (features.empty()) {
    throw input_error("distance layer '" + name + "' has no geometries to measure to");
  }
  FeatureLayer out = grid_layer(grid, RasterKind::Continuous, std::move(name), source);
  for (std::size_t id : grid.masked_ids()) {
    const Point center = grid.cell_center(id);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : features.geometries) {
      best = std::min(best, distance_to(center, g));
      if (best == 0.0) break;
    }
    out.raster.values[id] = best;
  }
  return out;
}

FeatureLayer distance_to_cells(const ParkGrid& grid, const FeatureLayer& source,
                               CellPredicate predicate, std::string name) {
  require_aligned(source, grid);
  std::vector<Point> targets;
  for (std::size_t id : grid.masked_ids()) {
    if (source.valid(id) && predicate(source.raster.values[id])) {
      targets.push_back(grid.cell_center(id));
    }
  }
  if (targets.empty()) {
    throw input_error("layer '" + source.name + "' has no cell satisfying the distance predicate");
  }
  FeatureLayer out = grid_layer(grid, RasterKind::Continuous,
                                name.empty() ? source.name + "_distance" : std::move(name),
                                source.source);
  for (std::size_t id : grid.masked_ids()) {
    const Point p = grid.cell_center(id);
    double best2 = std::numeric_limits<double>::infinity();
    for (const auto& q : targets) {
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      best2 = std::min(best2, dx * dx + dy * dy);
    }
    out.raster.values[id] = std::sqrt(best2);
  }
  return out;
}

namespace {

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

Moments pooled_moments(const std::vector<const FeatureLayer*>& layers) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto* layer : layers) {
    for (double v : layer->raster.values) {
      if (!layer->raster.is_nodata(v)) {
        sum += v;
        ++n;
      }
    }
  }
  if (n == 0) return {};
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto* layer : layers) {
    for (double v : layer->raster.values) {
      if (!layer->raster.is_nodata(v)) ss += (v - mean) * (v - mean);
    }
  }
  return {mean, std::sqrt(ss / static_cast<double>(n))};
}

FeatureLayer apply_zscore(const FeatureLayer& layer, const Moments& m) {
  if (layer.kind() != RasterKind::Continuous) {
    throw input_error("cannot standardize categorical layer '" + layer.name + "'");
  }
  FeatureLayer out = layer;
  for (double& v : out.raster.values) {
    if (out.raster.is_nodata(v)) continue;
    v = m.stddev > 0.0 ? (v - m.mean) / m.stddev : 0.0;
  }
  return out;
}

}  // namespace

std::vector<FeatureLayer> standardize(const std::vector<FeatureLayer>& layers) {
  std::vector<FeatureLayer> out;
  out.reserve(layers.size());
  for (const auto& layer : layers) out.push_back(apply_zscore(layer, pooled_moments({&layer})));
  return out;
}

std::vector<FeatureLayer> standardize_pooled(const std::vector<FeatureLayer>& layers) {
  std::vector<const FeatureLayer*> ptrs;
  for (const auto& layer : layers) ptrs.push_back(&layer);
  const Moments m = pooled_moments(ptrs);
  std::vector<FeatureLayer> out;
  out.reserve(layers.size());
  for (const auto& layer : layers) out.push_back(apply_zscore(layer, m));
  return out;
}

double layer_quantile(const FeatureLayer& layer, double q) {
  std::vector<double> values;
  for (double v : layer.raster.values) {
    if (!layer.raster.is_nodata(v)) values.push_back(v);
  }
  if (values.empty()) throw input_error("layer '" + layer.name + "' has no valid cells");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  const auto rank = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q * n)));
  return values[std::min(rank, values.size()) - 1];
}

}  // namespace poachgrid
