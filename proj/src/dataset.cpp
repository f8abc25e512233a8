#include "poachgrid/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "poachgrid/error.hpp"

namespace poachgrid {

const std::vector<std::string>& reserved_remote_sensing_names() {
  static const std::vector<std::string> names = {
      "land_cover", "rivers",      "surface_water", "flow_accumulation", "elevation",
      "slope",      "aspect",      "drainage_direction", "temperature", "precipitation",
      "npp",        "gpp",         "aerosol",       "cirrus"};
  return names;
}

bool is_reserved_name(std::string_view name) {
  const auto& names = reserved_remote_sensing_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

FeatureCatalog::FeatureCatalog(std::vector<FeatureSpec> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (e.name.empty()) throw config_error("feature names must be non-empty");
    if (!seen.insert(e.name).second) throw config_error("duplicate feature name '" + e.name + "'");
    const bool reserved = is_reserved_name(e.name);
    if (e.source == FeatureSource::RemoteSensing && !reserved) {
      throw config_error("remote-sensing feature '" + e.name +
                         "' must use one of the reserved remote-sensing names");
    }
    if (e.source == FeatureSource::Park && reserved) {
      throw config_error("park feature '" + e.name + "' uses a reserved remote-sensing name");
    }
  }
}

std::vector<std::string> FeatureCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

std::size_t FeatureCatalog::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  throw input_error("feature '" + std::string(name) + "' is not in the catalog");
}

Date parse_date(std::string_view text) {
  auto number = [&](std::size_t at, std::size_t len) {
    int v = 0;
    const char* begin = text.data() + at;
    auto res = std::from_chars(begin, begin + len, v);
    if (res.ec != std::errc() || res.ptr != begin + len) {
      throw input_error("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    return v;
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw input_error("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  Date d{number(0, 4), number(5, 2), number(8, 2)};
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (d.month < 1 || d.month > 12) throw input_error("invalid month in date '" + std::string(text) + "'");
  const bool leap = (d.year % 4 == 0 && d.year % 100 != 0) || d.year % 400 == 0;
  const int days = kDays[d.month - 1] + (d.month == 2 && leap ? 1 : 0);
  if (d.day < 1 || d.day > days) throw input_error("invalid day in date '" + std::string(text) + "'");
  return d;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_real(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw input_error("line " + std::to_string(line_no) + ": invalid number '" +
                      std::string(field) + "'");
  }
  return v;
}

// Yields data rows keyed by the required header columns.
template <typename Fn>
void for_each_csv_row(std::string_view text, const std::vector<std::string>& columns, Fn&& fn) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::size_t> index;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto fields = split_fields(line);
    if (index.empty()) {
      for (const auto& col : columns) {
        auto it = std::find(fields.begin(), fields.end(), col);
        if (it == fields.end()) throw input_error("CSV header lacks column '" + col + "'");
        index.push_back(static_cast<std::size_t>(it - fields.begin()));
      }
      continue;
    }
    std::vector<std::string_view> picked;
    for (std::size_t i : index) {
      if (i >= fields.size()) {
        throw input_error("line " + std::to_string(line_no) + ": too few fields");
      }
      picked.push_back(fields[i]);
    }
    fn(picked, line_no);
  }
  if (index.empty()) throw input_error("CSV input has no header row");
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<ActivityRecord> parse_activities_csv(std::string_view text) {
  std::vector<ActivityRecord> out;
  for_each_csv_row(text, {"x", "y", "date"}, [&](const auto& f, std::size_t line) {
    out.push_back({parse_real(f[0], line), parse_real(f[1], line), parse_date(f[2])});
  });
  return out;
}

std::vector<EffortRecord> parse_efforts_csv(std::string_view text) {
  std::vector<EffortRecord> out;
  for_each_csv_row(text, {"x", "y", "date", "effort"}, [&](const auto& f, std::size_t line) {
    const double effort = parse_real(f[3], line);
    if (effort < 0.0) {
      throw input_error("line " + std::to_string(line) + ": effort must be nonnegative");
    }
    out.push_back({parse_real(f[0], line), parse_real(f[1], line), parse_date(f[2]), effort});
  });
  return out;
}

std::vector<ActivityRecord> read_activities_csv(const std::filesystem::path& path) {
  try {
    return parse_activities_csv(slurp(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<EffortRecord> read_efforts_csv(const std::filesystem::path& path) {
  try {
    return parse_efforts_csv(slurp(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

ObservationTable ObservationTable::subset_rows(const std::vector<std::size_t>& rows) const {
  ObservationTable out;
  out.catalog = catalog;
  const std::size_t n = cols();
  out.features.reserve(rows.size() * n);
  out.missing.reserve(rows.size() * n);
  for (std::size_t r : rows) {
    out.cell_ids.push_back(cell_ids[r]);
    out.quarters.push_back(quarters[r]);
    out.efforts.push_back(efforts[r]);
    out.labels.push_back(labels[r]);
    out.features.insert(out.features.end(), features.begin() + r * n, features.begin() + (r + 1) * n);
    out.missing.insert(out.missing.end(), missing.begin() + r * n, missing.begin() + (r + 1) * n);
  }
  return out;
}

ObservationTable ObservationTable::subset_columns(const std::vector<std::size_t>& keep) const {
  ObservationTable out;
  std::vector<FeatureSpec> specs;
  for (std::size_t c : keep) specs.push_back(catalog[c]);
  out.catalog = FeatureCatalog(std::move(specs));
  out.cell_ids = cell_ids;
  out.quarters = quarters;
  out.efforts = efforts;
  out.labels = labels;
  const std::size_t n = cols();
  out.features.reserve(rows() * keep.size());
  out.missing.reserve(rows() * keep.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c : keep) {
      out.features.push_back(features[r * n + c]);
      out.missing.push_back(missing[r * n + c]);
    }
  }
  return out;
}

FeatureCatalog catalog_for(const std::vector<FeatureLayer>& static_layers,
                           const std::vector<DynamicFeature>& dynamic_layers) {
  std::vector<FeatureSpec> specs;
  for (const auto& layer : static_layers) {
    specs.push_back({layer.name, layer.source, Temporality::Static, layer.kind()});
  }
  for (const auto& dyn : dynamic_layers) {
    specs.push_back({dyn.name, dyn.source, Temporality::Dynamic, RasterKind::Continuous});
  }
  return FeatureCatalog(std::move(specs));
}

AssembleResult assemble(const ParkGrid& grid, const std::vector<FeatureLayer>& static_layers,
                        const std::vector<DynamicFeature>& dynamic_layers,
                        const std::vector<EffortRecord>& efforts,
                        const std::vector<ActivityRecord>& activities,
                        const std::vector<Quarter>& quarters) {
  for (const auto& layer : static_layers) require_aligned(layer, grid);
  for (const auto& dyn : dynamic_layers) {
    for (const auto& [q, layer] : dyn.quarters) require_aligned(layer, grid);
  }

  AssembleResult result;
  ObservationTable& t = result.table;
  t.catalog = catalog_for(static_layers, dynamic_layers);
  const std::size_t n_cols = t.catalog.size();
  const auto& masked = grid.masked_ids();

  std::map<Quarter, std::size_t> quarter_pos;
  for (std::size_t i = 0; i < quarters.size(); ++i) {
    if (!quarter_pos.emplace(quarters[i], i).second) {
      throw input_error("quarter " + quarters[i].label() + " listed twice");
    }
  }
  std::vector<std::size_t> cell_pos(grid.size(), masked.size());
  for (std::size_t i = 0; i < masked.size(); ++i) cell_pos[masked[i]] = i;

  // Rows are quarter-major: all masked cells of the first quarter, then the next.
  const std::size_t n_rows = masked.size() * quarters.size();
  auto row_of = [&](double x, double y, const Date& date, std::size_t& outside_grid,
                    std::size_t& outside_park, std::size_t& outside_period) -> std::ptrdiff_t {
    const auto cell = grid.locate({x, y});
    if (!cell) {
      ++outside_grid;
      return -1;
    }
    const std::size_t id = grid.id_of(cell->row, cell->col);
    if (!grid.masked(id)) {
      ++outside_park;
      return -1;
    }
    const auto q = quarter_pos.find(date.quarter());
    if (q == quarter_pos.end()) {
      ++outside_period;
      return -1;
    }
    return static_cast<std::ptrdiff_t>(q->second * masked.size() + cell_pos[id]);
  };

  t.efforts.assign(n_rows, 0.0);
  t.labels.assign(n_rows, 0);
  AssembleReport& rep = result.report;
  for (const auto& e : efforts) {
    const auto r = row_of(e.x, e.y, e.date, rep.efforts_outside_grid, rep.efforts_outside_park,
                          rep.efforts_outside_period);
    if (r >= 0) t.efforts[static_cast<std::size_t>(r)] += e.effort;
  }
  for (const auto& a : activities) {
    const auto r = row_of(a.x, a.y, a.date, rep.activities_outside_grid,
                          rep.activities_outside_park, rep.activities_outside_period);
    if (r >= 0) t.labels[static_cast<std::size_t>(r)] = 1;
  }

  t.cell_ids.reserve(n_rows);
  t.quarters.reserve(n_rows);
  t.features.assign(n_rows * n_cols, 0.0);
  t.missing.assign(n_rows * n_cols, 0);
  for (std::size_t qi = 0; qi < quarters.size(); ++qi) {
    std::vector<const FeatureLayer*> layers;
    for (const auto& layer : static_layers) layers.push_back(&layer);
    for (const auto& dyn : dynamic_layers) {
      auto it = dyn.quarters.find(quarters[qi]);
      layers.push_back(it == dyn.quarters.end() ? nullptr : &it->second);
    }
    for (std::size_t ci = 0; ci < masked.size(); ++ci) {
      const std::size_t id = masked[ci];
      const std::size_t r = qi * masked.size() + ci;
      t.cell_ids.push_back(id);
      t.quarters.push_back(quarters[qi]);
      for (std::size_t c = 0; c < n_cols; ++c) {
        const FeatureLayer* layer = layers[c];
        if (layer && layer->valid(id)) {
          t.features[r * n_cols + c] = layer->raster.values[id];
        } else {
          t.missing[r * n_cols + c] = 1;
        }
      }
    }
  }

  // Impute missing values per column: mean for continuous, mode for categorical.
  for (std::size_t c = 0; c < n_cols; ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    std::map<double, std::size_t> votes;
    bool any_missing = false;
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (t.missing[r * n_cols + c]) {
        any_missing = true;
        continue;
      }
      const double v = t.features[r * n_cols + c];
      sum += v;
      ++n;
      if (t.catalog[c].kind == RasterKind::Categorical) ++votes[v];
    }
    if (!any_missing) continue;
    if (n == 0) {
      throw input_error("feature '" + t.catalog[c].name + "' has no valid value inside the park");
    }
    double fill = sum / static_cast<double>(n);
    if (t.catalog[c].kind == RasterKind::Categorical) {
      std::size_t best = 0;
      for (const auto& [v, count] : votes) {
        if (count > best) {
          best = count;
          fill = v;
        }
      }
    }
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (t.missing[r * n_cols + c]) t.features[r * n_cols + c] = fill;
    }
  }
  return result;
}

TrainTestSplit split_by_year(const ObservationTable& table, int test_year) {
  std::set<int> years;
  for (const auto& q : table.quarters) years.insert(q.year);
  for (int y = test_year - 3; y <= test_year; ++y) {
    if (!years.count(y)) {
      throw input_error("test year " + std::to_string(test_year) + " needs data for " +
                        std::to_string(test_year - 3) + ".." + std::to_string(test_year) +
                        " but year " + std::to_string(y) + " is absent");
    }
  }
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (!(table.efforts[r] > 0.0)) continue;
    const int y = table.quarters[r].year;
    if (y == test_year) {
      test.push_back(r);
    } else if (y >= test_year - 3 && y < test_year) {
      train.push_back(r);
    }
  }
  if (test.empty()) {
    throw input_error("test year " + std::to_string(test_year) + " has no patrolled rows");
  }
  if (train.empty()) {
    throw input_error("training years before " + std::to_string(test_year) +
                      " have no patrolled rows");
  }
  return {table.subset_rows(train), table.subset_rows(test)};
}

std::string_view condition_name(Condition c) {
  switch (c) {
    case Condition::Baseline: return "baseline";
    case Condition::RemoteSensing: return "remote-sensing";
    case Condition::All: return "all";
  }
  return "all";
}

Condition parse_condition(std::string_view name) {
  if (name == "baseline") return Condition::Baseline;
  if (name == "remote-sensing") return Condition::RemoteSensing;
  if (name == "all") return Condition::All;
  throw config_error("unknown condition '" + std::string(name) +
                     "'; expected baseline, remote-sensing or all");
}

ObservationTable select_feature_set(const ObservationTable& table, Condition condition) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    const auto source = table.catalog[c].source;
    if (condition == Condition::All ||
        (condition == Condition::Baseline && source == FeatureSource::Park) ||
        (condition == Condition::RemoteSensing && source == FeatureSource::RemoteSensing)) {
      keep.push_back(c);
    }
  }
  if (keep.empty()) {
    throw input_error("feature set '" + std::string(condition_name(condition)) +
                      "' selects no columns");
  }
  return table.subset_columns(keep);
}

}  // namespace poachgrid
