#include "poachgrid/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "poachgrid/eval.hpp"
#include "poachgrid/geoformats.hpp"
#include "poachgrid/grid.hpp"
#include "poachgrid/parallel.hpp"
#include "poachgrid/png.hpp"
#include "poachgrid/rasterops.hpp"
#include "poachgrid/temporal.hpp"

namespace poachgrid {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string model_file_name(int year, Condition condition) {
  return "model-" + std::to_string(year) + "-" + std::string(condition_name(condition)) + ".json";
}

std::string risk_file_stem(int year, Condition condition, double effort) {
  return "risk-" + std::to_string(year) + "-" + std::string(condition_name(condition)) + "-e" +
         format_real(effort);
}

// ---------------------------------------------------------------------------
// Config

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw config_error(where + " is missing required field '" + key + "'");
  }
  return j.at(key);
}

template <typename T>
T get_as(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw config_error("config field " + what + " has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

FeatureSource parse_source(const std::string& s, const std::string& where) {
  if (s == "park") return FeatureSource::Park;
  if (s == "remote-sensing") return FeatureSource::RemoteSensing;
  throw config_error(where + ": source must be 'park' or 'remote-sensing', got '" + s + "'");
}

RasterKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "continuous") return RasterKind::Continuous;
  if (s == "categorical") return RasterKind::Categorical;
  throw config_error(where + ": kind must be 'continuous' or 'categorical', got '" + s + "'");
}

StaticRecipe parse_recipe(const std::string& s, const std::string& where) {
  static const std::map<std::string, StaticRecipe> recipes = {
      {"raster", StaticRecipe::Raster},
      {"vector_distance", StaticRecipe::VectorDistance},
      {"raster_distance", StaticRecipe::RasterDistance},
      {"slope", StaticRecipe::Slope},
      {"aspect", StaticRecipe::Aspect},
      {"drainage_direction", StaticRecipe::DrainageDirection},
      {"flow_accumulation", StaticRecipe::FlowAccumulation},
      {"cell_distance", StaticRecipe::CellDistance},
  };
  auto it = recipes.find(s);
  if (it == recipes.end()) throw config_error(where + ": unknown feature type '" + s + "'");
  return it->second;
}

TrainConfig parse_train(const json& j) {
  TrainConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw config_error("config field 'train' must be an object");
  c.num_bins = get_as<int>(j.value("num_bins", json(c.num_bins)), "train.num_bins");
  c.trees_per_bin = get_as<int>(j.value("trees_per_bin", json(c.trees_per_bin)), "train.trees_per_bin");
  c.max_depth = get_as<int>(j.value("max_depth", json(c.max_depth)), "train.max_depth");
  c.min_leaf = get_as<int>(j.value("min_leaf", json(c.min_leaf)), "train.min_leaf");
  c.bootstrap_fraction = get_as<double>(j.value("bootstrap_fraction", json(c.bootstrap_fraction)),
                                        "train.bootstrap_fraction");
  c.bootstrap = get_as<bool>(j.value("bootstrap", json(c.bootstrap)), "train.bootstrap");
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (s.is_number_unsigned()) {
      c.seed = s.get<std::uint64_t>();
    } else if (s.is_string()) {
      try {
        c.seed = std::stoull(s.get<std::string>());
      } catch (const std::exception&) {
        throw config_error("train.seed is not an unsigned integer");
      }
    } else {
      throw config_error("train.seed must be an unsigned integer");
    }
  }
  c.validate();
  return c;
}

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view json_text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config must be a JSON object");
  const int version = get_as<int>(require(j, "version", "config"), "version");
  if (version != 1) throw config_error("unsupported config version " + std::to_string(version));

  PipelineConfig c;
  c.park = get_as<std::string>(j.value("park", json(c.park)), "park");
  c.boundary = resolve(base_dir, get_as<std::string>(require(j, "boundary", "config"), "boundary"));
  c.resolution = get_as<double>(j.value("resolution", json(c.resolution)), "resolution");
  if (!(c.resolution > 0.0)) throw config_error("resolution must be positive");

  const json& features = require(j, "features", "config");
  for (const auto& f : features.value("static", json::array())) {
    StaticFeatureConfig s;
    s.name = get_as<std::string>(require(f, "name", "static feature"), "name");
    const std::string where = "static feature '" + s.name + "'";
    s.source = parse_source(get_as<std::string>(f.value("source", json("remote-sensing")), "source"), where);
    s.recipe = parse_recipe(get_as<std::string>(require(f, "type", where), "type"), where);
    s.kind = parse_kind(get_as<std::string>(f.value("kind", json("continuous")), "kind"), where);
    switch (s.recipe) {
      case StaticRecipe::Raster:
      case StaticRecipe::VectorDistance:
      case StaticRecipe::RasterDistance:
        s.path = resolve(base_dir, get_as<std::string>(require(f, "path", where), "path"));
        break;
      default:
        s.from = get_as<std::string>(require(f, "from", where), "from");
    }
    if (s.recipe == StaticRecipe::RasterDistance || s.recipe == StaticRecipe::CellDistance) {
      if (f.contains("threshold")) s.threshold = get_as<double>(f.at("threshold"), "threshold");
      if (f.contains("quantile")) s.quantile = get_as<double>(f.at("quantile"), "quantile");
      if (s.threshold.has_value() == s.quantile.has_value()) {
        throw config_error(where + " needs exactly one of 'threshold' or 'quantile'");
      }
      if (s.quantile && !(*s.quantile >= 0.0 && *s.quantile <= 1.0)) {
        throw config_error(where + ": quantile must lie in [0, 1]");
      }
    }
    c.static_features.push_back(std::move(s));
  }
  for (const auto& f : features.value("dynamic", json::array())) {
    DynamicFeatureConfig d;
    d.name = get_as<std::string>(require(f, "name", "dynamic feature"), "name");
    const std::string where = "dynamic feature '" + d.name + "'";
    d.source = parse_source(get_as<std::string>(f.value("source", json("remote-sensing")), "source"), where);
    d.dir = resolve(base_dir, get_as<std::string>(require(f, "dir", where), "dir"));
    c.dynamic_features.push_back(std::move(d));
  }
  {
    // Validates names, uniqueness and reserved-name rules up front.
    std::vector<FeatureSpec> specs;
    for (const auto& s : c.static_features) specs.push_back({s.name, s.source, Temporality::Static, s.kind});
    for (const auto& d : c.dynamic_features) specs.push_back({d.name, d.source, Temporality::Dynamic, RasterKind::Continuous});
    if (specs.empty()) throw config_error("config declares no features");
    FeatureCatalog check(std::move(specs));
  }

  c.efforts = resolve(base_dir, get_as<std::string>(require(j, "efforts", "config"), "efforts"));
  c.activities = resolve(base_dir, get_as<std::string>(require(j, "activities", "config"), "activities"));
  c.test_years = get_as<std::vector<int>>(require(j, "test_years", "config"), "test_years");
  if (c.test_years.empty()) throw config_error("test_years must not be empty");
  if (j.contains("conditions")) {
    c.conditions.clear();
    for (const auto& name : get_as<std::vector<std::string>>(j.at("conditions"), "conditions")) {
      c.conditions.push_back(parse_condition(name));
    }
    if (c.conditions.empty()) throw config_error("conditions must not be empty");
  }
  if (j.contains("prediction_efforts")) {
    c.prediction_efforts =
        get_as<std::vector<double>>(j.at("prediction_efforts"), "prediction_efforts");
    for (double e : c.prediction_efforts) {
      if (!(e >= 0.0)) throw config_error("prediction_efforts must be nonnegative");
    }
  }
  c.standardize = get_as<bool>(j.value("standardize", json(false)), "standardize");
  c.train = parse_train(j.value("train", json()));
  c.output_dir = resolve(base_dir, get_as<std::string>(j.value("output_dir", json("out")), "output_dir"));
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pipeline_config(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Stage helpers

namespace {

std::string kind_name(RasterKind k) {
  return k == RasterKind::Categorical ? "categorical" : "continuous";
}

std::string source_name(FeatureSource s) {
  return s == FeatureSource::Park ? "park" : "remote-sensing";
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void save_layer(const fs::path& path, const FeatureLayer& layer) {
  write_file(path, write_geotiff(layer.raster));
}

CellPredicate predicate_for(const StaticFeatureConfig& s, const FeatureLayer& source) {
  CellPredicate p;
  p.op = source.kind() == RasterKind::Categorical && s.threshold ? CellPredicate::Op::Equals
                                                                  : CellPredicate::Op::AtLeast;
  p.value = s.threshold ? *s.threshold : layer_quantile(source, *s.quantile);
  return p;
}

const FeatureLayer& find_layer(const std::vector<FeatureLayer>& layers, const std::string& name,
                               const std::string& needed_by) {
  for (const auto& l : layers) {
    if (l.name == name) return l;
  }
  throw config_error("feature '" + needed_by + "' derives from '" + name +
                     "', which must be declared earlier");
}

FeatureLayer renamed(FeatureLayer layer, const StaticFeatureConfig& s) {
  layer.name = s.name;
  layer.source = s.source;
  return layer;
}

std::map<YearMonth, fs::path> monthly_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw input_error("dynamic feature directory " + dir.string() + " does not exist");
  static const std::regex pattern(R"((\d{4})-(\d{2})\.tif)");
  std::map<YearMonth, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    const YearMonth ym{std::stoi(m[1]), std::stoi(m[2])};
    if (ym.month < 1 || ym.month > 12) continue;
    out[ym] = entry.path();
  }
  if (out.empty()) throw input_error("no <YYYY>-<MM>.tif files in " + dir.string());
  return out;
}

struct FeatureSet {
  ParkGrid grid;
  std::vector<FeatureLayer> static_layers;
  std::vector<DynamicFeature> dynamic_layers;
};

fs::path features_dir(const PipelineConfig& c) { return c.output_dir / "features"; }

FeatureSet load_features(const PipelineConfig& config) {
  const fs::path dir = features_dir(config);
  const fs::path index_path = dir / "index.json";
  if (!fs::exists(index_path)) {
    throw input_error("missing " + index_path.string() + "; run the featurize stage first");
  }
  json index;
  try {
    index = json::parse(read_text(index_path));
  } catch (const json::exception& e) {
    throw input_error("corrupt " + index_path.string() + ": " + e.what());
  }
  const RasterDataset mask_raster = load_geotiff(dir / index.at("mask").get<std::string>());
  std::vector<bool> mask(mask_raster.values.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mask_raster.values[i] == 1.0;
  FeatureSet set{ParkGrid(mask_raster.transform, mask_raster.width, mask_raster.height, std::move(mask)),
                 {}, {}};

  auto load = [&](const json& entry, const std::string& name, FeatureSource source) {
    FeatureLayer layer;
    layer.name = name;
    layer.source = source;
    layer.raster = load_geotiff(dir / entry.get<std::string>());
    require_aligned(layer, set.grid);
    return layer;
  };
  for (const auto& s : config.static_features) {
    bool found = false;
    for (const auto& e : index.at("static")) {
      if (e.at("name") != s.name) continue;
      set.static_layers.push_back(load(e.at("file"), s.name, s.source));
      found = true;
    }
    if (!found) throw input_error("feature '" + s.name + "' missing from featurize output; rerun featurize");
  }
  for (const auto& d : config.dynamic_features) {
    DynamicFeature dyn{d.name, d.source, {}};
    bool found = false;
    for (const auto& e : index.at("dynamic")) {
      if (e.at("name") != d.name) continue;
      found = true;
      for (const auto& [label, file] : e.at("quarters").items()) {
        const Quarter q{std::stoi(label.substr(0, 4)), std::stoi(label.substr(5))};
        dyn.quarters.emplace(q, load(file, d.name, d.source));
      }
    }
    if (!found) throw input_error("feature '" + d.name + "' missing from featurize output; rerun featurize");
    set.dynamic_layers.push_back(std::move(dyn));
  }

  if (config.standardize) {
    for (auto& layer : set.static_layers) {
      if (layer.kind() == RasterKind::Continuous) layer = standardize({layer}).front();
    }
    for (auto& dyn : set.dynamic_layers) {
      std::vector<FeatureLayer> slices;
      for (auto& [q, l] : dyn.quarters) slices.push_back(l);
      auto scaled = standardize_pooled(slices);
      std::size_t i = 0;
      for (auto& [q, l] : dyn.quarters) l = std::move(scaled[i++]);
    }
  }
  return set;
}

std::vector<Quarter> table_quarters(const PipelineConfig& config) {
  const auto [lo, hi] = std::minmax_element(config.test_years.begin(), config.test_years.end());
  return quarters_of_years(*lo - 3, *hi);
}

struct Prepared {
  FeatureSet features;
  AssembleResult assembled;
};

Prepared prepare(const PipelineConfig& config) {
  FeatureSet features = load_features(config);
  const auto efforts = read_efforts_csv(config.efforts);
  const auto activities = read_activities_csv(config.activities);
  AssembleResult assembled = assemble(features.grid, features.static_layers, features.dynamic_layers,
                                      efforts, activities, table_quarters(config));
  return {std::move(features), std::move(assembled)};
}

IWareEnsemble load_model(const PipelineConfig& config, int year, Condition condition,
                         const FeatureCatalog& expected) {
  const fs::path path = config.output_dir / model_file_name(year, condition);
  if (!fs::exists(path)) {
    throw input_error("missing model " + path.string() + "; run the train stage first");
  }
  IWareEnsemble model = parse_model(read_text(path));
  if (!(model.catalog == expected)) {
    throw input_error("model " + path.string() +
                      " was trained on different features; rerun the train stage");
  }
  return model;
}

/// Layers for one quarter rebuilt from the (imputed) table rows.
std::vector<FeatureLayer> quarter_layers(const ObservationTable& table, const ParkGrid& grid,
                                         const Quarter& quarter) {
  std::vector<FeatureLayer> layers(table.cols());
  for (std::size_t c = 0; c < table.cols(); ++c) {
    layers[c].name = table.catalog[c].name;
    layers[c].source = table.catalog[c].source;
    layers[c].raster = grid.blank_raster(table.catalog[c].kind, kNodata);
  }
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (table.quarters[r] != quarter) continue;
    for (std::size_t c = 0; c < table.cols(); ++c) {
      layers[c].raster.values[table.cell_ids[r]] = table.value(r, c);
    }
  }
  return layers;
}

template <typename Fn>
void as_stage(const char* stage, Fn&& fn) {
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    throw StageError(stage, ErrorKind::Input, e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, ErrorKind::Internal, e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Stages

void run_featurize(const PipelineConfig& config, const PipelineOptions&) {
  as_stage("featurize", [&] {
    const ParkGrid grid = build_grid(load_shapefile(config.boundary), config.resolution);
    std::vector<FeatureLayer> layers;
    for (const auto& s : config.static_features) {
      switch (s.recipe) {
        case StaticRecipe::Raster:
          layers.push_back(resample_to_grid(load_geotiff(s.path), grid, s.kind, s.name, s.source));
          break;
        case StaticRecipe::VectorDistance:
          layers.push_back(distance_to_geometries(grid, load_shapefile(s.path), s.name, s.source));
          break;
        case StaticRecipe::RasterDistance: {
          const FeatureLayer base = resample_to_grid(load_geotiff(s.path), grid, s.kind, s.name, s.source);
          layers.push_back(renamed(distance_to_cells(grid, base, predicate_for(s, base)), s));
          break;
        }
        case StaticRecipe::Slope:
          layers.push_back(renamed(slope_aspect(find_layer(layers, s.from, s.name)).slope, s));
          break;
        case StaticRecipe::Aspect:
          layers.push_back(renamed(slope_aspect(find_layer(layers, s.from, s.name)).aspect, s));
          break;
        case StaticRecipe::DrainageDirection:
          layers.push_back(renamed(d8_flow_direction(find_layer(layers, s.from, s.name)), s));
          break;
        case StaticRecipe::FlowAccumulation:
          layers.push_back(renamed(
              flow_accumulation(d8_flow_direction(find_layer(layers, s.from, s.name))), s));
          break;
        case StaticRecipe::CellDistance: {
          const FeatureLayer& base = find_layer(layers, s.from, s.name);
          layers.push_back(renamed(distance_to_cells(grid, base, predicate_for(s, base)), s));
          break;
        }
      }
    }

    const fs::path dir = features_dir(config);
    fs::create_directories(dir);
    json index;
    index["version"] = 1;
    index["mask"] = "mask.tif";
    RasterDataset mask = grid.blank_raster(RasterKind::Categorical, 0.0);
    mask.nodata.reset();
    for (std::size_t id : grid.masked_ids()) mask.values[id] = 1.0;
    write_file(dir / "mask.tif", write_geotiff(mask));

    index["static"] = json::array();
    for (const auto& layer : layers) {
      const std::string file = layer.name + ".tif";
      save_layer(dir / file, layer);
      index["static"].push_back({{"name", layer.name},
                                 {"source", source_name(layer.source)},
                                 {"kind", kind_name(layer.kind())},
                                 {"file", file}});
    }
    index["dynamic"] = json::array();
    for (const auto& d : config.dynamic_features) {
      std::vector<TimeStampedLayer> series;
      for (const auto& [ym, path] : monthly_files(d.dir)) {
        series.push_back({ym, resample_to_grid(load_geotiff(path), grid, RasterKind::Continuous,
                                               d.name, d.source)});
      }
      json quarters = json::object();
      for (const auto& [q, layer] : aggregate_quarters(series, grid)) {
        const std::string file = d.name + "-" + q.label() + ".tif";
        save_layer(dir / file, layer);
        quarters[q.label()] = file;
      }
      index["dynamic"].push_back({{"name", d.name},
                                  {"source", source_name(d.source)},
                                  {"kind", "continuous"},
                                  {"quarters", std::move(quarters)}});
    }
    write_text(dir / "index.json", index.dump(2) + "\n");
  });
}

void run_train(const PipelineConfig& config, const PipelineOptions& options) {
  as_stage("train", [&] {
    const Prepared data = prepare(config);
    const ObservationTable& table = data.assembled.table;
    const AssembleReport& rep = data.assembled.report;
    TrainConfig train = config.train;
    if (options.seed) train.seed = *options.seed;

    json summary;
    summary["rows"] = table.rows();
    summary["masked_cells"] = data.features.grid.masked_ids().size();
    summary["patrolled_rows"] =
        std::count_if(table.efforts.begin(), table.efforts.end(), [](double e) { return e > 0.0; });
    summary["positive_rows"] = std::count(table.labels.begin(), table.labels.end(), std::uint8_t{1});
    summary["skipped"] = {{"efforts_outside_grid", rep.efforts_outside_grid},
                          {"efforts_outside_park", rep.efforts_outside_park},
                          {"efforts_outside_period", rep.efforts_outside_period},
                          {"activities_outside_grid", rep.activities_outside_grid},
                          {"activities_outside_park", rep.activities_outside_park},
                          {"activities_outside_period", rep.activities_outside_period}};
    summary["columns"] = table.catalog.names();
    write_text(config.output_dir / "dataset.json", summary.dump(2) + "\n");

    for (int year : config.test_years) {
      for (Condition c : config.conditions) {
        const auto split = split_by_year(select_feature_set(table, c), year);
        const IWareEnsemble model = train_iware(split.train, train, options.threads);
        write_text(config.output_dir / model_file_name(year, c), serialize_model(model));
      }
    }
  });
}

void run_predict(const PipelineConfig& config, const PipelineOptions& options) {
  as_stage("predict", [&] {
    const Prepared data = prepare(config);
    const ObservationTable& table = data.assembled.table;
    const ParkGrid& grid = data.features.grid;
    std::string rough = "test_year,condition,effort,roughness\n";
    for (int year : config.test_years) {
      for (Condition c : config.conditions) {
        const ObservationTable selected = select_feature_set(table, c);
        const IWareEnsemble model = load_model(config, year, c, selected.catalog);
        std::vector<double> efforts = options.efforts.empty() ? config.prediction_efforts : options.efforts;
        if (efforts.empty()) efforts.push_back(model.thresholds.back());
        std::vector<std::vector<FeatureLayer>> per_quarter;
        for (int q = 1; q <= 4; ++q) per_quarter.push_back(quarter_layers(selected, grid, {year, q}));

        for (double e : efforts) {
          if (!(e >= 0.0)) throw input_error("prediction effort must be nonnegative");
          FeatureLayer risk;
          risk.name = "risk";
          risk.raster = grid.blank_raster(RasterKind::Continuous, kNodata);
          std::vector<double> sum(grid.size(), 0.0);
          for (const auto& layers : per_quarter) {
            std::vector<const FeatureLayer*> ptrs;
            for (const auto& l : layers) ptrs.push_back(&l);
            const FeatureLayer q = predict_risk_map(model, grid, ptrs, e);
            for (std::size_t id : grid.masked_ids()) sum[id] += q.raster.values[id];
          }
          for (std::size_t id : grid.masked_ids()) risk.raster.values[id] = sum[id] / 4.0;
          const std::string stem = risk_file_stem(year, c, e);
          save_layer(config.output_dir / (stem + ".tif"), risk);
          write_file(config.output_dir / (stem + ".png"), encode_risk_png(risk.raster));
          char buf[64];
          std::snprintf(buf, sizeof(buf), "%.6f", roughness(risk));
          rough += std::to_string(year) + "," + std::string(condition_name(c)) + "," +
                   format_real(e) + "," + buf + "\n";
        }
      }
    }
    write_text(config.output_dir / "roughness.csv", rough);
  });
}

void run_evaluate(const PipelineConfig& config, const PipelineOptions&) {
  as_stage("evaluate", [&] {
    for (int year : config.test_years) {
      for (Condition c : config.conditions) {
        const fs::path path = config.output_dir / model_file_name(year, c);
        if (!fs::exists(path)) {
          throw input_error("missing model " + path.string() + "; run the train stage first");
        }
      }
    }
    const Prepared data = prepare(config);
    const ObservationTable& table = data.assembled.table;
    std::vector<MetricsRow> rows;
    for (int year : config.test_years) {
      for (Condition c : config.conditions) {
        const auto split = split_by_year(select_feature_set(table, c), year);
        ExperimentCell cell;
        cell.test_year = year;
        cell.condition = c;
        cell.model = load_model(config, year, c, split.test.catalog);
        cell.test = split.test;
        for (std::size_t r = 0; r < cell.test.rows(); ++r) {
          cell.scores.push_back(predict_at_effort(cell.model, cell.test.row(r), cell.test.efforts[r]));
        }
        rows.push_back(metrics_for(config.park, cell));
      }
    }
    write_text(config.output_dir / "metrics.csv", metrics_csv(with_averages(rows, config.conditions)));
  });
}

void run_all(const PipelineConfig& config, const PipelineOptions& options) {
  run_featurize(config, options);
  run_train(config, options);
  run_predict(config, options);
  run_evaluate(config, options);
}

AssembleResult assemble_observations(const PipelineConfig& config) {
  AssembleResult out;
  as_stage("train", [&] { out = prepare(config).assembled; });
  return out;
}

void run_stage(std::string_view stage, const fs::path& config_path, const PipelineOptions& options) {
  PipelineConfig config;
  try {
    config = load_pipeline_config(config_path);
  } catch (const Error& e) {
    throw StageError("config", e.kind(), e.what());
  }
  if (stage == "featurize") {
    run_featurize(config, options);
  } else if (stage == "train") {
    run_train(config, options);
  } else if (stage == "predict") {
    run_predict(config, options);
  } else if (stage == "evaluate") {
    run_evaluate(config, options);
  } else if (stage == "run") {
    run_all(config, options);
  } else {
    throw StageError("config", ErrorKind::Config, "unknown stage '" + std::string(stage) + "'");
  }
}

}  // namespace poachgrid
