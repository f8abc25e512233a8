// model.json reader and writer. The layout is documented in docs/model-format.md.
#include <json.hpp>

#include "poachgrid/error.hpp"
#include "poachgrid/model.hpp"

namespace poachgrid {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "poachgrid-iware";
constexpr int kVersion = 1;

json node_to_json(const DecisionTree& tree, std::size_t at) {
  const TreeNode& n = tree.nodes[at];
  if (n.leaf()) return json{{"leaf", n.fraction}};
  json out;
  out["feature"] = n.feature;
  out["threshold"] = n.threshold;
  out["fraction"] = n.fraction;
  out["left"] = node_to_json(tree, static_cast<std::size_t>(n.left));
  out["right"] = node_to_json(tree, static_cast<std::size_t>(n.right));
  return out;
}

// Rebuilds nodes in the same pre-order the trainer emits them.
int node_from_json(const json& j, DecisionTree& tree, std::size_t features, int depth) {
  if (depth > 4096) throw input_error("model tree is nested too deeply");
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("leaf")) {
    const double p = j.at("leaf").get<double>();
    if (!(p >= 0.0 && p <= 1.0)) throw input_error("model leaf fraction outside [0, 1]");
    tree.nodes[id].fraction = p;
    return id;
  }
  const int feature = j.at("feature").get<int>();
  if (feature < 0 || static_cast<std::size_t>(feature) >= features) {
    throw input_error("model node refers to feature " + std::to_string(feature) +
                      " outside the catalog");
  }
  tree.nodes[id].feature = feature;
  tree.nodes[id].threshold = j.at("threshold").get<double>();
  tree.nodes[id].fraction = j.value("fraction", 0.0);
  const int l = node_from_json(j.at("left"), tree, features, depth + 1);
  tree.nodes[id].left = l;
  const int r = node_from_json(j.at("right"), tree, features, depth + 1);
  tree.nodes[id].right = r;
  return id;
}

std::string source_name(FeatureSource s) {
  return s == FeatureSource::Park ? "park" : "remote-sensing";
}

FeatureSource parse_source(const std::string& s) {
  if (s == "park") return FeatureSource::Park;
  if (s == "remote-sensing") return FeatureSource::RemoteSensing;
  throw input_error("unknown feature source '" + s + "'");
}

}  // namespace

std::string serialize_model(const IWareEnsemble& ens) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  const TrainConfig& c = ens.config;
  j["config"] = {{"num_bins", c.num_bins},
                 {"trees_per_bin", c.trees_per_bin},
                 {"max_depth", c.max_depth},
                 {"min_leaf", c.min_leaf},
                 {"bootstrap_fraction", c.bootstrap_fraction},
                 {"bootstrap", c.bootstrap},
                 {"seed", std::to_string(c.seed)}};
  json features = json::array();
  for (const auto& f : ens.catalog.entries()) {
    features.push_back({{"name", f.name},
                        {"source", source_name(f.source)},
                        {"temporality", f.temporality == Temporality::Static ? "static" : "dynamic"},
                        {"kind", f.kind == RasterKind::Categorical ? "categorical" : "continuous"}});
  }
  j["features"] = std::move(features);
  j["thresholds"] = ens.thresholds;
  json bins = json::array();
  for (std::size_t m = 0; m < ens.bins(); ++m) {
    json trees = json::array();
    for (const auto& t : ens.forests[m].trees) trees.push_back(node_to_json(t, 0));
    bins.push_back({{"threshold", ens.thresholds[m]},
                    {"rows", ens.bin_rows[m]},
                    {"trained_on_bin", ens.trained_on[m]},
                    {"trees", std::move(trees)}});
  }
  j["bins"] = std::move(bins);
  return j.dump() + "\n";
}

IWareEnsemble parse_model(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormat) throw input_error("not a poachgrid model file");
    if (j.at("version").get<int>() != kVersion) {
      throw input_error("unsupported model version " + std::to_string(j.at("version").get<int>()));
    }
    IWareEnsemble ens;
    const json& c = j.at("config");
    ens.config.num_bins = c.at("num_bins").get<int>();
    ens.config.trees_per_bin = c.at("trees_per_bin").get<int>();
    ens.config.max_depth = c.at("max_depth").get<int>();
    ens.config.min_leaf = c.at("min_leaf").get<int>();
    ens.config.bootstrap_fraction = c.at("bootstrap_fraction").get<double>();
    ens.config.bootstrap = c.at("bootstrap").get<bool>();
    ens.config.seed = std::stoull(c.at("seed").get<std::string>());

    std::vector<FeatureSpec> specs;
    for (const auto& f : j.at("features")) {
      specs.push_back({f.at("name").get<std::string>(),
                       parse_source(f.at("source").get<std::string>()),
                       f.at("temporality").get<std::string>() == "dynamic" ? Temporality::Dynamic
                                                                           : Temporality::Static,
                       f.at("kind").get<std::string>() == "categorical" ? RasterKind::Categorical
                                                                        : RasterKind::Continuous});
    }
    ens.catalog = FeatureCatalog(std::move(specs));
    ens.thresholds = j.at("thresholds").get<std::vector<double>>();
    for (std::size_t m = 1; m < ens.thresholds.size(); ++m) {
      if (!(ens.thresholds[m] > ens.thresholds[m - 1])) {
        throw input_error("model thresholds are not strictly increasing");
      }
    }
    const json& bins = j.at("bins");
    if (bins.size() != ens.thresholds.size() || bins.empty()) {
      throw input_error("model has " + std::to_string(bins.size()) + " bins for " +
                        std::to_string(ens.thresholds.size()) + " thresholds");
    }
    for (const auto& b : bins) {
      ens.bin_rows.push_back(b.at("rows").get<std::size_t>());
      ens.trained_on.push_back(b.at("trained_on_bin").get<std::size_t>());
      Forest forest;
      for (const auto& t : b.at("trees")) {
        DecisionTree tree;
        node_from_json(t, tree, ens.catalog.size(), 0);
        forest.trees.push_back(std::move(tree));
      }
      if (forest.trees.empty()) throw input_error("model bin has no trees");
      ens.forests.push_back(std::move(forest));
    }
    return ens;
  } catch (const json::exception& e) {
    throw input_error(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw input_error("malformed model seed");
  } catch (const std::out_of_range&) {
    throw input_error("malformed model seed");
  }
}

}  // namespace poachgrid
