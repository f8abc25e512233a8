#include "poachgrid/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poachgrid/error.hpp"
#include "poachgrid/parallel.hpp"
#include "poachgrid/rng.hpp"

namespace poachgrid {

void TrainConfig::validate() const {
  if (num_bins < 1) throw config_error("num_bins must be at least 1");
  if (trees_per_bin < 1) throw config_error("trees_per_bin must be at least 1");
  if (max_depth < 1) throw config_error("max_depth must be at least 1");
  if (min_leaf < 1) throw config_error("min_leaf must be at least 1");
  if (!(bootstrap_fraction > 0.0 && bootstrap_fraction <= 1.0)) {
    throw config_error("bootstrap_fraction must lie in (0, 1]");
  }
}

double gini(std::size_t positives, std::size_t n) {
  if (n == 0) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(n);
  return 2.0 * p * (1.0 - p);
}

double DecisionTree::predict(std::span<const double> features) const {
  std::size_t at = 0;
  while (!nodes[at].leaf()) {
    const TreeNode& n = nodes[at];
    at = static_cast<std::size_t>(features[n.feature] <= n.threshold ? n.left : n.right);
  }
  return nodes[at].fraction;
}

int DecisionTree::depth() const {
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].leaf()) {
      level[nodes[i].left] = level[i] + 1;
      level[nodes[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

namespace {

// Gains closer than this count as ties.
constexpr double kGainTolerance = 1e-12;

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
public:
  TreeBuilder(const TrainingView& data, const TrainConfig& config) : data_(data), config_(config) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

private:
  int grow(std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::size_t positives = 0;
    for (std::size_t r : rows) positives += data_.labels[r] ? 1 : 0;
    tree_.nodes[id].fraction =
        rows.empty() ? 0.0 : static_cast<double>(positives) / static_cast<double>(rows.size());

    const auto min_leaf = static_cast<std::size_t>(config_.min_leaf);
    if (depth >= config_.max_depth || rows.size() < 2 * min_leaf || positives == 0 ||
        positives == rows.size()) {
      return id;
    }
    const Split split = best_split(rows, positives);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (data_.value(r, split.feature) <= split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    tree_.nodes[id].feature = split.feature;
    tree_.nodes[id].threshold = split.threshold;
    const int l = grow(std::move(left), depth + 1);
    tree_.nodes[id].left = l;
    const int r = grow(std::move(right), depth + 1);
    tree_.nodes[id].right = r;
    return id;
  }

  Split best_split(const std::vector<std::size_t>& rows, std::size_t positives) const {
    const std::size_t n = rows.size();
    const double parent = gini(positives, n);
    const auto min_leaf = static_cast<std::size_t>(config_.min_leaf);
    Split best;
    std::vector<std::pair<double, std::uint8_t>> column(n);
    for (std::size_t f = 0; f < data_.cols; ++f) {
      for (std::size_t i = 0; i < n; ++i) {
        column[i] = {data_.value(rows[i], f), data_.labels[rows[i]]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_pos += column[i].second ? 1 : 0;
        if (column[i].first == column[i + 1].first) continue;
        const std::size_t left_n = i + 1;
        const std::size_t right_n = n - left_n;
        if (left_n < min_leaf || right_n < min_leaf) continue;
        const double weighted =
            (static_cast<double>(left_n) * gini(left_pos, left_n) +
             static_cast<double>(right_n) * gini(positives - left_pos, right_n)) /
            static_cast<double>(n);
        const double gain = parent - weighted;
        if (gain > best.gain + kGainTolerance) {
          best.feature = static_cast<int>(f);
          best.threshold = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
          best.gain = gain;
        }
      }
    }
    return best;
  }

  const TrainingView& data_;
  const TrainConfig& config_;
  DecisionTree tree_;
};

}  // namespace

DecisionTree train_tree(const TrainingView& data, std::span<const std::size_t> rows,
                        const TrainConfig& config) {
  config.validate();
  if (rows.empty()) throw input_error("cannot train a tree on zero rows");
  return TreeBuilder(data, config).build({rows.begin(), rows.end()});
}

double Forest::predict(std::span<const double> features) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(features);
  return sum / static_cast<double>(trees.size());
}

std::vector<std::size_t> bootstrap_rows(std::span<const std::size_t> rows,
                                        const TrainConfig& config, std::size_t bin,
                                        std::size_t tree) {
  if (!config.bootstrap) return {rows.begin(), rows.end()};
  Rng rng(substream_seed(config.seed, bin, tree));
  const auto draws =
      static_cast<std::size_t>(std::ceil(config.bootstrap_fraction * static_cast<double>(rows.size())));
  std::vector<std::size_t> out(draws);
  for (auto& r : out) r = rows[rng.below(rows.size())];
  return out;
}

Forest train_bagging(const TrainingView& data, std::span<const std::size_t> rows,
                     const TrainConfig& config, std::size_t bin, unsigned threads) {
  config.validate();
  if (rows.empty()) throw input_error("cannot train a forest on zero rows");
  Forest forest;
  forest.trees.resize(static_cast<std::size_t>(config.trees_per_bin));
  parallel_for(forest.trees.size(), threads, [&](std::size_t t) {
    const auto sample = bootstrap_rows(rows, config, bin, t);
    forest.trees[t] = train_tree(data, sample, config);
  });
  return forest;
}

std::vector<double> effort_thresholds(std::span<const double> efforts, int num_bins) {
  if (efforts.empty()) throw input_error("no efforts to derive bin thresholds from");
  if (num_bins < 1) throw config_error("num_bins must be at least 1");
  std::vector<double> sorted(efforts.begin(), efforts.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto m = static_cast<std::size_t>(num_bins);
  std::vector<double> out;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t rank = std::max<std::size_t>(1, (k * n + m - 1) / m);
    const double t = sorted[rank - 1];
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

std::vector<std::size_t> IWareEnsemble::qualified(double effort) const {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < thresholds.size(); ++m) {
    if (thresholds[m] <= effort) out.push_back(m);
  }
  if (out.empty()) out.push_back(0);
  return out;
}

double IWareEnsemble::predict(std::span<const double> features, double effort) const {
  const auto q = qualified(effort);
  double sum = 0.0;
  for (std::size_t m : q) sum += forests[m].predict(features);
  return sum / static_cast<double>(q.size());
}

IWareEnsemble train_iware(const ObservationTable& train, const TrainConfig& config,
                          unsigned threads) {
  config.validate();
  std::vector<std::size_t> positive;
  std::vector<double> efforts;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    if (train.efforts[r] > 0.0) {
      positive.push_back(r);
      efforts.push_back(train.efforts[r]);
    }
  }
  if (positive.empty()) throw input_error("training table has no rows with positive effort");

  IWareEnsemble ens;
  ens.config = config;
  ens.catalog = train.catalog;
  ens.thresholds = effort_thresholds(efforts, config.num_bins);
  const std::size_t bins = ens.thresholds.size();

  std::vector<std::vector<std::size_t>> bin_members(bins);
  for (std::size_t r : positive) {
    const double e = train.efforts[r];
    const auto it = std::upper_bound(ens.thresholds.begin(), ens.thresholds.end(), e);
    bin_members[static_cast<std::size_t>(it - ens.thresholds.begin()) - 1].push_back(r);
  }
  ens.bin_rows.resize(bins);
  ens.trained_on.resize(bins);
  for (std::size_t m = 0; m < bins; ++m) {
    ens.bin_rows[m] = bin_members[m].size();
    std::size_t source = m;
    while (source > 0 && bin_members[source].empty()) --source;
    if (bin_members[source].empty()) {
      source = m;
      while (source < bins && bin_members[source].empty()) ++source;
    }
    ens.trained_on[m] = source;
  }

  const TrainingView view = TrainingView::of(train);
  const auto per_bin = static_cast<std::size_t>(config.trees_per_bin);
  ens.forests.assign(bins, Forest{});
  for (auto& f : ens.forests) f.trees.resize(per_bin);
  parallel_for(bins * per_bin, threads, [&](std::size_t task) {
    const std::size_t m = task / per_bin;
    const std::size_t t = task % per_bin;
    const auto sample = bootstrap_rows(bin_members[ens.trained_on[m]], config, m, t);
    ens.forests[m].trees[t] = train_tree(view, sample, config);
  });
  return ens;
}

double predict_at_effort(const IWareEnsemble& ensemble, std::span<const double> features,
                         double effort) {
  if (features.size() != ensemble.catalog.size()) {
    throw input_error("feature vector has " + std::to_string(features.size()) +
                      " values but the model expects " + std::to_string(ensemble.catalog.size()));
  }
  if (!(effort >= 0.0)) throw input_error("prediction effort must be nonnegative");
  return ensemble.predict(features, effort);
}

FeatureLayer predict_risk_map(const IWareEnsemble& ensemble, const ParkGrid& grid,
                              const std::vector<const FeatureLayer*>& layers, double effort) {
  std::vector<const FeatureLayer*> ordered;
  for (const auto& spec : ensemble.catalog.entries()) {
    auto it = std::find_if(layers.begin(), layers.end(),
                           [&](const FeatureLayer* l) { return l && l->name == spec.name; });
    if (it == layers.end()) {
      throw input_error("risk map needs feature layer '" + spec.name + "' which was not supplied");
    }
    require_aligned(**it, grid);
    ordered.push_back(*it);
  }
  FeatureLayer out;
  out.name = "risk";
  out.raster = grid.blank_raster(RasterKind::Continuous, kNodata);
  std::vector<double> x(ordered.size());
  for (std::size_t id : grid.masked_ids()) {
    bool complete = true;
    for (std::size_t c = 0; c < ordered.size(); ++c) {
      if (!ordered[c]->valid(id)) {
        complete = false;
        break;
      }
      x[c] = ordered[c]->raster.values[id];
    }
    if (complete) out.raster.values[id] = predict_at_effort(ensemble, x, effort);
  }
  return out;
}

}  // namespace poachgrid
