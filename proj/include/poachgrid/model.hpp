#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poachgrid/dataset.hpp"
#include "poachgrid/grid.hpp"
#include "poachgrid/rasterops.hpp"

namespace poachgrid {

struct TrainConfig {
  int num_bins = 5;
  int trees_per_bin = 32;
  int max_depth = 8;
  int min_leaf = 5;
  double bootstrap_fraction = 1.0;
  /// When false every tree sees its bin's rows exactly once, in order.
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Rows of a feature matrix with binary labels, viewed without copying.
struct TrainingView {
  std::span<const double> features;  // row-major, rows x cols
  std::size_t cols = 0;
  std::span<const std::uint8_t> labels;

  std::size_t rows() const { return labels.size(); }
  double value(std::size_t r, std::size_t c) const { return features[r * cols + c]; }

  static TrainingView of(const ObservationTable& t) { return {t.features, t.cols(), t.labels}; }
};

/// Internal nodes send `value <= threshold` to the left child.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double fraction = 0.0;  // positive fraction of the rows that reached the node

  bool leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
public:
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> features) const;
  int depth() const;
  bool operator==(const DecisionTree&) const = default;
};

/// CART with Gini impurity over the given row indices (repeats allowed).
/// Candidate thresholds are midpoints of consecutive distinct values; ties in
/// gain keep the lowest feature, then the lowest threshold.
DecisionTree train_tree(const TrainingView& data, std::span<const std::size_t> rows,
                        const TrainConfig& config);

/// Gini impurity 2p(1-p) of a node with `positives` of `n` rows.
double gini(std::size_t positives, std::size_t n);

struct Forest {
  std::vector<DecisionTree> trees;

  double predict(std::span<const double> features) const;
  bool operator==(const Forest&) const = default;
};

/// Bootstrap sample for substream (bin, tree): ceil(fraction * n) draws with
/// replacement from `rows`, or `rows` itself when bootstrapping is off.
std::vector<std::size_t> bootstrap_rows(std::span<const std::size_t> rows,
                                        const TrainConfig& config, std::size_t bin,
                                        std::size_t tree);

/// Plain bagging: trees_per_bin trees on bootstrap samples of `rows`, drawn
/// from the substreams of `bin`.
Forest train_bagging(const TrainingView& data, std::span<const std::size_t> rows,
                     const TrainConfig& config, std::size_t bin = 0, unsigned threads = 1);

/// Lower empirical quantiles t_k = sorted[max(1, ceil(k n / M))], k = 0..M-1
/// (1-based), with duplicates removed.
std::vector<double> effort_thresholds(std::span<const double> efforts, int num_bins);

class IWareEnsemble {
public:
  TrainConfig config;
  FeatureCatalog catalog;
  std::vector<double> thresholds;  // strictly increasing, thresholds[0] = min effort
  std::vector<Forest> forests;     // one per threshold
  std::vector<std::size_t> bin_rows;
  /// Bin whose rows trained each forest; differs from the index when a bin
  /// was empty and borrowed the nearest non-empty lower bin.
  std::vector<std::size_t> trained_on;

  std::size_t bins() const { return thresholds.size(); }

  /// Forests m with thresholds[m] <= effort; {0} when effort is below all.
  std::vector<std::size_t> qualified(double effort) const;
  double predict(std::span<const double> features, double effort) const;

  bool operator==(const IWareEnsemble&) const = default;
};

IWareEnsemble train_iware(const ObservationTable& train, const TrainConfig& config,
                          unsigned threads = 1);

/// Mean over qualified forests of each forest's mean leaf fraction.
double predict_at_effort(const IWareEnsemble& ensemble, std::span<const double> features,
                         double effort);

/// Risk per masked cell at one effort level. Layers are matched to the
/// ensemble's features by name; unmasked cells and cells with any nodata
/// input are nodata.
FeatureLayer predict_risk_map(const IWareEnsemble& ensemble, const ParkGrid& grid,
                              const std::vector<const FeatureLayer*>& layers, double effort);

std::string serialize_model(const IWareEnsemble& ensemble);
IWareEnsemble parse_model(std::string_view text);

}  // namespace poachgrid
