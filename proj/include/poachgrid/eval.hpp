#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poachgrid/dataset.hpp"
#include "poachgrid/model.hpp"
#include "poachgrid/rasterops.hpp"

namespace poachgrid {

/// Mann-Whitney AUC with midranks for tied scores. Needs both classes.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Mean absolute difference over 4-adjacent pairs of valid cells.
double roughness(const FeatureLayer& risk);

struct MetricsRow {
  std::string park;
  std::optional<int> test_year;  // empty on average rows
  Condition condition = Condition::All;
  double auc = 0.0;
  std::size_t n_test = 0;
  std::size_t n_positive = 0;
};

struct ExperimentOptions {
  TrainConfig train;
  unsigned threads = 1;
  /// When set, training labels are shuffled with this seed before fitting.
  std::optional<std::uint64_t> permute_train_labels;
};

struct ExperimentCell {
  int test_year = 0;
  Condition condition = Condition::All;
  IWareEnsemble model;
  ObservationTable test;
  std::vector<double> scores;
};

/// Trains and scores one (test year, condition) pair; test rows are scored at
/// their own recorded effort.
ExperimentCell run_experiment_cell(const ObservationTable& table, int test_year,
                                   Condition condition, const ExperimentOptions& options);

MetricsRow metrics_for(const std::string& park, const ExperimentCell& cell);

/// Rows in (year, condition) order followed by one unweighted average row per
/// condition.
std::vector<MetricsRow> run_experiment(const std::string& park, const ObservationTable& table,
                                       const std::vector<int>& test_years,
                                       const std::vector<Condition>& conditions,
                                       const ExperimentOptions& options);

std::vector<MetricsRow> with_averages(std::vector<MetricsRow> rows,
                                      const std::vector<Condition>& conditions);

std::string metrics_csv(const std::vector<MetricsRow>& rows);

}  // namespace poachgrid
