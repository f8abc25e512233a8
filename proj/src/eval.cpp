#include "poachgrid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "poachgrid/error.hpp"
#include "poachgrid/rng.hpp"

namespace poachgrid {

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw input_error("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Ranks are 1-based; a run of ties shares the mean of its ranks.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw input_error("AUC is undefined when labels contain a single class");
  }
  const double np = static_cast<double>(positives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

double roughness(const FeatureLayer& risk) {
  const RasterDataset& r = risk.raster;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (int row = 0; row < r.height; ++row) {
    for (int col = 0; col < r.width; ++col) {
      const double here = r.at(row, col);
      if (r.is_nodata(here)) continue;
      if (col + 1 < r.width && !r.is_nodata(r.at(row, col + 1))) {
        sum += std::abs(here - r.at(row, col + 1));
        ++pairs;
      }
      if (row + 1 < r.height && !r.is_nodata(r.at(row + 1, col))) {
        sum += std::abs(here - r.at(row + 1, col));
        ++pairs;
      }
    }
  }
  if (pairs == 0) throw input_error("risk map has no adjacent pair of valid cells");
  return sum / static_cast<double>(pairs);
}

ExperimentCell run_experiment_cell(const ObservationTable& table, int test_year,
                                   Condition condition, const ExperimentOptions& options) {
  ExperimentCell cell;
  cell.test_year = test_year;
  cell.condition = condition;
  auto split = split_by_year(select_feature_set(table, condition), test_year);
  if (options.permute_train_labels) {
    auto& labels = split.train.labels;
    Rng rng(*options.permute_train_labels);
    for (std::size_t i = labels.size(); i > 1; --i) {
      std::swap(labels[i - 1], labels[rng.below(i)]);
    }
  }
  cell.model = train_iware(split.train, options.train, options.threads);
  cell.test = std::move(split.test);
  cell.scores.resize(cell.test.rows());
  for (std::size_t r = 0; r < cell.test.rows(); ++r) {
    cell.scores[r] = predict_at_effort(cell.model, cell.test.row(r), cell.test.efforts[r]);
  }
  return cell;
}

MetricsRow metrics_for(const std::string& park, const ExperimentCell& cell) {
  MetricsRow row;
  row.park = park;
  row.test_year = cell.test_year;
  row.condition = cell.condition;
  row.n_test = cell.test.rows();
  row.n_positive = static_cast<std::size_t>(
      std::count(cell.test.labels.begin(), cell.test.labels.end(), std::uint8_t{1}));
  try {
    row.auc = roc_auc(cell.scores, cell.test.labels);
  } catch (const Error& e) {
    throw Error(e.kind(), "test year " + std::to_string(cell.test_year) + ", condition " +
                              std::string(condition_name(cell.condition)) + ": " + e.what());
  }
  return row;
}

std::vector<MetricsRow> with_averages(std::vector<MetricsRow> rows,
                                      const std::vector<Condition>& conditions) {
  const std::string park = rows.empty() ? std::string() : rows.front().park;
  std::vector<MetricsRow> averages;
  for (Condition c : conditions) {
    MetricsRow avg;
    avg.park = park;
    avg.condition = c;
    std::size_t k = 0;
    for (const auto& r : rows) {
      if (r.condition != c || !r.test_year) continue;
      avg.auc += r.auc;
      avg.n_test += r.n_test;
      avg.n_positive += r.n_positive;
      ++k;
    }
    if (k == 0) continue;
    avg.auc /= static_cast<double>(k);
    averages.push_back(avg);
  }
  rows.insert(rows.end(), averages.begin(), averages.end());
  return rows;
}

std::vector<MetricsRow> run_experiment(const std::string& park, const ObservationTable& table,
                                       const std::vector<int>& test_years,
                                       const std::vector<Condition>& conditions,
                                       const ExperimentOptions& options) {
  std::vector<MetricsRow> rows;
  for (int year : test_years) {
    for (Condition c : conditions) {
      try {
        rows.push_back(metrics_for(park, run_experiment_cell(table, year, c, options)));
      } catch (const Error& e) {
        const std::string where = "test year " + std::to_string(year) + ", condition " +
                                  std::string(condition_name(c));
        if (std::string(e.what()).rfind(where, 0) == 0) throw;
        throw Error(e.kind(), where + ": " + e.what());
      }
    }
  }
  return with_averages(std::move(rows), conditions);
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "park,test_year,condition,auc,n_test,n_positive\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.auc);
    out += r.park + "," + (r.test_year ? std::to_string(*r.test_year) : std::string("avg")) + "," +
           std::string(condition_name(r.condition)) + "," + buf + "," + std::to_string(r.n_test) +
           "," + std::to_string(r.n_positive) + "\n";
  }
  return out;
}

}  // namespace poachgrid
