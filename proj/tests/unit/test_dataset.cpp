#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "helpers.hpp"
#include "poachgrid/dataset.hpp"
#include "poachgrid/error.hpp"

using namespace poachgrid;
using testutil::full_grid;
using testutil::layer_on;

namespace {

// 3x2 grid, one static park feature, one dynamic remote-sensing feature.
struct Fixture {
  ParkGrid grid = full_grid(3, 2);
  std::vector<FeatureLayer> statics;
  std::vector<DynamicFeature> dynamics;
  std::vector<Quarter> quarters = quarters_of_years(2015, 2018);

  Fixture() {
    FeatureLayer roads = layer_on(grid, {1, 2, 3, 4, 5, 6}, "roads");
    roads.source = FeatureSource::Park;
    statics.push_back(roads);
    DynamicFeature npp{"npp", FeatureSource::RemoteSensing, {}};
    for (const auto& q : quarters) {
      npp.quarters.emplace(q, layer_on(grid, std::vector<double>(6, q.year + q.index / 10.0), "npp"));
    }
    dynamics.push_back(npp);
  }

  AssembleResult run(const std::vector<EffortRecord>& e, const std::vector<ActivityRecord>& a) const {
    return assemble(grid, statics, dynamics, e, a, quarters);
  }
};

// Cell (row, col) center on the 3x2 test grid.
Point center(int row, int col) { return {col * 1000 + 500.0, 2000 - row * 1000 - 500.0}; }

std::size_t row_index(const ObservationTable& t, std::size_t cell, Quarter q) {
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (t.cell_ids[r] == cell && t.quarters[r] == q) return r;
  }
  FAIL("row not found");
  return 0;
}

}  // namespace

TEST_CASE("reserved remote-sensing names") {
  const auto& names = reserved_remote_sensing_names();
  CHECK(names.size() == 14);
  CHECK(is_reserved_name("flow_accumulation"));
  CHECK(is_reserved_name("cirrus"));
  CHECK_FALSE(is_reserved_name("roads"));
}

TEST_CASE("catalog validation") {
  using T = Temporality;
  CHECK_NOTHROW(FeatureCatalog({{"roads", FeatureSource::Park, T::Static, RasterKind::Continuous},
                                {"elevation", FeatureSource::RemoteSensing, T::Static, RasterKind::Continuous}}));
  CHECK_THROWS_AS(FeatureCatalog({{"roads", FeatureSource::Park, T::Static, RasterKind::Continuous},
                                  {"roads", FeatureSource::Park, T::Static, RasterKind::Continuous}}),
                  Error);
  CHECK_THROWS_AS(FeatureCatalog({{"snow", FeatureSource::RemoteSensing, T::Static, RasterKind::Continuous}}),
                  Error);
  CHECK_THROWS_AS(FeatureCatalog({{"rivers", FeatureSource::Park, T::Static, RasterKind::Continuous}}), Error);
}

TEST_CASE("dates") {
  const Date d = parse_date("2018-05-17");
  CHECK(d.year == 2018);
  CHECK(d.quarter() == Quarter{2018, 2});
  CHECK_NOTHROW(parse_date("2016-02-29"));
  CHECK_THROWS_AS(parse_date("2018-02-29"), Error);
  CHECK_THROWS_AS(parse_date("2018-13-01"), Error);
  CHECK_THROWS_AS(parse_date("18-01-01"), Error);
}

TEST_CASE("CSV parsing maps columns by header") {
  const auto e = parse_efforts_csv("\xEF\xBB\xBF" "effort,date,y,x\r\n2.5,2018-01-02,20,10\r\n");
  REQUIRE(e.size() == 1);
  CHECK(e[0].x == 10.0);
  CHECK(e[0].y == 20.0);
  CHECK(e[0].effort == 2.5);
  CHECK(parse_activities_csv("x,y,date\n1,2,2017-07-07\n").size() == 1);
  CHECK_THROWS_AS(parse_efforts_csv("x,y,date\n1,2,2017-07-07\n"), Error);
  CHECK_THROWS_AS(parse_efforts_csv("x,y,date,effort\n1,2,2017-07-07,-1\n"), Error);
  CHECK_THROWS_AS(parse_activities_csv("x,y,date\n1,abc,2017-07-07\n"), Error);
}

TEST_CASE("assemble labels, efforts and row counts") {
  const Fixture f;
  SUBCASE("empty inputs") {
    const auto res = f.run({}, {});
    CHECK(res.table.rows() == 6 * 16);
    CHECK(std::all_of(res.table.labels.begin(), res.table.labels.end(), [](auto l) { return l == 0; }));
    CHECK(std::all_of(res.table.efforts.begin(), res.table.efforts.end(), [](auto e) { return e == 0; }));
  }
  SUBCASE("one activity labels one row") {
    const Point p = center(1, 2);
    const auto res = f.run({}, {{p.x, p.y, parse_date("2018-05-01")}});
    const std::size_t cell = f.grid.id_of(1, 2);
    CHECK(res.table.labels[row_index(res.table, cell, {2018, 2})] == 1);
    CHECK(std::count(res.table.labels.begin(), res.table.labels.end(), 1) == 1);
  }
  SUBCASE("efforts add within a cell and quarter") {
    const Point p = center(0, 0);
    const auto res = f.run({{p.x, p.y, parse_date("2016-01-05"), 1.5}, {p.x + 10, p.y, parse_date("2016-03-30"), 2.5}}, {});
    CHECK(res.table.efforts[row_index(res.table, 0, {2016, 1})] == 4.0);
  }
  SUBCASE("records outside are counted, not fatal") {
    const auto res = f.run({{-50, 500, parse_date("2016-01-05"), 1}, {500, 500, parse_date("2010-01-05"), 1}},
                           {{99999, 500, parse_date("2016-01-05")}});
    CHECK(res.report.efforts_outside_grid == 1);
    CHECK(res.report.efforts_outside_period == 1);
    CHECK(res.report.activities_outside_grid == 1);
  }
  SUBCASE("rows are quarter-major with catalog order static then dynamic") {
    const auto res = f.run({}, {});
    CHECK(res.table.quarters[5] == Quarter{2015, 1});
    CHECK(res.table.quarters[6] == Quarter{2015, 2});
    CHECK(res.table.catalog.names() == std::vector<std::string>{"roads", "npp"});
    CHECK(res.table.value(6, 1) == doctest::Approx(2015.2));
  }
}

TEST_CASE("missing values are imputed by column mean or mode") {
  Fixture f;
  f.statics[0].raster.values[2] = kNodata;
  FeatureLayer cover = layer_on(f.grid, {3, 3, kNodata, 1, 1, 3}, "land_cover", RasterKind::Categorical);
  f.statics.push_back(cover);
  const auto res = f.run({}, {});
  const auto& t = res.table;
  const std::size_t r = row_index(t, 2, {2015, 1});
  CHECK(t.value(r, 0) == doctest::Approx((1 + 2 + 4 + 5 + 6) / 5.0));
  CHECK(t.value(r, 1) == 3.0);
  CHECK(t.missing[r * t.cols() + 0] == 1);
}

TEST_CASE("a column without any valid value is an error") {
  Fixture f;
  f.statics[0].raster.values.assign(6, kNodata);
  CHECK_THROWS_AS(f.run({}, {}), Error);
}

TEST_CASE("labels never flip off and efforts are additive") {
  const Fixture f;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> x(0, 3000), y(0, 2000), amount(0, 3);
  auto random_efforts = [&](int n) {
    std::vector<EffortRecord> out;
    for (int i = 0; i < n; ++i) {
      out.push_back({x(gen), y(gen), {2015 + static_cast<int>(gen() % 4), 1 + static_cast<int>(gen() % 12), 1}, amount(gen)});
    }
    return out;
  };
  const auto a = random_efforts(30);
  const auto b = random_efforts(30);
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const auto ta = f.run(a, {}).table;
  const auto tb = f.run(b, {}).table;
  const auto tab = f.run(ab, {}).table;
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    CHECK(tab.efforts[r] == doctest::Approx(ta.efforts[r] + tb.efforts[r]).epsilon(1e-12));
  }

  std::vector<ActivityRecord> acts;
  for (const auto& e : a) acts.push_back({e.x, e.y, e.date});
  auto before = f.run({}, acts).table.labels;
  acts.push_back({b[0].x, b[0].y, b[0].date});
  auto after = f.run({}, acts).table.labels;
  for (std::size_t r = 0; r < before.size(); ++r) CHECK(after[r] >= before[r]);
}

TEST_CASE("split trains on three prior years and tests on the fourth") {
  const Fixture f;
  std::vector<EffortRecord> efforts;
  for (const auto& q : f.quarters) {
    const Point p = center(0, 1);
    efforts.push_back({p.x, p.y, {q.year, 3 * q.index, 1}, 1.0});
  }
  const auto t = f.run(efforts, {}).table;
  const auto split = split_by_year(t, 2018);
  CHECK(split.train.rows() == 12);
  CHECK(split.test.rows() == 4);
  CHECK(split.train.quarters.front() == Quarter{2015, 1});
  CHECK(split.train.quarters.back() == Quarter{2017, 4});
  for (const auto& q : split.test.quarters) CHECK(q.year == 2018);
  CHECK_THROWS_AS(split_by_year(t, 2019), Error);
  CHECK_THROWS_AS(split_by_year(t, 2017), Error);
}

TEST_CASE("split partitions the patrolled rows") {
  const Fixture f;
  std::mt19937_64 gen(4);
  std::vector<EffortRecord> efforts;
  for (int i = 0; i < 60; ++i) {
    efforts.push_back({static_cast<double>(gen() % 3000), static_cast<double>(gen() % 2000),
                       {2015 + static_cast<int>(gen() % 4), 1 + static_cast<int>(gen() % 12), 3}, 1.0});
  }
  const auto t = f.run(efforts, {}).table;
  const auto split = split_by_year(t, 2018);
  std::set<std::pair<std::size_t, Quarter>> train, test, all;
  for (std::size_t r = 0; r < split.train.rows(); ++r) train.insert({split.train.cell_ids[r], split.train.quarters[r]});
  for (std::size_t r = 0; r < split.test.rows(); ++r) test.insert({split.test.cell_ids[r], split.test.quarters[r]});
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (t.efforts[r] > 0) all.insert({t.cell_ids[r], t.quarters[r]});
  }
  for (const auto& k : train) CHECK_FALSE(test.count(k));
  auto both = train;
  both.insert(test.begin(), test.end());
  CHECK(both == all);
}

TEST_CASE("feature-set selection by source") {
  ObservationTable t;
  std::vector<FeatureSpec> specs;
  specs.push_back({"roads", FeatureSource::Park, Temporality::Static, RasterKind::Continuous});
  specs.push_back({"patrol_posts", FeatureSource::Park, Temporality::Static, RasterKind::Continuous});
  const auto& reserved = reserved_remote_sensing_names();
  for (std::size_t i = 0; i < 13; ++i) {
    specs.push_back({reserved[i], FeatureSource::RemoteSensing, Temporality::Static, RasterKind::Continuous});
  }
  t.catalog = FeatureCatalog(specs);
  t.cell_ids = {0};
  t.quarters = {{2018, 1}};
  t.efforts = {1};
  t.labels = {0};
  t.features.assign(15, 1.0);
  t.missing.assign(15, 0);
  CHECK(select_feature_set(t, Condition::All).cols() == 15);
  const auto base = select_feature_set(t, Condition::Baseline).catalog.names();
  const auto rs = select_feature_set(t, Condition::RemoteSensing).catalog.names();
  CHECK(base.size() == 2);
  CHECK(rs.size() == 13);
  for (const auto& n : base) CHECK(std::find(rs.begin(), rs.end(), n) == rs.end());

  // Eleven park features plus thirteen remote-sensing ones.
  for (int i = 0; i < 9; ++i) {
    specs.push_back({"park_" + std::to_string(i), FeatureSource::Park, Temporality::Static, RasterKind::Continuous});
  }
  t.catalog = FeatureCatalog(specs);
  t.features.assign(24, 1.0);
  t.missing.assign(24, 0);
  CHECK(select_feature_set(t, Condition::All).cols() == 24);

  ObservationTable only_rs = select_feature_set(t, Condition::RemoteSensing);
  CHECK_THROWS_AS(select_feature_set(only_rs, Condition::Baseline), Error);
}

TEST_CASE("condition names") {
  CHECK(parse_condition("remote-sensing") == Condition::RemoteSensing);
  CHECK(condition_name(Condition::Baseline) == "baseline");
  CHECK_THROWS_AS(parse_condition("gee"), Error);
}
