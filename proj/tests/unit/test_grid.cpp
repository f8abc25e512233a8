#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "poachgrid/error.hpp"
#include "poachgrid/grid.hpp"

using namespace poachgrid;
using testutil::dataset;
using testutil::rect;
using testutil::ring_polygon;

namespace {

// Even-odd crossing count written independently of the library.
bool crossing_oracle(const Point& p, const std::vector<std::vector<Point>>& rings) {
  int crossings = 0;
  for (const auto& ring : rings) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const Point a = ring[i];
      const Point b = ring[i + 1];
      if ((a.y > p.y) == (b.y > p.y)) continue;
      const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x) ++crossings;
    }
  }
  return crossings % 2 == 1;
}

std::size_t masked_count(const ParkGrid& g) { return g.masked_ids().size(); }

}  // namespace

TEST_CASE("square park tiles exactly") {
  const ParkGrid g = build_grid(dataset({rect(0, 0, 10000, 10000)}), 1000);
  CHECK(g.width() == 10);
  CHECK(g.height() == 10);
  CHECK(masked_count(g) == 100);
  CHECK(g.transform().origin_x == 0.0);
  CHECK(g.transform().origin_y == 10000.0);
}

TEST_CASE("triangle mask matches brute-force center test") {
  const Geometry tri = ring_polygon({{{0, 0}, {10000, 0}, {0, 10000}}});
  const ParkGrid g = build_grid(dataset({tri}), 1000);
  std::size_t expected = 0;
  for (int r = 0; r < 10; ++r) {
    for (int c = 0; c < 10; ++c) {
      const Point center{c * 1000 + 500.0, 10000 - r * 1000 - 500.0};
      expected += crossing_oracle(center, tri.parts);
    }
  }
  CHECK(masked_count(g) == expected);
  CHECK(expected == 45);
}

TEST_CASE("holes leave their interior unmasked") {
  const Geometry holed = ring_polygon({{{0, 0}, {0, 10000}, {10000, 10000}, {10000, 0}},
                                       {{3000, 3000}, {7000, 3000}, {7000, 7000}, {3000, 7000}}});
  const ParkGrid g = build_grid(dataset({holed}), 1000);
  CHECK(masked_count(g) == 100 - 16);
  for (int r = 0; r < 10; ++r) {
    for (int c = 0; c < 10; ++c) {
      const Point center = g.cell_center(r, c);
      CHECK(g.masked(r, c) == crossing_oracle(center, holed.parts));
    }
  }
}

TEST_CASE("degenerate and non-polygon boundaries are rejected") {
  CHECK_THROWS_AS(build_grid(dataset({ring_polygon({{{0, 0}, {5000, 0}, {10000, 0}}})}), 1000), Error);
  CHECK_THROWS_AS(build_grid(dataset({{GeometryType::Point, {{{0, 0}}}}}), 1000), Error);
  CHECK_THROWS_AS(build_grid(dataset({}), 1000), Error);
  CHECK_THROWS_AS(build_grid(dataset({rect(0, 0, 10, 10)}), 0.0), Error);
}

TEST_CASE("point in polygon basics") {
  const Geometry sq = rect(0, 0, 1000, 1000);
  CHECK(point_in_polygon({500, 500}, sq));
  CHECK_FALSE(point_in_polygon({-1, -1}, sq));
}

TEST_CASE("point in convex polygon agrees with half-plane oracle") {
  // Regular octagon, counter-clockwise.
  std::vector<Point> ring;
  for (int k = 0; k < 8; ++k) {
    const double t = k * 3.14159265358979 / 4.0;
    ring.push_back({5000 + 4000 * std::cos(t), 5000 + 4000 * std::sin(t)});
  }
  const Geometry oct = ring_polygon({ring});
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0, 10000);
  for (int i = 0; i < 1000; ++i) {
    const Point p{u(gen), u(gen)};
    bool inside = true;
    for (std::size_t k = 0; k < 8; ++k) {
      const Point a = ring[k];
      const Point b = ring[(k + 1) % 8];
      if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0) inside = false;
    }
    CHECK(point_in_polygon(p, oct) == inside);
  }
}

TEST_CASE("cell centers follow the transform") {
  const ParkGrid g = build_grid(dataset({rect(0, 0, 10000, 10000)}), 1000);
  CHECK(g.cell_center(0, 0) == Point{500, 9500});
  CHECK(g.cell_center(9, 9) == Point{9500, 500});
  CHECK_THROWS_AS(g.cell_center(10, 0), Error);
  CHECK_THROWS_AS(g.cell_center(0, -1), Error);
  for (int r = 0; r < 10; ++r) {
    for (int c = 0; c < 10; ++c) {
      const auto at = g.locate(g.cell_center(r, c));
      REQUIRE(at.has_value());
      CHECK(at->row == r);
      CHECK(at->col == c);
    }
  }
  CHECK_FALSE(g.locate({-1, 5000}).has_value());
  CHECK_FALSE(g.locate({5000, 10000.5}).has_value());
}

TEST_CASE("masked count is translation invariant by whole cells") {
  const Geometry tri = ring_polygon({{{130, 270}, {8800, 950}, {2100, 9400}}});
  const std::size_t base = masked_count(build_grid(dataset({tri}), 1000));
  for (int shift : {-3, 1, 7}) {
    Geometry moved = tri;
    for (auto& p : moved.parts[0]) {
      p.x += shift * 1000.0;
      p.y -= shift * 2000.0;
    }
    CHECK(masked_count(build_grid(dataset({moved}), 1000)) == base);
  }
}

TEST_CASE("grid origin snaps outward to resolution multiples") {
  const ParkGrid g = build_grid(dataset({rect(1234, 5678, 4321, 8765)}), 1000);
  CHECK(g.transform().origin_x == 1000.0);
  CHECK(g.transform().origin_y == 9000.0);
  CHECK(g.width() == 4);
  CHECK(g.height() == 4);
}
