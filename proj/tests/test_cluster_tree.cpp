#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "eqfmm/cluster_tree.hpp"
#include "oracles.hpp"

using namespace eqfmm;

namespace {

void check_structure(const TreeBuild& b, std::size_t n, int ncrit) {
  const ClusterTree& tree = b.tree;
  std::vector<int> covered(n, 0);
  for (const Cell& c : tree.cells()) {
    CHECK(c.size() > 0);
    if (c.is_leaf()) {
      if (c.level < tree.config().hard_depth_cap) CHECK(c.size() <= static_cast<std::size_t>(ncrit));
      for (std::size_t i = c.begin; i < c.end; ++i) ++covered[i];
    }
    std::size_t prev_end = c.begin;
    for (int si : c.sons) {
      const Cell& s = tree.cell(si);
      CHECK(s.level == c.level + 1);
      CHECK(s.frame.beta == c.frame.beta / 2);
      CHECK(s.parent >= 0);
      CHECK(&tree.cell(s.parent) == &c);
      CHECK(s.begin == prev_end);
      prev_end = s.end;
    }
    if (!c.is_leaf()) CHECK(prev_end == c.end);
    for (std::size_t i = c.begin; i < c.end; ++i) {
      const Point3 ref = c.frame.to_reference(b.particles.positions[i]);
      for (int ax = 0; ax < 3; ++ax) {
        CHECK(ref[ax] >= -1e-12);
        CHECK(ref[ax] <= 1.0 + 1e-12);
      }
    }
  }
  CHECK(std::all_of(covered.begin(), covered.end(), [](int v) { return v == 1; }));
}

}  // namespace

TEST_CASE("build_tree examples") {
  SUBCASE("single particle is a leaf root") {
    const std::vector<Point3> p{{0.3, 0.2, 0.1}};
    const std::vector<Complex> q{1.0};
    const TreeBuild b = build_tree(p, q, {10, kMaxMortonDepth});
    CHECK(b.tree.cells().size() == 1);
    CHECK(b.tree.cell(0).is_leaf());
  }
  SUBCASE("100 random particles, ncrit 10") {
    std::mt19937_64 rng(1);
    const auto p = oracle::random_points(100, rng);
    const std::vector<Complex> q(p.size(), 1.0);
    check_structure(build_tree(p, q, {10, kMaxMortonDepth}), p.size(), 10);
  }
  SUBCASE("octant centers, ncrit 1") {
    std::vector<Point3> p;
    for (int o = 0; o < 8; ++o) p.push_back({(o & 4) ? 0.75 : 0.25, (o & 2) ? 0.75 : 0.25, (o & 1) ? 0.75 : 0.25});
    std::reverse(p.begin(), p.end());
    const std::vector<Complex> q(p.size(), 1.0);
    const TreeBuild b = build_tree(p, q, {1, kMaxMortonDepth});
    CHECK(b.tree.cells().size() == 9);
    CHECK(b.tree.cell(0).sons.size() == 8);
    for (int si : b.tree.cell(0).sons) {
      CHECK(b.tree.cell(si).is_leaf());
      CHECK(b.tree.cell(si).size() == 1);
    }
  }
  SUBCASE("coincident particles stop at the depth cap") {
    const std::vector<Point3> p(20, Point3{0.1, 0.1, 0.1});
    std::vector<Point3> q = p;
    q.push_back({0.9, 0.9, 0.9});
    const std::vector<Complex> c(q.size(), 1.0);
    const TreeBuild b = build_tree(q, c, {4, 6});
    CHECK(b.tree.depth() == 6);
    check_structure(b, q.size(), 4);
  }
  SUBCASE("empty input") {
    CHECK_THROWS(build_tree(std::vector<Point3>{}, std::vector<Complex>{}, {}));
  }
}

TEST_CASE("build_tree invariants on clustered data") {
  std::mt19937_64 rng(2);
  std::vector<Point3> p = oracle::random_points(2000, rng);
  const auto dense = oracle::random_points(2000, rng, 0.40, 0.41);
  p.insert(p.end(), dense.begin(), dense.end());
  const std::vector<Complex> q(p.size(), 1.0);
  const TreeBuild a = build_tree(p, q, {32, kMaxMortonDepth});
  check_structure(a, p.size(), 32);

  const TreeBuild b = build_tree(p, q, {32, kMaxMortonDepth});
  REQUIRE(a.tree.cells().size() == b.tree.cells().size());
  for (std::size_t i = 0; i < a.tree.cells().size(); ++i) {
    CHECK(a.tree.cells()[i].key == b.tree.cells()[i].key);
    CHECK(a.tree.cells()[i].begin == b.tree.cells()[i].begin);
    CHECK(a.tree.cells()[i].end == b.tree.cells()[i].end);
  }
  CHECK(a.particles.original_index == b.particles.original_index);
}

TEST_CASE("level_radius") {
  const std::vector<Point3> p{{-1, -1, -1}, {1, 1, 1}};
  const std::vector<Complex> q(2, 1.0);
  const BoundingBox root{{0, 0, 0}, 1.0};
  const TreeBuild b = build_tree(p, q, {1, kMaxMortonDepth}, root);
  CHECK(b.tree.level_radius(0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(b.tree.level_radius(1) == doctest::Approx(0.8660254037844386).epsilon(1e-15));
  CHECK(b.tree.level_radius(2) == doctest::Approx(0.4330127018922193).epsilon(1e-15));
  for (int k = 0; k < 10; ++k) CHECK(b.tree.level_radius(k + 1) == b.tree.level_radius(k) / 2);
}

TEST_CASE("accumulate_potentials restores the caller's order") {
  ParticleSet ps;
  const std::size_t n = 50;
  std::mt19937_64 rng(3);
  const auto values = oracle::random_vector(n, rng);

  SUBCASE("identity") {
    ps.original_index.resize(n);
    std::iota(ps.original_index.begin(), ps.original_index.end(), 0u);
    ps.potentials = values;
    CHECK(accumulate_potentials(ps) == values);
  }
  SUBCASE("reversed") {
    for (std::size_t i = 0; i < n; ++i) ps.original_index.push_back(n - 1 - i);
    ps.potentials = values;
    auto rev = values;
    std::reverse(rev.begin(), rev.end());
    CHECK(accumulate_potentials(ps) == rev);
  }
  SUBCASE("round trip through a tree build") {
    const auto pts = oracle::random_points(n, rng);
    const TreeBuild b = build_tree(pts, values, {4, kMaxMortonDepth});
    ParticleSet sorted = b.particles;
    sorted.potentials = sorted.charges;
    CHECK(accumulate_potentials(sorted) == values);
  }
}
