#include "eqfmm/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace eqfmm {

namespace {

// Spreads the low 21 bits of v so that bit i lands on bit 3i.
std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0x1fffffULL;
  v = (v | (v << 32)) & 0x1f00000000ffffULL;
  v = (v | (v << 16)) & 0x1f0000ff0000ffULL;
  v = (v | (v << 8)) & 0x100f00f00f00f00fULL;
  v = (v | (v << 4)) & 0x10c30c30c30c30c3ULL;
  v = (v | (v << 2)) & 0x1249249249249249ULL;
  return v;
}

std::uint64_t compact_bits(std::uint64_t v) {
  v &= 0x1249249249249249ULL;
  v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3ULL;
  v = (v ^ (v >> 4)) & 0x100f00f00f00f00fULL;
  v = (v ^ (v >> 8)) & 0x1f0000ff0000ffULL;
  v = (v ^ (v >> 16)) & 0x1f00000000ffffULL;
  v = (v ^ (v >> 32)) & 0x1fffffULL;
  return v;
}

}  // namespace

bool BoundingBox::contains(Point3 p) const {
  for (int a = 0; a < kDim; ++a) {
    if (!(std::abs(p[a] - center[a]) <= half_width)) return false;
  }
  return true;
}

BoundingBox make_root_box(std::span<const Point3> a, std::span<const Point3> b) {
  const std::size_t n = a.size() + b.size();
  if (n == 0) throw std::invalid_argument("make_root_box: no points");
  Point3 centroid;
  auto accumulate = [&](std::span<const Point3> pts) {
    for (const Point3& p : pts) {
      if (!is_finite(p)) throw std::invalid_argument("make_root_box: non-finite coordinate");
      centroid = centroid + p;
    }
  };
  accumulate(a);
  accumulate(b);
  centroid = (1.0 / static_cast<double>(n)) * centroid;

  double extent = 0.0;
  auto widen = [&](std::span<const Point3> pts) {
    for (const Point3& p : pts) {
      for (int ax = 0; ax < kDim; ++ax) extent = std::max(extent, std::abs(p[ax] - centroid[ax]));
    }
  };
  widen(a);
  widen(b);
  // A single point (or fully coincident cloud) still needs a non-degenerate box.
  if (extent == 0.0) extent = 0.5;
  return {centroid, extent * (1.0 + 1e-6)};
}

MortonKey morton_encode(const CellCoords& coords, int depth) {
  if (depth < 0 || depth > kMaxMortonDepth) {
    throw std::out_of_range("morton_encode: depth " + std::to_string(depth) + " outside [0, 21]");
  }
  const std::uint64_t limit = std::uint64_t{1} << depth;
  for (std::uint32_t c : coords) {
    if (c >= limit) {
      throw std::out_of_range("morton_encode: coordinate " + std::to_string(c) + " out of range for depth " +
                              std::to_string(depth));
    }
  }
  const std::uint64_t bits = (spread_bits(coords[0]) << 2) | (spread_bits(coords[1]) << 1) | spread_bits(coords[2]);
  return {bits, depth};
}

CellCoords morton_decode(const MortonKey& key) {
  return {static_cast<std::uint32_t>(compact_bits(key.bits >> 2)),
          static_cast<std::uint32_t>(compact_bits(key.bits >> 1)), static_cast<std::uint32_t>(compact_bits(key.bits))};
}

CellCoords cell_coords_of(const BoundingBox& root, Point3 p, int depth) {
  const Point3 lo = root.lower();
  const double cells = static_cast<double>(std::uint64_t{1} << depth);
  const std::uint32_t last = static_cast<std::uint32_t>((std::uint64_t{1} << depth) - 1);
  CellCoords c{};
  for (int a = 0; a < kDim; ++a) {
    const double t = (p[a] - lo[a]) / root.side() * cells;
    c[a] = t <= 0.0 ? 0u : std::min(last, static_cast<std::uint32_t>(t));
  }
  return c;
}

std::vector<std::size_t> sort_particles_morton(std::span<const Point3> points, const BoundingBox& root, int depth) {
  std::vector<std::uint64_t> keys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!root.contains(points[i])) {
      throw std::invalid_argument("sort_particles_morton: point " + std::to_string(i) + " outside the root box");
    }
    keys[i] = morton_encode(cell_coords_of(root, points[i], depth), depth).bits;
  }
  std::vector<std::size_t> perm(points.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return perm;
}

CellFrame cell_frame(const BoundingBox& root, const MortonKey& key) {
  const double beta = root.side() / static_cast<double>(std::uint64_t{1} << key.depth);
  const CellCoords c = morton_decode(key);
  const Point3 lo = root.lower();
  return {Point3{lo.x + beta * c[0], lo.y + beta * c[1], lo.z + beta * c[2]}, beta};
}

}  // namespace eqfmm
