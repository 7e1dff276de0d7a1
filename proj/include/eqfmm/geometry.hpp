#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace eqfmm {

inline constexpr int kDim = 3;

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend constexpr Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(Point3 a, Point3 b) = default;
};

constexpr double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Point3 a) { return std::sqrt(dot(a, a)); }
inline bool is_finite(Point3 a) { return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z); }

/// Axis-aligned cube given by its center and half side length.
struct BoundingBox {
  Point3 center;
  double half_width = 0.5;

  Point3 lower() const { return center - Point3{half_width, half_width, half_width}; }
  double side() const { return 2.0 * half_width; }
  bool contains(Point3 p) const;
};

/// Smallest cube centered on the centroid of all given points, inflated by a
/// relative margin of 1e-6 so boundary points fall strictly inside.
BoundingBox make_root_box(std::span<const Point3> a, std::span<const Point3> b = {});

/// Affine map between a cell and the reference box [0,1]^3: c = alpha + beta * [0,1]^3.
struct CellFrame {
  Point3 alpha;
  double beta = 1.0;

  Point3 to_physical(Point3 ref) const { return alpha + beta * ref; }
  Point3 to_reference(Point3 p) const { return (1.0 / beta) * (p - alpha); }
  Point3 center() const { return alpha + (0.5 * beta) * Point3{1.0, 1.0, 1.0}; }
};

using CellCoords = std::array<std::uint32_t, 3>;

/// Bit-interleaved cell coordinates. Per level the three bits are ordered
/// (x, y, z) from most to least significant, so (1,0,1) at depth 1 is 0b101.
struct MortonKey {
  std::uint64_t bits = 0;
  int depth = 0;

  friend constexpr bool operator==(const MortonKey&, const MortonKey&) = default;
  friend constexpr auto operator<=>(const MortonKey& a, const MortonKey& b) {
    if (a.depth != b.depth) return a.depth <=> b.depth;
    return a.bits <=> b.bits;
  }

  MortonKey son(int octant) const { return {(bits << 3) | static_cast<std::uint64_t>(octant), depth + 1}; }
  MortonKey father() const { return {bits >> 3, depth - 1}; }
  int octant() const { return static_cast<int>(bits & 7u); }
};

/// 3 bits per level in a 64-bit word.
inline constexpr int kMaxMortonDepth = 21;

MortonKey morton_encode(const CellCoords& coords, int depth);
CellCoords morton_decode(const MortonKey& key);

/// Integer cell coordinates of p at the given depth, clamped into the box.
CellCoords cell_coords_of(const BoundingBox& root, Point3 p, int depth);

/// Stable permutation ordering the points by their Morton key at `depth`.
std::vector<std::size_t> sort_particles_morton(std::span<const Point3> points, const BoundingBox& root, int depth);

CellFrame cell_frame(const BoundingBox& root, const MortonKey& key);

}  // namespace eqfmm
