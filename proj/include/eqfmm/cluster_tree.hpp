#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "eqfmm/geometry.hpp"
#include "eqfmm/kernel.hpp"

namespace eqfmm {

struct TreeConfig {
  int ncrit = 64;
  // Morton keys are 64-bit, so 21 is also the largest admissible value.
  int hard_depth_cap = kMaxMortonDepth;
};

/// All directional expansions of one cell, stored back to back. Slot k holds
/// the expansion for the k-th entry of Cell::directions (or the single
/// non-directional expansion when the cell is low frequency).
struct ExpansionBlock {
  std::vector<Complex> multipole;
  std::vector<Complex> local;
  std::vector<Complex> multipole_fourier;
  std::vector<Complex> local_fourier;

  void clear() {
    multipole.clear();
    local.clear();
    multipole_fourier.clear();
    local_fourier.clear();
  }
};

struct Cell {
  MortonKey key;
  std::size_t begin = 0;  // particle range [begin, end) in the sorted set
  std::size_t end = 0;
  int level = 0;
  int parent = -1;
  std::vector<int> sons;  // Morton order
  CellFrame frame;
  double radius = 0.0;  // half diagonal

  std::vector<int> directions;  // sorted direction indices marked by the blank passes
  ExpansionBlock expansions;

  bool is_leaf() const { return sons.empty(); }
  std::size_t size() const { return end - begin; }
  Point3 center() const { return frame.center(); }
};

struct ParticleSet {
  std::vector<Point3> positions;
  std::vector<Complex> charges;
  std::vector<Complex> potentials;
  std::vector<std::size_t> original_index;  // sorted slot -> caller's index

  std::size_t size() const { return positions.size(); }
};

class ClusterTree {
 public:
  ClusterTree() = default;
  ClusterTree(BoundingBox root, TreeConfig config) : root_(root), config_(config) {}

  const BoundingBox& root_box() const { return root_; }
  const TreeConfig& config() const { return config_; }

  std::vector<Cell>& cells() { return cells_; }
  const std::vector<Cell>& cells() const { return cells_; }
  Cell& cell(int i) { return cells_[static_cast<std::size_t>(i)]; }
  const Cell& cell(int i) const { return cells_[static_cast<std::size_t>(i)]; }

  /// Cell indices grouped by depth, Morton ordered within a level.
  const std::vector<std::vector<int>>& levels() const { return levels_; }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  std::size_t leaf_count() const;

  /// Half diagonal sqrt(3) * side / 2 of the cells at `level`.
  double level_radius(int level) const;
  double level_side(int level) const;

 private:
  friend struct TreeBuilder;
  BoundingBox root_;
  TreeConfig config_;
  std::vector<Cell> cells_;
  std::vector<std::vector<int>> levels_;
};

struct TreeBuild {
  ClusterTree tree;
  ParticleSet particles;
};

/// Sorts the particles in Morton order and subdivides every cell holding more
/// than ncrit particles. Empty cells are never created.
TreeBuild build_tree(std::span<const Point3> points, std::span<const Complex> charges, const TreeConfig& config);
TreeBuild build_tree(std::span<const Point3> points, std::span<const Complex> charges, const TreeConfig& config,
                     const BoundingBox& root);

/// Potentials of `particles` permuted back to the caller's ordering.
std::vector<Complex> accumulate_potentials(const ParticleSet& particles);

}  // namespace eqfmm
