#include "eqfmm/cluster_tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace eqfmm {

std::size_t ClusterTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](const Cell& c) { return c.is_leaf(); }));
}

double ClusterTree::level_side(int level) const {
  return root_.side() / static_cast<double>(std::uint64_t{1} << level);
}

double ClusterTree::level_radius(int level) const { return std::sqrt(3.0) * 0.5 * level_side(level); }

struct TreeBuilder {
  static TreeBuild build(std::span<const Point3> points, std::span<const Complex> charges, const TreeConfig& config,
                         const BoundingBox& root) {
    if (points.empty()) throw std::invalid_argument("build_tree: empty particle set");
    if (points.size() != charges.size()) throw std::invalid_argument("build_tree: charges/points length mismatch");
    if (config.ncrit < 1) throw std::invalid_argument("build_tree: ncrit must be >= 1");
    if (config.hard_depth_cap < 0 || config.hard_depth_cap > kMaxMortonDepth) {
      throw std::invalid_argument("build_tree: hard_depth_cap must lie in [0, 21]");
    }
    for (const Point3& p : points) {
      if (!is_finite(p)) throw std::invalid_argument("build_tree: non-finite coordinate");
    }

    const int cap = config.hard_depth_cap;
    // Sorting by the deepest key orders the particles along the Morton curve of
    // every coarser level at once.
    const std::vector<std::size_t> perm = sort_particles_morton(points, root, cap);

    TreeBuild out{ClusterTree(root, config), {}};
    ParticleSet& ps = out.particles;
    const std::size_t n = points.size();
    ps.positions.resize(n);
    ps.charges.resize(n);
    ps.potentials.assign(n, Complex{});
    ps.original_index = perm;
    std::vector<std::uint64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
      ps.positions[i] = points[perm[i]];
      ps.charges[i] = charges[perm[i]];
      keys[i] = morton_encode(cell_coords_of(root, ps.positions[i], cap), cap).bits;
    }

    ClusterTree& tree = out.tree;
    Cell root_cell;
    root_cell.begin = 0;
    root_cell.end = n;
    root_cell.frame = cell_frame(root, root_cell.key);
    root_cell.radius = tree.level_radius(0);
    tree.cells_.push_back(std::move(root_cell));
    tree.levels_.push_back({0});

    // Breadth first, so cells end up grouped by level and in Morton order.
    for (int level = 0;; ++level) {
      std::vector<int> next;
      for (int ci : tree.levels_[static_cast<std::size_t>(level)]) {
        const Cell parent = tree.cell(ci);
        if (parent.size() <= static_cast<std::size_t>(config.ncrit) || level >= cap) continue;
        const int shift = 3 * (cap - level - 1);
        std::size_t lo = parent.begin;
        for (int oct = 0; oct < 8 && lo < parent.end; ++oct) {
          // First index in [lo, end) whose octant exceeds oct.
          std::size_t first = lo, count = parent.end - lo;
          while (count > 0) {
            const std::size_t step = count / 2;
            if (static_cast<int>((keys[first + step] >> shift) & 7u) <= oct) {
              first += step + 1;
              count -= step + 1;
            } else {
              count = step;
            }
          }
          const std::size_t hi = first;
          if (hi > lo) {
            Cell son;
            son.key = parent.key.son(oct);
            son.begin = lo;
            son.end = hi;
            son.level = level + 1;
            son.parent = ci;
            son.frame = cell_frame(root, son.key);
            son.radius = tree.level_radius(level + 1);
            const int si = static_cast<int>(tree.cells_.size());
            tree.cells_.push_back(std::move(son));
            tree.cell(ci).sons.push_back(si);
            next.push_back(si);
          }
          lo = hi;
        }
      }
      if (next.empty()) break;
      tree.levels_.push_back(std::move(next));
    }
    return out;
  }
};

TreeBuild build_tree(std::span<const Point3> points, std::span<const Complex> charges, const TreeConfig& config,
                     const BoundingBox& root) {
  return TreeBuilder::build(points, charges, config, root);
}

TreeBuild build_tree(std::span<const Point3> points, std::span<const Complex> charges, const TreeConfig& config) {
  if (points.empty()) throw std::invalid_argument("build_tree: empty particle set");
  return TreeBuilder::build(points, charges, config, make_root_box(points));
}

std::vector<Complex> accumulate_potentials(const ParticleSet& particles) {
  const std::size_t n = particles.potentials.size();
  if (particles.original_index.size() != n) throw std::invalid_argument("accumulate_potentials: index/potential length mismatch");
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) out.at(particles.original_index[i]) = particles.potentials[i];
  return out;
}

}  // namespace eqfmm
