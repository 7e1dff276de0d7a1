#pragma once

#include <vector>

#include "eqfmm/geometry.hpp"

namespace eqfmm {

struct Direction {
  Point3 unit;
  int refinement = 0;
  int index = 0;
};

/// Nested direction sets obtained by recursively splitting the six faces of
/// the cube into four sub-faces and projecting the sub-face centers onto the
/// unit sphere. Refinement e holds 6 * 4^e directions. Direction
/// (face, i, j) at refinement e has father (face, i/2, j/2) at e - 1.
class DirectionTree {
 public:
  DirectionTree() = default;
  explicit DirectionTree(int max_refinement);

  int max_refinement() const { return static_cast<int>(levels_.size()) - 1; }
  int size(int refinement) const;
  const Direction& direction(int refinement, int index) const;
  const std::vector<Direction>& level(int refinement) const;

  Direction nearest(int refinement, Point3 v) const;
  Direction father(const Direction& d) const;
  std::vector<int> sons(const Direction& d) const;

 private:
  std::vector<std::vector<Direction>> levels_;
};

DirectionTree generate_direction_tree(int max_refinement);
Direction nearest_direction(const DirectionTree& tree, int refinement, Point3 v);
Direction father_direction(const DirectionTree& tree, const Direction& d);

}  // namespace eqfmm
