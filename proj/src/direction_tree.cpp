#include "eqfmm/direction_tree.hpp"

#include <stdexcept>
#include <string>

namespace eqfmm {

namespace {

// Face f: normal axis f / 2, sign + for even f. The two in-face axes follow
// in cyclic order.
Point3 face_point(int face, double s, double t) {
  const int axis = face / 2;
  const double sign = (face % 2 == 0) ? 1.0 : -1.0;
  Point3 p;
  p[axis] = sign;
  p[(axis + 1) % 3] = s;
  p[(axis + 2) % 3] = t;
  return p;
}

}  // namespace

DirectionTree::DirectionTree(int max_refinement) {
  if (max_refinement < 0) throw std::invalid_argument("DirectionTree: negative refinement count");
  levels_.resize(static_cast<std::size_t>(max_refinement) + 1);
  for (int e = 0; e <= max_refinement; ++e) {
    const int split = 1 << e;
    auto& dirs = levels_[static_cast<std::size_t>(e)];
    dirs.reserve(static_cast<std::size_t>(6 * split * split));
    for (int face = 0; face < 6; ++face) {
      for (int i = 0; i < split; ++i) {
        for (int j = 0; j < split; ++j) {
          // Mean of the four sub-face corners.
          const double s = -1.0 + (2.0 * i + 1.0) / split;
          const double t = -1.0 + (2.0 * j + 1.0) / split;
          const Point3 c = face_point(face, s, t);
          dirs.push_back({(1.0 / norm(c)) * c, e, static_cast<int>(dirs.size())});
        }
      }
    }
  }
}

int DirectionTree::size(int refinement) const { return static_cast<int>(level(refinement).size()); }

const std::vector<Direction>& DirectionTree::level(int refinement) const {
  if (refinement < 0 || refinement > max_refinement()) {
    throw std::out_of_range("DirectionTree: refinement " + std::to_string(refinement) + " not stored");
  }
  return levels_[static_cast<std::size_t>(refinement)];
}

const Direction& DirectionTree::direction(int refinement, int index) const {
  const auto& dirs = level(refinement);
  if (index < 0 || index >= static_cast<int>(dirs.size())) throw std::out_of_range("DirectionTree: bad direction index");
  return dirs[static_cast<std::size_t>(index)];
}

Direction DirectionTree::nearest(int refinement, Point3 v) const {
  const auto& dirs = level(refinement);
  int best = 0;
  double best_dist = norm(dirs[0].unit - v);
  for (std::size_t k = 1; k < dirs.size(); ++k) {
    const double d = norm(dirs[k].unit - v);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(k);
    }
  }
  return dirs[static_cast<std::size_t>(best)];
}

Direction DirectionTree::father(const Direction& d) const {
  if (d.refinement <= 0) throw std::out_of_range("DirectionTree: coarsest directions have no father");
  const int split = 1 << d.refinement;
  const int face = d.index / (split * split);
  const int i = (d.index / split) % split;
  const int j = d.index % split;
  const int half = split / 2;
  return direction(d.refinement - 1, face * half * half + (i / 2) * half + j / 2);
}

std::vector<int> DirectionTree::sons(const Direction& d) const {
  if (d.refinement >= max_refinement()) return {};
  const int split = 1 << d.refinement;
  const int face = d.index / (split * split);
  const int i = (d.index / split) % split;
  const int j = d.index % split;
  const int fine = 2 * split;
  std::vector<int> out;
  for (int di = 0; di < 2; ++di) {
    for (int dj = 0; dj < 2; ++dj) out.push_back(face * fine * fine + (2 * i + di) * fine + 2 * j + dj);
  }
  return out;
}

DirectionTree generate_direction_tree(int max_refinement) { return DirectionTree(max_refinement); }

Direction nearest_direction(const DirectionTree& tree, int refinement, Point3 v) {
  if (std::abs(norm(v) - 1.0) > 1e-9) throw std::invalid_argument("nearest_direction: query is not a unit vector");
  return tree.nearest(refinement, v);
}

Direction father_direction(const DirectionTree& tree, const Direction& d) { return tree.father(d); }

}  // namespace eqfmm
