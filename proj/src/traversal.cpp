#include "eqfmm/traversal.hpp"

#include <algorithm>
#include <stdexcept>

namespace eqfmm {

namespace {

// Squared gap between two same-level cells in units of the cell side.
int squared_gap(const IntVec3& t) {
  int g2 = 0;
  for (int v : t) {
    const int g = std::max(0, std::abs(v) - 1);
    g2 += g * g;
  }
  return g2;
}

IntVec3 coordinate_offset(const Cell& t, const Cell& s) {
  if (t.level != s.level) throw std::invalid_argument("MAC: cells must belong to the same level");
  const CellCoords a = morton_decode(t.key);
  const CellCoords b = morton_decode(s.key);
  return {static_cast<int>(a[0]) - static_cast<int>(b[0]), static_cast<int>(a[1]) - static_cast<int>(b[1]),
          static_cast<int>(a[2]) - static_cast<int>(b[2])};
}

}  // namespace

double cube_distance(const CellFrame& a, const CellFrame& b) {
  double d2 = 0.0;
  for (int ax = 0; ax < kDim; ++ax) {
    const double lo = std::max(a.alpha[ax], b.alpha[ax]);
    const double hi = std::min(a.alpha[ax] + a.beta, b.alpha[ax] + b.beta);
    const double gap = std::max(0.0, lo - hi);
    d2 += gap * gap;
  }
  return std::sqrt(d2);
}

bool strict_mac(const Cell& t, const Cell& s) {
  // dist >= side  <=>  squared gap (in side units) >= 1; exact in integers.
  return squared_gap(coordinate_offset(t, s)) >= 1;
}

bool directional_mac(const Cell& t, const Cell& s, const MacParams& params) {
  const int g2 = squared_gap(coordinate_offset(t, s));
  if (g2 == 0) return false;
  const double w = t.radius;
  const double dist = t.frame.beta * std::sqrt(static_cast<double>(g2));
  return std::max(params.kappa * w * w, 2.0 * w) <= params.eta * dist;
}

bool is_high_frequency(double radius, const MacParams& params) {
  return params.kappa > 0.0 && params.kappa * radius >= params.hf_threshold;
}

std::size_t FmmSolver::Vec3Hash::operator()(const IntVec3& v) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (int c : v) {
    h ^= static_cast<std::uint32_t>(c);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

IntVec3 FmmSolver::translation(const Cell& t, const Cell& s) const { return coordinate_offset(t, s); }

bool FmmSolver::mac(const Cell& t, const Cell& s) const {
  return level_is_high_frequency(t.level) ? directional_mac(t, s, config_.mac) : strict_mac(t, s);
}

void FmmSolver::mark(Cell& c, int direction) {
  auto it = std::lower_bound(c.directions.begin(), c.directions.end(), direction);
  if (it == c.directions.end() || *it != direction) c.directions.insert(it, direction);
}

int FmmSolver::slot_of(const Cell& c, int direction) const {
  if (!level_is_high_frequency(c.level)) return 0;
  auto it = std::lower_bound(c.directions.begin(), c.directions.end(), direction);
  if (it == c.directions.end() || *it != direction) return -1;
  return static_cast<int>(it - c.directions.begin());
}

void FmmSolver::blank_dtt(int ti, int si) {
  Cell& t = targets_.tree.cell(ti);
  Cell& s = sources().tree.cell(si);
  if (mac(t, s)) {
    const IntVec3 tv = translation(t, s);
    InteractionMap& level_map = interactions_[static_cast<std::size_t>(t.level)];
    auto it = level_map.find(tv);
    if (it == level_map.end()) {
      const SymbolCache::Lookup lk = symbols_->get_or_compute(t.level, t.frame.beta, tv);
      Interaction entry{lk.symbol, lk.rotation, -1};
      if (level_is_high_frequency(t.level)) {
        const Point3 d = t.center() - s.center();
        entry.direction = directions_.nearest(refinement_of_level(t.level), (1.0 / norm(d)) * d).index;
      }
      it = level_map.emplace(tv, entry).first;
    }
    if (it->second.direction >= 0) {
      mark(t, it->second.direction);
      mark(s, it->second.direction);
    }
    m2l_target_[static_cast<std::size_t>(ti)] = 1;
    m2l_source_[static_cast<std::size_t>(si)] = 1;
    return;
  }
  if (t.is_leaf() || s.is_leaf()) return;
  for (int tc : t.sons) {
    for (int sc : s.sons) blank_dtt(tc, sc);
  }
}

void FmmSolver::blank_downward_pass(ClusterTree& tree, int ci) {
  const Cell& c = tree.cell(ci);
  if (!level_is_high_frequency(c.level)) return;
  for (int son : c.sons) {
    Cell& sc = tree.cell(son);
    if (!level_is_high_frequency(sc.level)) continue;
    for (int u : c.directions) {
      const Direction& d = directions_.direction(refinement_of_level(c.level), u);
      mark(sc, directions_.father(d).index);
    }
  }
  for (int son : c.sons) blank_downward_pass(tree, son);
}

void FmmSolver::dtt(int ti, int si, std::vector<InteractionEvent>* events) {
  Cell& t = targets_.tree.cell(ti);
  const Cell& s = sources().tree.cell(si);
  if (mac(t, s)) {
    const InteractionMap& level_map = interactions_[static_cast<std::size_t>(t.level)];
    const auto it = level_map.find(translation(t, s));
    if (it == level_map.end()) throw std::logic_error("dtt: M2L symbol was not precomputed by the blank pass");
    const Interaction& in = it->second;
    const int tslot = slot_of(t, in.direction);
    const int sslot = slot_of(s, in.direction);
    if (tslot < 0 || sslot < 0) throw std::logic_error("dtt: direction mark missing on an M2L cell");
    const std::size_t n = static_cast<std::size_t>(symbols_->workspace().fourier_size());
    const M2LSymbol& sym = symbols_->symbol(in.symbol);
    std::span<const int> gather;
    if (in.rotation != symbols_->symmetries().identity()) gather = symbols_->symmetries().gather(in.rotation);
    m2l_hadamard(std::span<Complex>(t.expansions.local_fourier).subspan(static_cast<std::size_t>(tslot) * n, n),
                 std::span<const Complex>(s.expansions.multipole_fourier).subspan(static_cast<std::size_t>(sslot) * n, n),
                 sym.diagonal, gather);
    ++m2l_events_;
    if (events) events->push_back({InteractionEvent::Kind::M2L, ti, si, in.direction});
    return;
  }
  if (t.is_leaf() || s.is_leaf()) {
    p2p(t, s);
    if (events) events->push_back({InteractionEvent::Kind::P2P, ti, si, -1});
    return;
  }
  for (int tc : t.sons) {
    for (int sc : s.sons) dtt(tc, sc, events);
  }
}

void FmmSolver::p2p(const Cell& t, const Cell& s) {
  ParticleSet& tp = targets_.particles;
  const ParticleSet& sp = sources().particles;
  const double kappa = kernel_.kappa;
  const double eps = kernel_.singular_radius;
  constexpr double inv4pi = 0.25 * std::numbers::inv_pi;
  for (std::size_t i = t.begin; i < t.end; ++i) {
    const Point3 x = tp.positions[i];
    double re = 0.0, im = 0.0;
    for (std::size_t j = s.begin; j < s.end; ++j) {
      const Point3 d = x - sp.positions[j];
      const double r = std::sqrt(dot(d, d));
      if (r < eps) continue;
      const double inv = inv4pi / r;
      const double gr = kappa == 0.0 ? inv : inv * std::cos(kappa * r);
      const double gi = kappa == 0.0 ? 0.0 : inv * std::sin(kappa * r);
      const Complex q = sp.charges[j];
      re += gr * q.real() - gi * q.imag();
      im += gr * q.imag() + gi * q.real();
    }
    tp.potentials[i] += Complex{re, im};
  }
  p2p_pairs_ += static_cast<std::uint64_t>(t.size()) * s.size();
}

}  // namespace eqfmm
