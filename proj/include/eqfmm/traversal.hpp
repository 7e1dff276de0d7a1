#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "eqfmm/cluster_tree.hpp"
#include "eqfmm/direction_tree.hpp"
#include "eqfmm/fourier_m2l.hpp"
#include "eqfmm/interpolation.hpp"

namespace eqfmm {

struct MacParams {
  double eta = 1.0;
  double kappa = 0.0;
  double hf_threshold = 2.0;  // a cell is high frequency iff kappa * w >= hf_threshold
};

/// Minimum distance between two closed axis-aligned cubes.
double cube_distance(const CellFrame& a, const CellFrame& b);

/// dist(t, s) >= side. Cells must share a level.
bool strict_mac(const Cell& t, const Cell& s);
/// max(kappa w^2, 2 w) / dist(t, s) <= eta. Cells must share a level.
bool directional_mac(const Cell& t, const Cell& s, const MacParams& params);

bool is_high_frequency(double radius, const MacParams& params);

struct InteractionEvent {
  enum class Kind { M2L, P2P };
  Kind kind = Kind::P2P;
  int target = -1;
  int source = -1;
  int direction = -1;  // M2L in the high-frequency regime only
};

struct FmmConfig {
  int order = 5;
  TreeConfig tree;
  MacParams mac;
  Strategy strategy = Strategy::StackedReal;
};

struct FmmCounts {
  std::size_t cells = 0;
  std::size_t leaves = 0;
  std::size_t symbols = 0;
  std::size_t effective_expansions = 0;
  std::uint64_t p2p_pairs = 0;
  std::uint64_t m2l_events = 0;
};

struct FmmTimings {
  double tree = 0.0;
  double blank = 0.0;
  double precompute = 0.0;
  double upward = 0.0;
  double m2l_p2p = 0.0;
  double downward = 0.0;
  double total = 0.0;
};

/// Directional FMM for the Helmholtz kernel. Construction builds the trees
/// and runs the blank passes (direction marking and symbol precomputation);
/// evaluate() then applies the operator to any number of charge vectors.
class FmmSolver {
 public:
  /// Targets and sources coincide.
  FmmSolver(std::span<const Point3> points, const FmmConfig& config);
  FmmSolver(std::span<const Point3> targets, std::span<const Point3> sources, const FmmConfig& config);
  ~FmmSolver();
  FmmSolver(const FmmSolver&) = delete;
  FmmSolver& operator=(const FmmSolver&) = delete;

  /// Potentials in the caller's target order. When `events` is given, every
  /// M2L and P2P application is recorded there.
  std::vector<Complex> evaluate(std::span<const Complex> charges, std::vector<InteractionEvent>* events = nullptr);

  const FmmConfig& config() const { return config_; }
  const ClusterTree& target_tree() const { return targets_.tree; }
  const ClusterTree& source_tree() const { return sources().tree; }
  const ParticleSet& target_particles() const { return targets_.particles; }
  const ParticleSet& source_particles() const { return sources().particles; }
  const DirectionTree& directions() const { return directions_; }
  const SymbolCache& symbols() const { return *symbols_; }
  bool shares_tree() const { return !separate_sources_; }

  /// Deepest high-frequency level, or -1 when every level is low frequency.
  int last_high_frequency_level() const { return hf_last_; }
  bool level_is_high_frequency(int level) const { return level <= hf_last_; }
  /// Direction-tree refinement used at a high-frequency cluster level.
  int refinement_of_level(int level) const { return hf_last_ - level; }

  FmmCounts counts() const;
  const FmmTimings& timings() const { return timings_; }

  /// Marking pass between target cell t and source cell s: records the
  /// direction of every high-frequency M2L pair and precomputes its symbol.
  void blank_dtt(int t, int s);
  /// Propagates marks to sons as Father(u), down to the leaves.
  void blank_downward_pass(ClusterTree& tree, int c);

 private:
  struct Interaction {
    int symbol = -1;
    int rotation = 0;
    int direction = -1;
  };
  struct Vec3Hash {
    std::size_t operator()(const IntVec3& v) const noexcept;
  };
  using InteractionMap = std::unordered_map<IntVec3, Interaction, Vec3Hash>;

  TreeBuild& sources() { return separate_sources_ ? *sources_ : targets_; }
  const TreeBuild& sources() const { return separate_sources_ ? *sources_ : targets_; }

  void setup(std::span<const Point3> targets, std::span<const Point3> source_points);
  IntVec3 translation(const Cell& t, const Cell& s) const;
  bool mac(const Cell& t, const Cell& s) const;
  int slot_of(const Cell& c, int direction) const;
  void mark(Cell& c, int direction);

  void allocate_expansions(ClusterTree& tree, bool multipole, bool local);
  void upward_pass();
  void dtt(int t, int s, std::vector<InteractionEvent>* events);
  void p2p(const Cell& t, const Cell& s);
  void downward_pass();

  FmmConfig config_;
  HelmholtzKernel kernel_;
  TreeBuild targets_;
  std::unique_ptr<TreeBuild> sources_;
  bool separate_sources_ = false;
  int hf_last_ = -1;
  DirectionTree directions_;
  InterpGrid grid_;
  M2MFactors factors_;
  std::unique_ptr<SymbolCache> symbols_;
  std::vector<InteractionMap> interactions_;  // per level
  std::vector<char> m2l_target_;              // target cell takes part in an M2L
  std::vector<char> m2l_source_;              // source cell takes part in an M2L
  FmmTimings timings_;
  std::uint64_t p2p_pairs_ = 0;
  std::uint64_t m2l_events_ = 0;
};

/// One-shot convenience wrapper around FmmSolver.
std::vector<Complex> run_fmm(std::span<const Point3> targets, std::span<const Point3> sources,
                             std::span<const Complex> charges, const FmmConfig& config);

}  // namespace eqfmm
