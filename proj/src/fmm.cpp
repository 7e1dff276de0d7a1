#include <chrono>
#include <stdexcept>

#include "eqfmm/traversal.hpp"

namespace eqfmm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::span<Complex> slot_span(std::vector<Complex>& v, int slot, std::size_t n) {
  return std::span<Complex>(v).subspan(static_cast<std::size_t>(slot) * n, n);
}

}  // namespace

FmmSolver::FmmSolver(std::span<const Point3> points, const FmmConfig& config)
    : config_(config), grid_(config.order), factors_(grid_) {
  setup(points, {});
}

FmmSolver::FmmSolver(std::span<const Point3> targets, std::span<const Point3> sources, const FmmConfig& config)
    : config_(config), grid_(config.order), factors_(grid_) {
  if (sources.empty()) throw std::invalid_argument("FmmSolver: empty source set");
  setup(targets, sources);
}

FmmSolver::~FmmSolver() = default;

void FmmSolver::setup(std::span<const Point3> targets, std::span<const Point3> source_points) {
  if (targets.empty()) throw std::invalid_argument("FmmSolver: empty target set");
  if (!(config_.mac.eta > 0.0)) throw std::invalid_argument("FmmSolver: eta must be positive");
  if (!(config_.mac.kappa >= 0.0) || !std::isfinite(config_.mac.kappa)) {
    throw std::invalid_argument("FmmSolver: kappa must be finite and non-negative");
  }
  const auto t_start = Clock::now();

  const BoundingBox root = make_root_box(targets, source_points);
  kernel_ = HelmholtzKernel{config_.mac.kappa, 1e-12 * root.side()};

  std::vector<Complex> zeros(std::max(targets.size(), source_points.size()));
  targets_ = build_tree(targets, std::span<const Complex>(zeros).first(targets.size()), config_.tree, root);
  separate_sources_ = !source_points.empty();
  if (separate_sources_) {
    sources_ = std::make_unique<TreeBuild>(
        build_tree(source_points, std::span<const Complex>(zeros).first(source_points.size()), config_.tree, root));
  }
  timings_.tree = seconds_since(t_start);

  const auto t_blank = Clock::now();
  // Deepest level whose cells are high frequency.
  hf_last_ = -1;
  for (int level = 0; level <= kMaxMortonDepth; ++level) {
    if (!is_high_frequency(targets_.tree.level_radius(level), config_.mac)) break;
    hf_last_ = level;
  }
  directions_ = DirectionTree(std::max(0, hf_last_));

  const int depth = std::max(targets_.tree.depth(), sources().tree.depth());
  interactions_.assign(static_cast<std::size_t>(depth) + 1, {});
  m2l_target_.assign(targets_.tree.cells().size(), 0);
  m2l_source_.assign(sources().tree.cells().size(), 0);
  symbols_ = std::make_unique<SymbolCache>(config_.order, kernel_);

  blank_dtt(0, 0);
  blank_downward_pass(targets_.tree, 0);
  if (separate_sources_) blank_downward_pass(sources_->tree, 0);

  timings_.precompute = symbols_->seconds_computing();
  timings_.blank = seconds_since(t_blank) - timings_.precompute;
  timings_.total = seconds_since(t_start);
}

void FmmSolver::allocate_expansions(ClusterTree& tree, bool multipole, bool local) {
  const std::size_t n = static_cast<std::size_t>(grid_.size());
  const std::size_t nf = static_cast<std::size_t>(symbols_->workspace().fourier_size());
  for (Cell& c : tree.cells()) {
    const std::size_t slots = level_is_high_frequency(c.level) ? c.directions.size() : 1;
    if (multipole) {
      c.expansions.multipole.assign(slots * n, Complex{});
      c.expansions.multipole_fourier.assign(slots * nf, Complex{});
    }
    if (local) {
      c.expansions.local.assign(slots * n, Complex{});
      c.expansions.local_fourier.assign(slots * nf, Complex{});
    }
  }
}

void FmmSolver::upward_pass() {
  ClusterTree& tree = sources().tree;
  const ParticleSet& ps = sources().particles;
  const std::size_t n = static_cast<std::size_t>(grid_.size());
  const double kappa = config_.mac.kappa;

  for (int level = tree.depth(); level >= 0; --level) {
    const bool hf = level_is_high_frequency(level);
    for (int ci : tree.levels()[static_cast<std::size_t>(level)]) {
      Cell& c = tree.cell(ci);
      const std::size_t slots = hf ? c.directions.size() : 1;
      if (slots == 0) continue;
      if (c.is_leaf()) {
        const auto pos = std::span<const Point3>(ps.positions).subspan(c.begin, c.size());
        const auto q = std::span<const Complex>(ps.charges).subspan(c.begin, c.size());
        for (std::size_t k = 0; k < slots; ++k) {
          std::optional<Modulation> mod;
          if (hf) {
            const Point3 u = directions_.direction(refinement_of_level(level), c.directions[k]).unit;
            mod = Modulation{kappa, u, c.center()};
          }
          p2m(grid_, c.frame, pos, q, mod, slot_span(c.expansions.multipole, static_cast<int>(k), n));
        }
        continue;
      }
      for (int si : c.sons) {
        const Cell& son = tree.cell(si);
        TransferPlan plan{son.key.octant(), c.frame, son.frame, kappa, {}};
        plan.columns.reserve(slots);
        for (std::size_t k = 0; k < slots; ++k) {
          TransferColumn col{static_cast<int>(k), 0, std::nullopt};
          if (hf) {
            const Direction& v = directions_.direction(refinement_of_level(level), c.directions[k]);
            col.direction = v.unit;
            if (level_is_high_frequency(son.level)) col.son_slot = slot_of(son, directions_.father(v).index);
          }
          if (col.son_slot < 0) throw std::logic_error("upward pass: son lacks the father's direction mark");
          plan.columns.push_back(col);
        }
        m2m_apply(config_.strategy, factors_, plan, son.expansions.multipole, c.expansions.multipole);
      }
    }
  }

  const FourierWorkspace& ws = symbols_->workspace();
  const std::size_t nf = static_cast<std::size_t>(ws.fourier_size());
  for (std::size_t ci = 0; ci < tree.cells().size(); ++ci) {
    if (!m2l_source_[ci]) continue;
    Cell& c = tree.cells()[ci];
    const std::size_t slots = level_is_high_frequency(c.level) ? c.directions.size() : 1;
    for (std::size_t k = 0; k < slots; ++k) {
      ws.m2f(slot_span(c.expansions.multipole, static_cast<int>(k), n),
             slot_span(c.expansions.multipole_fourier, static_cast<int>(k), nf));
    }
  }
}

void FmmSolver::downward_pass() {
  ClusterTree& tree = targets_.tree;
  ParticleSet& ps = targets_.particles;
  const std::size_t n = static_cast<std::size_t>(grid_.size());
  const double kappa = config_.mac.kappa;

  const FourierWorkspace& ws = symbols_->workspace();
  const std::size_t nf = static_cast<std::size_t>(ws.fourier_size());
  for (std::size_t ci = 0; ci < tree.cells().size(); ++ci) {
    if (!m2l_target_[ci]) continue;
    Cell& c = tree.cells()[ci];
    const std::size_t slots = level_is_high_frequency(c.level) ? c.directions.size() : 1;
    for (std::size_t k = 0; k < slots; ++k) {
      ws.f2l(slot_span(c.expansions.local_fourier, static_cast<int>(k), nf),
             slot_span(c.expansions.local, static_cast<int>(k), n));
    }
  }

  for (int level = 0; level <= tree.depth(); ++level) {
    const bool hf = level_is_high_frequency(level);
    for (int ci : tree.levels()[static_cast<std::size_t>(level)]) {
      Cell& c = tree.cell(ci);
      const std::size_t slots = hf ? c.directions.size() : 1;
      if (slots == 0) continue;
      if (c.is_leaf()) {
        const auto pos = std::span<const Point3>(ps.positions).subspan(c.begin, c.size());
        auto pot = std::span<Complex>(ps.potentials).subspan(c.begin, c.size());
        for (std::size_t k = 0; k < slots; ++k) {
          std::optional<Modulation> mod;
          if (hf) {
            const Point3 u = directions_.direction(refinement_of_level(level), c.directions[k]).unit;
            mod = Modulation{kappa, u, c.center()};
          }
          l2p(grid_, c.frame, pos, slot_span(c.expansions.local, static_cast<int>(k), n), mod, pot);
        }
        continue;
      }
      for (int si : c.sons) {
        Cell& son = tree.cell(si);
        TransferPlan plan{son.key.octant(), c.frame, son.frame, kappa, {}};
        plan.columns.reserve(slots);
        for (std::size_t k = 0; k < slots; ++k) {
          TransferColumn col{static_cast<int>(k), 0, std::nullopt};
          if (hf) {
            const Direction& v = directions_.direction(refinement_of_level(level), c.directions[k]);
            col.direction = v.unit;
            if (level_is_high_frequency(son.level)) col.son_slot = slot_of(son, directions_.father(v).index);
          }
          if (col.son_slot < 0) throw std::logic_error("downward pass: son lacks the father's direction mark");
          plan.columns.push_back(col);
        }
        l2l_apply(config_.strategy, factors_, plan, c.expansions.local, son.expansions.local);
      }
    }
  }
}

std::vector<Complex> FmmSolver::evaluate(std::span<const Complex> charges, std::vector<InteractionEvent>* events) {
  TreeBuild& src = sources();
  if (charges.size() != src.particles.size()) throw std::invalid_argument("evaluate: one charge per source expected");
  const auto t_start = Clock::now();

  for (std::size_t i = 0; i < src.particles.size(); ++i) src.particles.charges[i] = charges[src.particles.original_index[i]];
  std::fill(targets_.particles.potentials.begin(), targets_.particles.potentials.end(), Complex{});
  p2p_pairs_ = 0;
  m2l_events_ = 0;

  if (separate_sources_) {
    allocate_expansions(sources_->tree, true, false);
    allocate_expansions(targets_.tree, false, true);
  } else {
    allocate_expansions(targets_.tree, true, true);
  }
  upward_pass();
  timings_.upward = seconds_since(t_start);

  const auto t_m2l = Clock::now();
  dtt(0, 0, events);
  timings_.m2l_p2p = seconds_since(t_m2l);

  const auto t_down = Clock::now();
  downward_pass();
  timings_.downward = seconds_since(t_down);

  timings_.total = timings_.tree + timings_.blank + timings_.precompute + seconds_since(t_start);
  return accumulate_potentials(targets_.particles);
}

FmmCounts FmmSolver::counts() const {
  FmmCounts c;
  auto add_tree = [&](const ClusterTree& tree) {
    c.cells += tree.cells().size();
    c.leaves += tree.leaf_count();
    for (const Cell& cell : tree.cells()) {
      c.effective_expansions += level_is_high_frequency(cell.level) ? cell.directions.size() : 1;
    }
  };
  add_tree(targets_.tree);
  if (separate_sources_) add_tree(sources_->tree);
  c.symbols = symbols_->size();
  c.p2p_pairs = p2p_pairs_;
  c.m2l_events = m2l_events_;
  return c;
}

std::vector<Complex> run_fmm(std::span<const Point3> targets, std::span<const Point3> sources,
                             std::span<const Complex> charges, const FmmConfig& config) {
  const bool same = targets.data() == sources.data() && targets.size() == sources.size();
  FmmSolver solver = same ? FmmSolver(targets, config) : FmmSolver(targets, sources, config);
  return solver.evaluate(charges);
}

}  // namespace eqfmm
