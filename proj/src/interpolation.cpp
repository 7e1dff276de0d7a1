#include "eqfmm/interpolation.hpp"

#include <stdexcept>

namespace eqfmm {

namespace {

thread_local std::uint64_t g_tensor_flops = 0;

Complex phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

template <class T>
void apply_axis(int order, const double* a, const T* in, T* out, int axis, int width) {
  const std::size_t L = static_cast<std::size_t>(order);
  std::size_t inner = static_cast<std::size_t>(width);
  for (int p = 0; p < axis; ++p) inner *= L;
  std::size_t outer = 1;
  for (int p = axis + 1; p < 3; ++p) outer *= L;
  for (std::size_t o = 0; o < outer; ++o) {
    const T* src = in + o * L * inner;
    T* dst = out + o * L * inner;
    for (std::size_t l = 0; l < L; ++l) {
      T* row = dst + l * inner;
      for (std::size_t k = 0; k < inner; ++k) row[k] = T{};
      for (std::size_t r = 0; r < L; ++r) {
        const double coef = a[l * L + r];
        const T* col = src + r * inner;
        for (std::size_t k = 0; k < inner; ++k) row[k] += coef * col[k];
      }
    }
  }
  constexpr std::uint64_t flops_per_fma = sizeof(T) / sizeof(double) * 2;
  g_tensor_flops += flops_per_fma * outer * L * L * inner;
}

template <class T>
void tensor_apply_impl(int order, const std::array<const double*, 3>& m, std::span<const T> in, std::span<T> out,
                       int width) {
  const std::size_t n = static_cast<std::size_t>(order) * order * order * static_cast<std::size_t>(width);
  if (in.size() != n || out.size() != n) throw std::invalid_argument("tensor_apply: buffer size mismatch");
  std::vector<T> a(n), b(n);
  apply_axis(order, m[0], in.data(), a.data(), 0, width);
  apply_axis(order, m[1], a.data(), b.data(), 1, width);
  apply_axis(order, m[2], b.data(), out.data(), 2, width);
}

// Per-node phases exp(sign * i kappa <x - origin, v>) on a cell grid.
std::vector<Complex> grid_phases(const InterpGrid& grid, const CellFrame& frame, double kappa, Point3 v, Point3 origin,
                                 double sign) {
  std::vector<Complex> ph(static_cast<std::size_t>(grid.size()));
  for (int k = 0; k < grid.size(); ++k) {
    const Point3 x = frame.to_physical(grid.reference_node(k));
    ph[static_cast<std::size_t>(k)] = phase(sign * kappa * dot(x - origin, v));
  }
  return ph;
}

std::array<const double*, 3> axis_matrices(const M2MFactors& f, int octant, bool transposed) {
  // Octant bits are (x, y, z) from most to least significant.
  const int ox = (octant >> 2) & 1, oy = (octant >> 1) & 1, oz = octant & 1;
  const auto& src = transposed ? f.eval_transposed : f.eval;
  return {src[static_cast<std::size_t>(ox)].data(), src[static_cast<std::size_t>(oy)].data(),
          src[static_cast<std::size_t>(oz)].data()};
}

void check_slots(const TransferPlan& plan, std::size_t father_len, std::size_t son_len, std::size_t n) {
  for (const TransferColumn& c : plan.columns) {
    if (c.father_slot < 0 || (static_cast<std::size_t>(c.father_slot) + 1) * n > father_len) {
      throw std::out_of_range("transfer: father expansion slot missing");
    }
    if (c.son_slot < 0 || (static_cast<std::size_t>(c.son_slot) + 1) * n > son_len) {
      throw std::out_of_range("transfer: son expansion slot missing");
    }
  }
}

struct ColumnPhases {
  std::vector<Complex> father;  // exp(+i kappa <y_l - c, v>) on the father grid
  std::vector<Complex> son;     // exp(-i kappa <y'_r - c, v>) on the son grid
};

std::vector<ColumnPhases> column_phases(const InterpGrid& grid, const TransferPlan& plan) {
  std::vector<ColumnPhases> out(plan.columns.size());
  const Point3 c = plan.father.center();
  for (std::size_t j = 0; j < plan.columns.size(); ++j) {
    const auto& dir = plan.columns[j].direction;
    if (!dir) continue;
    out[j].father = grid_phases(grid, plan.father, plan.kappa, *dir, c, 1.0);
    out[j].son = grid_phases(grid, plan.son, plan.kappa, *dir, c, -1.0);
  }
  return out;
}

// Shared driver: `forward` is M2M (son -> father), otherwise L2L.
void transfer(Strategy strategy, const M2MFactors& factors, const TransferPlan& plan, std::span<const Complex> src,
              std::span<Complex> dst, bool forward) {
  const InterpGrid grid(factors.order);
  const std::size_t n = static_cast<std::size_t>(grid.size());
  if (forward) {
    check_slots(plan, dst.size(), src.size(), n);
  } else {
    check_slots(plan, src.size(), dst.size(), n);
  }
  if (plan.columns.empty()) return;

  // M2M applies E^T along each axis, L2L applies E.
  const auto mats = axis_matrices(factors, plan.octant, forward);
  const auto phases = column_phases(grid, plan);
  const std::size_t ncols = plan.columns.size();

  // In phase: M2M multiplies by D1 (son grid), L2L by conj(D0) (father grid).
  auto load = [&](std::size_t j, std::size_t node) -> Complex {
    const TransferColumn& c = plan.columns[j];
    const std::size_t slot = static_cast<std::size_t>(forward ? c.son_slot : c.father_slot);
    Complex v = src[slot * n + node];
    if (c.direction) v *= forward ? phases[j].son[node] : std::conj(phases[j].father[node]);
    return v;
  };
  auto store = [&](std::size_t j, std::size_t node, Complex v) {
    const TransferColumn& c = plan.columns[j];
    const std::size_t slot = static_cast<std::size_t>(forward ? c.father_slot : c.son_slot);
    if (c.direction) v *= forward ? phases[j].father[node] : std::conj(phases[j].son[node]);
    dst[slot * n + node] += v;
  };

  switch (strategy) {
    case Strategy::Tensorized: {
      std::vector<Complex> in(n), out(n);
      for (std::size_t j = 0; j < ncols; ++j) {
        for (std::size_t k = 0; k < n; ++k) in[k] = load(j, k);
        tensor_apply(grid.order(), mats, std::span<const Complex>(in), std::span<Complex>(out), 1);
        for (std::size_t k = 0; k < n; ++k) store(j, k, out[k]);
      }
      break;
    }
    case Strategy::Stacked: {
      std::vector<Complex> in(n * ncols), out(n * ncols);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < ncols; ++j) in[k * ncols + j] = load(j, k);
      }
      tensor_apply(grid.order(), mats, std::span<const Complex>(in), std::span<Complex>(out), static_cast<int>(ncols));
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < ncols; ++j) store(j, k, out[k * ncols + j]);
      }
      break;
    }
    case Strategy::StackedReal: {
      // Real parts in columns [0, ncols), imaginary parts in [ncols, 2 ncols).
      const std::size_t w = 2 * ncols;
      std::vector<double> in(n * w), out(n * w);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < ncols; ++j) {
          const Complex v = load(j, k);
          in[k * w + j] = v.real();
          in[k * w + ncols + j] = v.imag();
        }
      }
      tensor_apply(grid.order(), mats, std::span<const double>(in), std::span<double>(out), static_cast<int>(w));
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < ncols; ++j) store(j, k, {out[k * w + j], out[k * w + ncols + j]});
      }
      break;
    }
  }
}

}  // namespace

InterpGrid::InterpGrid(int order) : order_(order) {
  if (order < 2) throw std::invalid_argument("InterpGrid: order must be >= 2");
  nodes_.resize(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) nodes_[static_cast<std::size_t>(k)] = static_cast<double>(k) / (order - 1);
  inv_denominators_.resize(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    double d = 1.0;
    for (int j = 0; j < order; ++j) {
      if (j != k) d *= node(k) - node(j);
    }
    inv_denominators_[static_cast<std::size_t>(k)] = 1.0 / d;
  }
}

Point3 InterpGrid::reference_node(int flat) const {
  const auto idx = unflatten(flat);
  return {node(idx[0]), node(idx[1]), node(idx[2])};
}

void InterpGrid::basis(double x, std::span<double> out) const {
  for (int k = 0; k < order_; ++k) {
    double p = inv_denominators_[static_cast<std::size_t>(k)];
    for (int j = 0; j < order_; ++j) {
      if (j != k) p *= x - node(j);
    }
    out[static_cast<std::size_t>(k)] = p;
  }
}

double lagrange_basis(int order, int k, double x) {
  if (k < 0 || k >= order) throw std::out_of_range("lagrange_basis: node index out of range");
  InterpGrid grid(order);
  std::vector<double> b(static_cast<std::size_t>(order));
  grid.basis(x, b);
  return b[static_cast<std::size_t>(k)];
}

void p2m(const InterpGrid& grid, const CellFrame& frame, std::span<const Point3> positions,
         std::span<const Complex> charges, const std::optional<Modulation>& mod, std::span<Complex> out) {
  const std::size_t L = static_cast<std::size_t>(grid.order());
  const std::size_t n = static_cast<std::size_t>(grid.size());
  if (out.size() != n) throw std::invalid_argument("p2m: output must hold L^3 coefficients");
  if (positions.size() != charges.size()) throw std::invalid_argument("p2m: positions/charges length mismatch");
  std::vector<double> bx(L), by(L), bz(L);
  std::vector<Complex> acc(n);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Point3 ref = frame.to_reference(positions[i]);
    grid.basis(ref.x, bx);
    grid.basis(ref.y, by);
    grid.basis(ref.z, bz);
    Complex w = charges[i];
    if (mod) w *= phase(-mod->kappa * dot(positions[i] - mod->origin, mod->direction));
    for (std::size_t k2 = 0; k2 < L; ++k2) {
      for (std::size_t k1 = 0; k1 < L; ++k1) {
        const Complex wyz = w * (by[k1] * bz[k2]);
        Complex* row = acc.data() + L * (k1 + L * k2);
        for (std::size_t k0 = 0; k0 < L; ++k0) row[k0] += wyz * bx[k0];
      }
    }
  }
  if (mod) {
    const auto ph = grid_phases(grid, frame, mod->kappa, mod->direction, mod->origin, 1.0);
    for (std::size_t k = 0; k < n; ++k) out[k] += ph[k] * acc[k];
  } else {
    for (std::size_t k = 0; k < n; ++k) out[k] += acc[k];
  }
}

void l2p(const InterpGrid& grid, const CellFrame& frame, std::span<const Point3> positions,
         std::span<const Complex> local, const std::optional<Modulation>& mod, std::span<Complex> potentials) {
  const std::size_t L = static_cast<std::size_t>(grid.order());
  const std::size_t n = static_cast<std::size_t>(grid.size());
  if (local.size() != n) throw std::invalid_argument("l2p: local expansion must hold L^3 coefficients");
  if (positions.size() != potentials.size()) throw std::invalid_argument("l2p: positions/potentials length mismatch");
  std::vector<Complex> coef(local.begin(), local.end());
  if (mod) {
    const auto ph = grid_phases(grid, frame, mod->kappa, mod->direction, mod->origin, -1.0);
    for (std::size_t k = 0; k < n; ++k) coef[k] *= ph[k];
  }
  std::vector<double> bx(L), by(L), bz(L);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Point3 ref = frame.to_reference(positions[i]);
    grid.basis(ref.x, bx);
    grid.basis(ref.y, by);
    grid.basis(ref.z, bz);
    Complex sum{};
    for (std::size_t k2 = 0; k2 < L; ++k2) {
      for (std::size_t k1 = 0; k1 < L; ++k1) {
        const Complex* row = coef.data() + L * (k1 + L * k2);
        Complex s{};
        for (std::size_t k0 = 0; k0 < L; ++k0) s += bx[k0] * row[k0];
        sum += (by[k1] * bz[k2]) * s;
      }
    }
    if (mod) sum *= phase(mod->kappa * dot(positions[i] - mod->origin, mod->direction));
    potentials[i] += sum;
  }
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Tensorized: return "t";
    case Strategy::Stacked: return "t+s";
    case Strategy::StackedReal: return "t+s+r";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "t") return Strategy::Tensorized;
  if (name == "t+s") return Strategy::Stacked;
  if (name == "t+s+r") return Strategy::StackedReal;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "' (expected t, t+s or t+s+r)");
}

M2MFactors::M2MFactors(const InterpGrid& grid) : order(grid.order()) {
  const std::size_t L = static_cast<std::size_t>(order);
  std::vector<double> b(L);
  for (int o = 0; o < 2; ++o) {
    auto& e = eval[static_cast<std::size_t>(o)];
    auto& et = eval_transposed[static_cast<std::size_t>(o)];
    e.resize(L * L);
    et.resize(L * L);
    for (std::size_t r = 0; r < L; ++r) {
      grid.basis(0.5 * (o + grid.node(static_cast<int>(r))), b);
      for (std::size_t l = 0; l < L; ++l) {
        e[r * L + l] = b[l];
        et[l * L + r] = b[l];
      }
    }
  }
}

void m2m_apply(Strategy strategy, const M2MFactors& factors, const TransferPlan& plan,
               std::span<const Complex> son_multipoles, std::span<Complex> father_multipoles) {
  transfer(strategy, factors, plan, son_multipoles, father_multipoles, true);
}

void l2l_apply(Strategy strategy, const M2MFactors& factors, const TransferPlan& plan,
               std::span<const Complex> father_locals, std::span<Complex> son_locals) {
  transfer(strategy, factors, plan, father_locals, son_locals, false);
}

void tensor_apply(int order, const std::array<const double*, 3>& matrices, std::span<const Complex> in,
                  std::span<Complex> out, int width) {
  tensor_apply_impl<Complex>(order, matrices, in, out, width);
}

void tensor_apply(int order, const std::array<const double*, 3>& matrices, std::span<const double> in,
                  std::span<double> out, int width) {
  tensor_apply_impl<double>(order, matrices, in, out, width);
}

std::uint64_t tensor_flop_count() { return g_tensor_flops; }
void reset_tensor_flop_count() { g_tensor_flops = 0; }

}  // namespace eqfmm
