#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqfmm/geometry.hpp"
#include "eqfmm/kernel.hpp"

namespace eqfmm {

/// Tensor grid of L equispaced nodes per axis on [0,1], endpoints included.
/// Flat index of node (i0, i1, i2) is i0 + L*i1 + L*L*i2.
class InterpGrid {
 public:
  explicit InterpGrid(int order);

  int order() const { return order_; }
  int size() const { return order_ * order_ * order_; }
  double node(int k) const { return nodes_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& nodes() const { return nodes_; }

  int flatten(int i0, int i1, int i2) const { return i0 + order_ * (i1 + order_ * i2); }
  std::array<int, 3> unflatten(int flat) const { return {flat % order_, (flat / order_) % order_, flat / (order_ * order_)}; }
  Point3 reference_node(int flat) const;

  /// Writes the L cardinal polynomials evaluated at x into out.
  void basis(double x, std::span<double> out) const;

 private:
  int order_;
  std::vector<double> nodes_;
  std::vector<double> inv_denominators_;
};

double lagrange_basis(int order, int k, double x);

/// Optional plane-wave modulation attached to a directional expansion.
struct Modulation {
  double kappa = 0.0;
  Point3 direction;
  Point3 origin;
};

/// out[l] += sum_y S_l^u(y) q(y) over the given particles.
void p2m(const InterpGrid& grid, const CellFrame& frame, std::span<const Point3> positions,
         std::span<const Complex> charges, const std::optional<Modulation>& mod, std::span<Complex> out);

/// potentials[i] += sum_k S_k^u(x_i) local[k].
void l2p(const InterpGrid& grid, const CellFrame& frame, std::span<const Point3> positions,
         std::span<const Complex> local, const std::optional<Modulation>& mod, std::span<Complex> potentials);

enum class Strategy { Tensorized, Stacked, StackedReal };

std::string to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// 1D transfer matrices between a son half [o/2, (o+1)/2] and its father's
/// grid. eval[o][r * L + l] = S_l((o + t_r) / 2), so each row sums to one.
struct M2MFactors {
  explicit M2MFactors(const InterpGrid& grid);

  int order;
  std::array<std::vector<double>, 2> eval;
  std::array<std::vector<double>, 2> eval_transposed;
};

/// One directional expansion moved between a son and its father.
struct TransferColumn {
  int father_slot = 0;
  int son_slot = 0;
  std::optional<Point3> direction;
};

struct TransferPlan {
  int octant = 0;
  CellFrame father;
  CellFrame son;
  double kappa = 0.0;
  std::vector<TransferColumn> columns;
};

/// father[slot] += D0(v) (kron_p M^(p)) D1(v) son[slot'] for every column.
void m2m_apply(Strategy strategy, const M2MFactors& factors, const TransferPlan& plan,
               std::span<const Complex> son_multipoles, std::span<Complex> father_multipoles);

/// son[slot'] += adjoint transfer of father[slot] for every column.
void l2l_apply(Strategy strategy, const M2MFactors& factors, const TransferPlan& plan,
               std::span<const Complex> father_locals, std::span<Complex> son_locals);

/// Applies A_0, A_1, A_2 along the three axes of a node-major block of
/// `width` interleaved columns. Each A_p is L x L row-major.
void tensor_apply(int order, const std::array<const double*, 3>& matrices, std::span<const Complex> in,
                  std::span<Complex> out, int width);
void tensor_apply(int order, const std::array<const double*, 3>& matrices, std::span<const double> in,
                  std::span<double> out, int width);

/// Floating point operations issued by tensor_apply on this thread.
std::uint64_t tensor_flop_count();
void reset_tensor_flop_count();

}  // namespace eqfmm
