#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "eqfmm/kernel.hpp"

namespace eqfmm {

using IntVec3 = std::array<int, 3>;

/// Zero-padded DFT workspace for one interpolation order. The padded grid has
/// P = 2L - 1 points per axis; both transforms carry the symmetric 1/P^{3/2}
/// normalization so that the backward transform is the adjoint of the forward
/// one. A single plan serves every expansion of equal size.
class FourierWorkspace {
 public:
  explicit FourierWorkspace(int order);
  ~FourierWorkspace();
  FourierWorkspace(const FourierWorkspace&) = delete;
  FourierWorkspace& operator=(const FourierWorkspace&) = delete;

  int order() const { return order_; }
  int padded() const { return padded_; }
  int nodal_size() const { return order_ * order_ * order_; }
  int fourier_size() const { return padded_ * padded_ * padded_; }
  int padded_index(int i0, int i1, int i2) const { return i0 + padded_ * (i1 + padded_ * i2); }

  /// In-place normalized transforms on a P^3 buffer.
  void forward(std::span<Complex> data) const;
  void backward(std::span<Complex> data) const;
  /// Unnormalized forward transform, used for the diagonal symbols.
  void forward_unnormalized(std::span<Complex> data) const;

  /// fourier = F chi(nodal).
  void m2f(std::span<const Complex> nodal, std::span<Complex> fourier) const;
  /// nodal += chi^T F* (fourier). The input buffer is preserved.
  void f2l(std::span<const Complex> fourier, std::span<Complex> nodal) const;

 private:
  struct Plans;
  int order_;
  int padded_;
  std::unique_ptr<Plans> plans_;
  mutable std::vector<Complex> scratch_;
};

/// Diagonal Fourier symbol of the M2L operator between two same-level cells
/// separated by `translation` (in cell units, target minus source).
struct M2LSymbol {
  int level = 0;
  IntVec3 translation{};
  std::vector<Complex> diagonal;
};

/// Evaluates G(beta (t + m / (L-1))) for m in [-(L-1), L-1]^3, lays it out as
/// the first column of the periodized circulant operator and transforms it.
/// Throws if the stencil touches the kernel singularity.
M2LSymbol precompute_symbol(int level, double beta, const IntVec3& translation, const HelmholtzKernel& kernel,
                            const FourierWorkspace& workspace);

/// Signed permutation (Rx)_i = sign_i * x_{perm_i}.
struct SignedPermutation {
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> sign{1, 1, 1};

  IntVec3 apply(const IntVec3& x) const {
    return {sign[0] * x[static_cast<std::size_t>(perm[0])], sign[1] * x[static_cast<std::size_t>(perm[1])],
            sign[2] * x[static_cast<std::size_t>(perm[2])]};
  }
  friend bool operator==(const SignedPermutation&, const SignedPermutation&) = default;
};

/// The 48 symmetries of the cube together with, for each one, the index map
/// it induces on the padded Fourier grid.
class SymmetryTable {
 public:
  explicit SymmetryTable(int padded);

  static constexpr int kGroupSize = 48;
  int identity() const { return identity_; }
  const SignedPermutation& rotation(int id) const;
  int find(const SignedPermutation& r) const;
  int compose(int outer, int inner) const;  // id of outer * inner
  int inverse(int id) const;

  /// gather(id)[xi] = flat index of R^{-1} xi (mod P).
  const std::vector<int>& gather(int id) const;

 private:
  int padded_;
  int identity_ = 0;
  std::vector<SignedPermutation> rotations_;
  std::vector<std::vector<int>> gathers_;
};

struct CanonicalTranslation {
  IntVec3 canonical{};
  int rotation = 0;  // rotation(rotation).apply(canonical) == original
};

/// Maps t != 0 to its orbit representative (non-negative, non-increasing).
CanonicalTranslation canonicalize_translation(const IntVec3& t, const SymmetryTable& table);

/// Symbol of R t obtained from the symbol of t by permuting its entries.
M2LSymbol permute_symbol(const M2LSymbol& symbol, int rotation, const SymmetryTable& table);

/// acc[xi] += diag[gather[xi]] * src[xi]; an empty gather means identity.
void m2l_hadamard(std::span<Complex> acc, std::span<const Complex> src, std::span<const Complex> diagonal,
                  std::span<const int> gather = {});

/// Symbols keyed by (level, canonical translation).
class SymbolCache {
 public:
  SymbolCache(int order, HelmholtzKernel kernel);

  struct Lookup {
    int symbol = -1;
    int rotation = 0;
  };

  /// Returns the stored symbol for translation's orbit, computing it on first use.
  Lookup get_or_compute(int level, double beta, const IntVec3& translation);
  const M2LSymbol& symbol(int id) const { return symbols_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return symbols_.size(); }
  std::size_t size_at_level(int level) const;

  const FourierWorkspace& workspace() const { return workspace_; }
  const SymmetryTable& symmetries() const { return symmetries_; }
  double seconds_computing() const { return seconds_; }

 private:
  HelmholtzKernel kernel_;
  FourierWorkspace workspace_;
  SymmetryTable symmetries_;
  std::map<std::pair<int, IntVec3>, int> index_;
  std::vector<M2LSymbol> symbols_;
  double seconds_ = 0.0;
};

}  // namespace eqfmm
