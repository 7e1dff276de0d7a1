#include "eqfmm/fourier_m2l.hpp"

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>

namespace eqfmm {

struct FourierWorkspace::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

namespace {

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

int wrap(int v, int p) { return ((v % p) + p) % p; }

}  // namespace

FourierWorkspace::FourierWorkspace(int order)
    : order_(order), padded_(2 * order - 1), plans_(std::make_unique<Plans>()) {
  if (order < 2) throw std::invalid_argument("FourierWorkspace: order must be >= 2");
  scratch_.resize(static_cast<std::size_t>(fourier_size()));
  // FFTW_ESTIMATE keeps plan selection (and therefore every bit of output)
  // independent of run-time measurements.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward =
      fftw_plan_dft_3d(padded_, padded_, padded_, as_fftw(scratch_.data()), as_fftw(scratch_.data()), FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_dft_3d(padded_, padded_, padded_, as_fftw(scratch_.data()), as_fftw(scratch_.data()),
                                      FFTW_BACKWARD, flags);
  if (!plans_->forward || !plans_->backward) throw std::runtime_error("FourierWorkspace: FFTW planning failed");
}

FourierWorkspace::~FourierWorkspace() {
  if (plans_) {
    if (plans_->forward) fftw_destroy_plan(plans_->forward);
    if (plans_->backward) fftw_destroy_plan(plans_->backward);
  }
}

void FourierWorkspace::forward_unnormalized(std::span<Complex> data) const {
  if (data.size() != static_cast<std::size_t>(fourier_size())) {
    throw std::invalid_argument("FourierWorkspace: buffer must hold P^3 entries");
  }
  fftw_execute_dft(plans_->forward, as_fftw(data.data()), as_fftw(data.data()));
}

void FourierWorkspace::forward(std::span<Complex> data) const {
  forward_unnormalized(data);
  const double s = 1.0 / std::sqrt(static_cast<double>(fourier_size()));
  for (Complex& v : data) v *= s;
}

void FourierWorkspace::backward(std::span<Complex> data) const {
  if (data.size() != static_cast<std::size_t>(fourier_size())) {
    throw std::invalid_argument("FourierWorkspace: buffer must hold P^3 entries");
  }
  fftw_execute_dft(plans_->backward, as_fftw(data.data()), as_fftw(data.data()));
  const double s = 1.0 / std::sqrt(static_cast<double>(fourier_size()));
  for (Complex& v : data) v *= s;
}

void FourierWorkspace::m2f(std::span<const Complex> nodal, std::span<Complex> fourier) const {
  if (nodal.size() != static_cast<std::size_t>(nodal_size())) throw std::invalid_argument("m2f: expects L^3 entries");
  std::fill(fourier.begin(), fourier.end(), Complex{});
  const int L = order_;
  for (int i2 = 0; i2 < L; ++i2) {
    for (int i1 = 0; i1 < L; ++i1) {
      for (int i0 = 0; i0 < L; ++i0) {
        fourier[static_cast<std::size_t>(padded_index(i0, i1, i2))] =
            nodal[static_cast<std::size_t>(i0 + L * (i1 + L * i2))];
      }
    }
  }
  forward(fourier);
}

void FourierWorkspace::f2l(std::span<const Complex> fourier, std::span<Complex> nodal) const {
  if (nodal.size() != static_cast<std::size_t>(nodal_size())) throw std::invalid_argument("f2l: expects L^3 entries");
  if (fourier.size() != scratch_.size()) throw std::invalid_argument("f2l: expects P^3 entries");
  std::copy(fourier.begin(), fourier.end(), scratch_.begin());
  backward(scratch_);
  const int L = order_;
  for (int i2 = 0; i2 < L; ++i2) {
    for (int i1 = 0; i1 < L; ++i1) {
      for (int i0 = 0; i0 < L; ++i0) {
        nodal[static_cast<std::size_t>(i0 + L * (i1 + L * i2))] +=
            scratch_[static_cast<std::size_t>(padded_index(i0, i1, i2))];
      }
    }
  }
}

M2LSymbol precompute_symbol(int level, double beta, const IntVec3& translation, const HelmholtzKernel& kernel,
                            const FourierWorkspace& workspace) {
  const int L = workspace.order();
  const int P = workspace.padded();
  const double h = 1.0 / (L - 1);
  M2LSymbol out{level, translation, std::vector<Complex>(static_cast<std::size_t>(workspace.fourier_size()))};
  for (int m2 = -(L - 1); m2 <= L - 1; ++m2) {
    for (int m1 = -(L - 1); m1 <= L - 1; ++m1) {
      for (int m0 = -(L - 1); m0 <= L - 1; ++m0) {
        const Point3 z{beta * (translation[0] + m0 * h), beta * (translation[1] + m1 * h),
                       beta * (translation[2] + m2 * h)};
        const double r = norm(z);
        if (r < 1e-12 * beta || r < kernel.singular_radius) {
          throw std::domain_error("precompute_symbol: translation (" + std::to_string(translation[0]) + "," +
                                  std::to_string(translation[1]) + "," + std::to_string(translation[2]) +
                                  ") reaches the kernel singularity");
        }
        out.diagonal[static_cast<std::size_t>(workspace.padded_index(wrap(m0, P), wrap(m1, P), wrap(m2, P)))] =
            kernel.eval_radius(r);
      }
    }
  }
  workspace.forward_unnormalized(out.diagonal);
  return out;
}

SymmetryTable::SymmetryTable(int padded) : padded_(padded) {
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int s = 0; s < 8; ++s) {
      SignedPermutation r{perm, {(s & 4) ? -1 : 1, (s & 2) ? -1 : 1, (s & 1) ? -1 : 1}};
      if (r == SignedPermutation{}) identity_ = static_cast<int>(rotations_.size());
      rotations_.push_back(r);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  const int P = padded_;
  gathers_.resize(rotations_.size());
  for (std::size_t id = 0; id < rotations_.size(); ++id) {
    const SignedPermutation& inv = rotations_[static_cast<std::size_t>(inverse(static_cast<int>(id)))];
    auto& g = gathers_[id];
    g.resize(static_cast<std::size_t>(P) * P * P);
    for (int x2 = 0; x2 < P; ++x2) {
      for (int x1 = 0; x1 < P; ++x1) {
        for (int x0 = 0; x0 < P; ++x0) {
          const IntVec3 src = inv.apply({x0, x1, x2});
          g[static_cast<std::size_t>(x0 + P * (x1 + P * x2))] =
              wrap(src[0], P) + P * (wrap(src[1], P) + P * wrap(src[2], P));
        }
      }
    }
  }
}

const SignedPermutation& SymmetryTable::rotation(int id) const {
  if (id < 0 || id >= kGroupSize) throw std::out_of_range("SymmetryTable: unknown rotation id " + std::to_string(id));
  return rotations_[static_cast<std::size_t>(id)];
}

int SymmetryTable::find(const SignedPermutation& r) const {
  for (std::size_t i = 0; i < rotations_.size(); ++i) {
    if (rotations_[i] == r) return static_cast<int>(i);
  }
  throw std::out_of_range("SymmetryTable: not a cube symmetry");
}

int SymmetryTable::compose(int outer, int inner) const {
  const SignedPermutation& a = rotation(outer);
  const SignedPermutation& b = rotation(inner);
  // (a b x)_i = a.sign_i * (b x)_{a.perm_i} = a.sign_i * b.sign_{a.perm_i} * x_{b.perm_{a.perm_i}}
  SignedPermutation c;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto j = static_cast<std::size_t>(a.perm[i]);
    c.perm[i] = b.perm[j];
    c.sign[i] = a.sign[i] * b.sign[j];
  }
  return find(c);
}

int SymmetryTable::inverse(int id) const {
  const SignedPermutation& a = rotation(id);
  // x = a^{-1} y with y_i = s_i x_{p_i}  =>  x_{p_i} = s_i y_i.
  SignedPermutation inv;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto j = static_cast<std::size_t>(a.perm[i]);
    inv.perm[j] = static_cast<int>(i);
    inv.sign[j] = a.sign[i];
  }
  return find(inv);
}

const std::vector<int>& SymmetryTable::gather(int id) const {
  rotation(id);
  return gathers_[static_cast<std::size_t>(id)];
}

CanonicalTranslation canonicalize_translation(const IntVec3& t, const SymmetryTable& table) {
  if (t[0] == 0 && t[1] == 0 && t[2] == 0) throw std::invalid_argument("canonicalize_translation: zero translation");
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(t[static_cast<std::size_t>(a)]) > std::abs(t[static_cast<std::size_t>(b)]);
  });
  CanonicalTranslation out;
  SignedPermutation r;
  for (std::size_t j = 0; j < 3; ++j) {
    const auto axis = static_cast<std::size_t>(order[j]);
    out.canonical[j] = std::abs(t[axis]);
    // t_axis = sign * canonical_j
    r.perm[axis] = static_cast<int>(j);
    r.sign[axis] = t[axis] < 0 ? -1 : 1;
  }
  out.rotation = table.find(r);
  return out;
}

M2LSymbol permute_symbol(const M2LSymbol& symbol, int rotation, const SymmetryTable& table) {
  const std::vector<int>& g = table.gather(rotation);
  if (g.size() != symbol.diagonal.size()) throw std::invalid_argument("permute_symbol: symbol/table size mismatch");
  M2LSymbol out{symbol.level, table.rotation(rotation).apply(symbol.translation), {}};
  out.diagonal.resize(symbol.diagonal.size());
  for (std::size_t k = 0; k < g.size(); ++k) out.diagonal[k] = symbol.diagonal[static_cast<std::size_t>(g[k])];
  return out;
}

void m2l_hadamard(std::span<Complex> acc, std::span<const Complex> src, std::span<const Complex> diagonal,
                  std::span<const int> gather) {
  if (acc.size() != src.size() || acc.size() != diagonal.size() || (!gather.empty() && gather.size() != acc.size())) {
    throw std::invalid_argument("m2l_hadamard: length mismatch");
  }
  if (gather.empty()) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += diagonal[k] * src[k];
  } else {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += diagonal[static_cast<std::size_t>(gather[k])] * src[k];
  }
}

SymbolCache::SymbolCache(int order, HelmholtzKernel kernel)
    : kernel_(kernel), workspace_(order), symmetries_(workspace_.padded()) {}

SymbolCache::Lookup SymbolCache::get_or_compute(int level, double beta, const IntVec3& translation) {
  const CanonicalTranslation c = canonicalize_translation(translation, symmetries_);
  const auto key = std::make_pair(level, c.canonical);
  auto it = index_.find(key);
  if (it == index_.end()) {
    const auto t0 = std::chrono::steady_clock::now();
    symbols_.push_back(precompute_symbol(level, beta, c.canonical, kernel_, workspace_));
    seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    it = index_.emplace(key, static_cast<int>(symbols_.size()) - 1).first;
  }
  return {it->second, c.rotation};
}

std::size_t SymbolCache::size_at_level(int level) const {
  return static_cast<std::size_t>(
      std::count_if(symbols_.begin(), symbols_.end(), [&](const M2LSymbol& s) { return s.level == level; }));
}

}  // namespace eqfmm
