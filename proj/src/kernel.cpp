#include "eqfmm/kernel.hpp"

#include <algorithm>
#include <stdexcept>

namespace eqfmm {

Complex kernel_eval(double kappa, Point3 x, Point3 y) { return HelmholtzKernel{kappa}(x, y); }

std::vector<Complex> direct_sum(const HelmholtzKernel& kernel, std::span<const Point3> targets,
                                std::span<const Point3> sources, std::span<const Complex> charges) {
  if (sources.size() != charges.size()) throw std::invalid_argument("direct_sum: charges/sources length mismatch");
  std::vector<Complex> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < sources.size(); ++j) acc += kernel(targets[i], sources[j]) * charges[j];
    out[i] = acc;
  }
  return out;
}

std::vector<Complex> direct_sum(double kappa, std::span<const Point3> targets, std::span<const Point3> sources,
                                std::span<const Complex> charges) {
  return direct_sum(HelmholtzKernel{kappa}, targets, sources, charges);
}

ErrorReport relative_errors(std::span<const Complex> reference, std::span<const Complex> approx) {
  if (reference.size() != approx.size()) throw std::invalid_argument("relative_errors: length mismatch");
  double ref_inf = 0.0, ref_1 = 0.0, ref_2 = 0.0;
  double err_inf = 0.0, err_1 = 0.0, err_2 = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double r = std::abs(reference[i]);
    const double e = std::abs(reference[i] - approx[i]);
    ref_inf = std::max(ref_inf, r);
    ref_1 += r;
    ref_2 += r * r;
    err_inf = std::max(err_inf, e);
    err_1 += e;
    err_2 += e * e;
  }
  if (ref_inf == 0.0) throw std::invalid_argument("relative_errors: reference vector is identically zero");
  return {err_inf / ref_inf, err_1 / ref_1, std::sqrt(err_2 / ref_2)};
}

}  // namespace eqfmm
