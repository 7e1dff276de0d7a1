#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "eqfmm/geometry.hpp"

namespace eqfmm {

using Complex = std::complex<double>;

/// G(x, y) = exp(i kappa r) / (4 pi r), r = |x - y|. Pairs closer than
/// `singular_radius` contribute zero.
struct HelmholtzKernel {
  double kappa = 0.0;
  double singular_radius = 1e-12;

  Complex operator()(Point3 x, Point3 y) const { return eval_radius(norm(x - y)); }

  Complex eval_radius(double r) const {
    if (r < singular_radius) return {0.0, 0.0};
    const double scale = 1.0 / (4.0 * std::numbers::pi * r);
    if (kappa == 0.0) return {scale, 0.0};
    return {scale * std::cos(kappa * r), scale * std::sin(kappa * r)};
  }
};

Complex kernel_eval(double kappa, Point3 x, Point3 y);

/// O(N*M) reference summation p(x) = sum_y G(x, y) q(y).
std::vector<Complex> direct_sum(const HelmholtzKernel& kernel, std::span<const Point3> targets,
                                std::span<const Point3> sources, std::span<const Complex> charges);
std::vector<Complex> direct_sum(double kappa, std::span<const Point3> targets, std::span<const Point3> sources,
                                std::span<const Complex> charges);

struct ErrorReport {
  double rel_linf = 0.0;
  double rel_l1 = 0.0;
  double rel_l2 = 0.0;
};

/// ||reference - approx|| / ||reference|| in the max, l1 and l2 norms.
ErrorReport relative_errors(std::span<const Complex> reference, std::span<const Complex> approx);

}  // namespace eqfmm
