#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eqfmm/geometry.hpp"
#include "eqfmm/kernel.hpp"

namespace eqfmm {

enum class DistributionKind { UniformCube, Sphere, RefinedCube, Ellipse };

std::string to_string(DistributionKind kind);
DistributionKind parse_distribution(std::string_view name);

struct Distribution {
  DistributionKind kind = DistributionKind::UniformCube;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
};

/// uniform-cube: i.i.d. uniform in [-1/2, 1/2]^3.
/// sphere: Fibonacci lattice on the unit sphere, rotated about z by a seeded angle.
/// refined-cube: surface of [-1/2, 1/2]^3, in-face coordinates pushed toward the
///   edges by s -> sign(s) (1 - (1 - |s|)^3).
/// ellipse: surface of the ellipsoid with semi-axes (1/4, 1/4, 1), cos(theta)
///   pushed toward the poles by the same warp.
std::vector<Point3> generate_distribution(const Distribution& dist);

/// Charges uniform in the complex unit square [0,1] + i[0,1].
std::vector<Complex> random_charges(std::size_t n, std::uint64_t seed);

struct ParticleInput {
  std::vector<Point3> positions;
  std::vector<Complex> charges;
};

/// Reads "x y z re_q im_q" lines; '#' starts a comment.
ParticleInput read_particle_file(const std::string& path);

}  // namespace eqfmm
