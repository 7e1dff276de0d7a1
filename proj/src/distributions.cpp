#include "eqfmm/distributions.hpp"

#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace eqfmm {

namespace {

// Maps [-1, 1] onto itself, concentrating samples near +-1.
double edge_warp(double s) {
  const double a = 1.0 - std::abs(s);
  return std::copysign(1.0 - a * a * a, s);
}

}  // namespace

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::UniformCube: return "uniform-cube";
    case DistributionKind::Sphere: return "sphere";
    case DistributionKind::RefinedCube: return "refined-cube";
    case DistributionKind::Ellipse: return "ellipse";
  }
  return "?";
}

DistributionKind parse_distribution(std::string_view name) {
  if (name == "uniform-cube" || name == "cube") return DistributionKind::UniformCube;
  if (name == "sphere") return DistributionKind::Sphere;
  if (name == "refined-cube") return DistributionKind::RefinedCube;
  if (name == "ellipse") return DistributionKind::Ellipse;
  throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

std::vector<Point3> generate_distribution(const Distribution& dist) {
  if (dist.n == 0) throw std::invalid_argument("generate_distribution: n must be >= 1");
  std::mt19937_64 rng(dist.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Point3> pts;
  pts.reserve(dist.n);
  const double two_pi = 2.0 * std::numbers::pi;

  switch (dist.kind) {
    case DistributionKind::UniformCube:
      for (std::size_t i = 0; i < dist.n; ++i) pts.push_back({0.5 * unit(rng), 0.5 * unit(rng), 0.5 * unit(rng)});
      break;
    case DistributionKind::Sphere: {
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      const double offset = std::uniform_real_distribution<double>(0.0, two_pi)(rng);
      const double n = static_cast<double>(dist.n);
      for (std::size_t i = 0; i < dist.n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = offset + golden * static_cast<double>(i);
        pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
      }
      break;
    }
    case DistributionKind::RefinedCube: {
      std::uniform_int_distribution<int> face(0, 5);
      for (std::size_t i = 0; i < dist.n; ++i) {
        const int f = face(rng);
        const int axis = f / 2;
        Point3 p;
        p[axis] = (f % 2 == 0) ? 0.5 : -0.5;
        p[(axis + 1) % 3] = 0.5 * edge_warp(unit(rng));
        p[(axis + 2) % 3] = 0.5 * edge_warp(unit(rng));
        pts.push_back(p);
      }
      break;
    }
    case DistributionKind::Ellipse: {
      std::uniform_real_distribution<double> angle(0.0, two_pi);
      for (std::size_t i = 0; i < dist.n; ++i) {
        const double c = edge_warp(unit(rng));
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double phi = angle(rng);
        pts.push_back({0.25 * s * std::cos(phi), 0.25 * s * std::sin(phi), c});
      }
      break;
    }
  }
  return pts;
}

std::vector<Complex> random_charges(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Complex> q(n);
  for (Complex& c : q) {
    const double re = u(rng);
    c = {re, u(rng)};
  }
  return q;
}

ParticleInput read_particle_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open particle file '" + path + "'");
  ParticleInput out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double v[5];
    int count = 0;
    while (count < 5 && ss >> v[count]) ++count;
    if (count == 0 && ss.eof()) continue;
    std::string rest;
    if (count != 5 || (ss >> rest)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'x y z re_q im_q'");
    }
    out.positions.push_back({v[0], v[1], v[2]});
    out.charges.push_back({v[3], v[4]});
  }
  if (out.positions.empty()) throw std::runtime_error("particle file '" + path + "' holds no particles");
  return out;
}

}  // namespace eqfmm
