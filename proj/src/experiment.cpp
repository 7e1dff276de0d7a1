#include "eqfmm/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace eqfmm {

namespace {

struct Problem {
  std::vector<Point3> points;
  std::vector<Complex> charges;
};

Problem make_problem(const ExperimentConfig& cfg) {
  if (cfg.input_file) {
    ParticleInput in = read_particle_file(*cfg.input_file);
    return {std::move(in.positions), std::move(in.charges)};
  }
  Problem p;
  p.points = generate_distribution(cfg.distribution);
  p.charges = random_charges(p.points.size(), cfg.distribution.seed);
  return p;
}

std::vector<std::size_t> sample_targets(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (m >= n) return all;
  std::mt19937_64 rng(seed + 0x5bd1e995ULL);
  std::vector<std::size_t> picked;
  picked.reserve(m);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), m, rng);
  return picked;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string potentials_digest(std::span<const Complex> potentials) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Complex& z : potentials) {
    const double parts[2] = {z.real(), z.imag()};
    unsigned char bytes[sizeof parts];
    std::memcpy(bytes, parts, sizeof parts);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
  if (cfg.order < 2) throw std::invalid_argument("order must be >= 2");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(cfg.kappa_d >= 0.0)) throw std::invalid_argument("kappa-d must be non-negative");
  if (cfg.ncrit && *cfg.ncrit < 1) throw std::invalid_argument("ncrit must be >= 1");

  const Problem problem = make_problem(cfg);
  const double diameter = make_root_box(problem.points).side();

  RunRecord rec;
  rec.config = cfg;
  rec.n = problem.points.size();
  rec.diameter = diameter;
  rec.kappa = cfg.kappa_d / diameter;

  FmmConfig fc;
  fc.order = cfg.order;
  fc.mac.eta = cfg.eta;
  fc.mac.kappa = rec.kappa;
  fc.strategy = cfg.strategy;

  auto run_once = [&](int ncrit) {
    fc.tree.ncrit = ncrit;
    FmmSolver solver(problem.points, fc);
    std::vector<Complex> pot = solver.evaluate(problem.charges);
    return std::tuple{std::move(pot), solver.timings(), solver.counts()};
  };

  std::vector<int> candidates;
  if (cfg.ncrit) {
    candidates.push_back(*cfg.ncrit);
  } else {
    candidates.assign(std::begin(kNcritSweep), std::end(kNcritSweep));
  }
  bool first = true;
  for (int ncrit : candidates) {
    auto [pot, timings, counts] = run_once(ncrit);
    if (first || timings.total < rec.timings.total) {
      rec.ncrit_used = ncrit;
      rec.potentials = std::move(pot);
      rec.timings = timings;
      rec.counts = counts;
      first = false;
    }
  }
  rec.potentials_digest = potentials_digest(rec.potentials);

  if (cfg.check_error > 0) {
    const std::vector<std::size_t> idx = sample_targets(rec.n, cfg.check_error, cfg.distribution.seed);
    std::vector<Point3> targets;
    std::vector<Complex> approx;
    for (std::size_t i : idx) {
      targets.push_back(problem.points[i]);
      approx.push_back(rec.potentials[i]);
    }
    const HelmholtzKernel kernel{rec.kappa, 1e-12 * diameter};
    const std::vector<Complex> exact = direct_sum(kernel, targets, problem.points, problem.charges);
    rec.errors = relative_errors(exact, approx);
  }
  return rec;
}

nlohmann::json to_json(const RunRecord& r) {
  const ExperimentConfig& c = r.config;
  nlohmann::json j;
  j["config"] = {
      {"distribution", c.input_file ? "file" : to_string(c.distribution.kind)},
      {"input", c.input_file ? nlohmann::json(*c.input_file) : nlohmann::json(nullptr)},
      {"n", r.n},
      {"seed", c.distribution.seed},
      {"kappa_d", c.kappa_d},
      {"kappa", r.kappa},
      {"diameter", r.diameter},
      {"order", c.order},
      {"ncrit", r.ncrit_used},
      {"ncrit_mode", c.ncrit ? "fixed" : "auto"},
      {"eta", c.eta},
      {"strategy", to_string(c.strategy)},
      {"check_error", c.check_error},
  };
  const FmmTimings& t = r.timings;
  j["timings"] = {{"tree", t.tree},       {"blank", t.blank},         {"precompute", t.precompute},
                  {"upward", t.upward},   {"m2l_p2p", t.m2l_p2p},     {"downward", t.downward},
                  {"total", t.total}};
  const FmmCounts& k = r.counts;
  j["counts"] = {{"cells", k.cells},
                 {"leaves", k.leaves},
                 {"symbols", k.symbols},
                 {"effective_expansions", k.effective_expansions},
                 {"p2p_pairs", k.p2p_pairs},
                 {"m2l_events", k.m2l_events}};
  if (r.errors) {
    j["errors"] = {{"linf", r.errors->rel_linf}, {"l1", r.errors->rel_l1}, {"l2", r.errors->rel_l2}};
  } else {
    j["errors"] = nullptr;
  }
  j["potentials_digest"] = r.potentials_digest;
  return j;
}

std::string csv_header() {
  return "distribution,n,seed,kappa_d,kappa,order,ncrit,eta,strategy,check_error,"
         "tree,blank,precompute,upward,m2l_p2p,downward,total,"
         "cells,leaves,symbols,effective_expansions,p2p_pairs,m2l_events,"
         "err_linf,err_l1,err_l2,potentials_digest";
}

std::string csv_row(const RunRecord& r) {
  const ExperimentConfig& c = r.config;
  const FmmTimings& t = r.timings;
  const FmmCounts& k = r.counts;
  std::ostringstream os;
  os << (c.input_file ? std::string("file") : to_string(c.distribution.kind)) << ',' << r.n << ','
     << c.distribution.seed << ',' << format_double(c.kappa_d) << ',' << format_double(r.kappa) << ',' << c.order
     << ',' << r.ncrit_used << ',' << format_double(c.eta) << ',' << to_string(c.strategy) << ',' << c.check_error;
  for (double v : {t.tree, t.blank, t.precompute, t.upward, t.m2l_p2p, t.downward, t.total}) os << ',' << format_double(v);
  os << ',' << k.cells << ',' << k.leaves << ',' << k.symbols << ',' << k.effective_expansions << ',' << k.p2p_pairs
     << ',' << k.m2l_events;
  if (r.errors) {
    os << ',' << format_double(r.errors->rel_linf) << ',' << format_double(r.errors->rel_l1) << ','
       << format_double(r.errors->rel_l2);
  } else {
    os << ",,,";
  }
  os << ',' << r.potentials_digest;
  return os.str();
}

}  // namespace eqfmm
