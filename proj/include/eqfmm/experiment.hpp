#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "eqfmm/distributions.hpp"
#include "eqfmm/traversal.hpp"

namespace eqfmm {

struct ExperimentConfig {
  Distribution distribution;
  std::optional<std::string> input_file;  // replaces the generator when set
  double kappa_d = 0.0;
  int order = 5;
  std::optional<int> ncrit = 64;  // nullopt selects the auto-tune sweep
  double eta = 1.0;
  Strategy strategy = Strategy::StackedReal;
  std::size_t check_error = 0;  // number of sampled targets, 0 disables the oracle
};

struct RunRecord {
  ExperimentConfig config;
  std::size_t n = 0;
  double diameter = 0.0;  // side of the root box
  double kappa = 0.0;
  int ncrit_used = 0;
  FmmTimings timings;
  FmmCounts counts;
  std::optional<ErrorReport> errors;
  std::string potentials_digest;
  std::vector<Complex> potentials;
};

inline constexpr int kNcritSweep[] = {32, 64, 128, 256};

RunRecord run_experiment(const ExperimentConfig& config);

/// FNV-1a over the raw bytes of the potentials, as 16 hex digits.
std::string potentials_digest(std::span<const Complex> potentials);

nlohmann::json to_json(const RunRecord& record);
std::string csv_header();
std::string csv_row(const RunRecord& record);

}  // namespace eqfmm
