// Command-line driver: one FMM experiment per invocation.
#include <charconv>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "eqfmm/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Directional equispaced-interpolation FMM for the 3D Helmholtz kernel"};

  std::string distribution = "uniform-cube";
  std::size_t n = 10000;
  double kappa_d = 0.0;
  int order = 5;
  std::string ncrit = "64";
  double eta = 1.0;
  std::string strategy = "t+s+r";
  std::size_t check_error = 0;
  std::uint64_t seed = 1;
  std::string output, csv, input;

  app.add_option("--distribution", distribution, "uniform-cube | sphere | refined-cube | ellipse")
      ->check(CLI::IsMember({"uniform-cube", "sphere", "refined-cube", "ellipse"}));
  app.add_option("--n", n, "number of particles")->check(CLI::PositiveNumber);
  app.add_option("--kappa-d", kappa_d, "wavenumber times the root box side")->check(CLI::NonNegativeNumber);
  app.add_option("--order", order, "interpolation nodes per axis")->check(CLI::Range(2, 32));
  app.add_option("--ncrit", ncrit, "maximum particles per leaf, or 'auto'");
  app.add_option("--eta", eta, "MAC parameter")->check(CLI::PositiveNumber);
  app.add_option("--strategy", strategy, "t | t+s | t+s+r")->check(CLI::IsMember({"t", "t+s", "t+s+r"}));
  app.add_option("--check-error", check_error, "sampled targets for the direct-sum check (0 disables)");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--output", output, "JSON record path (stdout when omitted)");
  app.add_option("--csv", csv, "append a CSV row to this file");
  app.add_option("--input", input, "particle file 'x y z re_q im_q' instead of a generator")
      ->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  try {
    eqfmm::ExperimentConfig cfg;
    cfg.distribution = {eqfmm::parse_distribution(distribution), n, seed};
    if (!input.empty()) cfg.input_file = input;
    cfg.kappa_d = kappa_d;
    cfg.order = order;
    if (ncrit == "auto") {
      cfg.ncrit.reset();
    } else {
      int value = 0;
      const auto [end, ec] = std::from_chars(ncrit.data(), ncrit.data() + ncrit.size(), value);
      if (ec != std::errc{} || end != ncrit.data() + ncrit.size() || value < 1) {
        throw std::invalid_argument("--ncrit expects a positive integer or 'auto'");
      }
      cfg.ncrit = value;
    }
    cfg.eta = eta;
    cfg.strategy = eqfmm::parse_strategy(strategy);
    cfg.check_error = check_error;

    const eqfmm::RunRecord rec = eqfmm::run_experiment(cfg);
    const std::string json = eqfmm::to_json(rec).dump(2);
    if (output.empty()) {
      std::cout << json << '\n';
    } else {
      std::ofstream out(output);
      if (!out) throw std::runtime_error("cannot write '" + output + "'");
      out << json << '\n';
    }
    if (!csv.empty()) {
      const bool fresh = !std::ifstream(csv).good();
      std::ofstream out(csv, std::ios::app);
      if (!out) throw std::runtime_error("cannot write '" + csv + "'");
      if (fresh) out << eqfmm::csv_header() << '\n';
      out << eqfmm::csv_row(rec) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "eqfmm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
