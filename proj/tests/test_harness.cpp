#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "eqfmm/experiment.hpp"

using namespace eqfmm;

TEST_CASE("distribution generators") {
  SUBCASE("sphere points lie on the unit sphere") {
    for (std::size_t n : {1u, 7u, 5000u}) {
      for (const Point3& p : generate_distribution({DistributionKind::Sphere, n, 3})) {
        CHECK(std::abs(norm(p) - 1.0) <= 1e-12);
      }
    }
  }
  SUBCASE("refined cube points lie on a face") {
    for (const Point3& p : generate_distribution({DistributionKind::RefinedCube, 5000, 4})) {
      int on_face = 0;
      for (int ax = 0; ax < 3; ++ax) {
        CHECK(std::abs(p[ax]) <= 0.5);
        on_face += std::abs(p[ax]) == 0.5;
      }
      CHECK(on_face >= 1);
    }
  }
  SUBCASE("refined cube concentrates near edges") {
    std::size_t near_edge = 0;
    const auto pts = generate_distribution({DistributionKind::RefinedCube, 20000, 5});
    for (const Point3& p : pts) {
      int close = 0;
      for (int ax = 0; ax < 3; ++ax) close += std::abs(p[ax]) > 0.45;
      near_edge += close >= 2;
    }
    // a uniform face sample would put 19% of the points in this band
    CHECK(static_cast<double>(near_edge) / pts.size() > 0.4);
  }
  SUBCASE("ellipse points lie on the ellipsoid, denser at the poles") {
    const auto pts = generate_distribution({DistributionKind::Ellipse, 5000, 6});
    std::size_t polar = 0;
    for (const Point3& p : pts) {
      CHECK(std::abs((p.x * p.x + p.y * p.y) / 0.0625 + p.z * p.z - 1.0) < 1e-12);
      polar += std::abs(p.z) > 0.9;
    }
    CHECK(static_cast<double>(polar) / pts.size() > 0.2);
  }
  SUBCASE("uniform cube mean is the center") {
    const auto pts = generate_distribution({DistributionKind::UniformCube, 10000, 7});
    for (int ax = 0; ax < 3; ++ax) {
      double mean = 0.0;
      for (const Point3& p : pts) {
        CHECK(std::abs(p[ax]) <= 0.5);
        mean += p[ax];
      }
      CHECK(std::abs(mean / pts.size()) < 0.01);
    }
  }
  SUBCASE("deterministic in the seed") {
    for (auto kind : {DistributionKind::UniformCube, DistributionKind::Sphere, DistributionKind::RefinedCube,
                      DistributionKind::Ellipse}) {
      const auto a = generate_distribution({kind, 300, 9});
      CHECK(a == generate_distribution({kind, 300, 9}));
      CHECK(a != generate_distribution({kind, 300, 10}));
    }
  }
  SUBCASE("names") {
    for (auto kind : {DistributionKind::UniformCube, DistributionKind::Sphere, DistributionKind::RefinedCube,
                      DistributionKind::Ellipse}) {
      CHECK(parse_distribution(to_string(kind)) == kind);
    }
    CHECK_THROWS(parse_distribution("torus"));
    CHECK_THROWS(generate_distribution({DistributionKind::Sphere, 0, 1}));
  }
}

TEST_CASE("particle file reader") {
  const auto path = std::filesystem::temp_directory_path() / "eqfmm_particles_test.txt";
  {
    std::ofstream out(path);
    out << "# x y z re im\n0 0 0 1 0\n\n  1 0 0   0.5 -2 # trailing\n";
  }
  const ParticleInput in = read_particle_file(path.string());
  REQUIRE(in.positions.size() == 2);
  CHECK(in.positions[1] == Point3{1, 0, 0});
  CHECK(in.charges[1] == Complex{0.5, -2.0});
  {
    std::ofstream out(path);
    out << "0 0 0 1\n";
  }
  CHECK_THROWS(read_particle_file(path.string()));
  std::filesystem::remove(path);
  CHECK_THROWS(read_particle_file(path.string()));
}

TEST_CASE("run_experiment records") {
  ExperimentConfig cfg;
  cfg.distribution = {DistributionKind::Sphere, 3000, 11};
  cfg.kappa_d = 8.0;
  cfg.order = 4;
  cfg.ncrit = 64;

  SUBCASE("no oracle without check-error") {
    const RunRecord r = run_experiment(cfg);
    CHECK_FALSE(r.errors.has_value());
    CHECK(to_json(r)["errors"].is_null());
    CHECK(r.kappa == doctest::Approx(8.0 / r.diameter));
  }
  SUBCASE("json and csv fields") {
    cfg.check_error = 200;
    const RunRecord r = run_experiment(cfg);
    REQUIRE(r.errors.has_value());
    CHECK(r.errors->rel_l2 < 1e-2);
    const nlohmann::json j = to_json(r);
    for (const char* k : {"tree", "blank", "precompute", "upward", "m2l_p2p", "downward", "total"}) {
      REQUIRE(j["timings"].contains(k));
      CHECK(j["timings"][k].get<double>() >= 0.0);
    }
    for (const char* k : {"cells", "leaves", "symbols", "effective_expansions", "p2p_pairs", "m2l_events"}) {
      CHECK(j["counts"].contains(k));
    }
    for (const char* k : {"linf", "l1", "l2"}) CHECK(j["errors"].contains(k));
    CHECK(j["config"]["strategy"] == "t+s+r");
    CHECK(j["config"]["n"] == 3000);
    CHECK(j["potentials_digest"].get<std::string>().size() == 16);

    const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    CHECK(count(csv_header()) == count(csv_row(r)));
  }
  SUBCASE("same seed, same digest") {
    const RunRecord a = run_experiment(cfg);
    const RunRecord b = run_experiment(cfg);
    CHECK(a.potentials_digest == b.potentials_digest);
    CHECK(a.potentials == b.potentials);
    cfg.distribution.seed = 12;
    CHECK(run_experiment(cfg).potentials_digest != a.potentials_digest);
  }
  SUBCASE("auto ncrit picks one of the sweep values") {
    cfg.ncrit.reset();
    const RunRecord r = run_experiment(cfg);
    CHECK(std::find(std::begin(kNcritSweep), std::end(kNcritSweep), r.ncrit_used) != std::end(kNcritSweep));
    CHECK(to_json(r)["config"]["ncrit_mode"] == "auto");
  }
  SUBCASE("invalid settings") {
    cfg.order = 1;
    CHECK_THROWS(run_experiment(cfg));
  }
}
