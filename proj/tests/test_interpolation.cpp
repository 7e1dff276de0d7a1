#include <random>

#include "doctest.h"
#include "eqfmm/interpolation.hpp"
#include "oracles.hpp"

using namespace eqfmm;

TEST_CASE("lagrange_basis") {
  for (int order = 2; order <= 8; ++order) {
    for (int k = 0; k < order; ++k) {
      for (int j = 0; j < order; ++j) {
        const double v = lagrange_basis(order, k, oracle::node(order, j));
        CHECK(v == doctest::Approx(j == k ? 1.0 : 0.0));
      }
    }
  }
  // nodes 0, 1/3, 2/3, 1 and x = 1/2
  const double expected = (0.5 - 0.0) * (0.5 - 2.0 / 3) * (0.5 - 1.0) / ((1.0 / 3) * (1.0 / 3 - 2.0 / 3) * (1.0 / 3 - 1.0));
  CHECK(lagrange_basis(4, 1, 0.5) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(lagrange_basis(4, 1, 0.5) == doctest::Approx(oracle::lagrange(4, 1, 0.5)).epsilon(1e-15));

  InterpGrid grid(6);
  std::vector<double> b(6);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = u(rng);
    grid.basis(x, b);
    double sum = 0.0;
    for (int k = 0; k < 6; ++k) {
      CHECK(b[static_cast<std::size_t>(k)] == doctest::Approx(oracle::lagrange(6, k, x)).epsilon(1e-12));
      sum += b[static_cast<std::size_t>(k)];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("p2m and l2p") {
  const int order = 4;
  const InterpGrid grid(order);
  const std::size_t n = static_cast<std::size_t>(grid.size());
  const CellFrame frame{{0.25, -0.5, 1.0}, 0.5};

  SUBCASE("particle on a node gives a unit vector") {
    for (int j : {0, 5, 37, 63}) {
      const std::vector<Point3> pos{frame.to_physical(oracle::ref_node(order, j))};
      const std::vector<Complex> q{1.0};
      std::vector<Complex> out(n);
      p2m(grid, frame, pos, q, std::nullopt, out);
      for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(out[k] - Complex(k == static_cast<std::size_t>(j))) < 1e-14);
    }
  }

  SUBCASE("zero charges") {
    std::mt19937_64 rng(2);
    std::vector<Point3> pos;
    for (const Point3& r : oracle::random_points(10, rng)) pos.push_back(frame.to_physical(r));
    const std::vector<Complex> q(pos.size());
    std::vector<Complex> out(n);
    p2m(grid, frame, pos, q, Modulation{16.0, {1, 0, 0}, frame.center()}, out);
    for (const Complex& v : out) CHECK(v == Complex{});
  }

  SUBCASE("modulated p2m and l2p against dense matrices") {
    std::mt19937_64 rng(3);
    std::vector<Point3> pos;
    for (const Point3& r : oracle::random_points(50, rng)) pos.push_back(frame.to_physical(r));
    const auto q = oracle::random_vector(pos.size(), rng);
    const double kappa = 16.0;
    const Point3 u{1, 0, 0};
    const Point3 o = frame.center();

    // S[k][i] = exp(i kappa <y_k - o, u>) S_k(x_i) exp(-i kappa <x_i - o, u>)
    oracle::Dense s(n, std::vector<Complex>(pos.size()));
    for (std::size_t k = 0; k < n; ++k) {
      const Point3 yk = frame.to_physical(oracle::ref_node(order, static_cast<int>(k)));
      for (std::size_t i = 0; i < pos.size(); ++i) {
        const double ph = kappa * (dot(yk - o, u) - dot(pos[i] - o, u));
        s[k][i] = oracle::tensor_basis(order, static_cast<int>(k), frame.to_reference(pos[i])) *
                  std::exp(Complex(0.0, ph));
      }
    }
    std::vector<Complex> out(n);
    p2m(grid, frame, pos, q, Modulation{kappa, u, o}, out);
    CHECK(oracle::rel_diff(out, oracle::matvec(s, q)) < 1e-13);

    const auto local = oracle::random_vector(n, rng);
    std::vector<Complex> pot(pos.size());
    l2p(grid, frame, pos, local, Modulation{kappa, u, o}, pot);
    // l2p is the adjoint of p2m
    CHECK(oracle::rel_diff(pot, oracle::matvec(oracle::adjoint(s), local)) < 1e-13);
  }
}

namespace {

TransferPlan random_plan(std::mt19937_64& rng, int octant, double kappa, int ncols) {
  const CellFrame father{{0.1, 0.2, -0.3}, 0.8};
  const CellFrame son{{father.alpha.x + ((octant >> 2) & 1) * 0.4, father.alpha.y + ((octant >> 1) & 1) * 0.4,
                       father.alpha.z + (octant & 1) * 0.4},
                      0.4};
  TransferPlan plan{octant, father, son, kappa, {}};
  for (int j = 0; j < ncols; ++j) {
    TransferColumn c{j, ncols - 1 - j, std::nullopt};
    if (kappa > 0.0) c.direction = oracle::random_unit(rng);
    plan.columns.push_back(c);
  }
  return plan;
}

}  // namespace

TEST_CASE("m2m and l2l against the dense transfer matrix") {
  std::mt19937_64 rng(4);
  for (int order : {3, 4, 5}) {
    const InterpGrid grid(order);
    const M2MFactors factors(grid);
    const std::size_t n = static_cast<std::size_t>(grid.size());
    for (int octant = 0; octant < 8; ++octant) {
      for (double kappa : {0.0, 10.0}) {
        const TransferPlan plan = random_plan(rng, octant, kappa, 3);
        const auto son = oracle::random_vector(3 * n, rng);
        const auto father = oracle::random_vector(3 * n, rng);
        for (Strategy st : {Strategy::Tensorized, Strategy::Stacked, Strategy::StackedReal}) {
          std::vector<Complex> fout(3 * n), sout(3 * n);
          m2m_apply(st, factors, plan, son, fout);
          l2l_apply(st, factors, plan, father, sout);
          for (const TransferColumn& c : plan.columns) {
            const Point3 dir = c.direction.value_or(Point3{});
            const auto m = oracle::m2m_matrix(order, plan.father, plan.son, kappa, dir);
            const std::vector<Complex> s_in(son.begin() + c.son_slot * n, son.begin() + (c.son_slot + 1) * n);
            const std::vector<Complex> f_out(fout.begin() + c.father_slot * n, fout.begin() + (c.father_slot + 1) * n);
            CHECK(oracle::rel_diff(f_out, oracle::matvec(m, s_in)) < 1e-13);
            const std::vector<Complex> f_in(father.begin() + c.father_slot * n,
                                            father.begin() + (c.father_slot + 1) * n);
            const std::vector<Complex> s_out(sout.begin() + c.son_slot * n, sout.begin() + (c.son_slot + 1) * n);
            CHECK(oracle::rel_diff(s_out, oracle::matvec(oracle::adjoint(m), f_in)) < 1e-13);
          }
        }
      }
    }
  }
}

TEST_CASE("l2l reproduces constants and m2m conserves polynomial moments") {
  const int order = 5;
  const InterpGrid grid(order);
  const M2MFactors factors(grid);
  const std::size_t n = static_cast<std::size_t>(grid.size());
  std::mt19937_64 rng(5);

  for (int octant = 0; octant < 8; ++octant) {
    const TransferPlan plan = random_plan(rng, octant, 0.0, 1);
    const std::vector<Complex> ones(n, 1.0);
    std::vector<Complex> son(n);
    l2l_apply(Strategy::StackedReal, factors, plan, ones, son);
    for (const Complex& v : son) CHECK(std::abs(v - 1.0) < 1e-13);

    // P2M into the son, M2M to the father: the father expansion integrates
    // every polynomial of per-axis degree < L exactly.
    std::vector<Point3> pos;
    for (const Point3& r : oracle::random_points(40, rng)) pos.push_back(plan.son.to_physical(r));
    const auto q = oracle::random_vector(pos.size(), rng);
    std::vector<Complex> msrc(n), mfather(n);
    p2m(grid, plan.son, pos, q, std::nullopt, msrc);
    m2m_apply(Strategy::StackedReal, factors, plan, msrc, mfather);
    for (int trial = 0; trial < 5; ++trial) {
      std::array<std::array<double, 5>, 3> coef{};
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (auto& axis : coef)
        for (double& c : axis) c = u(rng);
      auto poly = [&](Point3 x) {
        double v = 1.0;
        for (int ax = 0; ax < 3; ++ax) {
          double s = 0.0;
          for (int d = order - 1; d >= 0; --d) s = s * x[ax] + coef[static_cast<std::size_t>(ax)][static_cast<std::size_t>(d)];
          v *= s;
        }
        return v;
      };
      Complex exact, via;
      for (std::size_t i = 0; i < pos.size(); ++i) exact += poly(pos[i]) * q[i];
      for (std::size_t l = 0; l < n; ++l) via += poly(plan.father.to_physical(grid.reference_node(static_cast<int>(l)))) * mfather[l];
      CHECK(std::abs(exact - via) <= 1e-12 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("identity factors leave the input unchanged") {
  for (int order : {2, 4, 7}) {
    const std::size_t L = static_cast<std::size_t>(order);
    std::vector<double> id(L * L, 0.0);
    for (std::size_t i = 0; i < L; ++i) id[i * L + i] = 1.0;
    std::mt19937_64 rng(6);
    const auto in = oracle::random_vector(L * L * L * 3, rng);
    std::vector<Complex> out(in.size());
    tensor_apply(order, {id.data(), id.data(), id.data()}, std::span<const Complex>(in), std::span<Complex>(out), 3);
    CHECK(out == in);
  }
}

TEST_CASE("missing son slot is an error") {
  const InterpGrid grid(3);
  const M2MFactors factors(grid);
  TransferPlan plan{0, {{0, 0, 0}, 1.0}, {{0, 0, 0}, 0.5}, 0.0, {{0, 2, std::nullopt}}};
  const std::vector<Complex> son(27), father_in(27);
  std::vector<Complex> father(27), son_out(27);
  CHECK_THROWS_AS(m2m_apply(Strategy::Tensorized, factors, plan, son, father), std::out_of_range);
  CHECK_THROWS_AS(l2l_apply(Strategy::Stacked, factors, plan, father_in, son_out), std::out_of_range);
}

TEST_CASE("tensor_apply operation count grows as L^4") {
  auto flops = [](int order) {
    const std::size_t L = static_cast<std::size_t>(order);
    std::vector<double> a(L * L, 0.5);
    std::vector<double> in(L * L * L, 1.0), out(L * L * L);
    reset_tensor_flop_count();
    tensor_apply(order, {a.data(), a.data(), a.data()}, std::span<const double>(in), std::span<double>(out), 1);
    return static_cast<double>(tensor_flop_count());
  };
  for (int order = 3; order <= 6; ++order) {
    const double ratio = flops(2 * order) / flops(order);
    CHECK(ratio >= 16.0 / 2);
    CHECK(ratio <= 16.0 * 2);
  }
}

TEST_CASE("strategy names") {
  for (Strategy s : {Strategy::Tensorized, Strategy::Stacked, Strategy::StackedReal}) CHECK(parse_strategy(to_string(s)) == s);
  CHECK(to_string(Strategy::StackedReal) == "t+s+r");
  CHECK_THROWS(parse_strategy("blocked"));
}
