#include <numbers>
#include <random>

#include "doctest.h"
#include "eqfmm/kernel.hpp"
#include "oracles.hpp"

using namespace eqfmm;

namespace {
constexpr double inv4pi = 1.0 / (4.0 * std::numbers::pi);
}

TEST_CASE("kernel_eval closed forms") {
  const Complex g0 = kernel_eval(0.0, {0, 0, 0}, {1, 0, 0});
  CHECK(g0.real() == doctest::Approx(0.0795774715).epsilon(1e-10));
  CHECK(g0.imag() == 0.0);

  const Complex gpi = kernel_eval(std::numbers::pi, {0, 0, 0}, {0, 1, 0});
  CHECK(gpi.real() == doctest::Approx(-inv4pi).epsilon(1e-14));
  CHECK(std::abs(gpi.imag()) < 1e-16);

  CHECK(kernel_eval(3.0, {0.2, 0.3, 0.4}, {0.2, 0.3, 0.4}) == Complex{});
}

TEST_CASE("kernel reciprocity is exact") {
  std::mt19937_64 rng(11);
  const auto pts = oracle::random_points(200, rng, -2.0, 2.0);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    for (double k : {0.0, 0.7, 25.0}) CHECK(kernel_eval(k, pts[i], pts[i + 1]) == kernel_eval(k, pts[i + 1], pts[i]));
  }
}

TEST_CASE("direct_sum") {
  SUBCASE("one pair at unit distance") {
    const std::vector<Point3> t{{0, 0, 0}}, s{{0, 0, 1}};
    const std::vector<Complex> q{1.0};
    CHECK(direct_sum(0.0, t, s, q)[0].real() == doctest::Approx(inv4pi).epsilon(1e-15));
  }
  SUBCASE("zero charges") {
    std::mt19937_64 rng(1);
    const auto p = oracle::random_points(30, rng);
    const std::vector<Complex> q(p.size());
    for (const Complex& v : direct_sum(2.0, p, p, q)) CHECK(v == Complex{});
  }
  SUBCASE("three particles on a line, self term suppressed") {
    const std::vector<Point3> p{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    const std::vector<Complex> q(3, 1.0);
    const auto pot = direct_sum(0.0, p, p, q);
    CHECK(pot[0].real() == doctest::Approx(inv4pi * 1.5).epsilon(1e-15));
    CHECK(pot[1].real() == doctest::Approx(inv4pi * 2.0).epsilon(1e-15));
  }
  SUBCASE("linear in the charges") {
    std::mt19937_64 rng(2);
    const auto p = oracle::random_points(80, rng);
    const auto q1 = oracle::random_vector(p.size(), rng);
    const auto q2 = oracle::random_vector(p.size(), rng);
    std::vector<Complex> q12(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q12[i] = q1[i] + q2[i];
    const auto a = direct_sum(5.0, p, p, q1), b = direct_sum(5.0, p, p, q2), c = direct_sum(5.0, p, p, q12);
    std::vector<Complex> ab(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) ab[i] = a[i] + b[i];
    CHECK(oracle::rel_diff(ab, c) < 1e-13);
  }
  SUBCASE("matches the oracle kernel") {
    std::mt19937_64 rng(3);
    const auto t = oracle::random_points(20, rng);
    const auto s = oracle::random_points(25, rng);
    const auto q = oracle::random_vector(s.size(), rng);
    std::vector<Complex> ref(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) ref[i] += oracle::green(9.0, t[i], s[j]) * q[j];
    CHECK(oracle::rel_diff(direct_sum(9.0, t, s, q), ref) < 1e-14);
  }
}

TEST_CASE("relative_errors") {
  std::mt19937_64 rng(5);
  const auto ref = oracle::random_vector(40, rng);
  const ErrorReport same = relative_errors(ref, ref);
  CHECK(same.rel_linf == 0.0);
  CHECK(same.rel_l1 == 0.0);
  CHECK(same.rel_l2 == 0.0);

  std::vector<Complex> twice(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) twice[i] = 2.0 * ref[i];
  const ErrorReport e2 = relative_errors(ref, twice);
  CHECK(e2.rel_linf == doctest::Approx(1.0));
  CHECK(e2.rel_l1 == doctest::Approx(1.0));
  CHECK(e2.rel_l2 == doctest::Approx(1.0));

  const auto approx = oracle::random_vector(40, rng);
  double ninf = 0, dinf = 0, n1 = 0, d1 = 0, n2 = 0, d2 = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double e = std::abs(ref[i] - approx[i]), r = std::abs(ref[i]);
    ninf = std::max(ninf, e);
    dinf = std::max(dinf, r);
    n1 += e;
    d1 += r;
    n2 += e * e;
    d2 += r * r;
  }
  const ErrorReport er = relative_errors(ref, approx);
  CHECK(er.rel_linf == doctest::Approx(ninf / dinf).epsilon(1e-14));
  CHECK(er.rel_l1 == doctest::Approx(n1 / d1).epsilon(1e-14));
  CHECK(er.rel_l2 == doctest::Approx(std::sqrt(n2 / d2)).epsilon(1e-14));

  const std::vector<Complex> zeros(4);
  CHECK_THROWS(relative_errors(zeros, zeros));
}
