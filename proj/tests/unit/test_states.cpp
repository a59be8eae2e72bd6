#include <numeric>
#include <sstream>

#include "doctest.h"
#include "bellclass/states.hpp"
#include "oracles.hpp"

using namespace bellclass;

TEST_CASE("state validation") {
  CHECK_THROWS_AS(BellDiagonalState(2, {0.5, 0.5, 0.1, -0.1}), DomainError);
  CHECK_THROWS_AS(BellDiagonalState(2, {0.5, 0.5, 0.1, 0.0}), DomainError);
  CHECK_THROWS_AS(BellDiagonalState(3, {1.0}), DomainError);
  CHECK_NOTHROW(BellDiagonalState(2, {0.5, 0.5, 0.0, 0.0}));
  CHECK(BellDiagonalState::uniform(4).max_coord() == doctest::Approx(1.0 / 16));
  CHECK(BellDiagonalState::indicator(3, 1, 2).at(1, 2) == 1.0);
  CHECK(BellDiagonalState::indicator(3, 1, 2).at(4, -1) == 1.0);
}

TEST_CASE("density matrix agrees with the Bell-vector sum and round-trips") {
  Rng rng(11);
  for (int d = 2; d <= 4; ++d)
    for (int rep = 0; rep < 5; ++rep) {
      const auto s = sample_simplex(d, rng);
      const ComplexMatrix rho = density_matrix(s);
      CHECK(approx_equal(rho, oracle::dense_rho(s), 1e-13));
      CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-13);
      const auto back = bell_coordinates(rho, d);
      for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == doctest::Approx(s[i]).epsilon(1e-12));
    }
}

TEST_CASE("purity equals tr rho^2") {
  Rng rng(3);
  const auto s = sample_simplex(3, rng);
  const ComplexMatrix rho = density_matrix(s);
  CHECK(s.purity() == doctest::Approx((rho * rho).trace().real()).epsilon(1e-12));
}

TEST_CASE("simplex sampler matches the rejection sampler (d=2, two-sample KS)") {
  Rng a(101), b(202);
  std::vector<double> fast, slow;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    fast.push_back(sample_simplex(2, a)[0]);
    slow.push_back(oracle::rejection_sample(2, b)[0]);
  }
  // critical value at significance 0.01: 1.628 * sqrt(2/n)
  CHECK(oracle::ks_statistic(fast, slow) < 1.628 * std::sqrt(2.0 / n));
}

TEST_CASE("simplex marginals have the Beta(1, d^2-1) mean and variance") {
  Rng rng(5);
  const int d = 3, n = 20000;
  const double m = d * d;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_simplex(d, rng)[4];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(1.0 / m).epsilon(0.03));
  CHECK(sq / n - mean * mean == doctest::Approx((m - 1) / (m * m * (m + 1))).epsilon(0.06));
}

TEST_CASE("enclosure sampler stays in E_d and agrees with the box rejection sampler") {
  Rng a(8), b(9);
  std::vector<double> fast, slow;
  std::size_t proposals = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto s = sample_enclosure(3, a, &proposals);
    CHECK(in_enclosure(s));
    fast.push_back(s[0]);
    slow.push_back(oracle::rejection_sample(3, b, 1.0 / 3)[0]);
  }
  CHECK(proposals >= 3000);
  CHECK(oracle::ks_statistic(fast, slow) < 1.628 * std::sqrt(2.0 / 3000));
}

TEST_CASE("kernel vertices: one per coset, uniform on its points") {
  const std::size_t expected[] = {0, 0, 6, 12, 28};
  for (int d = 2; d <= 4; ++d) {
    const auto kv = kernel_vertices(d);
    CHECK(kv.size() == expected[d]);
    for (const auto& v : kv) {
      CHECK(v.state.max_coord() == doctest::Approx(1.0 / d));
      for (const auto& p : v.subgroup.points) CHECK(v.state.at(p.k, p.l) == doctest::Approx(1.0 / d));
      CHECK(oracle::dense_ppt_min(v.state) > -1e-12);
    }
  }
}

TEST_CASE("product coordinates equal squared Bell overlaps") {
  Rng rng(21);
  for (int d = 2; d <= 4; ++d) {
    ComplexVector a(d), b(d);
    for (int i = 0; i < d; ++i) {
      a(i) = Complex(rng.normal(), rng.normal());
      b(i) = Complex(rng.normal(), rng.normal());
    }
    const auto c = product_coordinates(a, b);
    const ComplexVector ab = kron(a / a.norm(), b / b.norm());
    double total = 0.0;
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        const double overlap = std::norm(bell_state(d, k, l).dot(ab));
        CHECK(c[static_cast<std::size_t>(k * d + l)] == doctest::Approx(overlap).epsilon(1e-12));
        total += overlap;
      }
    CHECK(total == doctest::Approx(1.0));
  }
}

TEST_CASE("Weyl twirl of a product state is the Bell-diagonal state with product coordinates") {
  Rng rng(4);
  const int d = 3;
  ComplexVector a(d), b(d);
  for (int i = 0; i < d; ++i) {
    a(i) = Complex(rng.normal(), rng.normal());
    b(i) = Complex(rng.normal(), rng.normal());
  }
  a /= a.norm();
  b /= b.norm();
  ComplexMatrix twirled = ComplexMatrix::Zero(d * d, d * d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) {
      const ComplexMatrix u = kron(weyl_operator(d, p, q), weyl_operator(d, p, q).conjugate());
      const ComplexVector v = u * kron(a, b);
      twirled += v * v.adjoint() / (d * d);
    }
  const BellDiagonalState s(d, product_coordinates(a, b));
  CHECK(approx_equal(twirled, density_matrix(s), 1e-12));
}

TEST_CASE("mix and JSON lines") {
  const auto u = BellDiagonalState::uniform(2);
  const auto e = BellDiagonalState::indicator(2, 0, 0);
  const auto m = mix(e, u, 0.5);
  CHECK(m[0] == doctest::Approx(0.625));

  std::vector<LabeledState> states{{"a", m}, {"b", u}};
  std::ostringstream os;
  write_states_jsonl(os, states);
  std::istringstream is(os.str());
  const auto back = read_states_jsonl(is);
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "a");
  CHECK(back[0].state == m);
  CHECK(back[1].state == u);

  std::istringstream bad("{\"d\":2,\"c\":[1,0,0,0]}\n{\"d\":2,\"c\":[2,0,0,0]}\n");
  CHECK_THROWS_WITH_AS(read_states_jsonl(bad), doctest::Contains("line 2"), std::runtime_error);
}
