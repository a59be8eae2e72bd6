#include <functional>
#include <set>

#include "doctest.h"
#include "bellclass/weyl.hpp"

using namespace bellclass;

TEST_CASE("Weyl operators multiply with the phase w^{l1 k2}") {
  for (int d = 2; d <= 5; ++d)
    for (int k1 = 0; k1 < d; ++k1)
      for (int l1 = 0; l1 < d; ++l1)
        for (int k2 = 0; k2 < d; ++k2)
          for (int l2 = 0; l2 < d; ++l2) {
            const ComplexMatrix lhs = weyl_operator(d, k1, l1) * weyl_operator(d, k2, l2);
            const ComplexMatrix rhs = omega(d, static_cast<long long>(l1) * k2) * weyl_operator(d, mod(k1 + k2, d), mod(l1 + l2, d));
            CHECK(approx_equal(lhs, rhs, 1e-12));
          }
}

TEST_CASE("Weyl adjoint equals w^{kl} W_{-k,-l} and the inverse") {
  for (int d = 2; d <= 5; ++d)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) {
        const ComplexMatrix w = weyl_operator(d, k, l);
        CHECK(approx_equal(w.adjoint(), omega(d, static_cast<long long>(k) * l) * weyl_operator(d, mod(-k, d), mod(-l, d)), 1e-12));
        CHECK(approx_equal(w.adjoint() * w, ComplexMatrix::Identity(d, d), 1e-12));
      }
}

TEST_CASE("W_{k,l} entries follow the defining sum") {
  const int d = 3;
  const ComplexMatrix w = weyl_operator(d, 1, 2);
  for (int j = 0; j < d; ++j)
    for (int m = 0; m < d; ++m) {
      const Complex expected = m == (j + 2) % d ? omega(d, j) : Complex(0.0);
      CHECK(std::abs(w(j, m) - expected) < 1e-15);
    }
}

TEST_CASE("Bell projectors are orthonormal and complete") {
  for (int d = 2; d <= 5; ++d) {
    ComplexMatrix sum = ComplexMatrix::Zero(d * d, d * d);
    for (int a = 0; a < d * d; ++a) {
      const ComplexVector va = bell_state(d, a / d, a % d);
      for (int b = 0; b < d * d; ++b) {
        const Complex ip = va.dot(bell_state(d, b / d, b % d));
        CHECK(std::abs(ip - Complex(a == b ? 1.0 : 0.0)) < 1e-12);
      }
      sum += bell_projector(d, a / d, a % d);
    }
    CHECK(approx_equal(sum, ComplexMatrix::Identity(d * d, d * d), 1e-12));
  }
}

TEST_CASE("Omega_00 is the maximally entangled state") {
  for (int d = 2; d <= 4; ++d) {
    const ComplexVector v = bell_state(d, 0, 0);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) CHECK(std::abs(v(i * d + k) - Complex(i == k ? 1.0 / std::sqrt(d) : 0.0)) < 1e-15);
    const ComplexMatrix reduced = partial_trace(v * v.adjoint(), d, true);
    CHECK(approx_equal(reduced, ComplexMatrix::Identity(d, d) / d, 1e-12));
  }
}

TEST_CASE("partial transpose and realignment move entries as documented") {
  const int d = 3;
  ComplexMatrix m(d * d, d * d);
  for (int r = 0; r < d * d; ++r)
    for (int c = 0; c < d * d; ++c) m(r, c) = Complex(r, c);
  const ComplexMatrix pt = partial_transpose(m, d);
  const ComplexMatrix re = realign(m, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
          CHECK(pt(i * d + l, j * d + k) == m(i * d + k, j * d + l));
          CHECK(re(i * d + j, k * d + l) == m(i * d + k, j * d + l));
        }
  CHECK(approx_equal(partial_transpose(pt, d), m, 0.0));
}

TEST_CASE("kron matches the row convention") {
  ComplexMatrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const ComplexMatrix k = kron(a, b);
  CHECK(k(0, 1) == Complex(1));
  CHECK(k(1 * 2 + 0, 0 * 2 + 1) == Complex(3));
  CHECK(k(3, 2) == Complex(4));
}

namespace {

// Brute force: every d-subset of the phase space that contains the origin
// and is closed under addition.
std::set<std::vector<int>> brute_force_subgroups(int d) {
  const int n = d * d;
  std::set<std::vector<int>> out;
  std::vector<int> pick(static_cast<std::size_t>(d - 1));
  auto closed = [&](const std::vector<int>& pts) {
    std::set<int> s(pts.begin(), pts.end());
    for (int a : pts)
      for (int b : pts)
        if (!s.count(add(PhasePoint::from_flat(a, d), PhasePoint::from_flat(b, d), d).flat(d))) return false;
    return true;
  };
  // iterate over increasing (d-1)-tuples of nonzero points
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == d - 1) {
      std::vector<int> pts{0};
      pts.insert(pts.end(), pick.begin(), pick.end());
      if (closed(pts)) out.insert(pts);
      return;
    }
    for (int x = start; x < n; ++x) {
      pick[static_cast<std::size_t>(pos)] = x;
      rec(pos + 1, x + 1);
    }
  };
  rec(0, 1);
  return out;
}

}  // namespace

TEST_CASE("order-d subgroups agree with brute-force enumeration") {
  const int expected_subgroups[] = {0, 0, 3, 4, 7};
  const int expected_cosets[] = {0, 0, 6, 12, 28};
  for (int d = 2; d <= 4; ++d) {
    const auto subs = enumerate_order_d_subgroups(d);
    const auto brute = brute_force_subgroups(d);
    CHECK(subs.size() == static_cast<std::size_t>(expected_subgroups[d]));
    CHECK(brute.size() == subs.size());
    for (const auto& s : subs) {
      std::vector<int> flat;
      for (const auto& p : s.points) flat.push_back(p.flat(d));
      std::sort(flat.begin(), flat.end());
      CHECK(brute.count(flat) == 1);
    }
    CHECK(enumerate_cosets(d).size() == static_cast<std::size_t>(expected_cosets[d]));
  }
}

TEST_CASE("d=4 has one sublattice, the rest are lines") {
  const auto subs = enumerate_order_d_subgroups(4);
  int sublattices = 0;
  for (const auto& s : subs)
    if (s.kind == SubgroupKind::Sublattice) {
      ++sublattices;
      const std::vector<PhasePoint> expected{{0, 0}, {0, 2}, {2, 0}, {2, 2}};
      CHECK(s.points == expected);
    }
  CHECK(sublattices == 1);
}

TEST_CASE("cosets partition the phase space for each subgroup") {
  for (int d = 2; d <= 4; ++d) {
    const auto cosets = enumerate_cosets(d);
    for (const auto& sub : enumerate_order_d_subgroups(d)) {
      int covering = 0;
      for (const auto& c : cosets) {
        bool parallel = true;
        for (const auto& p : c.points)
          if (!sub.contains(add(p, {mod(-c.points[0].k, d), mod(-c.points[0].l, d)}, d))) parallel = false;
        if (parallel) ++covering;
      }
      CHECK(covering == d);
    }
  }
}

TEST_CASE("invalid dimensions are rejected") {
  CHECK_THROWS_AS(weyl_operator(1, 0, 0), DomainError);
  CHECK_THROWS_AS(require_dimension(0), DomainError);
}
