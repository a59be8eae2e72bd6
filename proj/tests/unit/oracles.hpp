#pragma once

// Independent reference computations shared by the unit tests. They work on
// dense matrices and literal definitions, never on the fast library paths.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "bellclass/states.hpp"

namespace oracle {

using namespace bellclass;

/// rho = sum c_{k,l} |Omega_kl><Omega_kl| built from the Bell vectors.
inline ComplexMatrix dense_rho(const BellDiagonalState& s) {
  const int d = s.d();
  ComplexMatrix rho = ComplexMatrix::Zero(d * d, d * d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const ComplexVector v = bell_state(d, k, l);
      rho += s.at(k, l) * (v * v.adjoint());
    }
  return rho;
}

inline double dense_ppt_min(const BellDiagonalState& s) {
  const ComplexMatrix pt = partial_transpose(dense_rho(s), s.d());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(pt);
  return es.eigenvalues().minCoeff();
}

inline double dense_trace_norm(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

/// Closed form of the realignment trace norm for Bell-diagonal states:
/// (1/d) sum_{a,b} |sum_{k,l} c_kl w^{bk - al}|.
inline double fourier_realignment(const BellDiagonalState& s) {
  const int d = s.d();
  double total = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Complex acc = 0.0;
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) acc += s.at(k, l) * omega(d, static_cast<long long>(b) * k - static_cast<long long>(a) * l);
      total += std::abs(acc);
    }
  return total / d;
}

/// sum over all d^4 pairs of |tr[(W_mu (x) W_nu)^dagger rho]| by matrix products.
inline double dense_weyl_sum(const BellDiagonalState& s) {
  const int d = s.d();
  const ComplexMatrix rho = dense_rho(s);
  double total = 0.0;
  for (int a1 = 0; a1 < d; ++a1)
    for (int b1 = 0; b1 < d; ++b1) {
      const ComplexMatrix w1 = weyl_operator(d, a1, b1);
      for (int a2 = 0; a2 < d; ++a2)
        for (int b2 = 0; b2 < d; ++b2)
          total += std::abs((kron(w1, weyl_operator(d, a2, b2)).adjoint() * rho).trace());
    }
  return total;
}

/// The rejection sampler: first d^2-1 coordinates uniform on [0, hi], the
/// last fixed by normalization, rejected when negative.
inline BellDiagonalState rejection_sample(int d, Rng& rng, double hi = 1.0) {
  const int n = d * d;
  for (;;) {
    std::vector<double> c(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int i = 0; i + 1 < n; ++i) sum += c[static_cast<std::size_t>(i)] = rng.uniform(0.0, hi);
    const double last = 1.0 - sum;
    if (last < 0.0 || last > hi) continue;
    c.back() = last;
    return BellDiagonalState(d, c);
  }
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return best;
}

/// Random convex mixture of the given states (Dirichlet weights).
inline BellDiagonalState random_mixture(const std::vector<BellDiagonalState>& vs, Rng& rng) {
  const int d = vs.front().d();
  std::vector<double> lambda(vs.size());
  double total = 0.0;
  for (auto& x : lambda) total += x = rng.exponential();
  std::vector<double> c(vs.front().size(), 0.0);
  for (std::size_t v = 0; v < vs.size(); ++v)
    for (std::size_t t = 0; t < c.size(); ++t) c[t] += lambda[v] / total * vs[v][t];
  double sum = 0.0;
  for (double x : c) sum += x;
  for (double& x : c) x /= sum;
  return BellDiagonalState(d, c);
}

}  // namespace oracle
