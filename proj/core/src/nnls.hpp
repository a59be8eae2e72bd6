#pragma once

// Lawson-Hanson active-set solver for min ||A x - b||_2 subject to x >= 0.

#include <vector>

#include <Eigen/Dense>

namespace bellclass::detail {

inline Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol = 1e-13,
                            int max_outer = 0) {
  const Eigen::Index n = a.cols();
  if (max_outer <= 0) max_outer = static_cast<int>(3 * n + 10);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd w = a.transpose() * b;

  auto solve_passive = [&](Eigen::VectorXd& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t t = 0; t < idx.size(); ++t) ap.col(static_cast<Eigen::Index>(t)) = a.col(idx[t]);
    const Eigen::VectorXd sp = ap.colPivHouseholderQr().solve(b);
    s.setZero(n);
    for (std::size_t t = 0; t < idx.size(); ++t) s(idx[t]) = sp(static_cast<Eigen::Index>(t));
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    Eigen::VectorXd s;
    for (int inner = 0; inner < 3 * static_cast<int>(n) + 10; ++inner) {
      solve_passive(s);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) feasible = false;
      if (feasible) break;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - s(j)));
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && x(j) <= 1e-15) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) x(j) = passive[static_cast<std::size_t>(j)] ? std::max(0.0, s(j)) : 0.0;
    w = a.transpose() * (b - a * x);
  }
  return x;
}

}  // namespace bellclass::detail
