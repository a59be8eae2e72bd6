#include "bellclass/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace bellclass {

void require_dimension(int d) {
  if (d < 2) throw DomainError("dimension must be >= 2, got " + std::to_string(d));
}

namespace {

void require_index(int d, int k, int l) {
  require_dimension(d);
  if (k < 0 || k >= d || l < 0 || l >= d)
    throw DomainError("phase-space index (" + std::to_string(k) + "," + std::to_string(l) +
                      ") out of range for d=" + std::to_string(d));
}

void require_bipartite(const ComplexMatrix& rho, int d) {
  require_dimension(d);
  if (rho.rows() != d * d || rho.cols() != d * d)
    throw DomainError("expected a square matrix of size d^2");
}

}  // namespace

Complex omega(int d, long long power) {
  const double angle = 2.0 * std::numbers::pi * mod(power, d) / d;
  return {std::cos(angle), std::sin(angle)};
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (std::abs(a(i, j) - b(i, j)) > tol) return false;
  return true;
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, int d) {
  require_bipartite(rho, d);
  ComplexMatrix out(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) out(i * d + l, j * d + k) = rho(i * d + k, j * d + l);
  return out;
}

ComplexMatrix realign(const ComplexMatrix& rho, int d) {
  require_bipartite(rho, d);
  ComplexMatrix out(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) out(i * d + j, k * d + l) = rho(i * d + k, j * d + l);
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, int d, bool keep_second) {
  require_bipartite(rho, d);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int t = 0; t < d; ++t) {
        if (keep_second)
          out(a, b) += rho(t * d + a, t * d + b);
        else
          out(a, b) += rho(a * d + t, b * d + t);
      }
  return out;
}

ComplexMatrix weyl_operator(int d, int k, int l) {
  require_index(d, k, l);
  ComplexMatrix w = ComplexMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) w(j, mod(j + l, d)) = omega(d, static_cast<long long>(j) * k);
  return w;
}

ComplexVector bell_state(int d, int k, int l) {
  require_index(d, k, l);
  // (W_{k,l} (x) 1) sum_i |ii> / sqrt(d) = sum_j w^{jk} |j, j+l> / sqrt(d)
  ComplexVector v = ComplexVector::Zero(d * d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    v(j * d + mod(j + l, d)) = norm * omega(d, static_cast<long long>(j) * k);
  return v;
}

ComplexMatrix bell_projector(int d, int k, int l) {
  const ComplexVector v = bell_state(d, k, l);
  return v * v.adjoint();
}

const char* to_string(SubgroupKind kind) {
  return kind == SubgroupKind::Line ? "line" : "sublattice";
}

bool PhaseSubgroup::contains(PhasePoint p) const {
  return std::binary_search(points.begin(), points.end(), p);
}

namespace {

std::vector<PhasePoint> closure(const std::vector<PhasePoint>& generators, int d) {
  std::set<PhasePoint> seen{{0, 0}};
  std::vector<PhasePoint> frontier{{0, 0}};
  while (!frontier.empty()) {
    std::vector<PhasePoint> next;
    for (const auto& p : frontier)
      for (const auto& g : generators) {
        const PhasePoint q = add(p, g, d);
        if (seen.insert(q).second) next.push_back(q);
      }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

bool is_cyclic(const std::vector<PhasePoint>& points, int d) {
  return std::any_of(points.begin(), points.end(), [&](PhasePoint p) {
    return closure({p}, d).size() == points.size();
  });
}

}  // namespace

std::vector<PhaseSubgroup> enumerate_order_d_subgroups(int d) {
  require_dimension(d);
  // Every subgroup of Z_d x Z_d is generated by at most two elements.
  std::set<std::vector<PhasePoint>> found;
  const int n = d * d;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      auto pts = closure({PhasePoint::from_flat(a, d), PhasePoint::from_flat(b, d)}, d);
      if (static_cast<int>(pts.size()) == d) found.insert(std::move(pts));
    }
  std::vector<PhaseSubgroup> out;
  out.reserve(found.size());
  for (const auto& pts : found)
    out.push_back({d, pts, is_cyclic(pts, d) ? SubgroupKind::Line : SubgroupKind::Sublattice,
                   false, PhasePoint{}});
  return out;
}

std::vector<PhaseSubgroup> enumerate_cosets(int d) {
  const auto subgroups = enumerate_order_d_subgroups(d);
  std::set<std::vector<PhasePoint>> seen;
  std::vector<PhaseSubgroup> out;
  for (const auto& g : subgroups)
    for (int s = 0; s < d * d; ++s) {
      const PhasePoint shift = PhasePoint::from_flat(s, d);
      std::vector<PhasePoint> pts;
      pts.reserve(g.points.size());
      for (const auto& p : g.points) pts.push_back(add(p, shift, d));
      std::sort(pts.begin(), pts.end());
      if (!seen.insert(pts).second) continue;
      const bool through_origin = pts.front() == PhasePoint{0, 0};
      out.push_back({d, pts, g.kind, !through_origin, through_origin ? PhasePoint{} : pts.front()});
    }
  std::sort(out.begin(), out.end(),
            [](const PhaseSubgroup& a, const PhaseSubgroup& b) { return a.points < b.points; });
  return out;
}

}  // namespace bellclass
