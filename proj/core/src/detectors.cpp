#include "bellclass/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bellclass {

const char* to_string(Criterion c) {
  switch (c) {
    case Criterion::E1: return "E1";
    case Criterion::E2: return "E2";
    case Criterion::E3: return "E3";
    case Criterion::E4: return "E4";
    case Criterion::E5: return "E5";
    case Criterion::S1: return "S1";
    case Criterion::S2: return "S2";
  }
  return "?";
}

Criterion criterion_from_string(std::string_view name) {
  for (auto c : {Criterion::E1, Criterion::E2, Criterion::E3, Criterion::E4, Criterion::E5, Criterion::S1,
                 Criterion::S2})
    if (name == to_string(c)) return c;
  throw DomainError("unknown criterion: " + std::string(name));
}

namespace {

std::vector<Complex> omega_table(int d) {
  std::vector<Complex> t(static_cast<std::size_t>(d));
  for (int p = 0; p < d; ++p) t[static_cast<std::size_t>(p)] = omega(d, p);
  return t;
}

}  // namespace

double ppt_min_eigenvalue(const BellDiagonalState& s) {
  const int d = s.d();
  const auto w = omega_table(d);
  // The partial transpose is block diagonal in the index sum a + b (mod d).
  // Block sigma, rows (i, sigma - i):
  //   B[i][j] = (1/d) sum_m c_{m, sigma - i - j} w^{(i - j) m}
  double lowest = std::numeric_limits<double>::infinity();
  ComplexMatrix block(d, d);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
  for (int sigma = 0; sigma < d; ++sigma) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const int l = mod(sigma - i - j, d);
        Complex v = 0.0;
        for (int m = 0; m < d; ++m) v += s.at(m, l) * w[static_cast<std::size_t>(mod((i - j) * m, d))];
        block(i, j) = v / static_cast<double>(d);
      }
    solver.compute(block, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw DetectorError("eigensolver failed on partial transpose block");
    lowest = std::min(lowest, solver.eigenvalues().minCoeff());
  }
  return lowest;
}

DetectorVerdict ppt_verdict(const BellDiagonalState& s) {
  const double v = ppt_min_eigenvalue(s);
  return {Criterion::E1, v < -kPptEps, v, -kPptEps};
}

double realignment_sum(const BellDiagonalState& s) {
  const ComplexMatrix r = realign(density_matrix(s), s.d());
  Eigen::JacobiSVD<ComplexMatrix> svd(r);
  if (svd.info() != Eigen::Success) throw DetectorError("SVD failed on realigned matrix");
  return svd.singularValues().sum();
}

DetectorVerdict realignment_verdict(const BellDiagonalState& s) {
  const double v = realignment_sum(s);
  return {Criterion::E2, v > 1.0 + kRealignEps, v, 1.0 + kRealignEps};
}

double quasipure_concurrence(const BellDiagonalState& s) {
  const int d = s.d();
  const auto coords = s.coords();
  // (n, m): largest coordinate, lowest flat index on ties.
  const auto top = static_cast<int>(std::max_element(coords.begin(), coords.end()) - coords.begin());
  const int n = top / d;
  const int m = top % d;
  const double prefactor = static_cast<double>(d) / (2.0 * (d - 1));
  const double c_nm = s.at(n, m);
  double leading = 0.0;
  double others = 0.0;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const bool is_top = k == n && l == m;
      const double bracket = (is_top ? (1.0 - 2.0 / d) * c_nm : 0.0) +
                             s.at(2 * n - k, 2 * m - l) / (static_cast<double>(d) * d);
      const double term = std::sqrt(std::max(0.0, prefactor * s.at(k, l) * bracket));
      (is_top ? leading : others) += term;
    }
  return std::max(0.0, leading - others);
}

DetectorVerdict concurrence_verdict(const BellDiagonalState& s) {
  const double v = quasipure_concurrence(s);
  return {Criterion::E3, v > kConcurrenceEps, v, kConcurrenceEps};
}

void MubSet::validate(double tol) const {
  if (static_cast<int>(bases.size()) != d + 1)
    throw DomainError("a complete MUB set needs d+1 bases");
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  for (const auto& b : bases) {
    if (b.rows() != d || b.cols() != d) throw DomainError("MUB basis has wrong shape");
    if (!approx_equal(b.adjoint() * b, id, tol)) throw DomainError("MUB basis is not orthonormal");
  }
  const double target = 1.0 / d;
  for (std::size_t x = 0; x < bases.size(); ++x)
    for (std::size_t y = x + 1; y < bases.size(); ++y) {
      const ComplexMatrix overlaps = bases[x].adjoint() * bases[y];
      for (Eigen::Index i = 0; i < overlaps.size(); ++i)
        if (std::abs(std::norm(overlaps(i)) - target) > tol)
          throw DomainError("bases " + std::to_string(x + 1) + " and " + std::to_string(y + 1) +
                            " are not mutually unbiased");
    }
}

MubSet standard_mubs(int d) {
  const Complex i1{0.0, 1.0};
  MubSet out{d, {}};
  if (d == 2) {
    const double n = 1.0 / std::sqrt(2.0);
    ComplexMatrix bx(2, 2), by(2, 2);
    bx << 1, 1, 1, -1;
    by << 1, 1, i1, -i1;
    out.bases = {ComplexMatrix::Identity(2, 2), n * bx, n * by};
  } else if (d == 3) {
    const Complex w = omega(3, 1);
    const Complex w2 = omega(3, 2);
    const double n = 1.0 / std::sqrt(3.0);
    ComplexMatrix b2(3, 3), b3(3, 3), b4(3, 3);
    b2 << 1, 1, 1, 1, w, w2, 1, w2, w;
    b3 << 1, 1, 1, w, w2, 1, w, 1, w2;
    b4 << 1, 1, 1, w2, 1, w, w2, w, 1;
    out.bases = {ComplexMatrix::Identity(3, 3), n * b2, n * b3, n * b4};
  } else if (d == 4) {
    ComplexMatrix b2(4, 4), b3(4, 4), b4(4, 4), b5(4, 4);
    b2 << 1, 1, 1, 1,
          1, 1, -1, -1,
          1, -1, -1, 1,
          1, -1, 1, -1;
    b3 << 1, 1, 1, 1,
          -i1, -i1, i1, i1,
          -i1, i1, i1, -i1,
          -1, 1, -1, 1;
    b4 << 1, 1, 1, 1,
          -1, -1, 1, 1,
          -i1, i1, i1, -i1,
          -i1, i1, -i1, i1;
    b5 << 1, 1, 1, 1,
          -i1, -i1, i1, i1,
          -1, 1, 1, -1,
          -i1, i1, -i1, i1;
    out.bases = {ComplexMatrix::Identity(4, 4), 0.5 * b2, 0.5 * b3, 0.5 * b4, 0.5 * b5};
  } else {
    throw DomainError("standard MUB sets are available for d = 3 and d = 4 only, got d=" + std::to_string(d));
  }
  out.validate();
  return out;
}

int default_mub_shift(int d) {
  if (d == 3) return 2;
  if (d == 4) return 3;
  throw DomainError("no default MUB shift for d=" + std::to_string(d));
}

std::vector<double> mub_coefficients(const MubSet& mubs, int shift) {
  const int d = mubs.d;
  if (shift < 0 || shift >= d) throw DomainError("MUB shift must lie in [0, d)");
  mubs.validate();
  // <x (x) y| rho |x (x) y> = c . product_coordinates(x, y) for Bell-diagonal rho.
  std::vector<double> mu(static_cast<std::size_t>(d) * d, 0.0);
  for (std::size_t b = 0; b < mubs.bases.size(); ++b) {
    const ComplexMatrix& basis = mubs.bases[b];
    for (int i = 0; i < d; ++i) {
      const int partner = b == 0 ? (i + shift) % d : i;
      const auto p = product_coordinates(basis.col(i), basis.col(partner).conjugate());
      for (std::size_t t = 0; t < p.size(); ++t) mu[t] += p[t];
    }
  }
  return mu;
}

double mub_sum(const BellDiagonalState& s, const MubSet& mubs, int shift) {
  if (mubs.d != s.d()) throw DomainError("MUB set dimension does not match state");
  const auto mu = mub_coefficients(mubs, shift);
  double total = 0.0;
  for (std::size_t t = 0; t < mu.size(); ++t) total += s[t] * mu[t];
  return total;
}

DetectorVerdict mub_verdict(const BellDiagonalState& s, const MubSet& mubs, int shift) {
  const double v = mub_sum(s, mubs, shift);
  return {Criterion::E4, v > 2.0 + kMubEps, v, 2.0 + kMubEps};
}

double weyl_representation_sum(const BellDiagonalState& s) {
  const int d = s.d();
  const ComplexMatrix rho = density_matrix(s);
  const auto w = omega_table(d);
  // (W_{a1,b1} (x) W_{a2,b2})[(i,k), (i+b1, k+b2)] = w^{i a1 + k a2}
  double total = 0.0;
  for (int a1 = 0; a1 < d; ++a1)
    for (int b1 = 0; b1 < d; ++b1)
      for (int a2 = 0; a2 < d; ++a2)
        for (int b2 = 0; b2 < d; ++b2) {
          Complex coeff = 0.0;
          for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
              coeff += std::conj(w[static_cast<std::size_t>(mod(i * a1 + k * a2, d))]) *
                       rho(i * d + k, mod(i + b1, d) * d + mod(k + b2, d));
          total += std::abs(coeff);
        }
  return total;
}

DetectorVerdict weyl_representation_verdict(const BellDiagonalState& s) {
  const double v = weyl_representation_sum(s);
  return {Criterion::S2, v <= 2.0 + kWeylSepEps, v, 2.0 + kWeylSepEps};
}

}  // namespace bellclass
