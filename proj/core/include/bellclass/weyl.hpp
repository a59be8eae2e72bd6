#pragma once

// Weyl operators, Bell projectors and the order-d subgroup structure of the
// discrete phase space Z_d x Z_d.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace bellclass {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Tolerance used for algebraic identities between Weyl operators.
inline constexpr double kAlgebraTol = 1e-12;

/// Thrown when a dimension or index lies outside its valid range.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void require_dimension(int d);

/// Primitive root of unity w = exp(2 pi i / d) raised to `power` (reduced mod d).
Complex omega(int d, long long power);

inline int mod(long long a, int d) {
  const long long r = a % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

/// Entry-wise comparison with an explicit absolute tolerance.
bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol);

/// True iff every entry is finite.
bool all_finite(const ComplexMatrix& m);

/// Kronecker product. Row index of A (x) B is i * B.rows() + k.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Partial transpose on the second factor of a (d*d)x(d*d) matrix:
/// entry [(i,k),(j,l)] moves to [(i,l),(j,k)].
ComplexMatrix partial_transpose(const ComplexMatrix& rho, int d);

/// Realignment: entry [(i,k),(j,l)] moves to [(i,j),(k,l)].
ComplexMatrix realign(const ComplexMatrix& rho, int d);

/// Partial trace over the first (`keep_second` = true) or second factor.
ComplexMatrix partial_trace(const ComplexMatrix& rho, int d, bool keep_second);

/// W_{k,l} = sum_j w^{jk} |j><j+l|.
ComplexMatrix weyl_operator(int d, int k, int l);

/// |Omega_{k,l}> = (W_{k,l} (x) 1) |Omega_00>, a unit vector of length d^2.
ComplexVector bell_state(int d, int k, int l);

/// P_{k,l} = |Omega_{k,l}><Omega_{k,l}|.
ComplexMatrix bell_projector(int d, int k, int l);

/// A point (k, l) of the discrete phase space; arithmetic is mod d.
struct PhasePoint {
  int k = 0;
  int l = 0;

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
  friend auto operator<=>(const PhasePoint&, const PhasePoint&) = default;

  /// Flattened coordinate index k * d + l.
  int flat(int d) const { return k * d + l; }
  static PhasePoint from_flat(int index, int d) { return {index / d, index % d}; }
};

inline PhasePoint add(PhasePoint a, PhasePoint b, int d) {
  return {mod(a.k + b.k, d), mod(a.l + b.l, d)};
}

enum class SubgroupKind { Line, Sublattice };

const char* to_string(SubgroupKind kind);

/// An order-d subgroup of Z_d x Z_d, or one of its cosets.
struct PhaseSubgroup {
  int d = 0;
  std::vector<PhasePoint> points;  // sorted, exactly d entries
  SubgroupKind kind = SubgroupKind::Line;
  bool is_coset = false;
  PhasePoint shift{};

  bool contains(PhasePoint p) const;
};

/// All order-d subgroups, sorted lexicographically by their point lists.
std::vector<PhaseSubgroup> enumerate_order_d_subgroups(int d);

/// Every coset of every order-d subgroup (subgroups included), deduplicated
/// by point set and sorted lexicographically.
std::vector<PhaseSubgroup> enumerate_cosets(int d);

}  // namespace bellclass
