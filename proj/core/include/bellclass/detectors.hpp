#pragma once

// Closed-form entanglement and separability criteria for Bell-diagonal states.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bellclass/states.hpp"

namespace bellclass {

enum class Criterion { E1, E2, E3, E4, E5, S1, S2 };

const char* to_string(Criterion c);
Criterion criterion_from_string(std::string_view name);

/// Entanglement criteria fire on entangled states, S1/S2 on separable ones.
inline bool is_separability_criterion(Criterion c) { return c == Criterion::S1 || c == Criterion::S2; }

/// Raised when a numerical kernel (eigensolver, SVD) does not converge.
class DetectorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Verdict guards.
inline constexpr double kPptEps = 1e-10;
inline constexpr double kRealignEps = 1e-10;
inline constexpr double kConcurrenceEps = 1e-12;
inline constexpr double kMubEps = 1e-10;
inline constexpr double kWeylSepEps = 1e-10;
inline constexpr double kMubUnbiasTol = 1e-10;

struct DetectorVerdict {
  Criterion criterion = Criterion::E1;
  bool fired = false;
  double value = 0.0;
  double threshold = 0.0;
};

/// E1: smallest eigenvalue of the partial transpose. NPT iff value < -kPptEps.
double ppt_min_eigenvalue(const BellDiagonalState& s);
DetectorVerdict ppt_verdict(const BellDiagonalState& s);

/// E2: trace norm of the realigned density matrix. Fires iff value > 1 + kRealignEps.
double realignment_sum(const BellDiagonalState& s);
DetectorVerdict realignment_verdict(const BellDiagonalState& s);

/// E3: quasi-pure approximation of the concurrence. Fires iff value > kConcurrenceEps.
double quasipure_concurrence(const BellDiagonalState& s);
DetectorVerdict concurrence_verdict(const BellDiagonalState& s);

/// d+1 mutually unbiased bases; basis vectors are the matrix columns.
struct MubSet {
  int d = 0;
  std::vector<ComplexMatrix> bases;

  /// Throws unless there are d+1 unitary bases that are pairwise unbiased.
  void validate(double tol = kMubUnbiasTol) const;
};

/// Complete MUB sets for d = 2, 3 and 4; other d throw DomainError.
MubSet standard_mubs(int d);

/// Default shift s of the first basis' partner vectors (2 for d=3, 3 for d=4).
int default_mub_shift(int d);

/// I_{d+1} is linear in c: I_{d+1}(s) = c . mu. Validates the set.
std::vector<double> mub_coefficients(const MubSet& mubs, int shift);

/// E4: I_{d+1}. Fires iff value > 2 + kMubEps.
double mub_sum(const BellDiagonalState& s, const MubSet& mubs, int shift);
DetectorVerdict mub_verdict(const BellDiagonalState& s, const MubSet& mubs, int shift);

/// S2: sum of |tr[(W_mu (x) W_nu)^dagger rho]| over all d^4 Weyl pairs.
/// Fires (separable) iff value <= 2 + kWeylSepEps.
double weyl_representation_sum(const BellDiagonalState& s);
DetectorVerdict weyl_representation_verdict(const BellDiagonalState& s);

}  // namespace bellclass
