#pragma once

// Bell-diagonal states: coordinates in the magic simplex, density matrices,
// polytope membership and uniform samplers.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bellclass/rng.hpp"
#include "bellclass/weyl.hpp"

namespace bellclass {

/// Slack tolerated on negative coordinates and on the normalization.
inline constexpr double kNormSlack = 1e-12;

/// A point of the magic simplex: mixing probabilities c_{k,l}, flattened as
/// k * d + l.
class BellDiagonalState {
 public:
  BellDiagonalState() = default;

  /// Validates nonnegativity (up to kNormSlack) and normalization.
  BellDiagonalState(int d, std::vector<double> c);

  static BellDiagonalState uniform(int d);
  static BellDiagonalState indicator(int d, int k, int l);

  int d() const { return d_; }
  std::size_t size() const { return c_.size(); }
  std::span<const double> coords() const { return c_; }
  const std::vector<double>& vector() const { return c_; }
  double operator[](std::size_t i) const { return c_[i]; }
  double at(int k, int l) const { return c_[static_cast<std::size_t>(mod(k, d_) * d_ + mod(l, d_))]; }

  double max_coord() const;
  /// tr(rho^2) = sum c^2 for Bell-diagonal states.
  double purity() const;

  friend bool operator==(const BellDiagonalState&, const BellDiagonalState&) = default;

 private:
  int d_ = 0;
  std::vector<double> c_;
};

/// Convex combination lambda * a + (1 - lambda) * b.
BellDiagonalState mix(const BellDiagonalState& a, const BellDiagonalState& b, double lambda);

/// rho = sum c_{k,l} P_{k,l} as a dense d^2 x d^2 matrix.
ComplexMatrix density_matrix(const BellDiagonalState& s);

/// tr[P_{k,l} rho] for every (k,l); inverts density_matrix on Bell-diagonal input.
std::vector<double> bell_coordinates(const ComplexMatrix& rho, int d);

/// Uniform draw from the simplex M_d (normalized unit exponentials).
BellDiagonalState sample_simplex(int d, Rng& rng);

/// Uniform draw from the enclosure polytope E_d by rejection from M_d.
/// `proposals`, when given, is incremented by the number of simplex draws used.
BellDiagonalState sample_enclosure(int d, Rng& rng, std::size_t* proposals = nullptr);

/// All coordinates <= 1/d (inclusive, with kNormSlack).
bool in_enclosure(const BellDiagonalState& s);

struct KernelVertex {
  PhaseSubgroup subgroup;
  BellDiagonalState state;
};

/// Mass 1/d on each point of a coset.
BellDiagonalState coset_state(const PhaseSubgroup& coset);

/// One vertex per coset of every order-d subgroup.
std::vector<KernelVertex> kernel_vertices(int d);

/// Bell coordinates of the twirled product state |a><a| (x) |b><b|:
/// c_{k,l} = |<Omega_{k,l}|a (x) b>|^2. Inputs need not be normalized.
std::vector<double> product_coordinates(const ComplexVector& a, const ComplexVector& b);

/// Amplitudes <Omega_{k,l}|a (x) b>, flattened as k * d + l.
ComplexVector product_amplitudes(const ComplexVector& a, const ComplexVector& b);

// --- JSON-lines state files: {"d": int, "c": [...], "id": "..."} ---

struct LabeledState {
  std::string id;
  BellDiagonalState state;
};

/// One JSON object, no trailing newline.
std::string to_json_line(const LabeledState& s);
LabeledState labeled_state_from_json_line(const std::string& line);

void write_states_jsonl(std::ostream& out, std::span<const LabeledState> states);
std::vector<LabeledState> read_states_jsonl(std::istream& in);

}  // namespace bellclass
