#pragma once

// Entanglement-class preserving symmetries of the magic simplex, stored as
// permutations of the flattened (k,l) coordinate indices.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bellclass/states.hpp"

namespace bellclass {

struct SymmetryPermutation {
  int d = 0;
  /// perm[i] is the image of flat index i; a state transforms as c'[perm[i]] = c[i].
  std::vector<int> perm;
  /// Generator word, rightmost applied first (diagnostics only).
  std::string label;

  static SymmetryPermutation identity(int d);

  /// Builds from a map on phase-space points.
  template <class F>
  static SymmetryPermutation from_map(int d, std::string label, F&& f) {
    SymmetryPermutation s{d, std::vector<int>(static_cast<std::size_t>(d) * d), std::move(label)};
    for (int i = 0; i < d * d; ++i) {
      const PhasePoint p = f(PhasePoint::from_flat(i, d));
      s.perm[static_cast<std::size_t>(i)] = mod(p.k, d) * d + mod(p.l, d);
    }
    return s;
  }

  bool is_bijection() const;
  SymmetryPermutation inverse() const;
  PhasePoint image(PhasePoint p) const { return PhasePoint::from_flat(perm[static_cast<std::size_t>(p.flat(d))], d); }
};

/// `outer` after `inner`.
SymmetryPermutation compose(const SymmetryPermutation& outer, const SymmetryPermutation& inner);

/// m, r, v and every translation t_{p,q}.
std::vector<SymmetryPermutation> generators(int d);

SymmetryPermutation momentum_inversion(int d);
SymmetryPermutation quarter_rotation(int d);
SymmetryPermutation vertical_shear(int d);
SymmetryPermutation translation(int d, int p, int q);

class SymmetryGroup {
 public:
  SymmetryGroup() = default;
  SymmetryGroup(int d, std::vector<SymmetryPermutation> elements);

  int d() const { return d_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<SymmetryPermutation>& elements() const { return elements_; }
  const SymmetryPermutation& operator[](std::size_t i) const { return elements_[i]; }

 private:
  int d_ = 0;
  std::vector<SymmetryPermutation> elements_;
};

/// Breadth-first closure of the generators under composition; identity first.
SymmetryGroup generate_group(int d);

/// Cached variant: reads `<dir>/group_d<d>.json` if present, otherwise
/// generates and writes it.
SymmetryGroup load_or_generate_group(int d, const std::filesystem::path& cache_dir);

void write_group_json(std::ostream& out, const SymmetryGroup& group);
SymmetryGroup read_group_json(std::istream& in);

BellDiagonalState apply(const SymmetryPermutation& sym, const BellDiagonalState& s);

/// Same action on an arbitrary coefficient vector (e.g. witness coefficients).
std::vector<double> apply(const SymmetryPermutation& sym, const std::vector<double>& v);

/// Distinct images of `s` under the group (coordinates compared at 12 decimals),
/// in order of first appearance.
std::vector<BellDiagonalState> orbit(const BellDiagonalState& s, const SymmetryGroup& group);

}  // namespace bellclass
