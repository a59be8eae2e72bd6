#pragma once

// Bell-diagonal entanglement witnesses W = sum kappa_{k,l} P_{k,l} (E5).
// A state is detected when c . kappa leaves the separable interval [L, U].

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bellclass/product_opt.hpp"
#include "bellclass/states.hpp"
#include "bellclass/symmetry.hpp"

namespace bellclass {

inline constexpr double kWitnessMargin = 1e-6;

struct WitnessConfig {
  ProductOptimizerConfig optimizer{};  // starts = 0 selects 64 * d
  double margin = kWitnessMargin;
};

struct WitnessMeta {
  int restarts = 0;       // optimizer starts per bound
  double margin = kWitnessMargin;
  std::uint64_t seed = 0; // stream the coefficients and starts were drawn from
  bool certified = false;
  std::string sampling = "uniform";
  std::string run;        // fingerprint of the producing run, if any
};

struct EntanglementWitness {
  int d = 0;
  std::vector<double> kappa;
  double lower = 0.0;
  double upper = 0.0;
  WitnessMeta meta;

  /// Hash of (d, kappa rounded to 12 decimals).
  std::string id() const;
};

/// c . kappa.
double witness_value(const EntanglementWitness& w, const BellDiagonalState& s);

/// Interval check: value < lower or value > upper.
bool detects(const EntanglementWitness& w, const BellDiagonalState& s);

struct WitnessBounds {
  double lower = 0.0;     // numerical minimum minus margin
  double upper = 0.0;     // numerical maximum plus margin
  double raw_min = 0.0;
  double raw_max = 0.0;
  int restarts = 0;
  bool certified = false; // both extrema reached by enough independent starts
};

/// Min and max of sum kappa_{k,l} |<Omega_{k,l}|a (x) b>|^2 over product
/// states. The raw extrema are also widened to cover every kernel vertex.
WitnessBounds certify_bounds(const std::vector<double>& kappa, int d, Rng& rng, const WitnessConfig& cfg = {});

/// Draws kappa uniformly from [-1, 1]^{d^2} until certification succeeds.
/// Throws std::runtime_error after `max_attempts` uncertified draws.
EntanglementWitness random_witness(int d, Rng& rng, const WitnessConfig& cfg = {}, int max_attempts = 20);

/// `count` certified witnesses; witness i is drawn from Rng::derive(seed, i),
/// so the bank does not depend on the worker count.
std::vector<EntanglementWitness> forge_bank(int d, std::size_t count, std::uint64_t seed, const WitnessConfig& cfg = {},
                                            int workers = 1);

/// Witnesses sorted by id, with the coefficients packed for batch evaluation.
class WitnessBank {
 public:
  WitnessBank() = default;
  explicit WitnessBank(std::vector<EntanglementWitness> witnesses);

  int d() const { return d_; }
  std::size_t size() const { return witnesses_.size(); }
  bool empty() const { return witnesses_.empty(); }
  const std::vector<EntanglementWitness>& witnesses() const { return witnesses_; }
  const EntanglementWitness& operator[](std::size_t i) const { return witnesses_[i]; }

  /// Index of the first witness (in id order) detecting the coefficient
  /// vector c, or nullopt.
  std::optional<std::size_t> first_detection(const std::vector<double>& c) const;

 private:
  int d_ = 0;
  std::vector<EntanglementWitness> witnesses_;
  std::vector<std::string> ids_;
  std::vector<double> packed_;  // size() x d^2, row-major
};

/// Id of the first detecting witness, scanning in id order.
std::optional<std::string> bank_check(const WitnessBank& bank, const BellDiagonalState& s);

// --- witness bank files: one JSON object per line ---
std::string to_json_line(const EntanglementWitness& w);
EntanglementWitness witness_from_json_line(const std::string& line);
void write_witness_bank(std::ostream& out, const std::vector<EntanglementWitness>& bank);
std::vector<EntanglementWitness> read_witness_bank(std::istream& in);

}  // namespace bellclass
