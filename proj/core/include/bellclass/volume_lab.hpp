#pragma once

// Monte Carlo experiments: relative volumes of the enclosure polytope and of
// the PPT states, class shares, detector overlaps and CSV exports.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bellclass/classifier.hpp"

namespace bellclass {

/// Samples drawn per shard; shard i uses Rng::derive(seed, i).
inline constexpr std::size_t kShardSize = 4096;

struct Share {
  std::size_t hits = 0;
  std::size_t n = 0;
  double fraction() const { return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n); }
  double stderr_() const;
};

struct VolumeReport {
  int d = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  Share enclosure;         // within M_d
  Share ppt;               // within M_d
  Share ppt_in_enclosure;  // PPT states among the E_d samples
  double wall_seconds = 0.0;
  std::string fingerprint;
};

/// Uniform samples of M_d; requires n >= 1000.
VolumeReport estimate_volumes(int d, std::size_t n, std::uint64_t seed, int workers = 1);

/// n uniform samples of E_d with ids "s<index>", drawn shard-wise.
std::vector<LabeledState> sample_enclosure_corpus(int d, std::size_t n, std::uint64_t seed, int workers = 1);

struct ClassShareReport {
  std::uint64_t seed = 0;
  std::vector<LabeledState> states;
  std::vector<ClassificationRecord> records;
  ClassificationSummary summary;
};

ClassShareReport class_share_experiment(const Classifier& classifier, std::size_t n, std::uint64_t seed,
                                        int workers = 1);

inline constexpr std::array<Criterion, 4> kOverlapCriteria{Criterion::E2, Criterion::E3, Criterion::E4, Criterion::E5};

struct OverlapMatrix {
  std::size_t bound_states = 0;
  std::array<std::size_t, 4> detected{};      // per criterion, among BOUND records
  std::array<double, 4> mean_purity{};        // of the detected states; 0 without states or hits
  std::array<std::array<std::size_t, 4>, 4> joint{};
  std::array<std::array<std::size_t, 4>, 4> only{};  // only[a][b]: a fired, b did not

  std::size_t exclusive(std::size_t a, std::size_t b) const { return only[a][b]; }
};

/// Pairwise exclusive/joint detections among E2..E5 on BOUND records.
/// `states`, when non-empty, must align with `records` and enables purity.
OverlapMatrix detector_overlap(const std::vector<ClassificationRecord>& records,
                               const std::vector<LabeledState>& states = {});

/// CSV "x,y,z,color,label" with the four selected flat coordinates. Labels
/// are taken from `records` when it is non-empty (aligned with `states`).
void export_scatter(std::ostream& out, const std::vector<LabeledState>& states,
                    const std::vector<ClassificationRecord>& records, const std::array<int, 4>& indices);

/// L-infinity distance from the uniform state.
double distance_from_uniform(const BellDiagonalState& s);
/// Largest total weight on a single coset of an order-d subgroup.
double coset_concentration(const BellDiagonalState& s);

/// CSV "id,distance,concentration,label".
void conjecture_probe(std::ostream& out, const std::vector<LabeledState>& states,
                      const std::vector<ClassificationRecord>& records);

std::string volume_report_json(const VolumeReport& r, bool include_timing = false);
std::string class_share_json(const ClassShareReport& r);
std::string overlap_json(const OverlapMatrix& m, const std::string& fingerprint);

}  // namespace bellclass
