#pragma once

// Classification of Bell-diagonal states into FREE / SEP / BOUND /
// PPT_UNKNOWN from the entanglement (E1-E5) and separability (S1, S2)
// criteria, optionally evaluated over the symmetry orbit.

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bellclass/detectors.hpp"
#include "bellclass/hull.hpp"
#include "bellclass/states.hpp"
#include "bellclass/symmetry.hpp"
#include "bellclass/witness.hpp"

namespace bellclass {

enum class Label { Free, Sep, Bound, PptUnknown };
const char* to_string(Label l);
Label label_from_string(const std::string& s);

struct Evidence {
  Criterion criterion = Criterion::E1;
  bool fired = false;
  double value = 0.0;
  double threshold = 0.0;
  std::size_t orbit_index = 0;           // group element the verdict was obtained on; 0 is the identity
  std::optional<std::string> witness_id; // E5
  std::optional<HullStatus> hull_status; // S1
};

struct ClassificationRecord {
  std::string id;
  Label label = Label::PptUnknown;
  std::vector<Evidence> evidence;
  bool orbit_used = false;  // the decisive verdict came from a non-trivial symmetry image
  bool conflict = false;    // a separability and an entanglement criterion both fired
  std::string fingerprint;

  /// Whether `c` fired anywhere in the evidence.
  bool fired(Criterion c) const;
};

/// Everything the pipeline consults besides the state. Missing optional
/// resources simply disable the corresponding criterion.
struct ClassifierResources {
  int d = 0;
  SymmetryGroup group;                        // may be empty when orbits are not used
  WitnessBank bank;                           // E5
  std::optional<SeparableVertexSet> vertices; // S1
  std::optional<MubSet> mubs;                 // E4
  int mub_shift = 0;
};

struct ResourceBudget {
  std::size_t bank_size = 2000;
  int extension_budget = -1;  // line-search vertices; negative selects the per-d default
  bool symmetric_hull = true;
};

/// Default extension budget per dimension.
int default_extension_budget(int d);

/// Generates the group, a witness bank and an extended vertex set from one
/// seed (bank from stream 1, vertices from stream 2). MUBs are attached for
/// d = 3 and 4.
ClassifierResources build_resources(int d, std::uint64_t seed, const ResourceBudget& budget = {}, int workers = 1);

struct ClassifierConfig {
  bool use_orbit = true;
  /// Evaluate every criterion on the state and, with use_orbit, on every
  /// orbit image, instead of stopping at the first decisive verdict.
  bool full_evidence = false;
  /// Skip orbit evaluation of criteria that are constant on orbits (E2, S2,
  /// and S1 for symmetric vertex sets).
  bool skip_invariant = true;
};

/// Config-independent summary of the resources, for fingerprints.
std::string describe(const ClassifierResources& r);

class Classifier {
 public:
  Classifier(ClassifierResources resources, ClassifierConfig cfg = {});
  ~Classifier();
  Classifier(Classifier&&) noexcept;

  int d() const;
  const ClassifierConfig& config() const;
  const ClassifierResources& resources() const;
  /// Stable hash of the configuration and resources.
  const std::string& fingerprint() const;

  ClassificationRecord classify(const BellDiagonalState& s, const std::string& id = {}) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ClassificationSummary {
  int d = 0;
  std::size_t total = 0;
  std::array<std::size_t, 4> counts{};  // indexed by Label
  std::size_t conflicts = 0;
  std::size_t orbit_decided = 0;
  /// Among BOUND records: how many had each entanglement criterion fire (E2..E5).
  std::array<std::size_t, 4> bound_detections{};
  /// Among SEP records: how many had S1 / S2 fire.
  std::array<std::size_t, 2> sep_detections{};
  std::string fingerprint;

  std::size_t count(Label l) const { return counts[static_cast<std::size_t>(l)]; }
  std::size_t ppt() const { return total - count(Label::Free); }
  /// Share among PPT states (0 when there are none).
  double ppt_share(Label l) const;
  /// FREE, SEP and BOUND all count as classified.
  double success_rate() const;
  /// Share of BOUND records detected by E2..E5.
  double bound_detection_share(Criterion c) const;
};

ClassificationSummary summarize(const std::vector<ClassificationRecord>& records, int d,
                                const std::string& fingerprint = {});

/// Classifies every state (homogeneous d) with `workers` threads; output
/// order matches input order.
std::vector<ClassificationRecord> classify_batch(const Classifier& classifier, const std::vector<LabeledState>& states,
                                                 int workers = 1);

// --- files ---
std::string to_json_line(const ClassificationRecord& r);
ClassificationRecord record_from_json_line(const std::string& line);
void write_records(std::ostream& out, const std::vector<ClassificationRecord>& records);
std::vector<ClassificationRecord> read_records(std::istream& in);
std::string summary_json(const ClassificationSummary& s);

}  // namespace bellclass
