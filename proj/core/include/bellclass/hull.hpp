#pragma once

// Inner polytope approximation of the separable Bell-diagonal states (S1):
// certified separable vertices, hull membership by linear feasibility and
// explicit product-ensemble certificates.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "bellclass/product_opt.hpp"
#include "bellclass/states.hpp"
#include "bellclass/symmetry.hpp"

namespace bellclass {

/// Frobenius bound a stored certificate must meet.
inline constexpr double kCertificateTol = 1e-7;
/// Reconstruction bound for hull membership.
inline constexpr double kHullFeasibilityTol = 1e-9;

enum class Provenance { KernelCoset, OrbitImage, CertifiedExtension };
const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct ProductTerm {
  double weight = 0.0;
  ComplexVector a;
  ComplexVector b;
};

/// rho = sum_j weights[j] * T(|a_j><a_j| (x) |b_j><b_j|), where T is the
/// Weyl twirl (1/d^2) sum_{p,q} (W_pq (x) W_pq^*) . (W_pq (x) W_pq^*)^dagger
/// when `twirled` is set and the identity otherwise.
struct SeparabilityCertificate {
  std::vector<double> weights;
  std::vector<ComplexVector> a;
  std::vector<ComplexVector> b;
  bool twirled = true;

  /// The literal product ensemble (d^2 terms per entry when twirled).
  std::vector<ProductTerm> expand() const;

  /// || sum_j p_j (a_j a_j^dagger) (x) (b_j b_j^dagger) - rho(s) ||_F from the
  /// expanded ensemble, computed densely.
  double residual(const BellDiagonalState& s) const;

  /// Bell coordinates implied by the ensemble.
  std::vector<double> coordinates(int d) const;
};

struct SeparableVertex {
  BellDiagonalState state;
  Provenance provenance = Provenance::KernelCoset;
  std::optional<SeparabilityCertificate> certificate;
};

struct SeparableVertexSet {
  int d = 0;
  std::vector<SeparableVertex> vertices;
  /// When set, the hull is taken over every symmetry image of every vertex
  /// (images are enumerated on the fly instead of being stored).
  bool symmetric = false;
  /// Fingerprint of the run that produced the set (stored in the file header).
  std::string fingerprint;

  static SeparableVertexSet kernel(int d);
};

/// Appends the distinct symmetry images of every vertex, tagged OrbitImage.
SeparableVertexSet orbit_closure(const SeparableVertexSet& vs, const SymmetryGroup& group);

enum class HullStatus { Member, NotMember, SolverFailure };
const char* to_string(HullStatus s);

struct HullWeight {
  std::size_t vertex = 0;
  std::size_t symmetry = 0;  // group element index; 0 (identity) for non-symmetric sets
  double lambda = 0.0;
};

struct HullResult {
  HullStatus status = HullStatus::NotMember;
  std::vector<HullWeight> weights;
  double residual = 0.0;  // max-norm reconstruction error of the returned weights
  int iterations = 0;

  bool member() const { return status == HullStatus::Member; }
};

/// Repeated membership queries against one vertex set (phase-1 simplex over
/// the vertex columns). Immutable after construction; queries are thread-safe.
class HullOracle {
 public:
  /// `group` is required when `vs.symmetric` is set.
  HullOracle(const SeparableVertexSet& vs, const SymmetryGroup* group = nullptr);
  ~HullOracle();
  HullOracle(HullOracle&&) noexcept;
  HullOracle& operator=(HullOracle&&) noexcept;

  HullResult contains(const BellDiagonalState& s) const;

  /// Coordinates of sum lambda_i * (g_i v_i) for verification.
  std::vector<double> reconstruct(const std::vector<HullWeight>& weights) const;

  std::size_t column_count() const;
  int d() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

HullResult hull_membership(const SeparableVertexSet& vs, const BellDiagonalState& s,
                           const SymmetryGroup* group = nullptr);

struct SeparabilityConfig {
  int max_columns = 150;          // column-generation rounds
  ProductOptimizerConfig oracle{12, 300, 1e-10, 60, 1e-8, 1};
  double target_tol = 1e-11;      // Euclidean residual in coordinate space
};

/// Product states found while certifying; shared across calls as a warm start.
struct ProductPool {
  int d = 0;
  std::vector<ProductPoint> points;
  std::vector<std::vector<double>> coords;

  void add(ProductPoint p);
};

/// Searches for an explicit separable decomposition of a PPT state by column
/// generation over twirled product states: nonnegative least squares on the
/// current pool alternates with maximizing the residual direction over
/// product states. Returns nullopt when no decomposition is found.
std::optional<SeparabilityCertificate> certify_separable(const BellDiagonalState& s, Rng& rng,
                                                         const SeparabilityConfig& cfg = {},
                                                         ProductPool* pool = nullptr);

struct ExtensionConfig {
  double resolution = 1e-3;        // bisection resolution of the mixing parameter
  bool keep_product_points = true; // also add the pool's twirled product states
  int max_product_points = 0;      // cap on product-point vertices per call; 0 = unlimited
  SeparabilityConfig certify;
};

/// Grows the set: marks it symmetric when a group is supplied and adds
/// `budget` line-search vertices (farthest certifiable point from the
/// maximally mixed state towards a random PPT target). Never removes vertices.
SeparableVertexSet extend_vertices(const SeparableVertexSet& vs, Rng& rng, int budget,
                                   const ExtensionConfig& cfg = {}, const SymmetryGroup* group = nullptr);

// --- vertex-set files (JSON-lines; first line is a header) ---
void write_vertex_set(std::ostream& out, const SeparableVertexSet& vs);
SeparableVertexSet read_vertex_set(std::istream& in);

}  // namespace bellclass
