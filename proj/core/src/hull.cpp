#include "bellclass/hull.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "bellclass/detectors.hpp"
#include "json.hpp"
#include "nnls.hpp"

namespace bellclass {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::KernelCoset: return "KERNEL_COSET";
    case Provenance::OrbitImage: return "ORBIT_IMAGE";
    case Provenance::CertifiedExtension: return "CERTIFIED_EXTENSION";
  }
  return "?";
}

Provenance provenance_from_string(const std::string& s) {
  for (auto p : {Provenance::KernelCoset, Provenance::OrbitImage, Provenance::CertifiedExtension})
    if (s == to_string(p)) return p;
  throw DomainError("unknown provenance: " + s);
}

const char* to_string(HullStatus s) {
  switch (s) {
    case HullStatus::Member: return "member";
    case HullStatus::NotMember: return "not_member";
    case HullStatus::SolverFailure: return "solver_failure";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// certificates

std::vector<ProductTerm> SeparabilityCertificate::expand() const {
  std::vector<ProductTerm> out;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const auto d = static_cast<int>(a[j].size());
    if (!twirled) {
      out.push_back({weights[j], a[j], b[j]});
      continue;
    }
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) {
        const ComplexMatrix w = weyl_operator(d, p, q);
        out.push_back({weights[j] / (d * d), w * a[j], w.conjugate() * b[j]});
      }
  }
  return out;
}

double SeparabilityCertificate::residual(const BellDiagonalState& s) const {
  const int d = s.d();
  ComplexMatrix rho = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& term : expand()) {
    const ComplexVector a_n = term.a / term.a.norm();
    const ComplexVector b_n = term.b / term.b.norm();
    const ComplexVector ab = kron(a_n, b_n);
    rho.noalias() += term.weight * (ab * ab.adjoint());
  }
  return (rho - density_matrix(s)).norm();
}

std::vector<double> SeparabilityCertificate::coordinates(int d) const {
  std::vector<double> c(static_cast<std::size_t>(d) * d, 0.0);
  if (twirled) {
    for (std::size_t j = 0; j < weights.size(); ++j) {
      const auto p = product_coordinates(a[j], b[j]);
      for (std::size_t t = 0; t < c.size(); ++t) c[t] += weights[j] * p[t];
    }
    return c;
  }
  for (const auto& term : expand()) {
    const auto p = product_coordinates(term.a, term.b);
    for (std::size_t t = 0; t < c.size(); ++t) c[t] += term.weight * p[t];
  }
  return c;
}

// ---------------------------------------------------------------------------
// vertex sets

SeparableVertexSet SeparableVertexSet::kernel(int d) {
  SeparableVertexSet vs{d, {}, false, {}};
  for (auto& kv : kernel_vertices(d)) vs.vertices.push_back({std::move(kv.state), Provenance::KernelCoset, {}});
  return vs;
}

namespace {

std::vector<std::int64_t> fingerprint(std::span<const double> c) {
  std::vector<std::int64_t> key(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) key[i] = std::llround(c[i] * 1e12);
  return key;
}

}  // namespace

SeparableVertexSet orbit_closure(const SeparableVertexSet& vs, const SymmetryGroup& group) {
  if (group.d() != vs.d) throw DomainError("group and vertex set dimension differ");
  SeparableVertexSet out = vs;
  std::set<std::vector<std::int64_t>> seen;
  for (const auto& v : vs.vertices) seen.insert(fingerprint(v.state.coords()));
  for (const auto& v : vs.vertices)
    for (const auto& g : group.elements()) {
      auto image = apply(g, v.state);
      if (!seen.insert(fingerprint(image.coords())).second) continue;
      std::optional<SeparabilityCertificate> cert;
      out.vertices.push_back({std::move(image), Provenance::OrbitImage, std::move(cert)});
    }
  return out;
}

// ---------------------------------------------------------------------------
// hull membership: phase-1 simplex

struct HullOracle::Impl {
  int d = 0;
  int m = 0;                       // rows: d^2 - 1 coordinates plus normalization
  Eigen::MatrixXd vertices;        // d^2 x n
  std::vector<std::vector<int>> perms;  // one per symmetry block; identity only if not symmetric
  std::size_t n_vertices = 0;

  std::size_t columns() const { return n_vertices * perms.size(); }

  void column(std::size_t j, Eigen::VectorXd& out) const {
    const std::size_t g = j / n_vertices;
    const std::size_t v = j % n_vertices;
    out.resize(m);
    for (int i = 0; i < m; ++i) out(perms[g][static_cast<std::size_t>(i)]) = vertices(i, static_cast<Eigen::Index>(v));
    out(m - 1) = 1.0;
  }

  std::vector<double> image(std::size_t j) const {
    const std::size_t g = j / n_vertices;
    const std::size_t v = j % n_vertices;
    std::vector<double> c(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) c[static_cast<std::size_t>(perms[g][static_cast<std::size_t>(i)])] = vertices(i, static_cast<Eigen::Index>(v));
    return c;
  }

  /// Column maximizing y . A_j over a window of symmetry blocks starting at
  /// `cursor`; returns npos if no score exceeds tol anywhere.
  std::size_t price(const Eigen::VectorXd& y, double tol, std::size_t& cursor, bool full) const {
    const std::size_t blocks = perms.size();
    const std::size_t min_scan = full ? columns() : std::max<std::size_t>(20000, n_vertices);
    Eigen::VectorXd yg(m);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double best_score = tol;
    std::size_t scanned = 0;
    for (std::size_t t = 0; t < blocks; ++t) {
      const std::size_t g = (cursor + t) % blocks;
      // (g v) . y~ = sum_i v_i y~[perm_g(i)], with y~ = y without the normalization row.
      for (int i = 0; i < m; ++i) {
        const int target = perms[g][static_cast<std::size_t>(i)];
        yg(i) = target == m - 1 ? 0.0 : y(target);
      }
      const Eigen::VectorXd scores = vertices.transpose() * yg;
      for (Eigen::Index v = 0; v < scores.size(); ++v) {
        const double sc = scores(v) + y(m - 1);
        if (sc > best_score) {
          best_score = sc;
          best = g * n_vertices + static_cast<std::size_t>(v);
        }
      }
      scanned += n_vertices;
      if (best != std::numeric_limits<std::size_t>::max() && scanned >= min_scan) {
        cursor = (g + 1) % blocks;
        return best;
      }
    }
    return best;
  }

  HullResult solve(const BellDiagonalState& s) const;
};

HullResult HullOracle::Impl::solve(const BellDiagonalState& s) const {
  constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  constexpr double kPivotTol = 1e-11;
  constexpr double kPriceTol = 1e-12;
  constexpr double kPhaseOneTol = 1e-10;
  const int max_iterations = 200 * m + 2000;

  HullResult result;
  Eigen::VectorXd rhs(m);
  for (int i = 0; i + 1 < m; ++i) rhs(i) = std::max(0.0, s[static_cast<std::size_t>(i)]);
  rhs(m - 1) = 1.0;

  // Basis entries: column index, or npos - i for artificial i.
  std::vector<std::size_t> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = npos - static_cast<std::size_t>(i);
  auto is_artificial = [&](std::size_t b) { return b > npos - static_cast<std::size_t>(m); };

  Eigen::MatrixXd binv = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd x = rhs;
  Eigen::VectorXd col(m), dir(m), cost(m), y(m);
  std::size_t cursor = 0;
  int degenerate_run = 0;

  auto refactor = [&]() {
    Eigen::MatrixXd bmat(m, m);
    for (int i = 0; i < m; ++i) {
      const std::size_t b = basis[static_cast<std::size_t>(i)];
      if (is_artificial(b)) {
        bmat.col(i).setZero();
        bmat(static_cast<Eigen::Index>(npos - b), i) = 1.0;
      } else {
        column(b, col);
        bmat.col(i) = col;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    binv = lu.inverse();
    x = binv * rhs;
  };

  for (int it = 0; it < max_iterations; ++it) {
    result.iterations = it;
    if (it > 0 && it % 64 == 0) refactor();
    for (int i = 0; i < m; ++i) cost(i) = is_artificial(basis[static_cast<std::size_t>(i)]) ? 1.0 : 0.0;
    const double objective = cost.dot(x);
    if (objective <= kPhaseOneTol) break;
    y = binv.transpose() * cost;

    const bool bland = degenerate_run > 50;
    const std::size_t entering = price(y, kPriceTol, cursor, bland);
    if (entering == npos) {
      result.status = HullStatus::NotMember;
      return result;
    }
    column(entering, col);
    dir = binv * col;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (dir(i) <= kPivotTol) continue;
      const double ratio = std::max(0.0, x(i)) / dir(i);
      bool take = ratio < best_ratio - 1e-14;
      if (!take && leave >= 0 && ratio <= best_ratio + 1e-14) {
        // ties: drive artificials out first, then prefer the larger pivot
        const bool cand_art = is_artificial(basis[static_cast<std::size_t>(i)]);
        const bool cur_art = is_artificial(basis[static_cast<std::size_t>(leave)]);
        take = (cand_art && !cur_art) || (cand_art == cur_art && dir(i) > dir(leave));
      }
      if (take) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) {
      result.status = HullStatus::SolverFailure;
      return result;
    }
    degenerate_run = best_ratio <= 1e-14 ? degenerate_run + 1 : 0;

    const double pivot = dir(leave);
    const Eigen::RowVectorXd pivot_row = binv.row(leave) / pivot;
    for (int i = 0; i < m; ++i)
      if (i != leave) binv.row(i) -= dir(i) * pivot_row;
    binv.row(leave) = pivot_row;
    const double theta = std::max(0.0, x(leave)) / pivot;
    x -= theta * dir;
    x(leave) = theta;
    basis[static_cast<std::size_t>(leave)] = entering;
    if (it + 1 == max_iterations) {
      result.status = HullStatus::SolverFailure;
      return result;
    }
  }

  refactor();
  std::vector<double> recon(s.size(), 0.0);
  double lambda_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const std::size_t b = basis[static_cast<std::size_t>(i)];
    if (is_artificial(b) || x(i) <= 0.0) continue;
    const double lambda = x(i);
    result.weights.push_back({b % n_vertices, b / n_vertices, lambda});
    const auto c = image(b);
    for (std::size_t t = 0; t < c.size(); ++t) recon[t] += lambda * c[t];
    lambda_sum += lambda;
  }
  double residual = std::abs(lambda_sum - 1.0);
  for (std::size_t t = 0; t < recon.size(); ++t) residual = std::max(residual, std::abs(recon[t] - s[t]));
  result.residual = residual;
  result.status = residual <= kHullFeasibilityTol ? HullStatus::Member : HullStatus::SolverFailure;
  return result;
}

HullOracle::HullOracle(const SeparableVertexSet& vs, const SymmetryGroup* group) : impl_(std::make_unique<Impl>()) {
  require_dimension(vs.d);
  impl_->d = vs.d;
  impl_->m = vs.d * vs.d;
  impl_->n_vertices = vs.vertices.size();
  impl_->vertices.resize(impl_->m, static_cast<Eigen::Index>(vs.vertices.size()));
  for (std::size_t v = 0; v < vs.vertices.size(); ++v) {
    if (vs.vertices[v].state.d() != vs.d) throw DomainError("vertex dimension differs from vertex set");
    for (int i = 0; i < impl_->m; ++i)
      impl_->vertices(i, static_cast<Eigen::Index>(v)) = vs.vertices[v].state[static_cast<std::size_t>(i)];
  }
  if (vs.symmetric) {
    if (group == nullptr) throw DomainError("symmetric vertex set requires the symmetry group");
    if (group->d() != vs.d) throw DomainError("group and vertex set dimension differ");
    for (const auto& g : group->elements()) impl_->perms.push_back(g.perm);
  } else {
    impl_->perms.push_back(SymmetryPermutation::identity(vs.d).perm);
  }
}

HullOracle::~HullOracle() = default;
HullOracle::HullOracle(HullOracle&&) noexcept = default;
HullOracle& HullOracle::operator=(HullOracle&&) noexcept = default;

HullResult HullOracle::contains(const BellDiagonalState& s) const {
  if (s.d() != impl_->d) throw DomainError("state and vertex set dimension differ");
  if (impl_->n_vertices == 0) return {};
  return impl_->solve(s);
}

std::vector<double> HullOracle::reconstruct(const std::vector<HullWeight>& weights) const {
  std::vector<double> c(static_cast<std::size_t>(impl_->m), 0.0);
  for (const auto& w : weights) {
    const auto img = impl_->image(w.symmetry * impl_->n_vertices + w.vertex);
    for (std::size_t t = 0; t < c.size(); ++t) c[t] += w.lambda * img[t];
  }
  return c;
}

std::size_t HullOracle::column_count() const { return impl_->columns(); }
int HullOracle::d() const { return impl_->d; }

HullResult hull_membership(const SeparableVertexSet& vs, const BellDiagonalState& s, const SymmetryGroup* group) {
  if (vs.d != s.d()) throw DomainError("state and vertex set dimension differ");
  return HullOracle(vs, group).contains(s);
}

// ---------------------------------------------------------------------------
// certification by column generation

void ProductPool::add(ProductPoint p) {
  coords.push_back(product_coordinates(p.a, p.b));
  points.push_back(std::move(p));
}

std::optional<SeparabilityCertificate> certify_separable(const BellDiagonalState& s, Rng& rng,
                                                         const SeparabilityConfig& cfg, ProductPool* shared) {
  const int d = s.d();
  ProductPool local{d, {}, {}};
  ProductPool& pool = shared ? *shared : local;
  if (pool.d == 0) pool.d = d;
  if (pool.d != d) throw DomainError("product pool dimension differs from state");
  const auto n_coords = static_cast<Eigen::Index>(s.size());
  Eigen::VectorXd target(n_coords);
  for (Eigen::Index i = 0; i < n_coords; ++i) target(i) = s[static_cast<std::size_t>(i)];

  Eigen::VectorXd weights;
  for (int round = 0; round <= cfg.max_columns; ++round) {
    Eigen::VectorXd residual = target;
    Eigen::MatrixXd a(n_coords, static_cast<Eigen::Index>(pool.coords.size()));
    for (std::size_t j = 0; j < pool.coords.size(); ++j)
      for (Eigen::Index i = 0; i < n_coords; ++i) a(i, static_cast<Eigen::Index>(j)) = pool.coords[j][static_cast<std::size_t>(i)];
    if (a.cols() > 0) {
      weights = detail::nnls(a, target);
      residual = target - a * weights;
    }
    if (residual.norm() <= cfg.target_tol) {
      SeparabilityCertificate cert;
      double total = weights.sum();
      for (Eigen::Index j = 0; j < weights.size(); ++j) {
        if (weights(j) <= 0.0) continue;
        cert.weights.push_back(weights(j) / total);
        cert.a.push_back(pool.points[static_cast<std::size_t>(j)].a);
        cert.b.push_back(pool.points[static_cast<std::size_t>(j)].b);
      }
      if (cert.residual(s) <= kCertificateTol) return cert;
      return std::nullopt;
    }
    if (round == cfg.max_columns) break;
    // Most violated direction: maximize residual . c(a, b) over product states.
    std::vector<double> kappa(residual.data(), residual.data() + residual.size());
    auto found = maximize_over_products(kappa, d, rng, cfg.oracle);
    double current = 0.0;
    if (a.cols() > 0) current = residual.dot(a * weights);
    if (found.best.value <= current + 1e-14) return std::nullopt;  // residual direction separates s
    pool.add(std::move(found.best));
  }
  return std::nullopt;
}

SeparableVertexSet extend_vertices(const SeparableVertexSet& vs, Rng& rng, int budget, const ExtensionConfig& cfg,
                                   const SymmetryGroup* group) {
  if (budget <= 0) return vs;
  SeparableVertexSet out = vs;
  if (group != nullptr) {
    if (group->d() != vs.d) throw DomainError("group and vertex set dimension differ");
    out.symmetric = true;
  }
  const int d = vs.d;
  const auto uniform = BellDiagonalState::uniform(d);
  ProductPool pool{d, {}, {}};
  std::set<std::vector<std::int64_t>> seen;
  for (const auto& v : out.vertices) seen.insert(fingerprint(v.state.coords()));
  std::vector<SeparabilityCertificate> accepted;

  auto add_vertex = [&](BellDiagonalState st, SeparabilityCertificate cert) {
    if (!seen.insert(fingerprint(st.coords())).second) return;
    accepted.push_back(cert);
    out.vertices.push_back({std::move(st), Provenance::CertifiedExtension, std::move(cert)});
  };

  for (int n = 0; n < budget; ++n) {
    BellDiagonalState target;
    do {
      target = sample_enclosure(d, rng);
    } while (ppt_min_eigenvalue(target) < -kPptEps);

    if (auto cert = certify_separable(target, rng, cfg.certify, &pool)) {
      add_vertex(target, std::move(*cert));
      continue;
    }
    double lo = 0.0, hi = 1.0;
    std::optional<SeparabilityCertificate> best;
    BellDiagonalState best_state;
    while (hi - lo > cfg.resolution) {
      const double mid = 0.5 * (lo + hi);
      auto x = mix(target, uniform, mid);
      if (auto cert = certify_separable(x, rng, cfg.certify, &pool)) {
        lo = mid;
        best = std::move(cert);
        best_state = std::move(x);
      } else {
        hi = mid;
      }
    }
    if (best) add_vertex(std::move(best_state), std::move(*best));
  }

  if (cfg.keep_product_points) {
    int added = 0;
    for (const auto& cert : accepted)
      for (std::size_t j = 0; j < cert.weights.size(); ++j) {
        if (cfg.max_product_points > 0 && added >= cfg.max_product_points) break;
        SeparabilityCertificate single{{1.0}, {cert.a[j]}, {cert.b[j]}, true};
        auto c = single.coordinates(d);
        const double sum = std::accumulate(c.begin(), c.end(), 0.0);
        for (double& x : c) x /= sum;
        BellDiagonalState st(d, std::move(c));
        if (!seen.insert(fingerprint(st.coords())).second) continue;
        out.vertices.push_back({std::move(st), Provenance::CertifiedExtension, std::move(single)});
        ++added;
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// files

namespace {

nlohmann::json vector_json(const ComplexVector& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

ComplexVector vector_from_json(const nlohmann::json& j) {
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = Complex(j[i][0].get<double>(), j[i][1].get<double>());
  return v;
}

}  // namespace

void write_vertex_set(std::ostream& out, const SeparableVertexSet& vs) {
  nlohmann::json header{{"d", vs.d}, {"symmetric", vs.symmetric}, {"count", vs.vertices.size()}};
  if (!vs.fingerprint.empty()) header["fingerprint"] = vs.fingerprint;
  out << header.dump() << '\n';
  for (const auto& v : vs.vertices) {
    nlohmann::json j{{"c", v.state.vector()}, {"provenance", to_string(v.provenance)}};
    if (v.certificate) {
      auto a = nlohmann::json::array(), b = nlohmann::json::array();
      for (const auto& x : v.certificate->a) a.push_back(vector_json(x));
      for (const auto& x : v.certificate->b) b.push_back(vector_json(x));
      j["certificate"] = {{"weights", v.certificate->weights}, {"twirled", v.certificate->twirled}, {"a", a}, {"b", b}};
    }
    out << j.dump() << '\n';
  }
}

SeparableVertexSet read_vertex_set(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("vertex file is empty");
  const auto header = nlohmann::json::parse(line);
  SeparableVertexSet vs{header.at("d").get<int>(), {}, header.value("symmetric", false),
                        header.value("fingerprint", std::string())};
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line);
    SeparableVertex v{BellDiagonalState(vs.d, j.at("c").get<std::vector<double>>()),
                      provenance_from_string(j.at("provenance").get<std::string>()), {}};
    if (j.contains("certificate")) {
      const auto& cj = j["certificate"];
      SeparabilityCertificate cert;
      cert.weights = cj.at("weights").get<std::vector<double>>();
      cert.twirled = cj.value("twirled", true);
      for (const auto& x : cj.at("a")) cert.a.push_back(vector_from_json(x));
      for (const auto& x : cj.at("b")) cert.b.push_back(vector_from_json(x));
      v.certificate = std::move(cert);
    }
    vs.vertices.push_back(std::move(v));
  }
  if (header.contains("count") && header["count"].get<std::size_t>() != vs.vertices.size())
    throw std::runtime_error("vertex file is truncated");
  return vs;
}

}  // namespace bellclass
