// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]   (default: 1 2 3 4 5 6 7 8)

#include <array>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bellclass/classifier.hpp"
#include "bellclass/detectors.hpp"
#include "bellclass/hull.hpp"
#include "bellclass/parallel.hpp"
#include "bellclass/symmetry.hpp"
#include "bellclass/volume_lab.hpp"
#include "bellclass/weyl.hpp"
#include "bellclass/witness.hpp"

using namespace bellclass;

namespace {

constexpr std::uint64_t kSeed = 20240611;

class Check {
 public:
  explicit Check(int criterion) : criterion_(criterion) {}

  void expect(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", buf);
    std::fflush(stdout);
    if (!ok) {
      ++failures_;
      if (first_failure_.empty()) first_failure_ = buf;
    }
  }

  bool finish(double seconds) const {
    if (failures_ == 0)
      std::printf("criterion %d: PASS (%.1f s)\n", criterion_, seconds);
    else
      std::printf("criterion %d: FAIL (%d failed; first: %s) (%.1f s)\n", criterion_, failures_, first_failure_.c_str(),
                  seconds);
    std::fflush(stdout);
    return failures_ == 0;
  }

 private:
  int criterion_;
  int failures_ = 0;
  std::string first_failure_;
};

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

int workers() { return default_workers(); }

// --- 1: algebra ---

void algebra(Check& c) {
  for (int d = 2; d <= 5; ++d) {
    double mult = 0.0, adj = 0.0, unit = 0.0;
    for (int k1 = 0; k1 < d; ++k1)
      for (int l1 = 0; l1 < d; ++l1) {
        const ComplexMatrix w1 = weyl_operator(d, k1, l1);
        const ComplexMatrix expected_adj =
            omega(d, static_cast<long long>(k1) * l1) * weyl_operator(d, mod(-k1, d), mod(-l1, d));
        adj = std::max(adj, max_abs(w1.adjoint() - expected_adj));
        unit = std::max(unit, max_abs(w1.adjoint() * w1 - ComplexMatrix::Identity(d, d)));
        for (int k2 = 0; k2 < d; ++k2)
          for (int l2 = 0; l2 < d; ++l2) {
            const ComplexMatrix lhs = w1 * weyl_operator(d, k2, l2);
            const ComplexMatrix rhs =
                omega(d, static_cast<long long>(l1) * k2) * weyl_operator(d, mod(k1 + k2, d), mod(l1 + l2, d));
            mult = std::max(mult, max_abs(lhs - rhs));
          }
      }
    c.expect(mult <= 1e-10, "d=%d Weyl product rule, max error %.2e", d, mult);
    c.expect(adj <= 1e-10 && unit <= 1e-10, "d=%d Weyl adjoint/unitarity, max error %.2e / %.2e", d, adj, unit);

    double ortho = 0.0;
    ComplexMatrix sum = ComplexMatrix::Zero(d * d, d * d);
    std::vector<ComplexMatrix> projectors;
    for (int a = 0; a < d * d; ++a) projectors.push_back(bell_projector(d, a / d, a % d));
    for (int a = 0; a < d * d; ++a) {
      sum += projectors[static_cast<std::size_t>(a)];
      for (int b = 0; b < d * d; ++b) {
        const Complex tr = (projectors[static_cast<std::size_t>(a)] * projectors[static_cast<std::size_t>(b)]).trace();
        ortho = std::max(ortho, std::abs(tr - Complex(a == b ? 1.0 : 0.0)));
      }
    }
    const double complete = max_abs(sum - ComplexMatrix::Identity(d * d, d * d));
    c.expect(ortho <= 1e-10 && complete <= 1e-10, "d=%d Bell projectors orthonormal %.2e, complete %.2e", d, ortho,
             complete);
  }
  for (int d = 2; d <= 4; ++d) {
    const auto m = standard_mubs(d);
    double worst = 0.0;
    for (std::size_t a = 0; a < m.bases.size(); ++a)
      for (std::size_t b = 0; b < m.bases.size(); ++b)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            const double ov = std::norm(m.bases[a].col(i).dot(m.bases[b].col(j)));
            const double target = a == b ? (i == j ? 1.0 : 0.0) : 1.0 / d;
            worst = std::max(worst, std::abs(ov - target));
          }
    c.expect(m.bases.size() == static_cast<std::size_t>(d + 1) && worst <= 1e-10,
             "d=%d MUB set: %zu bases, max overlap error %.2e", d, m.bases.size(), worst);
  }
}

// --- 2: structure counts ---

void structure(Check& c) {
  const std::map<int, std::array<std::size_t, 3>> expected{{2, {24, 3, 6}}, {3, {432, 4, 12}}, {4, {1536, 7, 28}}};
  for (const auto& [d, want] : expected) {
    const auto group = generate_group(d);
    c.expect(group.size() == want[0], "d=%d symmetry group size %zu (want %zu)", d, group.size(), want[0]);
    // Brute force: order-d subsets of Z_d x Z_d closed under addition.
    std::set<std::vector<int>> subgroups;
    for (int g1 = 0; g1 < d * d; ++g1)
      for (int g2 = 0; g2 < d * d; ++g2) {
        std::set<int> span;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            span.insert(mod(a * (g1 / d) + b * (g2 / d), d) * d + mod(a * (g1 % d) + b * (g2 % d), d));
        if (static_cast<int>(span.size()) == d) subgroups.insert({span.begin(), span.end()});
      }
    const auto listed = enumerate_order_d_subgroups(d);
    const auto cosets = enumerate_cosets(d);
    c.expect(listed.size() == want[1] && subgroups.size() == want[1], "d=%d order-d subgroups %zu, brute force %zu (want %zu)",
             d, listed.size(), subgroups.size(), want[1]);
    c.expect(cosets.size() == want[2] && subgroups.size() * static_cast<std::size_t>(d) == want[2],
             "d=%d cosets %zu, brute force %zu (want %zu)", d, cosets.size(), subgroups.size() * d, want[2]);
  }
}

// --- 3: volumes ---

// Exact vol(E_d)/vol(M_d) by inclusion-exclusion over coordinates above 1/d.
double analytic_enclosure_share(int d) {
  const int n = d * d;
  double total = 0.0, binom = 1.0;
  for (int j = 0; j <= d; ++j) {
    total += (j % 2 == 0 ? 1.0 : -1.0) * binom * std::pow(1.0 - static_cast<double>(j) / d, n - 1);
    binom = binom * (n - j) / (j + 1);
  }
  return total;
}

void volumes(Check& c) {
  constexpr std::size_t n = 100000;
  auto within = [&](const char* what, int d, double got, double target, double tol) {
    c.expect(std::abs(got - target) <= tol, "d=%d %s %.5f (target %.3f +- %.3f)", d, what, got, target, tol);
  };
  for (int d = 2; d <= 6; ++d) {
    const auto r = estimate_volumes(d, n, kSeed + static_cast<std::uint64_t>(d), workers());
    const double ppt = r.ppt.fraction();
    const double enc = r.enclosure.fraction();
    std::printf("  d=%d n=%zu: E_d share %.5f (exact %.5f), PPT share %.5f, PPT within E_d %.5f\n", d, n, enc,
                analytic_enclosure_share(d), ppt, r.ppt_in_enclosure.fraction());
    switch (d) {
      case 2: within("PPT share of M_d", d, ppt, 0.50, 0.01); break;
      case 3:
        within("PPT share of M_d", d, ppt, 0.39, 0.01);
        within("PPT share within E_d", d, r.ppt_in_enclosure.fraction(), 0.60, 0.015);
        break;
      case 4:
        within("PPT share of M_d", d, ppt, 0.116, 0.005);
        within("E_d share of M_d", d, enc, 0.790, 0.01);
        break;
      case 5: within("PPT share of M_d", d, ppt, 0.073, 0.005); break;
      case 6:
        c.expect(ppt < 0.015, "d=6 PPT share of M_d %.5f (target < 0.015)", ppt);
        within("E_d share of M_d", d, enc, 0.971, 0.005);
        break;
    }
  }
}

// --- 4: d=2 completeness ---

void qubit_completeness(Check& c) {
  constexpr int d = 2;
  ClassifierResources res;
  res.d = d;
  res.group = generate_group(d);
  auto kernel = SeparableVertexSet::kernel(d);
  kernel.symmetric = true;
  res.vertices = kernel;
  const Classifier classifier(res);
  const auto report = class_share_experiment(classifier, 10000, kSeed, workers());
  const auto& s = report.summary;
  c.expect(s.total == 10000, "samples %zu", s.total);
  c.expect(s.count(Label::Sep) == s.ppt(), "SEP %zu of %zu PPT states", s.count(Label::Sep), s.ppt());
  c.expect(s.count(Label::Bound) == 0, "BOUND %zu", s.count(Label::Bound));
  c.expect(s.count(Label::PptUnknown) == 0, "PPT_UNKNOWN %zu", s.count(Label::PptUnknown));

  // Independent of the d=2 shortcut: every PPT state lies in the kernel hull.
  const HullOracle oracle(kernel, &res.group);
  std::size_t in_hull = 0, ppt = 0;
  for (const auto& ls : report.states) {
    if (ppt_verdict(ls.state).fired) continue;
    ++ppt;
    if (oracle.contains(ls.state).member()) ++in_hull;
  }
  c.expect(in_hull == ppt, "kernel-hull members %zu of %zu PPT states", in_hull, ppt);
}

// --- 5 and 6: soundness and class shares on default resources ---

std::vector<double> reconstruct(const SeparableVertexSet& vs, const SymmetryGroup& group,
                                const std::vector<HullWeight>& weights, double& lambda_sum, double& min_lambda) {
  std::vector<double> out(static_cast<std::size_t>(vs.d) * vs.d, 0.0);
  lambda_sum = 0.0;
  min_lambda = 1.0;
  for (const auto& w : weights) {
    const auto img = apply(group[vs.symmetric ? w.symmetry : 0], vs.vertices.at(w.vertex).state);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += w.lambda * img.coords()[t];
    lambda_sum += w.lambda;
    min_lambda = std::min(min_lambda, w.lambda);
  }
  return out;
}

BellDiagonalState kernel_sample(int d, Rng& rng, const std::vector<KernelVertex>& kv) {
  std::vector<double> c(static_cast<std::size_t>(d) * d, 0.0), w(kv.size());
  double total = 0.0;
  for (auto& x : w) total += (x = rng.exponential());
  for (std::size_t v = 0; v < kv.size(); ++v)
    for (std::size_t t = 0; t < c.size(); ++t) c[t] += w[v] / total * kv[v].state.coords()[t];
  double sum = 0.0;
  for (double x : c) sum += x;
  for (double& x : c) x /= sum;
  return BellDiagonalState(d, c);
}

struct Corpus {
  ClassifierResources resources;
  std::vector<LabeledState> states;
  std::vector<ClassificationRecord> records;
  ClassificationSummary summary;
  double resource_seconds = 0.0;
  double classify_seconds = 0.0;
};

Corpus& corpus(int d) {
  static std::map<int, Corpus> cache;
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;
  Corpus out;
  auto t0 = std::chrono::steady_clock::now();
  std::printf("  building default resources for d=%d ...\n", d);
  std::fflush(stdout);
  out.resources = build_resources(d, kSeed, {}, workers());
  auto t1 = std::chrono::steady_clock::now();
  const Classifier classifier(out.resources);
  const auto report = class_share_experiment(classifier, 5000, kSeed + 1, workers());
  auto t2 = std::chrono::steady_clock::now();
  out.states = report.states;
  out.records = report.records;
  out.summary = report.summary;
  out.resource_seconds = std::chrono::duration<double>(t1 - t0).count();
  out.classify_seconds = std::chrono::duration<double>(t2 - t1).count();
  std::printf("  d=%d: bank %zu, vertices %zu, resources %.1f s, classification %.1f s\n", d,
              out.resources.bank.size(), out.resources.vertices->vertices.size(), out.resource_seconds,
              out.classify_seconds);
  return cache.emplace(d, std::move(out)).first->second;
}

void soundness(Check& c) {
  for (int d : {3, 4}) {
    const Corpus& cp = corpus(d);
    const auto& res = cp.resources;
    Rng rng = Rng::derive(kSeed, 500 + static_cast<std::uint64_t>(d));

    // Conflicts: default pipeline on the full corpus, full evidence on a subset
    // and on kernel-polytope samples.
    c.expect(cp.summary.conflicts == 0, "d=%d default pipeline conflicts %zu on %zu states", d, cp.summary.conflicts,
             cp.summary.total);
    ClassifierConfig full;
    full.full_evidence = true;
    const Classifier thorough(res, full);
    const std::size_t subset = d == 3 ? 1000 : 300;
    std::vector<LabeledState> probe(cp.states.begin(), cp.states.begin() + static_cast<std::ptrdiff_t>(subset));
    const auto kv = kernel_vertices(d);
    for (std::size_t i = 0; i < 300; ++i)
      probe.push_back({"k" + std::to_string(i), kernel_sample(d, rng, kv)});
    const auto records = classify_batch(thorough, probe, workers());
    std::size_t conflicts = 0, kernel_ent = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].conflict) ++conflicts;
      if (i >= subset && records[i].label != Label::Sep) ++kernel_ent;
    }
    c.expect(conflicts == 0, "d=%d full-evidence conflicts %zu on %zu states (orbit included)", d, conflicts,
             records.size());
    c.expect(kernel_ent == 0, "d=%d kernel-polytope samples not labeled SEP: %zu of 300", d, kernel_ent);

    // Witness bounds on 10^3 kernel-polytope samples.
    std::size_t violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto s = kernel_sample(d, rng, kv);
      for (const auto& w : res.bank.witnesses()) {
        const double v = witness_value(w, s);
        const double excess = std::max(w.lower - v, v - w.upper);
        worst = std::max(worst, excess);
        if (excess > 0.0) ++violations;
      }
    }
    c.expect(violations == 0, "d=%d witness bound violations %zu over %zu witnesses x 1000 samples (max excess %.2e)", d,
             violations, res.bank.size(), worst);
    std::size_t uncertified = 0;
    for (const auto& w : res.bank.witnesses())
      if (!w.meta.certified) ++uncertified;
    c.expect(uncertified == 0, "d=%d uncertified witnesses in bank: %zu", d, uncertified);

    // Hull verdicts, reconstructed independently from the group action.
    const auto& vs = *res.vertices;
    const HullOracle oracle(vs, vs.symmetric ? &res.group : nullptr);
    std::vector<const BellDiagonalState*> queries;
    for (std::size_t i = 0; i < cp.states.size() && queries.size() < 1000; ++i)
      if (!ppt_verdict(cp.states[i].state).fired) queries.push_back(&cp.states[i].state);
    std::vector<HullResult> results(queries.size());
    parallel_for(queries.size(), workers(), [&](std::size_t i) { results[i] = oracle.contains(*queries[i]); });
    std::size_t members = 0, bad = 0, failures = 0;
    double worst_res = 0.0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (results[i].status == HullStatus::SolverFailure) ++failures;
      if (!results[i].member()) continue;
      ++members;
      double lambda_sum = 0.0, min_lambda = 0.0;
      const auto rec = reconstruct(vs, res.group, results[i].weights, lambda_sum, min_lambda);
      double err = std::abs(lambda_sum - 1.0);
      for (std::size_t t = 0; t < rec.size(); ++t) err = std::max(err, std::abs(rec[t] - queries[i]->coords()[t]));
      if (min_lambda < -1e-12) err = std::max(err, -min_lambda);
      worst_res = std::max(worst_res, err);
      if (err > kHullFeasibilityTol) ++bad;
    }
    c.expect(bad == 0, "d=%d hull members re-verified %zu/%zu (max error %.2e, %zu queries, %zu solver failures)", d,
             members - bad, members, worst_res, queries.size(), failures);

    // Stored certificates after a file round trip.
    std::stringstream file;
    write_vertex_set(file, vs);
    const auto stored = read_vertex_set(file);
    std::size_t certs = 0, cert_bad = 0;
    double cert_worst = 0.0;
    for (const auto& v : stored.vertices) {
      if (!v.certificate) continue;
      ++certs;
      const double r = v.certificate->residual(v.state);
      cert_worst = std::max(cert_worst, r);
      if (r > kCertificateTol) ++cert_bad;
    }
    c.expect(certs > 0 && cert_bad == 0, "d=%d stored certificates re-verified %zu/%zu (max residual %.2e)", d,
             certs - cert_bad, certs, cert_worst);
  }
}

void class_shares(Check& c) {
  double total_seconds = 0.0;
  for (int d : {3, 4}) {
    const Corpus& cp = corpus(d);
    const auto& s = cp.summary;
    total_seconds += cp.resource_seconds + cp.classify_seconds;
    const double sep = s.ppt_share(Label::Sep), bound = s.ppt_share(Label::Bound);
    const double e2 = s.bound_detection_share(Criterion::E2);
    std::printf("  d=%d: %zu samples, %zu PPT; SEP %.4f, BOUND %.4f, PPT_UNKNOWN %.4f of PPT; conflicts %zu\n", d,
                s.total, s.ppt(), sep, bound, s.ppt_share(Label::PptUnknown), s.conflicts);
    std::printf("  d=%d: BOUND detected by E2 %.3f, E3 %.3f, E4 %.3f, E5 %.3f\n", d, e2,
                s.bound_detection_share(Criterion::E3), s.bound_detection_share(Criterion::E4),
                s.bound_detection_share(Criterion::E5));
    const double sep_min = d == 3 ? 0.70 : 0.55;
    const double bound_min = d == 3 ? 0.08 : 0.005;
    c.expect(sep >= sep_min, "d=%d SEP share of PPT %.4f (>= %.2f)", d, sep, sep_min);
    c.expect(bound >= bound_min, "d=%d BOUND share of PPT %.4f (>= %.3f)", d, bound, bound_min);
    c.expect(e2 >= 0.60, "d=%d E2 fires on %.3f of BOUND (>= 0.60)", d, e2);
  }
  c.expect(total_seconds <= 3600.0, "resources plus classification %.1f s (<= 3600 s)", total_seconds);
}

// --- 7: spot values ---

void spot_values(Check& c) {
  for (int d = 2; d <= 5; ++d) {
    const auto u = BellDiagonalState::uniform(d);
    const double r = realignment_sum(u);
    c.expect(std::abs(r - 1.0 / d) <= 1e-14, "d=%d realignment(uniform) %.17g (1/d)", d, r);
    const double q = quasipure_concurrence(u);
    c.expect(std::abs(q) <= 1e-12 && !concurrence_verdict(u).fired, "d=%d C_qp(uniform) %.3e", d, q);
    const double w = weyl_representation_sum(u);
    c.expect(std::abs(w - 1.0) <= 1e-10, "d=%d Weyl sum(uniform) %.17g", d, w);
  }
  const double q = quasipure_concurrence(BellDiagonalState::indicator(3, 0, 0));
  c.expect(std::abs(q - 1.0 / std::sqrt(3.0)) <= 1e-10, "C_qp(indicator (0,0), d=3) %.17g (1/sqrt 3)", q);
  const double i4 = mub_sum(BellDiagonalState::uniform(3), standard_mubs(3), 2);
  c.expect(std::abs(i4 - 4.0 / 3.0) <= 1e-10, "I_4(uniform, d=3, s=2) %.17g (4/3)", i4);
}

// --- 8: determinism ---

struct Artifacts {
  std::string volumes, bank, vertices, records, summary, overlap, scatter, probe;
};

Artifacts produce(int worker_count) {
  Artifacts a;
  a.volumes = volume_report_json(estimate_volumes(3, 20000, kSeed, worker_count));
  ResourceBudget budget;
  budget.bank_size = 40;
  budget.extension_budget = 3;
  const auto res = build_resources(3, kSeed, budget, worker_count);
  std::ostringstream bank, vertices;
  write_witness_bank(bank, res.bank.witnesses());
  write_vertex_set(vertices, *res.vertices);
  a.bank = bank.str();
  a.vertices = vertices.str();
  const Classifier classifier(res);
  const auto report = class_share_experiment(classifier, 600, kSeed, worker_count);
  std::ostringstream records, scatter, probe;
  write_records(records, report.records);
  export_scatter(scatter, report.states, report.records, {0, 3, 6, 1});
  conjecture_probe(probe, report.states, report.records);
  a.records = records.str();
  a.summary = summary_json(report.summary);
  a.overlap = overlap_json(detector_overlap(report.records, report.states), classifier.fingerprint());
  a.scatter = scatter.str();
  a.probe = probe.str();
  return a;
}

void determinism(Check& c) {
  const Artifacts first = produce(1);
  const Artifacts second = produce(1);
  const Artifacts parallel = produce(std::max(2, workers()));
  const std::vector<std::pair<const char*, std::string Artifacts::*>> fields{
      {"volume report", &Artifacts::volumes}, {"witness bank", &Artifacts::bank},
      {"vertex set", &Artifacts::vertices},   {"records", &Artifacts::records},
      {"summary", &Artifacts::summary},       {"overlap", &Artifacts::overlap},
      {"scatter export", &Artifacts::scatter}, {"probe export", &Artifacts::probe}};
  for (const auto& [name, field] : fields) {
    c.expect(!(first.*field).empty() && first.*field == second.*field, "%s identical across repeated runs (%zu bytes)",
             name, (first.*field).size());
    c.expect(first.*field == parallel.*field, "%s identical with 1 and %d workers", name, std::max(2, workers()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<void(Check&)>> criteria{
      {1, algebra}, {2, structure}, {3, volumes}, {4, qubit_completeness},
      {5, soundness}, {6, class_shares}, {7, spot_values}, {8, determinism}};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (criteria.count(n) == 0) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    selected.push_back(n);
  }
  if (selected.empty())
    for (const auto& kv : criteria) selected.push_back(kv.first);

  bool all = true;
  for (int n : selected) {
    Check check(n);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria.at(n)(check);
    } catch (const std::exception& e) {
      check.expect(false, "exception: %s", e.what());
    }
    all = check.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) && all;
  }
  return all ? 0 : 1;
}
