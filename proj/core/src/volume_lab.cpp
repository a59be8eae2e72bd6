#include "bellclass/volume_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "bellclass/hash.hpp"
#include "bellclass/parallel.hpp"
#include "json.hpp"

namespace bellclass {

double Share::stderr_() const {
  if (n == 0) return 0.0;
  const double p = fraction();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

namespace {

std::size_t shard_count(std::size_t n) { return (n + kShardSize - 1) / kShardSize; }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json share_json(const Share& s) {
  return {{"fraction", s.fraction()}, {"stderr", s.stderr_()}, {"hits", s.hits}, {"n", s.n}};
}

}  // namespace

VolumeReport estimate_volumes(int d, std::size_t n, std::uint64_t seed, int workers) {
  require_dimension(d);
  if (n < 1000) throw DomainError("volume estimates need at least 1000 samples");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t shards = shard_count(n);
  std::vector<std::array<std::size_t, 3>> counts(shards);
  parallel_for(shards, workers, [&](std::size_t shard) {
    Rng rng = Rng::derive(seed, shard);
    const std::size_t len = std::min(kShardSize, n - shard * kShardSize);
    auto& c = counts[shard];
    c = {0, 0, 0};
    for (std::size_t i = 0; i < len; ++i) {
      const auto s = sample_simplex(d, rng);
      const bool enc = in_enclosure(s);
      const bool ppt = !ppt_verdict(s).fired;
      c[0] += enc;
      c[1] += ppt;
      c[2] += enc && ppt;
    }
  });
  VolumeReport r;
  r.d = d;
  r.n_samples = n;
  r.seed = seed;
  for (const auto& c : counts) {
    r.enclosure.hits += c[0];
    r.ppt.hits += c[1];
    r.ppt_in_enclosure.hits += c[2];
  }
  r.enclosure.n = r.ppt.n = n;
  r.ppt_in_enclosure.n = r.enclosure.hits;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.fingerprint = hex64(fnv1a64("volumes;d=" + std::to_string(d) + ";n=" + std::to_string(n) +
                                ";seed=" + std::to_string(seed) + ";shard=" + std::to_string(kShardSize)));
  return r;
}

std::vector<LabeledState> sample_enclosure_corpus(int d, std::size_t n, std::uint64_t seed, int workers) {
  require_dimension(d);
  std::vector<LabeledState> out(n);
  parallel_for(shard_count(n), workers, [&](std::size_t shard) {
    Rng rng = Rng::derive(seed, shard);
    const std::size_t begin = shard * kShardSize;
    const std::size_t end = std::min(n, begin + kShardSize);
    for (std::size_t i = begin; i < end; ++i) out[i] = {"s" + std::to_string(i), sample_enclosure(d, rng)};
  });
  return out;
}

ClassShareReport class_share_experiment(const Classifier& classifier, std::size_t n, std::uint64_t seed, int workers) {
  ClassShareReport r;
  r.seed = seed;
  r.states = sample_enclosure_corpus(classifier.d(), n, seed, workers);
  r.records = classify_batch(classifier, r.states, workers);
  r.summary = summarize(r.records, classifier.d(), classifier.fingerprint());
  return r;
}

OverlapMatrix detector_overlap(const std::vector<ClassificationRecord>& records, const std::vector<LabeledState>& states) {
  if (!states.empty() && states.size() != records.size()) throw DomainError("states and records are not aligned");
  OverlapMatrix m;
  std::array<double, 4> purity_sum{};
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.label != Label::Bound) continue;
    ++m.bound_states;
    std::array<bool, 4> f{};
    for (std::size_t a = 0; a < 4; ++a) f[a] = rec.fired(kOverlapCriteria[a]);
    const double purity = states.empty() ? 0.0 : states[r].state.purity();
    for (std::size_t a = 0; a < 4; ++a) {
      if (!f[a]) continue;
      ++m.detected[a];
      purity_sum[a] += purity;
      for (std::size_t b = 0; b < 4; ++b) {
        if (b == a) continue;
        (f[b] ? m.joint[a][b] : m.only[a][b]) += 1;
      }
    }
  }
  for (std::size_t a = 0; a < 4; ++a)
    m.mean_purity[a] = (states.empty() || m.detected[a] == 0) ? 0.0 : purity_sum[a] / static_cast<double>(m.detected[a]);
  return m;
}

namespace {

std::string label_at(const std::vector<ClassificationRecord>& records, std::size_t i) {
  return records.empty() ? std::string() : to_string(records[i].label);
}

}  // namespace

void export_scatter(std::ostream& out, const std::vector<LabeledState>& states,
                    const std::vector<ClassificationRecord>& records, const std::array<int, 4>& indices) {
  if (!records.empty() && records.size() != states.size()) throw DomainError("states and records are not aligned");
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b)
      if (indices[a] == indices[b]) throw DomainError("scatter coordinates must be distinct");
  for (const auto& s : states)
    for (int i : indices)
      if (i < 0 || static_cast<std::size_t>(i) >= s.state.size()) throw DomainError("scatter coordinate out of range");
  out << "x,y,z,color,label\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& c = states[i].state;
    for (int idx : indices) out << fmt(c[static_cast<std::size_t>(idx)]) << ',';
    out << label_at(records, i) << '\n';
  }
}

double distance_from_uniform(const BellDiagonalState& s) {
  const double u = 1.0 / static_cast<double>(s.size());
  double dist = 0.0;
  for (double x : s.coords()) dist = std::max(dist, std::abs(x - u));
  return dist;
}

double coset_concentration(const BellDiagonalState& s) {
  double best = 0.0;
  for (const auto& coset : enumerate_cosets(s.d())) {
    double mass = 0.0;
    for (const auto& p : coset.points) mass += s.at(p.k, p.l);
    best = std::max(best, mass);
  }
  return best;
}

void conjecture_probe(std::ostream& out, const std::vector<LabeledState>& states,
                      const std::vector<ClassificationRecord>& records) {
  if (!records.empty() && records.size() != states.size()) throw DomainError("states and records are not aligned");
  out << "id,distance,concentration,label\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i].state;
    out << states[i].id << ',' << fmt(distance_from_uniform(s)) << ',' << fmt(coset_concentration(s)) << ','
        << label_at(records, i) << '\n';
  }
}

std::string volume_report_json(const VolumeReport& r, bool include_timing) {
  nlohmann::json j{{"d", r.d},
                   {"n_samples", r.n_samples},
                   {"seed", r.seed},
                   {"share_enclosure", share_json(r.enclosure)},
                   {"share_ppt", share_json(r.ppt)},
                   {"share_ppt_in_enclosure", share_json(r.ppt_in_enclosure)},
                   {"fingerprint", r.fingerprint}};
  if (include_timing) j["wall_seconds"] = r.wall_seconds;
  return j.dump(2) + "\n";
}

std::string class_share_json(const ClassShareReport& r) {
  auto j = nlohmann::json::parse(summary_json(r.summary));
  j["seed"] = r.seed;
  return j.dump(2) + "\n";
}

std::string overlap_json(const OverlapMatrix& m, const std::string& fingerprint) {
  auto per = nlohmann::json::object();
  auto pairs = nlohmann::json::array();
  for (std::size_t a = 0; a < 4; ++a) {
    per[to_string(kOverlapCriteria[a])] = {{"detected", m.detected[a]}, {"mean_purity", m.mean_purity[a]}};
    for (std::size_t b = a + 1; b < 4; ++b)
      pairs.push_back({{"a", to_string(kOverlapCriteria[a])},
                       {"b", to_string(kOverlapCriteria[b])},
                       {"only_a", m.only[a][b]},
                       {"only_b", m.only[b][a]},
                       {"joint", m.joint[a][b]}});
  }
  nlohmann::json j{{"bound_states", m.bound_states}, {"criteria", per}, {"pairs", pairs}, {"fingerprint", fingerprint}};
  return j.dump(2) + "\n";
}

}  // namespace bellclass
