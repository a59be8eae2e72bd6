#include "bellclass/classifier.hpp"

#include <cstdio>
#include <iostream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bellclass/hash.hpp"
#include "bellclass/parallel.hpp"
#include "json.hpp"

namespace bellclass {

const char* to_string(Label l) {
  switch (l) {
    case Label::Free: return "FREE";
    case Label::Sep: return "SEP";
    case Label::Bound: return "BOUND";
    case Label::PptUnknown: return "PPT_UNKNOWN";
  }
  return "?";
}

Label label_from_string(const std::string& s) {
  for (auto l : {Label::Free, Label::Sep, Label::Bound, Label::PptUnknown})
    if (s == to_string(l)) return l;
  throw DomainError("unknown label: " + s);
}

bool ClassificationRecord::fired(Criterion c) const {
  for (const auto& e : evidence)
    if (e.criterion == c && e.fired) return true;
  return false;
}

std::string describe(const ClassifierResources& r) {
  std::ostringstream os;
  os << "d=" << r.d << ";group=" << r.group.size();
  std::string ids;
  for (const auto& w : r.bank.witnesses()) ids += w.id() + ',';
  os << ";bank=" << r.bank.size() << ':' << hex64(fnv1a64(ids));
  if (r.vertices) {
    std::string coords;
    char buf[32];
    for (const auto& v : r.vertices->vertices)
      for (double x : v.state.coords()) {
        std::snprintf(buf, sizeof buf, "%.17g,", x);
        coords += buf;
      }
    os << ";vertices=" << r.vertices->vertices.size() << ':' << r.vertices->symmetric << ':' << hex64(fnv1a64(coords));
  }
  if (r.mubs) os << ";mub_shift=" << r.mub_shift;
  return os.str();
}

int default_extension_budget(int d) {
  switch (d) {
    case 2: return 0;
    case 3: return 40;
    case 4: return 30;
    default: return 20;
  }
}

ClassifierResources build_resources(int d, std::uint64_t seed, const ResourceBudget& budget, int workers) {
  require_dimension(d);
  ClassifierResources r;
  r.d = d;
  r.group = generate_group(d);
  r.bank = WitnessBank(forge_bank(d, budget.bank_size, Rng::derive(seed, 1).next(), {}, workers));
  Rng rng = Rng::derive(seed, 2);
  const int extension = budget.extension_budget < 0 ? default_extension_budget(d) : budget.extension_budget;
  r.vertices = extend_vertices(SeparableVertexSet::kernel(d), rng, extension, {},
                               budget.symmetric_hull ? &r.group : nullptr);
  if (budget.symmetric_hull) r.vertices->symmetric = true;
  if (d == 3 || d == 4) {
    r.mubs = standard_mubs(d);
    r.mub_shift = default_mub_shift(d);
  }
  return r;
}

struct Classifier::Impl {
  ClassifierResources res;
  ClassifierConfig cfg;
  std::string fingerprint;
  std::optional<HullOracle> hull;
  std::vector<double> mu;

  void cheap(const BellDiagonalState& s, std::size_t idx, std::vector<Evidence>& ev, bool skip_fired) const;
  void hull_check(const BellDiagonalState& s, std::size_t idx, std::vector<Evidence>& ev) const;
  bool bank_check(const BellDiagonalState& s, std::size_t idx, std::vector<Evidence>& ev) const;
};

namespace {

bool any_fired(const std::vector<Evidence>& ev, Criterion c) {
  for (const auto& e : ev)
    if (e.criterion == c && e.fired) return true;
  return false;
}

bool decided(const std::vector<Evidence>& ev) {
  for (const auto& e : ev)
    if (e.fired && e.criterion != Criterion::E1) return true;
  return false;
}

void push(std::vector<Evidence>& ev, const DetectorVerdict& v, std::size_t idx) {
  // Orbit images only contribute verdicts that fired.
  if (idx != 0 && !v.fired) return;
  ev.push_back({v.criterion, v.fired, v.value, v.threshold, idx, {}, {}});
}

}  // namespace

void Classifier::Impl::cheap(const BellDiagonalState& s, std::size_t idx, std::vector<Evidence>& ev,
                             bool skip_fired) const {
  auto wanted = [&](Criterion c) { return !(skip_fired && any_fired(ev, c)); };
  const bool invariant_pass = idx == 0 || !cfg.skip_invariant;
  if (invariant_pass && wanted(Criterion::S2)) push(ev, weyl_representation_verdict(s), idx);
  if (invariant_pass && wanted(Criterion::E2)) push(ev, realignment_verdict(s), idx);
  if (wanted(Criterion::E3)) push(ev, concurrence_verdict(s), idx);
  if (!mu.empty() && wanted(Criterion::E4)) {
    double v = 0.0;
    for (std::size_t t = 0; t < mu.size(); ++t) v += s[t] * mu[t];
    push(ev, {Criterion::E4, v > 2.0 + kMubEps, v, 2.0 + kMubEps}, idx);
  }
}

void Classifier::Impl::hull_check(const BellDiagonalState& s, std::size_t idx, std::vector<Evidence>& ev) const {
  if (!hull) return;
  if (idx != 0 && cfg.skip_invariant && res.vertices->symmetric) return;
  const auto r = hull->contains(s);
  if (idx != 0 && !r.member()) return;
  ev.push_back({Criterion::S1, r.member(), r.residual, kHullFeasibilityTol, idx, {}, r.status});
}

bool Classifier::Impl::bank_check(const BellDiagonalState& s, std::size_t idx, std::vector<Evidence>& ev) const {
  if (res.bank.empty()) return false;
  const auto hit = res.bank.first_detection(s.vector());
  if (!hit) {
    if (idx == 0) ev.push_back({Criterion::E5, false, 0.0, 0.0, 0, {}, {}});
    return false;
  }
  const auto& w = res.bank[*hit];
  const double v = witness_value(w, s);
  ev.push_back({Criterion::E5, true, v, v < w.lower ? w.lower : w.upper, idx, w.id(), {}});
  return true;
}

Classifier::Classifier(ClassifierResources resources, ClassifierConfig cfg) : impl_(std::make_unique<Impl>()) {
  auto& im = *impl_;
  im.res = std::move(resources);
  im.cfg = cfg;
  const int d = im.res.d;
  require_dimension(d);
  if (!im.res.group.elements().empty() && im.res.group.d() != d) throw DomainError("group dimension does not match");
  if (!im.res.bank.empty() && im.res.bank.d() != d) throw DomainError("witness bank dimension does not match");
  if (im.res.vertices) {
    if (im.res.vertices->d != d) throw DomainError("vertex set dimension does not match");
    im.hull.emplace(*im.res.vertices, im.res.vertices->symmetric ? &im.res.group : nullptr);
  }
  if (im.res.mubs) {
    if (im.res.mubs->d != d) throw DomainError("MUB dimension does not match");
    im.mu = mub_coefficients(*im.res.mubs, im.res.mub_shift);
  }
  std::ostringstream os;
  os << "orbit=" << cfg.use_orbit << ";full=" << cfg.full_evidence << ";skip=" << cfg.skip_invariant << '|'
     << describe(im.res);
  im.fingerprint = hex64(fnv1a64(os.str()));
}

Classifier::~Classifier() = default;
Classifier::Classifier(Classifier&&) noexcept = default;

int Classifier::d() const { return impl_->res.d; }
const ClassifierConfig& Classifier::config() const { return impl_->cfg; }
const ClassifierResources& Classifier::resources() const { return impl_->res; }
const std::string& Classifier::fingerprint() const { return impl_->fingerprint; }

ClassificationRecord Classifier::classify(const BellDiagonalState& s, const std::string& id) const {
  const auto& im = *impl_;
  if (s.d() != im.res.d) throw DomainError("state dimension does not match the classifier");
  ClassificationRecord rec;
  rec.id = id;
  rec.fingerprint = im.fingerprint;
  auto& ev = rec.evidence;

  const auto e1 = ppt_verdict(s);
  push(ev, e1, 0);
  if (e1.fired) {
    rec.label = Label::Free;
    return rec;
  }
  if (s.d() == 2) {
    // Every PPT two-qubit state is separable.
    rec.label = Label::Sep;
    return rec;
  }

  const bool full = im.cfg.full_evidence;
  const auto& elements = im.res.group.elements();
  const bool orbit = im.cfg.use_orbit && elements.size() > 1;

  im.cheap(s, 0, ev, false);
  if (full || !decided(ev)) im.hull_check(s, 0, ev);
  if (orbit && (full || !decided(ev))) {
    for (std::size_t g = 1; g < elements.size(); ++g) {
      const auto image = apply(elements[g], s);
      im.cheap(image, g, ev, true);
      if (!any_fired(ev, Criterion::S1)) im.hull_check(image, g, ev);
      if (!full && decided(ev)) break;
    }
  }
  if (full || !decided(ev)) {
    bool hit = im.bank_check(s, 0, ev);
    if (orbit && !hit)
      for (std::size_t g = 1; g < elements.size() && !hit; ++g) hit = im.bank_check(apply(elements[g], s), g, ev);
  }

  bool sep = false, ent = false, at_identity = false;
  for (const auto& e : ev) {
    if (!e.fired || e.criterion == Criterion::E1) continue;
    (is_separability_criterion(e.criterion) ? sep : ent) = true;
    if (e.orbit_index == 0) at_identity = true;
  }
  if (sep && ent) {
    rec.label = Label::PptUnknown;
    rec.conflict = true;
    std::cerr << "warning: separability and entanglement criteria both fired on state '" << id
              << "'; labeled PPT_UNKNOWN\n";
  } else if (sep) {
    rec.label = Label::Sep;
  } else if (ent) {
    rec.label = Label::Bound;
  } else {
    rec.label = Label::PptUnknown;
  }
  rec.orbit_used = (sep || ent) && !at_identity;
  return rec;
}

double ClassificationSummary::ppt_share(Label l) const {
  const std::size_t n = ppt();
  return n == 0 ? 0.0 : static_cast<double>(count(l)) / static_cast<double>(n);
}

double ClassificationSummary::success_rate() const {
  if (total == 0) return 0.0;
  return static_cast<double>(total - count(Label::PptUnknown)) / static_cast<double>(total);
}

double ClassificationSummary::bound_detection_share(Criterion c) const {
  const std::size_t n = count(Label::Bound);
  const int i = static_cast<int>(c) - static_cast<int>(Criterion::E2);
  if (n == 0 || i < 0 || i > 3) return 0.0;
  return static_cast<double>(bound_detections[static_cast<std::size_t>(i)]) / static_cast<double>(n);
}

ClassificationSummary summarize(const std::vector<ClassificationRecord>& records, int d, const std::string& fingerprint) {
  ClassificationSummary s;
  s.d = d;
  s.total = records.size();
  s.fingerprint = fingerprint;
  for (const auto& r : records) {
    ++s.counts[static_cast<std::size_t>(r.label)];
    if (r.conflict) ++s.conflicts;
    if (r.orbit_used) ++s.orbit_decided;
    if (r.label == Label::Bound)
      for (auto c : {Criterion::E2, Criterion::E3, Criterion::E4, Criterion::E5})
        if (r.fired(c)) ++s.bound_detections[static_cast<std::size_t>(static_cast<int>(c) - static_cast<int>(Criterion::E2))];
    if (r.label == Label::Sep) {
      if (r.fired(Criterion::S1)) ++s.sep_detections[0];
      if (r.fired(Criterion::S2)) ++s.sep_detections[1];
    }
  }
  return s;
}

std::vector<ClassificationRecord> classify_batch(const Classifier& classifier, const std::vector<LabeledState>& states,
                                                 int workers) {
  for (const auto& s : states)
    if (s.state.d() != classifier.d()) throw DomainError("batch mixes dimensions");
  std::vector<ClassificationRecord> out(states.size());
  parallel_for(states.size(), workers, [&](std::size_t i) { out[i] = classifier.classify(states[i].state, states[i].id); });
  return out;
}

std::string to_json_line(const ClassificationRecord& r) {
  auto evidence = nlohmann::json::array();
  for (const auto& e : r.evidence) {
    nlohmann::json j{{"criterion", to_string(e.criterion)},
                     {"fired", e.fired},
                     {"value", e.value},
                     {"threshold", e.threshold},
                     {"orbit_index", e.orbit_index}};
    if (e.witness_id) j["witness"] = *e.witness_id;
    if (e.hull_status) j["hull"] = to_string(*e.hull_status);
    evidence.push_back(std::move(j));
  }
  nlohmann::json j{{"id", r.id},
                   {"label", to_string(r.label)},
                   {"evidence", evidence},
                   {"orbit_used", r.orbit_used},
                   {"conflict", r.conflict},
                   {"fingerprint", r.fingerprint}};
  return j.dump();
}

ClassificationRecord record_from_json_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  ClassificationRecord r;
  r.id = j.at("id").get<std::string>();
  r.label = label_from_string(j.at("label").get<std::string>());
  r.orbit_used = j.value("orbit_used", false);
  r.conflict = j.value("conflict", false);
  r.fingerprint = j.value("fingerprint", std::string());
  for (const auto& e : j.at("evidence")) {
    Evidence ev;
    ev.criterion = criterion_from_string(e.at("criterion").get<std::string>());
    ev.fired = e.at("fired").get<bool>();
    ev.value = e.value("value", 0.0);
    ev.threshold = e.value("threshold", 0.0);
    ev.orbit_index = e.value("orbit_index", std::size_t{0});
    if (e.contains("witness")) ev.witness_id = e["witness"].get<std::string>();
    if (e.contains("hull")) {
      const auto h = e["hull"].get<std::string>();
      for (auto st : {HullStatus::Member, HullStatus::NotMember, HullStatus::SolverFailure})
        if (h == to_string(st)) ev.hull_status = st;
    }
    r.evidence.push_back(std::move(ev));
  }
  return r;
}

void write_records(std::ostream& out, const std::vector<ClassificationRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<ClassificationRecord> read_records(std::istream& in) {
  std::vector<ClassificationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("record line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string summary_json(const ClassificationSummary& s) {
  nlohmann::json counts = nlohmann::json::object();
  nlohmann::json shares = nlohmann::json::object();
  for (auto l : {Label::Free, Label::Sep, Label::Bound, Label::PptUnknown}) {
    counts[to_string(l)] = s.count(l);
    if (l != Label::Free) shares[to_string(l)] = s.ppt_share(l);
  }
  nlohmann::json detections = nlohmann::json::object();
  for (auto c : {Criterion::E2, Criterion::E3, Criterion::E4, Criterion::E5})
    detections[to_string(c)] = s.bound_detection_share(c);
  nlohmann::json j{{"d", s.d},
                   {"total", s.total},
                   {"ppt", s.ppt()},
                   {"counts", counts},
                   {"ppt_shares", shares},
                   {"success_rate", s.success_rate()},
                   {"bound_detection_shares", detections},
                   {"sep_detections", {{"S1", s.sep_detections[0]}, {"S2", s.sep_detections[1]}}},
                   {"conflicts", s.conflicts},
                   {"orbit_decided", s.orbit_decided},
                   {"fingerprint", s.fingerprint}};
  return j.dump(2) + "\n";
}

}  // namespace bellclass
