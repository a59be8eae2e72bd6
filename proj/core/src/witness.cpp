#include "bellclass/witness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "bellclass/hash.hpp"
#include "bellclass/parallel.hpp"
#include "json.hpp"

namespace bellclass {

std::string EntanglementWitness::id() const {
  std::string key = std::to_string(d);
  char buf[40];
  for (double k : kappa) {
    // snprintf rounds half-to-even on the binary value, which is stable.
    std::snprintf(buf, sizeof buf, ",%.12f", k == 0.0 ? 0.0 : k);
    key += buf;
  }
  return hex64(fnv1a64(key));
}

double witness_value(const EntanglementWitness& w, const BellDiagonalState& s) {
  if (s.d() != w.d) throw DomainError("witness and state dimension differ");
  double v = 0.0;
  for (std::size_t i = 0; i < w.kappa.size(); ++i) v += w.kappa[i] * s[i];
  return v;
}

bool detects(const EntanglementWitness& w, const BellDiagonalState& s) {
  const double v = witness_value(w, s);
  return v < w.lower || v > w.upper;
}

WitnessBounds certify_bounds(const std::vector<double>& kappa, int d, Rng& rng, const WitnessConfig& cfg) {
  require_dimension(d);
  if (kappa.size() != static_cast<std::size_t>(d) * d) throw DomainError("kappa must have d^2 entries");
  for (double k : kappa)
    if (!std::isfinite(k) || std::abs(k) > 1.0 + 1e-12) throw DomainError("kappa entries must lie in [-1, 1]");

  std::vector<double> negated(kappa.size());
  std::transform(kappa.begin(), kappa.end(), negated.begin(), [](double k) { return -k; });
  const auto hi = maximize_over_products(kappa, d, rng, cfg.optimizer);
  const auto lo = maximize_over_products(negated, d, rng, cfg.optimizer);

  WitnessBounds out;
  out.raw_max = hi.best.value;
  out.raw_min = -lo.best.value;
  for (const auto& kv : kernel_vertices(d)) {
    double v = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) v += kappa[i] * kv.state[i];
    out.raw_max = std::max(out.raw_max, v);
    out.raw_min = std::min(out.raw_min, v);
  }
  out.lower = out.raw_min - cfg.margin;
  out.upper = out.raw_max + cfg.margin;
  out.restarts = hi.starts;
  out.certified = hi.certified && lo.certified;
  return out;
}

EntanglementWitness random_witness(int d, Rng& rng, const WitnessConfig& cfg, int max_attempts) {
  require_dimension(d);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t seed = rng.next();
    Rng local(seed);
    EntanglementWitness w;
    w.d = d;
    w.kappa.resize(static_cast<std::size_t>(d) * d);
    for (double& k : w.kappa) k = local.uniform(-1.0, 1.0);
    const auto b = certify_bounds(w.kappa, d, local, cfg);
    if (!b.certified) continue;
    w.lower = b.lower;
    w.upper = b.upper;
    w.meta = {b.restarts, cfg.margin, seed, true, "uniform", {}};
    return w;
  }
  throw std::runtime_error("witness certification failed repeatedly");
}

std::vector<EntanglementWitness> forge_bank(int d, std::size_t count, std::uint64_t seed, const WitnessConfig& cfg,
                                            int workers) {
  require_dimension(d);
  std::vector<EntanglementWitness> out(count);
  parallel_for(count, workers, [&](std::size_t i) {
    Rng rng = Rng::derive(seed, i);
    out[i] = random_witness(d, rng, cfg);
  });
  return out;
}

WitnessBank::WitnessBank(std::vector<EntanglementWitness> witnesses) : witnesses_(std::move(witnesses)) {
  if (witnesses_.empty()) return;
  d_ = witnesses_.front().d;
  for (const auto& w : witnesses_) {
    if (w.d != d_) throw DomainError("witness bank mixes dimensions");
    if (w.kappa.size() != static_cast<std::size_t>(d_) * d_) throw DomainError("witness has wrong coefficient count");
  }
  std::vector<std::pair<std::string, std::size_t>> order;
  for (std::size_t i = 0; i < witnesses_.size(); ++i) order.emplace_back(witnesses_[i].id(), i);
  std::sort(order.begin(), order.end());
  std::vector<EntanglementWitness> sorted;
  sorted.reserve(witnesses_.size());
  for (const auto& [id, i] : order) {
    ids_.push_back(id);
    sorted.push_back(std::move(witnesses_[i]));
  }
  witnesses_ = std::move(sorted);
  for (const auto& w : witnesses_) packed_.insert(packed_.end(), w.kappa.begin(), w.kappa.end());
}

std::optional<std::size_t> WitnessBank::first_detection(const std::vector<double>& c) const {
  const std::size_t n = c.size();
  if (!witnesses_.empty() && n != static_cast<std::size_t>(d_) * d_) throw DomainError("state and bank dimension differ");
  for (std::size_t i = 0; i < witnesses_.size(); ++i) {
    const double* k = packed_.data() + i * n;
    double v = 0.0;
    for (std::size_t t = 0; t < n; ++t) v += k[t] * c[t];
    if (v < witnesses_[i].lower || v > witnesses_[i].upper) return i;
  }
  return std::nullopt;
}

std::optional<std::string> bank_check(const WitnessBank& bank, const BellDiagonalState& s) {
  if (bank.empty()) return std::nullopt;
  if (bank.d() != s.d()) throw DomainError("state and bank dimension differ");
  if (auto i = bank.first_detection(s.vector())) return bank[*i].id();
  return std::nullopt;
}

std::string to_json_line(const EntanglementWitness& w) {
  nlohmann::json j{{"id", w.id()},
                   {"d", w.d},
                   {"kappa", w.kappa},
                   {"lower", w.lower},
                   {"upper", w.upper},
                   {"meta",
                    {{"restarts", w.meta.restarts},
                     {"margin", w.meta.margin},
                     {"seed", w.meta.seed},
                     {"certified", w.meta.certified},
                     {"sampling", w.meta.sampling},
                     {"bounds", "numerical product-state extrema widened by margin (inner approximation)"}}}};
  if (!w.meta.run.empty()) j["meta"]["run"] = w.meta.run;
  return j.dump();
}

EntanglementWitness witness_from_json_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  EntanglementWitness w;
  w.d = j.at("d").get<int>();
  require_dimension(w.d);
  w.kappa = j.at("kappa").get<std::vector<double>>();
  if (w.kappa.size() != static_cast<std::size_t>(w.d) * w.d) throw DomainError("witness has wrong coefficient count");
  w.lower = j.at("lower").get<double>();
  w.upper = j.at("upper").get<double>();
  if (j.contains("meta")) {
    const auto& m = j["meta"];
    w.meta.restarts = m.value("restarts", 0);
    w.meta.margin = m.value("margin", kWitnessMargin);
    w.meta.seed = m.value("seed", std::uint64_t{0});
    w.meta.certified = m.value("certified", false);
    w.meta.sampling = m.value("sampling", std::string("uniform"));
    w.meta.run = m.value("run", std::string());
  }
  if (j.contains("id") && j["id"].get<std::string>() != w.id()) throw DomainError("witness id does not match its coefficients");
  return w;
}

void write_witness_bank(std::ostream& out, const std::vector<EntanglementWitness>& bank) {
  for (const auto& w : bank) out << to_json_line(w) << '\n';
}

std::vector<EntanglementWitness> read_witness_bank(std::istream& in) {
  std::vector<EntanglementWitness> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(witness_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("witness bank line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace bellclass
