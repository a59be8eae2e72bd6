#include "bellclass/symmetry.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace bellclass {

SymmetryPermutation SymmetryPermutation::identity(int d) {
  return from_map(d, "e", [](PhasePoint p) { return p; });
}

bool SymmetryPermutation::is_bijection() const {
  std::vector<bool> hit(perm.size(), false);
  for (int j : perm) {
    if (j < 0 || static_cast<std::size_t>(j) >= perm.size() || hit[static_cast<std::size_t>(j)])
      return false;
    hit[static_cast<std::size_t>(j)] = true;
  }
  return true;
}

SymmetryPermutation SymmetryPermutation::inverse() const {
  SymmetryPermutation out{d, std::vector<int>(perm.size()), "(" + label + ")^-1"};
  for (std::size_t i = 0; i < perm.size(); ++i) out.perm[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  return out;
}

SymmetryPermutation compose(const SymmetryPermutation& outer, const SymmetryPermutation& inner) {
  if (outer.d != inner.d) throw DomainError("cannot compose symmetries of different dimension");
  SymmetryPermutation out{outer.d, std::vector<int>(inner.perm.size()), outer.label + inner.label};
  for (std::size_t i = 0; i < inner.perm.size(); ++i)
    out.perm[i] = outer.perm[static_cast<std::size_t>(inner.perm[i])];
  return out;
}

SymmetryPermutation momentum_inversion(int d) {
  require_dimension(d);
  return SymmetryPermutation::from_map(d, "m", [](PhasePoint p) { return PhasePoint{-p.k, p.l}; });
}

SymmetryPermutation quarter_rotation(int d) {
  require_dimension(d);
  return SymmetryPermutation::from_map(d, "r", [](PhasePoint p) { return PhasePoint{p.l, -p.k}; });
}

SymmetryPermutation vertical_shear(int d) {
  require_dimension(d);
  return SymmetryPermutation::from_map(d, "v", [](PhasePoint p) { return PhasePoint{p.k + p.l, p.l}; });
}

SymmetryPermutation translation(int d, int p, int q) {
  require_dimension(d);
  return SymmetryPermutation::from_map(d, "t" + std::to_string(mod(p, d)) + std::to_string(mod(q, d)),
                                       [=](PhasePoint x) { return PhasePoint{x.k + p, x.l + q}; });
}

std::vector<SymmetryPermutation> generators(int d) {
  std::vector<SymmetryPermutation> out{momentum_inversion(d), quarter_rotation(d), vertical_shear(d)};
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) out.push_back(translation(d, p, q));
  return out;
}

SymmetryGroup::SymmetryGroup(int d, std::vector<SymmetryPermutation> elements)
    : d_(d), elements_(std::move(elements)) {
  for (const auto& e : elements_)
    if (e.d != d || !e.is_bijection()) throw DomainError("group element is not a bijection on d^2 indices");
}

SymmetryGroup generate_group(int d) {
  require_dimension(d);
  // t_{1,0} and t_{0,1} generate every translation.
  const std::vector<SymmetryPermutation> gens{momentum_inversion(d), quarter_rotation(d), vertical_shear(d),
                                              translation(d, 1, 0), translation(d, 0, 1)};
  std::vector<SymmetryPermutation> elements{SymmetryPermutation::identity(d)};
  std::set<std::vector<int>> seen{elements.front().perm};
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (const auto& g : gens) {
      auto next = compose(g, elements[i]);
      if (elements[i].label == "e") next.label = g.label;
      if (seen.insert(next.perm).second) {
        elements.push_back(std::move(next));
        queue.push_back(elements.size() - 1);
      }
    }
  }
  return {d, std::move(elements)};
}

void write_group_json(std::ostream& out, const SymmetryGroup& group) {
  nlohmann::json j;
  j["d"] = group.d();
  auto perms = nlohmann::json::array();
  auto labels = nlohmann::json::array();
  for (const auto& e : group.elements()) {
    perms.push_back(e.perm);
    labels.push_back(e.label);
  }
  j["perms"] = std::move(perms);
  j["labels"] = std::move(labels);
  out << j.dump() << '\n';
}

SymmetryGroup read_group_json(std::istream& in) {
  const auto j = nlohmann::json::parse(in);
  const int d = j.at("d").get<int>();
  const auto& perms = j.at("perms");
  const bool has_labels = j.contains("labels");
  std::vector<SymmetryPermutation> elements;
  elements.reserve(perms.size());
  for (std::size_t i = 0; i < perms.size(); ++i)
    elements.push_back({d, perms[i].get<std::vector<int>>(),
                        has_labels ? j["labels"][i].get<std::string>() : std::string("g") + std::to_string(i)});
  return {d, std::move(elements)};
}

SymmetryGroup load_or_generate_group(int d, const std::filesystem::path& cache_dir) {
  const auto path = cache_dir / ("group_d" + std::to_string(d) + ".json");
  if (std::ifstream in{path}) {
    auto group = read_group_json(in);
    if (group.d() == d) return group;
  }
  auto group = generate_group(d);
  std::filesystem::create_directories(cache_dir);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out{tmp};
    write_group_json(out, group);
  }
  std::filesystem::rename(tmp, path);
  return group;
}

std::vector<double> apply(const SymmetryPermutation& sym, const std::vector<double>& v) {
  if (v.size() != sym.perm.size()) throw DomainError("symmetry and vector dimension differ");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(sym.perm[i])] = v[i];
  return out;
}

BellDiagonalState apply(const SymmetryPermutation& sym, const BellDiagonalState& s) {
  if (sym.d != s.d()) throw DomainError("symmetry and state dimension differ");
  return {s.d(), apply(sym, s.vector())};
}

std::vector<BellDiagonalState> orbit(const BellDiagonalState& s, const SymmetryGroup& group) {
  std::set<std::vector<std::int64_t>> seen;
  std::vector<BellDiagonalState> out;
  for (const auto& g : group.elements()) {
    auto image = apply(g, s);
    std::vector<std::int64_t> key(image.size());
    for (std::size_t i = 0; i < key.size(); ++i) key[i] = std::llround(image[i] * 1e12);
    if (seen.insert(std::move(key)).second) out.push_back(std::move(image));
  }
  return out;
}

}  // namespace bellclass
