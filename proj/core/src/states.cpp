#include "bellclass/states.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace bellclass {

BellDiagonalState::BellDiagonalState(int d, std::vector<double> c) : d_(d), c_(std::move(c)) {
  require_dimension(d);
  if (c_.size() != static_cast<std::size_t>(d) * d)
    throw DomainError("state needs d^2 = " + std::to_string(d * d) + " coordinates, got " +
                      std::to_string(c_.size()));
  double sum = 0.0;
  for (double x : c_) {
    if (!std::isfinite(x)) throw DomainError("state coordinate is not finite");
    if (x < -kNormSlack) throw DomainError("state coordinate is negative: " + std::to_string(x));
    sum += x;
  }
  // Summation error grows with d^2; keep the slack relative to the term count.
  const double tol = std::max(kNormSlack, 4.0 * static_cast<double>(c_.size()) * 1e-16);
  if (std::abs(sum - 1.0) > tol)
    throw DomainError("state coordinates must sum to 1, got " + std::to_string(sum));
}

BellDiagonalState BellDiagonalState::uniform(int d) {
  require_dimension(d);
  return {d, std::vector<double>(static_cast<std::size_t>(d) * d, 1.0 / (d * d))};
}

BellDiagonalState BellDiagonalState::indicator(int d, int k, int l) {
  require_dimension(d);
  std::vector<double> c(static_cast<std::size_t>(d) * d, 0.0);
  c.at(static_cast<std::size_t>(mod(k, d) * d + mod(l, d))) = 1.0;
  return {d, std::move(c)};
}

double BellDiagonalState::max_coord() const { return *std::max_element(c_.begin(), c_.end()); }

double BellDiagonalState::purity() const {
  return std::inner_product(c_.begin(), c_.end(), c_.begin(), 0.0);
}

BellDiagonalState mix(const BellDiagonalState& a, const BellDiagonalState& b, double lambda) {
  if (a.d() != b.d()) throw DomainError("cannot mix states of different dimension");
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = lambda * a[i] + (1.0 - lambda) * b[i];
  return {a.d(), std::move(c)};
}

ComplexMatrix density_matrix(const BellDiagonalState& s) {
  const int d = s.d();
  // rho[(i, i+l), (j, j+l)] = (1/d) sum_k c_{k,l} w^{(i-j) k}
  ComplexMatrix rho = ComplexMatrix::Zero(d * d, d * d);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Complex v = 0.0;
        for (int k = 0; k < d; ++k) v += s.at(k, l) * omega(d, static_cast<long long>(i - j) * k);
        rho(i * d + mod(i + l, d), j * d + mod(j + l, d)) = v / static_cast<double>(d);
      }
  return rho;
}

std::vector<double> bell_coordinates(const ComplexMatrix& rho, int d) {
  std::vector<double> c(static_cast<std::size_t>(d) * d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const ComplexVector v = bell_state(d, k, l);
      c[static_cast<std::size_t>(k * d + l)] = (v.adjoint() * rho * v)(0, 0).real();
    }
  return c;
}

BellDiagonalState sample_simplex(int d, Rng& rng) {
  require_dimension(d);
  std::vector<double> c(static_cast<std::size_t>(d) * d);
  double sum = 0.0;
  for (double& x : c) {
    x = rng.exponential();
    sum += x;
  }
  for (double& x : c) x /= sum;
  return {d, std::move(c)};
}

BellDiagonalState sample_enclosure(int d, Rng& rng, std::size_t* proposals) {
  for (;;) {
    BellDiagonalState s = sample_simplex(d, rng);
    if (proposals) ++*proposals;
    if (in_enclosure(s)) return s;
  }
}

bool in_enclosure(const BellDiagonalState& s) {
  return s.max_coord() <= 1.0 / s.d() + kNormSlack;
}

BellDiagonalState coset_state(const PhaseSubgroup& coset) {
  const int d = coset.d;
  std::vector<double> c(static_cast<std::size_t>(d) * d, 0.0);
  for (const auto& p : coset.points) c[static_cast<std::size_t>(p.flat(d))] = 1.0 / d;
  return {d, std::move(c)};
}

std::vector<KernelVertex> kernel_vertices(int d) {
  std::vector<KernelVertex> out;
  for (auto& coset : enumerate_cosets(d)) {
    auto state = coset_state(coset);
    out.push_back({std::move(coset), std::move(state)});
  }
  return out;
}

ComplexVector product_amplitudes(const ComplexVector& a, const ComplexVector& b) {
  const auto d = static_cast<int>(a.size());
  require_dimension(d);
  if (b.size() != d) throw DomainError("product factors must have equal dimension");
  // <Omega_{k,l}| a (x) b> = (1/sqrt d) sum_j w^{-jk} a_j b_{j+l}
  ComplexVector z(d * d);
  std::vector<Complex> phase(static_cast<std::size_t>(d));
  for (int t = 0; t < d; ++t) phase[static_cast<std::size_t>(t)] = omega(d, -t);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) {
      Complex acc = 0.0;
      for (int j = 0; j < d; ++j)
        acc += phase[static_cast<std::size_t>((j * k) % d)] * a(j) * b((j + l) % d);
      z(k * d + l) = norm * acc;
    }
  return z;
}

std::vector<double> product_coordinates(const ComplexVector& a, const ComplexVector& b) {
  const ComplexVector z = product_amplitudes(a, b);
  const double scale = 1.0 / (a.squaredNorm() * b.squaredNorm());
  std::vector<double> c(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) c[static_cast<std::size_t>(i)] = std::norm(z(i)) * scale;
  return c;
}

std::string to_json_line(const LabeledState& s) {
  nlohmann::json j;
  j["d"] = s.state.d();
  j["c"] = s.state.vector();
  if (!s.id.empty()) j["id"] = s.id;
  return j.dump();
}

LabeledState labeled_state_from_json_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  LabeledState out;
  out.state = BellDiagonalState(j.at("d").get<int>(), j.at("c").get<std::vector<double>>());
  if (j.contains("id")) out.id = j.at("id").get<std::string>();
  return out;
}

void write_states_jsonl(std::ostream& out, std::span<const LabeledState> states) {
  for (const auto& s : states) out << to_json_line(s) << '\n';
}

std::vector<LabeledState> read_states_jsonl(std::istream& in) {
  std::vector<LabeledState> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(labeled_state_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("state file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace bellclass
