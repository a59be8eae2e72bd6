// bellclass: sampling, classification, witness forging, vertex extension and
// exports for Bell-diagonal states.
//
// Exit codes: 0 success, 1 internal error, 2 usage, 3 missing or
// inconsistent resource files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bellclass/classifier.hpp"
#include "bellclass/hash.hpp"
#include "bellclass/parallel.hpp"
#include "bellclass/volume_lab.hpp"

namespace fs = std::filesystem;
using namespace bellclass;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Writes next to the target and renames, so readers never see partial files.
void write_atomic(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    return;
  }
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

/// Every artifact carries the hash of the canonical config of its run.
struct RunConfig {
  nlohmann::json fields = nlohmann::json::object();

  void add_input(const std::string& key, const std::string& path) {
    if (!path.empty()) fields[key] = hex64(fnv1a64(slurp(path)));
  }
  std::string fingerprint() const { return hex64(fnv1a64(fields.dump())); }
};

std::vector<LabeledState> read_states_file(const std::string& path) {
  std::istringstream in(slurp(path));
  try {
    return read_states_jsonl(in);
  } catch (const std::exception& e) {
    throw ResourceError(path + ": " + e.what());
  }
}

int homogeneous_dimension(const std::vector<LabeledState>& states, const std::string& path) {
  if (states.empty()) return 0;
  const int d = states.front().state.d();
  for (const auto& s : states)
    if (s.state.d() != d)
      throw ResourceError(path + ": states of different dimensions (" + std::to_string(d) + " and " +
                          std::to_string(s.state.d()) + ")");
  return d;
}

SymmetryGroup group_for(int d, const std::string& cache_dir) {
  return cache_dir.empty() ? generate_group(d) : load_or_generate_group(d, cache_dir);
}

std::string states_text(const std::vector<LabeledState>& states) {
  std::ostringstream os;
  write_states_jsonl(os, states);
  return os.str();
}

// ---------------------------------------------------------------------------

struct VolumesArgs {
  int d = 0;
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  std::string out;
  bool timing = false;
};

void run_volumes(const VolumesArgs& a, int workers) {
  if (a.n < 1000) throw UsageError("--n must be at least 1000");
  const auto report = estimate_volumes(a.d, a.n, a.seed, workers);
  write_atomic(a.out, volume_report_json(report, a.timing));
}

struct SampleArgs {
  int d = 0;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::string out;
  bool simplex = false;
};

void run_sample(const SampleArgs& a, int workers) {
  std::vector<LabeledState> states;
  if (a.simplex) {
    states.resize(a.n);
    parallel_for((a.n + kShardSize - 1) / kShardSize, workers, [&](std::size_t shard) {
      Rng rng = Rng::derive(a.seed, shard);
      const std::size_t end = std::min(a.n, (shard + 1) * kShardSize);
      for (std::size_t i = shard * kShardSize; i < end; ++i) states[i] = {"s" + std::to_string(i), sample_simplex(a.d, rng)};
    });
  } else {
    states = sample_enclosure_corpus(a.d, a.n, a.seed, workers);
  }
  write_atomic(a.out, states_text(states));
}

struct ClassifyArgs {
  int d = 0;
  std::size_t n = 0;
  std::string in;
  std::string bank;
  std::string vertices;
  std::string group_cache;
  bool orbit = true;
  bool full_evidence = false;
  std::uint64_t seed = 1;
  std::string out;
  std::string summary;
  std::string overlap;
  std::string states_out;
};

void run_classify(const ClassifyArgs& a, int workers) {
  if (a.in.empty() == (a.n == 0)) throw UsageError("give exactly one of --n and --in");
  if (a.in.empty() && a.d == 0) throw UsageError("--n requires --d");

  RunConfig run;
  run.fields = {{"command", "classify"}, {"orbit", a.orbit}, {"full_evidence", a.full_evidence}};
  std::vector<LabeledState> states;
  int d = a.d;
  if (!a.in.empty()) {
    states = read_states_file(a.in);
    const int file_d = homogeneous_dimension(states, a.in);
    if (d != 0 && file_d != 0 && file_d != d)
      throw ResourceError(a.in + ": states have d=" + std::to_string(file_d) + " but --d is " + std::to_string(d));
    if (d == 0) d = file_d;
    if (d == 0) throw UsageError("--in is empty; give --d");
    run.add_input("states", a.in);
  } else {
    run.fields["n"] = a.n;
    run.fields["seed"] = a.seed;
    states = sample_enclosure_corpus(d, a.n, a.seed, workers);
  }
  run.fields["d"] = d;

  ClassifierResources res;
  res.d = d;
  if (!a.bank.empty()) {
    std::istringstream in(slurp(a.bank));
    try {
      res.bank = WitnessBank(read_witness_bank(in));
    } catch (const std::exception& e) {
      throw ResourceError(a.bank + ": " + e.what());
    }
    if (!res.bank.empty() && res.bank.d() != d) throw ResourceError(a.bank + ": witness bank is for d=" + std::to_string(res.bank.d()));
    run.add_input("bank", a.bank);
  }
  if (!a.vertices.empty()) {
    std::istringstream in(slurp(a.vertices));
    try {
      res.vertices = read_vertex_set(in);
    } catch (const std::exception& e) {
      throw ResourceError(a.vertices + ": " + e.what());
    }
    if (res.vertices->d != d) throw ResourceError(a.vertices + ": vertex set is for d=" + std::to_string(res.vertices->d));
    run.add_input("vertices", a.vertices);
  } else if (d > 2) {
    res.vertices = SeparableVertexSet::kernel(d);
    res.vertices->symmetric = true;
  }
  if (a.orbit || (res.vertices && res.vertices->symmetric)) res.group = group_for(d, a.group_cache);
  if (d == 3 || d == 4) {
    res.mubs = standard_mubs(d);
    res.mub_shift = default_mub_shift(d);
  }

  ClassifierConfig cfg;
  cfg.use_orbit = a.orbit;
  cfg.full_evidence = a.full_evidence;
  const Classifier classifier(std::move(res), cfg);
  run.fields["classifier"] = classifier.fingerprint();

  const auto records = classify_batch(classifier, states, workers);
  auto summary = summarize(records, d, classifier.fingerprint());
  std::ostringstream rec_text;
  write_records(rec_text, records);
  write_atomic(a.out, rec_text.str());
  auto summary_doc = nlohmann::json::parse(summary_json(summary));
  summary_doc["run"] = run.fingerprint();
  write_atomic(a.summary.empty() ? a.out + ".summary.json" : a.summary, summary_doc.dump(2) + "\n");
  if (!a.overlap.empty()) write_atomic(a.overlap, overlap_json(detector_overlap(records, states), run.fingerprint()));
  if (!a.states_out.empty()) write_atomic(a.states_out, states_text(states));
  if (summary.conflicts > 0)
    std::cerr << "warning: " << summary.conflicts << " conflicting records (see evidence with conflict=true)\n";
}

struct ForgeArgs {
  int d = 0;
  std::size_t count = 0;
  std::uint64_t seed = 1;
  std::string out;
  int starts = 0;
  double margin = kWitnessMargin;
};

void run_forge(const ForgeArgs& a, int workers) {
  if (a.margin < 0.0) throw UsageError("--margin must be nonnegative");
  RunConfig run;
  run.fields = {{"command", "forge"}, {"d", a.d}, {"count", a.count}, {"seed", a.seed}, {"starts", a.starts}, {"margin", a.margin}};
  WitnessConfig cfg;
  cfg.optimizer.starts = a.starts;
  cfg.margin = a.margin;
  auto bank = forge_bank(a.d, a.count, a.seed, cfg, workers);
  for (auto& w : bank) w.meta.run = run.fingerprint();
  std::ostringstream os;
  write_witness_bank(os, bank);
  write_atomic(a.out, os.str());
}

struct ExtendArgs {
  int d = 0;
  std::string in;
  int budget = -1;
  std::uint64_t seed = 1;
  std::string out;
  bool symmetric = true;
  double resolution = 1e-3;
  bool product_points = true;
  std::string group_cache;
};

void run_extend(const ExtendArgs& a) {
  if (a.budget < 0) throw UsageError("--budget must be nonnegative");
  if (!(a.resolution > 0.0 && a.resolution < 1.0)) throw UsageError("--resolution must lie in (0, 1)");
  SeparableVertexSet vs;
  RunConfig run;
  run.fields = {{"command", "extend"}, {"budget", a.budget}, {"seed", a.seed}, {"symmetric", a.symmetric},
                {"resolution", a.resolution}, {"product_points", a.product_points}};
  if (!a.in.empty()) {
    std::istringstream in(slurp(a.in));
    try {
      vs = read_vertex_set(in);
    } catch (const std::exception& e) {
      throw ResourceError(a.in + ": " + e.what());
    }
    if (a.d != 0 && vs.d != a.d) throw ResourceError(a.in + ": vertex set is for d=" + std::to_string(vs.d));
    run.add_input("vertices", a.in);
  } else {
    if (a.d == 0) throw UsageError("give --d or --in");
    vs = SeparableVertexSet::kernel(a.d);
  }
  run.fields["d"] = vs.d;
  if (a.budget > 0) {
    ExtensionConfig cfg;
    cfg.resolution = a.resolution;
    cfg.keep_product_points = a.product_points;
    Rng rng(a.seed);
    const SymmetryGroup group = a.symmetric ? group_for(vs.d, a.group_cache) : SymmetryGroup{};
    vs = extend_vertices(vs, rng, a.budget, cfg, a.symmetric ? &group : nullptr);
    vs.fingerprint = run.fingerprint();
  }
  std::ostringstream os;
  write_vertex_set(os, vs);
  write_atomic(a.out, os.str());
}

struct ExportArgs {
  std::string in;
  std::string records;
  std::string coords;
  bool probe = false;
  std::string out;
};

std::array<int, 4> parse_coords(const std::string& text) {
  std::array<int, 4> idx{};
  std::stringstream ss(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(ss, item, ',')) {
    if (n == 4) throw UsageError("--coords takes exactly four indices");
    try {
      std::size_t used = 0;
      idx[n] = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--coords: not an integer: '" + item + "'");
    }
    ++n;
  }
  if (n != 4) throw UsageError("--coords takes exactly four indices");
  return idx;
}

void run_export(const ExportArgs& a) {
  if (a.probe == !a.coords.empty()) throw UsageError("give exactly one of --coords and --probe");
  std::array<int, 4> idx{};
  if (!a.probe) idx = parse_coords(a.coords);
  const auto states = read_states_file(a.in);
  homogeneous_dimension(states, a.in);
  std::vector<ClassificationRecord> records;
  if (!a.records.empty()) {
    std::istringstream in(slurp(a.records));
    try {
      records = read_records(in);
    } catch (const std::exception& e) {
      throw ResourceError(a.records + ": " + e.what());
    }
    if (records.size() != states.size()) throw ResourceError(a.records + ": record count does not match the states");
  }
  std::ostringstream os;
  try {
    if (a.probe)
      conjecture_probe(os, states, records);
    else
      export_scatter(os, states, records, idx);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  write_atomic(a.out, os.str());
  // CSV consumers expect the bare header, so the fingerprint goes to a sidecar.
  if (!a.out.empty() && a.out != "-") {
    RunConfig run;
    run.fields = {{"command", "export"}, {"probe", a.probe}, {"coords", a.coords}};
    run.add_input("states", a.in);
    run.add_input("records", a.records);
    nlohmann::json meta{{"fingerprint", run.fingerprint()}, {"config", run.fields}};
    write_atomic(a.out + ".meta.json", meta.dump(2) + "\n");
  }
}

struct GroupArgs {
  int d = 0;
  std::string out;
};

void run_group(const GroupArgs& a) {
  std::ostringstream os;
  write_group_json(os, generate_group(a.d));
  write_atomic(a.out, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement classification of Bell-diagonal qudit states"};
  app.require_subcommand(1);
  app.fallthrough();
  int workers = default_workers();
  app.add_option("--workers", workers, "Worker threads (default: $BELLCLASS_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  const auto dim = CLI::Range(2, 16);

  VolumesArgs va;
  auto* volumes = app.add_subcommand("volumes", "Relative volumes of E_d and of PPT states in M_d");
  volumes->add_option("--d", va.d, "Dimension")->required()->check(dim);
  volumes->add_option("--n", va.n, "Samples");
  volumes->add_option("--seed", va.seed, "Seed");
  volumes->add_option("--out", va.out, "Report path (stdout if omitted)");
  volumes->add_flag("--timing", va.timing, "Include wall time (makes the report non-reproducible)");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Uniform states of E_d (or M_d) as JSON lines");
  sample->add_option("--d", sa.d, "Dimension")->required()->check(dim);
  sample->add_option("--n", sa.n, "Samples");
  sample->add_option("--seed", sa.seed, "Seed");
  sample->add_option("--out", sa.out, "Output path (stdout if omitted)");
  sample->add_flag("--simplex", sa.simplex, "Sample the whole simplex M_d instead of E_d");

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "Label states FREE / SEP / BOUND / PPT_UNKNOWN");
  classify->add_option("--d", ca.d, "Dimension")->check(dim);
  classify->add_option("--n", ca.n, "Number of E_d samples to classify");
  classify->add_option("--in", ca.in, "State file (JSON lines)");
  classify->add_option("--witness-bank", ca.bank, "Witness bank file");
  classify->add_option("--vertices", ca.vertices, "Vertex-set file (default: kernel polytope)");
  classify->add_option("--group-cache", ca.group_cache, "Directory for cached symmetry groups");
  classify->add_flag("--orbit,!--no-orbit", ca.orbit, "Evaluate criteria over the symmetry orbit (default on)");
  classify->add_flag("--full-evidence", ca.full_evidence, "Evaluate every criterion instead of stopping early");
  classify->add_option("--seed", ca.seed, "Seed for --n sampling");
  classify->add_option("--out", ca.out, "Records path (JSON lines)")->required();
  classify->add_option("--summary", ca.summary, "Summary path (default: <out>.summary.json)");
  classify->add_option("--overlap", ca.overlap, "Detector overlap report path");
  classify->add_option("--states-out", ca.states_out, "Also write the classified states");

  ForgeArgs fa;
  auto* forge = app.add_subcommand("forge", "Generate certified random entanglement witnesses");
  forge->add_option("--d", fa.d, "Dimension")->required()->check(dim);
  forge->add_option("--count", fa.count, "Number of witnesses")->required();
  forge->add_option("--seed", fa.seed, "Seed");
  forge->add_option("--out", fa.out, "Bank path (JSON lines)")->required();
  forge->add_option("--starts", fa.starts, "Optimizer starts per bound (default 64*d)")->check(CLI::NonNegativeNumber);
  forge->add_option("--margin", fa.margin, "Safety margin added to the bounds");

  ExtendArgs ea;
  auto* extend = app.add_subcommand("extend", "Grow a separable vertex set by certified line search");
  extend->add_option("--d", ea.d, "Dimension (when starting from the kernel polytope)")->check(dim);
  extend->add_option("--in", ea.in, "Existing vertex-set file");
  extend->add_option("--budget", ea.budget, "Line-search vertices to add")->required();
  extend->add_option("--seed", ea.seed, "Seed");
  extend->add_option("--out", ea.out, "Output vertex-set path")->required();
  extend->add_flag("--symmetric,!--no-symmetric", ea.symmetric, "Use every symmetry image of the vertices (default on)");
  extend->add_option("--resolution", ea.resolution, "Bisection resolution of the mixing parameter");
  extend->add_flag("!--no-product-points", ea.product_points, "Do not add certificate product states as vertices");
  extend->add_option("--group-cache", ea.group_cache, "Directory for cached symmetry groups");

  ExportArgs xa;
  auto* exp = app.add_subcommand("export", "CSV exports: coordinate scatter or conjecture probe");
  exp->add_option("--in", xa.in, "State file")->required();
  exp->add_option("--records", xa.records, "Classification records aligned with the states");
  exp->add_option("--coords", xa.coords, "Four flat coordinate indices, e.g. 0,3,6,1");
  exp->add_flag("--probe", xa.probe, "Write distance / coset concentration / label instead");
  exp->add_option("--out", xa.out, "CSV path (stdout if omitted)");

  GroupArgs ga;
  auto* group = app.add_subcommand("group", "Write the symmetry group as JSON");
  group->add_option("--d", ga.d, "Dimension")->required()->check(dim);
  group->add_option("--out", ga.out, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*volumes) run_volumes(va, workers);
    else if (*sample) run_sample(sa, workers);
    else if (*classify) run_classify(ca, workers);
    else if (*forge) run_forge(fa, workers);
    else if (*extend) run_extend(ea);
    else if (*exp) run_export(xa);
    else if (*group) run_group(ga);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
