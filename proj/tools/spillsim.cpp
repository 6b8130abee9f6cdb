// spillsim: batch CLI for simulating randomized experiments under network
// interference and reporting what misspecifying the interference structure
// does to estimated spillover effects.
//
// Exit codes: 0 success, 2 usage/parameter error, 3 structure validation
// failure, 4 capability (exhaustive bound exceeded), 5 file I/O error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spillover/common.hpp"
#include "spillover/csv.hpp"
#include "spillover/estimation.hpp"
#include "spillover/exposure.hpp"
#include "spillover/misspec.hpp"
#include "spillover/model.hpp"
#include "spillover/structure.hpp"
#include "spillover/transform.hpp"

namespace fs = std::filesystem;
using namespace spillover;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitCapability = 4;
constexpr int kExitIo = 5;

const std::vector<double> kPGrid{0.1, 0.3, 0.5, 0.7, 0.9};

struct ValidationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StructureOptions {
  int ring_n = 0;
  int grid_width = 0;
  int grid_height = 0;
  std::string metric = "manhattan";
  std::string edges_path;
  int edges_n = 0;  // 0 = infer from labels
  int radius = 1;
  std::string structure_file;

  // filled by resolve() when an edge list was relabeled
  std::vector<std::string> labels;
  bool relabeled = false;
};

void add_config_option(CLI::App* cmd) {
  // consumed by expand_config before parsing; declared so it shows in help
  static std::string ignored;
  cmd->add_option("--config", ignored, "flat key=value config file; flags override");
}

void add_generator_options(CLI::App* cmd, StructureOptions& opts, bool allow_file) {
  cmd->add_option("--ring", opts.ring_n, "ring (cycle) structure with this many units");
  cmd->add_option("--grid-width", opts.grid_width, "grid width");
  cmd->add_option("--grid-height", opts.grid_height, "grid height");
  cmd->add_option("--metric", opts.metric, "grid metric: manhattan or chebyshev")
      ->check(CLI::IsMember({"manhattan", "chebyshev"}));
  cmd->add_option("--edges", opts.edges_path, "edge-list file; shells from BFS distances");
  cmd->add_option("--n", opts.edges_n, "unit count for --edges (default: inferred)");
  cmd->add_option("--radius", opts.radius, "maximum shell distance R");
  if (allow_file)
    cmd->add_option("--structure", opts.structure_file, "pre-built structure dump file");
}

void require_valid(const InterferenceStructure& s, const std::string& what) {
  const auto violations = validate(s);
  if (violations.empty()) return;
  std::string msg = what + " failed validation:";
  for (const auto& v : violations) msg += "\n  " + describe(v);
  throw ValidationFailed(msg);
}

InterferenceStructure resolve_structure(StructureOptions& opts) {
  int sources = 0;
  sources += opts.ring_n > 0;
  sources += opts.grid_width > 0 || opts.grid_height > 0;
  sources += !opts.edges_path.empty();
  sources += !opts.structure_file.empty();
  if (sources != 1)
    throw std::invalid_argument(
        "specify exactly one structure source: --ring, --grid-width/--grid-height, "
        "--edges, or --structure");

  InterferenceStructure s;
  if (opts.ring_n > 0) {
    s = ring_structure(opts.ring_n, opts.radius);
  } else if (opts.grid_width > 0 || opts.grid_height > 0) {
    if (opts.grid_width < 1 || opts.grid_height < 1)
      throw std::invalid_argument("grid needs both --grid-width and --grid-height >= 1");
    const GridMetric metric =
        opts.metric == "chebyshev" ? GridMetric::chebyshev : GridMetric::manhattan;
    s = grid_structure(opts.grid_width, opts.grid_height, opts.radius, metric);
  } else if (!opts.edges_path.empty()) {
    EdgeListData data = read_edge_list_file(opts.edges_path);
    if (opts.edges_n > 0) {
      for (const auto& [a, b] : data.edges)
        if (a >= opts.edges_n || b >= opts.edges_n)
          throw std::invalid_argument("edge id exceeds --n");
      data.n = opts.edges_n;
    }
    if (data.n == 0) throw std::invalid_argument("edge list is empty and no --n given");
    opts.labels = data.labels;
    opts.relabeled = data.relabeled;
    s = bfs_shells(data.n, data.edges, opts.radius);
  } else {
    s = read_structure_file(opts.structure_file);
  }
  require_valid(s, "structure");
  return s;
}

struct ModelOptions {
  std::string model_file;
  double random_lo = 0.0;
  double random_hi = 0.0;
  bool random_requested = false;
  std::uint64_t model_seed = 1;
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
  cmd->add_option("--model", opts.model_file, "model file `i alpha beta gamma_1..gamma_R`");
  auto* lo = cmd->add_option("--random-lo", opts.random_lo,
                             "random model: lower coefficient bound");
  auto* hi = cmd->add_option("--random-hi", opts.random_hi,
                             "random model: upper coefficient bound");
  cmd->add_option("--model-seed", opts.model_seed, "random model seed");
  lo->needs(hi);
  hi->needs(lo);
  cmd->parse_complete_callback([&opts, lo] { opts.random_requested = lo->count() > 0; });
}

OutcomeModel resolve_model(const ModelOptions& opts, const InterferenceStructure& s) {
  if (opts.model_file.empty() == !opts.random_requested)
    throw std::invalid_argument("specify exactly one of --model or --random-lo/--random-hi");
  OutcomeModel m;
  if (!opts.model_file.empty())
    m = read_model_file(opts.model_file);
  else
    m = random_model(s, opts.random_lo, opts.random_hi, opts.model_seed);
  check_dimensions(m, s);
  return m;
}

struct AssumedOptions {
  std::string kind = "identity";
  std::string assumed_file;
  double rho = 0.1;
  double kappa = 0.5;
  std::uint64_t assumed_seed = 0;
};

void add_assumed_options(CLI::App* cmd, AssumedOptions& opts) {
  cmd->add_option("--assumed", opts.kind,
                  "assumed-structure transform: identity, shell_swap, radius_shift, "
                  "edge_rewire, subset_sample, or file")
      ->check(CLI::IsMember({"identity", "shell_swap", "radius_shift", "edge_rewire",
                             "subset_sample", "file"}));
  cmd->add_option("--assumed-file", opts.assumed_file, "assumed structure dump (with --assumed file)");
  cmd->add_option("--rho", opts.rho, "edge_rewire: per-member rewire probability");
  cmd->add_option("--kappa", opts.kappa, "subset_sample: per-member keep probability");
  cmd->add_option("--assumed-seed", opts.assumed_seed, "seed for seeded transforms");
}

InterferenceStructure resolve_assumed(const AssumedOptions& opts,
                                      const InterferenceStructure& truth) {
  if (opts.kind == "identity") return truth;
  if (opts.kind == "file") {
    if (opts.assumed_file.empty())
      throw std::invalid_argument("--assumed file requires --assumed-file");
    InterferenceStructure assumed = read_structure_file(opts.assumed_file);
    require_valid(assumed, "assumed structure");
    if (assumed.n != truth.n || assumed.radius != truth.radius)
      throw std::invalid_argument("assumed structure must share n and radius with the truth");
    return assumed;
  }
  const auto kind = transform_kind_from_string(opts.kind);
  if (!kind) throw std::invalid_argument("unknown assumed transform: " + opts.kind);
  MisspecTransform t;
  switch (*kind) {
    case MisspecTransform::Kind::shell_swap: t = MisspecTransform::shell_swap(); break;
    case MisspecTransform::Kind::radius_shift: t = MisspecTransform::radius_shift(); break;
    case MisspecTransform::Kind::edge_rewire:
      t = MisspecTransform::edge_rewire(opts.rho, opts.assumed_seed);
      break;
    case MisspecTransform::Kind::subset_sample:
      t = MisspecTransform::subset_sample(opts.kappa, opts.assumed_seed);
      break;
    case MisspecTransform::Kind::replace_with:
      throw std::invalid_argument("use --assumed file with --assumed-file");
  }
  return apply_misspec(truth, t);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write output file: " + path);
  return out;
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

// Flat key=value config support: keys are long option names without the
// leading dashes; '#' starts a comment. Keys already present on the command
// line are skipped, so flags override file values.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw IoError("config line " + std::to_string(lineno) + ": empty key");
    const std::string flag = "--" + key;
    bool overridden = false;
    for (std::size_t i = 0; i < args.size() && !overridden; ++i)
      overridden = args[i] == flag || args[i].rfind(flag + "=", 0) == 0;
    if (!overridden) args.push_back(flag + "=" + value);
  }
  return args;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
}

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("--p must be in (0, 1)");
}

void check_bound(int bound) {
  if (bound < 1 || bound > kMaxExhaustiveBound)
    throw std::invalid_argument("--bound must be in 1.." + std::to_string(kMaxExhaustiveBound));
}

// ---- commands ----

struct GenerateArgs {
  StructureOptions structure;
  std::string out;
  std::string labels_out;
};

void run_generate(GenerateArgs& args) {
  const InterferenceStructure s = resolve_structure(args.structure);
  write_structure_file(args.out, s);
  std::string labels_path = args.labels_out;
  if (labels_path.empty() && args.structure.relabeled) labels_path = args.out + ".labels";
  if (!labels_path.empty() && !args.structure.labels.empty()) {
    auto out = open_out(labels_path);
    for (std::size_t i = 0; i < args.structure.labels.size(); ++i)
      out << i << ' ' << args.structure.labels[i] << '\n';
  }
  std::cout << "wrote structure n=" << s.n << " radius=" << s.radius << " to " << args.out
            << "\nvalidation: ok\n";
}

struct TruthArgs {
  StructureOptions structure;
  ModelOptions model;
  std::string out;
};

void run_truth(TruthArgs& args) {
  const InterferenceStructure s = resolve_structure(args.structure);
  const OutcomeModel m = resolve_model(args.model, s);
  const Estimands e = estimands(m, s);
  const double oracle = policy_effect_oracle(m, s);
  std::ostringstream csv;
  csv << "beta_bar,gamma_bar,policy_effect,policy_effect_oracle\n"
      << g17(e.beta_bar) << ',' << g17(e.gamma_bar) << ',' << g17(e.policy_effect) << ','
      << g17(oracle) << '\n';
  if (args.out.empty()) {
    std::cout << csv.str();
  } else {
    open_out(args.out) << csv.str();
  }
}

struct SimulateArgs {
  StructureOptions structure;
  ModelOptions model;
  double p = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

void run_simulate(SimulateArgs& args) {
  check_p(args.p);
  const InterferenceStructure s = resolve_structure(args.structure);
  const OutcomeModel m = resolve_model(args.model, s);
  const ExperimentRecord record = simulate(m, s, args.p, args.seed);
  std::ostringstream csv;
  csv << "i,z,y\n";
  for (int i = 0; i < s.n; ++i)
    csv << i << ',' << int{record.z.z[i]} << ',' << g17(record.y[i]) << '\n';
  if (args.out.empty()) {
    std::cout << csv.str();
  } else {
    open_out(args.out) << csv.str();
  }
}

struct EstimateArgs {
  StructureOptions structure;
  ModelOptions model;
  AssumedOptions assumed;
  double p = 0.5;
  long reps = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string dump_pi;
};

void run_estimate(EstimateArgs& args) {
  check_p(args.p);
  if (args.reps < 1) throw std::invalid_argument("--reps must be >= 1");
  const InterferenceStructure truth = resolve_structure(args.structure);
  const OutcomeModel m = resolve_model(args.model, truth);
  const InterferenceStructure assumed = resolve_assumed(args.assumed, truth);
  ensure_dir(args.out);

  auto reps_csv = open_out((fs::path(args.out) / "reps.csv").string());
  write_per_rep_csv_header(reps_csv);
  const MonteCarloSummary summary =
      monte_carlo(m, truth, assumed, args.p, args.reps, args.seed, &reps_csv);
  auto summary_csv = open_out((fs::path(args.out) / "summary.csv").string());
  write_summary_csv(summary_csv, summary);

  if (!args.dump_pi.empty()) {
    auto pi_csv = open_out(args.dump_pi);
    write_probability_table_csv(pi_csv, basis_probability_table(assumed, args.p));
  }
  std::cout << "wrote " << args.reps << " replicate(s) to " << args.out << '\n';
}

struct MisspecArgs {
  StructureOptions structure;
  ModelOptions model;
  AssumedOptions assumed;
  double p = 0.5;
  int bound = kDefaultExhaustiveBound;
  bool closed_only = false;
  std::string demo_kind;
  std::string out;
};

void write_misspec_outputs(const std::string& dir, const MisspecReport& report,
                           std::optional<double> spread) {
  ensure_dir(dir);
  auto report_csv = open_out((fs::path(dir) / "report.csv").string());
  write_misspec_report_csv(report_csv, report, spread);
  auto weights_csv = open_out((fs::path(dir) / "weights.csv").string());
  write_weights_csv(weights_csv, report.weights);
}

std::optional<double> p_grid_spread(const OutcomeModel& m, const InterferenceStructure& truth,
                                    const InterferenceStructure& assumed, int bound) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (double p : kPGrid) {
    const double value = misspec_gamma_definitional(m, truth, assumed, p, bound).gamma_breve;
    lo = first ? value : std::min(lo, value);
    hi = first ? value : std::max(hi, value);
    first = false;
  }
  return hi - lo;
}

void run_demo_kind(const std::string& kind_name, const std::string& dir, int bound) {
  const auto kind = adversarial_kind_from_string(kind_name);
  if (!kind)
    throw std::invalid_argument(
        "unknown demo kind (expected sign_flip, magnitude_inflation, or cancellation)");
  const AdversarialInstance inst = adversarial_instance(*kind);
  const auto spread = p_grid_spread(inst.model, inst.truth, inst.assumed, bound);
  write_misspec_outputs(dir, inst.report, spread);
  write_structure_file((fs::path(dir) / "true_structure.txt").string(), inst.truth);
  write_structure_file((fs::path(dir) / "assumed_structure.txt").string(), inst.assumed);
  write_model_file((fs::path(dir) / "model.txt").string(), inst.model);
  std::cout << "wrote " << kind_name << " demo to " << dir << '\n';
}

void run_misspec(MisspecArgs& args) {
  check_p(args.p);
  check_bound(args.bound);
  if (!args.demo_kind.empty()) {
    run_demo_kind(args.demo_kind, args.out, args.bound);
    return;
  }
  const InterferenceStructure truth = resolve_structure(args.structure);
  const OutcomeModel m = resolve_model(args.model, truth);
  const InterferenceStructure assumed = resolve_assumed(args.assumed, truth);
  if (!args.closed_only && truth.n > args.bound)
    throw BoundExceeded("n=" + std::to_string(truth.n) + " exceeds --bound " +
                        std::to_string(args.bound) +
                        "; pass --closed-only to skip the enumeration route");
  const MisspecReport report =
      misspec_report(m, truth, assumed, args.p, !args.closed_only, args.bound);
  std::optional<double> spread;
  if (!args.closed_only) spread = p_grid_spread(m, truth, assumed, args.bound);
  write_misspec_outputs(args.out, report, spread);
  std::cout << "wrote misspecification report to " << args.out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and estimation for randomized experiments under network interference"};
  app.require_subcommand(1);

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "generate an interference structure file");
  add_config_option(gen);
  add_generator_options(gen, gen_args.structure, /*allow_file=*/false);
  gen->add_option("--out", gen_args.out, "structure output file")->required();
  gen->add_option("--labels-out", gen_args.labels_out, "where to write the edge-label map");

  TruthArgs truth_args;
  auto* truth = app.add_subcommand("truth", "true estimands plus the policy-effect oracle");
  add_config_option(truth);
  add_generator_options(truth, truth_args.structure, /*allow_file=*/true);
  add_model_options(truth, truth_args.model);
  truth->add_option("--out", truth_args.out, "CSV output file (default: stdout)");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "draw one Bernoulli experiment");
  add_config_option(sim);
  add_generator_options(sim, sim_args.structure, /*allow_file=*/true);
  add_model_options(sim, sim_args.model);
  sim->add_option("--p", sim_args.p, "treatment probability");
  sim->add_option("--seed", sim_args.seed, "draw seed");
  sim->add_option("--out", sim_args.out, "CSV output file (default: stdout)");

  EstimateArgs est_args;
  auto* est = app.add_subcommand("estimate", "Monte Carlo Horvitz-Thompson study");
  add_config_option(est);
  add_generator_options(est, est_args.structure, /*allow_file=*/true);
  add_model_options(est, est_args.model);
  add_assumed_options(est, est_args.assumed);
  est->add_option("--p", est_args.p, "treatment probability");
  est->add_option("--reps", est_args.reps, "number of replicates");
  est->add_option("--seed", est_args.seed, "master seed");
  est->add_option("--out", est_args.out, "output directory")->required();
  est->add_option("--dump-pi", est_args.dump_pi, "also dump the basis exposure probabilities");

  MisspecArgs mis_args;
  auto* mis = app.add_subcommand("misspec", "misspecified spillover report and weights");
  add_config_option(mis);
  add_generator_options(mis, mis_args.structure, /*allow_file=*/true);
  add_model_options(mis, mis_args.model);
  add_assumed_options(mis, mis_args.assumed);
  mis->add_option("--p", mis_args.p, "design probability for the enumeration route");
  mis->add_option("--bound", mis_args.bound, "exhaustive enumeration bound");
  mis->add_flag("--closed-only", mis_args.closed_only, "skip the enumeration route");
  mis->add_option("--demo", mis_args.demo_kind,
                  "write a prebuilt adversarial demo instead (sign_flip, "
                  "magnitude_inflation, cancellation)");
  mis->add_option("--out", mis_args.out, "output directory")->required();

  struct DemoArgs {
    std::string kind;
    int bound = kDefaultExhaustiveBound;
    std::string out;
  } demo_args;
  auto* demo = app.add_subcommand("demo", "prebuilt adversarial misspecification instance");
  add_config_option(demo);
  demo->add_option("--kind", demo_args.kind,
                   "sign_flip, magnitude_inflation, or cancellation")
      ->required();
  demo->add_option("--bound", demo_args.bound, "exhaustive enumeration bound");
  demo->add_option("--out", demo_args.out, "output directory")->required();

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11's vector overload wants reversed args
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }

  try {
    if (app.got_subcommand(gen)) run_generate(gen_args);
    if (app.got_subcommand(truth)) run_truth(truth_args);
    if (app.got_subcommand(sim)) run_simulate(sim_args);
    if (app.got_subcommand(est)) run_estimate(est_args);
    if (app.got_subcommand(mis)) run_misspec(mis_args);
    if (app.got_subcommand(demo)) {
      check_bound(demo_args.bound);
      run_demo_kind(demo_args.kind, demo_args.out, demo_args.bound);
    }
  } catch (const ValidationFailed& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const BoundExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCapability;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
