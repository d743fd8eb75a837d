// Command-line runner: configure instances, execute exact or sampled
// analyses, and emit stable-ordered JSON/CSV reports.  Identical
// (configuration, seed) pairs produce byte-identical output; exit codes are
// 0 on success, 1 on verification failure, 2 on usage/config errors.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "dqma/acceptance.hpp"
#include "dqma/classical.hpp"
#include "dqma/path.hpp"
#include "dqma/random.hpp"
#include "dqma/serialize.hpp"
#include "dqma/tree.hpp"

namespace {

using dqma::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + out_path);
  out << payload;
}

dqma::exec::Mode parse_mode(const std::string& mode) {
  if (mode == "serial") return dqma::exec::Mode::serial;
  if (mode == "parallel") return dqma::exec::Mode::parallel;
  throw ConfigError("unknown execution mode: " + mode + " (serial|parallel)");
}

ordered_json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    // e.what() carries the byte position of the failure.
    throw ConfigError(std::string("config parse error in ") + path + ": " + e.what());
  }
}

// Fill variables from a config document, but only for options the user did
// not pass on the command line; rejects unknown fields.
class ConfigMerge {
 public:
  ConfigMerge(CLI::App* cmd, const ordered_json& doc) : cmd_(cmd), doc_(doc) {}

  template <class T>
  void field(const char* json_name, const char* flag, T& value) {
    known_.push_back(json_name);
    auto it = doc_.find(json_name);
    if (it == doc_.end()) return;
    if (cmd_->get_option(flag)->count() > 0) return;  // explicit flag wins
    try {
      value = it->get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config field \"") + json_name + "\": " + e.what());
    }
    provided_.push_back(json_name);
  }

  bool provided(const char* json_name) const {
    for (const auto& name : provided_)
      if (name == json_name) return true;
    return false;
  }

  void finish() const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      bool ok = false;
      for (const auto& name : known_)
        if (name == it.key()) ok = true;
      if (!ok) throw ConfigError("unknown config field \"" + it.key() + "\"");
    }
  }

 private:
  CLI::App* cmd_;
  const ordered_json& doc_;
  std::vector<std::string> known_;
  std::vector<std::string> provided_;
};

std::string format12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Strategy construction shared by path-run / path-sweep / tree-run.

dqma::ProverStrategy make_path_strategy(const std::string& name, int r, dqma::Index dim,
                                        std::uint64_t seed, dqma::Index dim_cap) {
  if (name == "honest") return dqma::HonestStrategy{};
  if (name == "rotation") return dqma::RotationStrategy{};
  if (name == "product-random") {
    dqma::rnd::Rng rng(seed);
    dqma::ProductStrategy strategy;
    for (int j = 1; j < r; ++j) {
      if (rng.bits() % 2 == 0)
        strategy.certificates.push_back(dqma::rnd::haar_state(rng, dim).to_density());
      else
        strategy.certificates.push_back(dqma::rnd::ginibre_density(rng, dim));
    }
    return strategy;
  }
  if (name == "global-random") {
    dqma::Index joint = 1;
    for (int j = 1; j < r; ++j) {
      if (joint > dim_cap / dim)
        throw dqma::cap_exceeded_error(
            "global-random strategy: joint certificate space exceeds the cap");
      joint *= dim;
    }
    dqma::rnd::Rng rng(seed);
    return dqma::GlobalStrategy{dqma::rnd::ginibre_density(rng, joint)};
  }
  throw ConfigError("unknown strategy: " + name +
                    " (honest|rotation|product-random|global-random)");
}

dqma::TreeStrategy make_tree_strategy(const std::string& name, const dqma::Network& net,
                                      dqma::Index dim, std::uint64_t seed, int target,
                                      dqma::Index dim_cap) {
  if (name == "honest") return dqma::TreeHonest{};
  if (name == "rotation") return dqma::TreeRotation{target};
  const dqma::CertTree tree = dqma::build_cert_tree(net);
  std::vector<int> cert_nodes;
  for (int v : tree.node_ids())
    if (v != tree.root && (tree.is_primed(v) || net.terminal_index(v) < 0))
      cert_nodes.push_back(v);
  if (name == "product-random") {
    dqma::rnd::Rng rng(seed);
    dqma::TreeProduct strategy;
    for (int v : cert_nodes)
      strategy.certificates.emplace(v, dqma::rnd::ginibre_density(rng, dim));
    return strategy;
  }
  if (name == "global-random") {
    dqma::Index joint = 1;
    for (std::size_t i = 0; i < cert_nodes.size(); ++i) {
      if (joint > dim_cap / dim)
        throw dqma::cap_exceeded_error(
            "global-random strategy: joint certificate space exceeds the cap");
      joint *= dim;
    }
    dqma::rnd::Rng rng(seed);
    return dqma::TreeGlobal{dqma::rnd::ginibre_density(rng, joint)};
  }
  throw ConfigError("unknown strategy: " + name +
                    " (honest|rotation|product-random|global-random)");
}

dqma::OneWayProtocol choose_protocol(bool toy, int input_bits) {
  if (toy) {
    if (input_bits != 1) throw ConfigError("--toy requires 1-bit inputs");
    return dqma::qubit_eq_protocol();
  }
  return dqma::eq_protocol(dqma::make_family(input_bits));
}

// ---------------------------------------------------------------------------
// swap-test

struct SwapTestArgs {
  int dim = 2;
  int left_basis = 0;
  int right_basis = 0;
  bool haar = false;
  int fingerprint_bits = 0;
  std::string x, y;
  std::uint64_t seed = 0;
  std::string out;
};

int run_swap_test(const SwapTestArgs& args) {
  ordered_json config;
  double overlap_sq = 0.0;
  if (args.fingerprint_bits > 0) {
    const dqma::HashFamily family = dqma::make_family(args.fingerprint_bits);
    const dqma::Fingerprint fx = dqma::fingerprint_of(family, args.x);
    const dqma::Fingerprint fy = dqma::fingerprint_of(family, args.y);
    const double ip = dqma::inner_product(fx, fy);
    overlap_sq = ip * ip;
    config = {{"kind", "fingerprint"},
              {"inputBits", args.fingerprint_bits},
              {"fieldPrime", family.field_prime},
              {"x", args.x},
              {"y", args.y}};
  } else if (args.haar) {
    dqma::rnd::Rng rng(args.seed);
    const dqma::PureState psi = dqma::rnd::haar_state(rng, args.dim);
    const dqma::PureState phi = dqma::rnd::haar_state(rng, args.dim);
    overlap_sq = std::norm(psi.amplitudes().dot(phi.amplitudes()));
    config = {{"kind", "haar"}, {"dim", args.dim}, {"seed", args.seed}};
  } else {
    if (args.left_basis < 0 || args.left_basis >= args.dim || args.right_basis < 0 ||
        args.right_basis >= args.dim)
      throw ConfigError("basis index out of range");
    overlap_sq = args.left_basis == args.right_basis ? 1.0 : 0.0;
    config = {{"kind", "basis"},
              {"dim", args.dim},
              {"left", args.left_basis},
              {"right", args.right_basis}};
  }
  ordered_json doc;
  doc["schemaVersion"] = dqma::kSchemaVersion;
  doc["config"] = config;
  doc["innerProductSquared"] = dqma::round12(overlap_sq);
  doc["acceptProbability"] = dqma::round12(0.5 + 0.5 * overlap_sq);
  emit(args.out, dqma::dump_json(doc));
  return 0;
}

// ---------------------------------------------------------------------------
// path-run

struct PathRunArgs {
  int r = 2;
  int n = 4;
  bool toy = false;
  std::string x, y;
  std::string strategy = "honest";
  std::uint64_t seed = 0;
  bool seed_given = false;
  long trials = 0;
  int reps = 1;
  std::string mode = "parallel";
  long dim_cap = dqma::kDefaultDimCap;
  std::string out;
};

int run_path_run(const PathRunArgs& args) {
  const dqma::OneWayProtocol pi = choose_protocol(args.toy, args.toy ? 1 : args.n);
  std::string x = args.x.empty() ? std::string(pi.input_bits, '0') : args.x;
  std::string y = args.y.empty() ? std::string(pi.input_bits, '1') : args.y;
  const bool needs_seed = args.trials > 0 || args.strategy == "product-random" ||
                          args.strategy == "global-random";
  if (needs_seed && !args.seed_given)
    throw ConfigError("--seed is required for sampled runs and random strategies");
  const dqma::PathInstance instance{args.r, pi, x, y};
  const dqma::ProverStrategy strategy =
      make_path_strategy(args.strategy, args.r, pi.message_dim, args.seed, args.dim_cap);
  const dqma::exec::Mode mode = parse_mode(args.mode);

  dqma::AcceptanceReport report;
  if (args.trials > 0) {
    if (args.reps != 1)
      throw ConfigError("sampled runs analyze a single round; drop --reps or --trials");
    report = dqma::sampled_acceptance(instance, strategy, args.trials, args.seed, mode,
                                      args.dim_cap);
  } else if (args.reps != 1) {
    report = dqma::repeat_protocol(instance, strategy, args.reps, mode, args.dim_cap);
  } else {
    report = dqma::exact_acceptance(instance, strategy, mode, args.dim_cap);
  }

  ordered_json doc;
  doc["schemaVersion"] = dqma::kSchemaVersion;
  doc["config"] = {{"r", args.r},          {"protocol", pi.name},
                   {"x", x},               {"y", y},
                   {"strategy", args.strategy}, {"trials", args.trials},
                   {"repetitions", args.reps},  {"mode", args.mode}};
  if (needs_seed) doc["config"]["seed"] = args.seed;
  doc["report"] = dqma::path_report_json(report);
  emit(args.out, dqma::dump_json(doc));
  return 0;
}

// ---------------------------------------------------------------------------
// path-sweep

struct PathSweepArgs {
  int r_min = 2;
  int r_max = 6;
  int n = 4;
  bool toy = false;
  std::string strategy = "rotation";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string mode = "parallel";
  std::string out;
};

const char* kSweepDescription =
    "path-sweep columns:\n"
    "  r                    path length (number of edges)\n"
    "  n                    input bits of the equality protocol\n"
    "  strategy             prover strategy under analysis\n"
    "  acceptance           exact single-round acceptance probability\n"
    "  rejection            1 - acceptance\n"
    "  rejectionBound       1/(42 r^2), the guaranteed rejection on 0-inputs\n"
    "  soundnessSum         sum of per-test conditional rejection probabilities\n"
    "  soundnessBound       1/(21 r), the guaranteed value of soundnessSum\n"
    "  repetitions          the standard budget k = 84 r^2\n"
    "  repeatedAcceptance   acceptance^repetitions\n"
    "  certificateQubits    per-node certificate qubits under k repetitions\n"
    "floats are printed with 12 significant digits\n";

int run_path_sweep(const PathSweepArgs& args) {
  const dqma::OneWayProtocol pi = choose_protocol(args.toy, args.toy ? 1 : args.n);
  const std::string x(pi.input_bits, '0');
  const std::string y(pi.input_bits, '1');
  if ((args.strategy == "product-random" || args.strategy == "global-random") &&
      !args.seed_given)
    throw ConfigError("--seed is required for random strategies");
  if (args.r_min < 1 || args.r_max < args.r_min)
    throw ConfigError("need 1 <= r-min <= r-max");
  const dqma::exec::Mode mode = parse_mode(args.mode);

  std::ostringstream csv;
  csv << "r,n,strategy,acceptance,rejection,rejectionBound,soundnessSum,soundnessBound,"
         "repetitions,repeatedAcceptance,certificateQubits\n";
  for (int r = args.r_min; r <= args.r_max; ++r) {
    const dqma::PathInstance instance{r, pi, x, y};
    const dqma::ProverStrategy strategy = make_path_strategy(
        args.strategy, r, pi.message_dim, args.seed + static_cast<std::uint64_t>(r),
        dqma::kDefaultDimCap);
    const dqma::AcceptanceReport report = dqma::exact_acceptance(instance, strategy, mode);
    const dqma::RepetitionPlan plan = dqma::repetition_plan(pi, r);
    const double acceptance = report.accept_probability;
    csv << r << ',' << pi.input_bits << ',' << args.strategy << ','
        << format12(acceptance) << ',' << format12(1.0 - acceptance) << ','
        << format12(1.0 / (42.0 * r * r)) << ',' << format12(report.soundness_sum()) << ','
        << format12(1.0 / (21.0 * r)) << ',' << plan.repetitions << ','
        << format12(std::pow(acceptance, plan.repetitions)) << ','
        << plan.certificate_qubits << '\n';
  }
  emit(args.out, csv.str());
  return 0;
}

// ---------------------------------------------------------------------------
// tree-run

struct TreeRunArgs {
  std::string network_file;
  std::string demo;
  int arms = 3;
  int arm_length = 1;
  std::string inputs;
  bool toy = false;
  std::string strategy = "honest";
  int target = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  long trials = 0;
  int reps = 1;
  std::string mode = "parallel";
  long dim_cap = dqma::kDefaultDimCap;
  std::string out;
};

std::vector<std::string> split_csv(const std::string& joined) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : joined) {
    if (c == ',') {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

dqma::Network demo_network(const TreeRunArgs& args) {
  dqma::Network net;
  if (args.demo == "star") {
    if (args.arms < 2 || args.arm_length < 1)
      throw ConfigError("star demo needs --arms >= 2 and --arm-length >= 1");
    net.nodes.push_back(0);
    for (int a = 0; a < args.arms; ++a) {
      int prev = 0;
      for (int step = 1; step <= args.arm_length; ++step) {
        const int id = a * args.arm_length + step;
        net.nodes.push_back(id);
        net.edges.emplace_back(prev, id);
        prev = id;
      }
      net.terminals.push_back(prev);
    }
  } else if (args.demo == "line") {
    if (args.arm_length < 1) throw ConfigError("line demo needs --arm-length >= 1");
    for (int i = 0; i <= args.arm_length; ++i) {
      net.nodes.push_back(i);
      if (i > 0) net.edges.emplace_back(i - 1, i);
    }
    net.terminals = {0, args.arm_length};
  } else {
    throw ConfigError("unknown demo network: " + args.demo + " (star|line)");
  }
  if (args.inputs.empty())
    throw ConfigError("demo networks need --inputs (comma-separated, one per terminal)");
  net.inputs = split_csv(args.inputs);
  net.validate();
  return net;
}

int run_tree_run(const TreeRunArgs& args) {
  dqma::Network net;
  if (!args.network_file.empty()) {
    std::ifstream in(args.network_file, std::ios::binary);
    if (!in) throw ConfigError("cannot open network file: " + args.network_file);
    ordered_json doc;
    try {
      doc = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("network parse error: ") + e.what());
    }
    net = dqma::network_from_json(doc);
  } else if (!args.demo.empty()) {
    net = demo_network(args);
  } else {
    throw ConfigError("tree-run needs --network or --demo");
  }

  const dqma::OneWayProtocol pi = choose_protocol(args.toy, net.input_bits());
  const bool needs_seed = args.trials > 0 || args.strategy == "product-random" ||
                          args.strategy == "global-random";
  if (needs_seed && !args.seed_given)
    throw ConfigError("--seed is required for sampled runs and random strategies");
  int target = args.target;
  if (args.strategy == "rotation" && target < 0) {
    const dqma::CertTree probe = dqma::build_cert_tree(net);
    for (int id : net.terminals)
      if (id != probe.root) target = std::max(target, id);
  }
  const dqma::TreeStrategy strategy =
      make_tree_strategy(args.strategy, net, pi.message_dim, args.seed, target, args.dim_cap);
  const dqma::exec::Mode mode = parse_mode(args.mode);

  const dqma::CertTree tree = dqma::build_cert_tree(net);
  const dqma::LabelAssignment labels = dqma::label_tree(net, tree);
  const dqma::LabelVerdict verdict = dqma::verify_labels(net, labels);
  dqma::TreeReport report;
  if (args.trials > 0) {
    if (args.reps != 1)
      throw ConfigError("sampled runs analyze a single round; drop --reps or --trials");
    report = dqma::sampled_tree_protocol(net, pi, strategy, args.trials, args.seed, mode,
                                         args.dim_cap);
  } else {
    report = dqma::run_tree_protocol(net, pi, strategy, args.reps, mode, args.dim_cap);
  }

  ordered_json doc;
  doc["schemaVersion"] = dqma::kSchemaVersion;
  doc["config"] = {{"protocol", pi.name}, {"strategy", args.strategy},
                   {"trials", args.trials}, {"repetitions", args.reps},
                   {"mode", args.mode}};
  if (needs_seed) doc["config"]["seed"] = args.seed;
  if (args.strategy == "rotation") doc["config"]["target"] = target;
  doc["network"] = dqma::network_json(net);
  doc["radius"] = tree.radius;
  doc["center"] = tree.root;
  doc["tree"] = dqma::cert_tree_json(tree);
  doc["labelBits"] = dqma::label_bit_budget(net);
  doc["labels"] = dqma::labels_json(labels, verdict);
  doc["report"] = dqma::tree_report_json(report);
  emit(args.out, dqma::dump_json(doc));
  return 0;
}

// ---------------------------------------------------------------------------
// classical-attack

struct ClassicalAttackArgs {
  std::string protocol = "parity-hash";
  int n = 5;
  int r = 3;
  double p = 0.25;
  int certificate_bits = 1;
  std::string mode = "parallel";
  std::string out;
};

int run_classical_attack(const ClassicalAttackArgs& args) {
  dqma::ClassicalDMA protocol = [&]() {
    if (args.protocol == "parity-hash")
      return dqma::parity_hash_protocol(args.n, args.r, args.p);
    if (args.protocol == "always-accept")
      return dqma::always_accept_protocol(args.n, args.r, args.certificate_bits);
    if (args.protocol == "eq1") return dqma::eq1_optimal_protocol(args.p, args.r);
    throw ConfigError("unknown protocol: " + args.protocol +
                      " (parity-hash|always-accept|eq1)");
  }();
  const dqma::exec::Mode mode = parse_mode(args.mode);
  const dqma::FoolingSet set = dqma::eq_fooling_set(protocol.input_bits);
  const dqma::AttackResult attack = dqma::fooling_attack(protocol, set, mode);

  const std::string x0(protocol.input_bits, '0');
  const auto honest = protocol.honest_certificates(x0, x0);
  const double completeness = dqma::classical_acceptance(protocol, x0, x0, honest, mode);

  ordered_json doc;
  doc["schemaVersion"] = dqma::kSchemaVersion;
  doc["config"] = {{"protocol", protocol.name}, {"n", protocol.input_bits},
                   {"r", protocol.path_length}, {"rounds", protocol.rounds},
                   {"certificateBits", protocol.certificate_bits},
                   {"mode", args.mode}};
  doc["completenessOnEqual"] = dqma::round12(completeness);
  doc["attack"] = dqma::attack_json(attack);
  emit(args.out, dqma::dump_json(doc));
  return 0;
}

// ---------------------------------------------------------------------------
// verify-all

int run_verify_all(const std::string& mode_name, const std::vector<int>& only,
                   const std::string& out) {
  const dqma::exec::Mode mode = parse_mode(mode_name);
  std::vector<dqma::CriterionResult> results = dqma::run_all_criteria(mode);
  if (!only.empty()) {
    std::vector<dqma::CriterionResult> filtered;
    for (const auto& r : results)
      for (int id : only)
        if (r.id == id) filtered.push_back(r);
    results = std::move(filtered);
  }
  std::ostringstream lines;
  int passed = 0;
  for (const auto& r : results) {
    lines << dqma::format_criterion_line(r) << '\n';
    if (r.pass) ++passed;
  }
  lines << passed << "/" << results.size() << " criteria passed\n";
  emit(out, lines.str());
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

// ---------------------------------------------------------------------------
// self-check: byte-identical reruns and serial/parallel agreement.

std::string path_run_payload(long trials, const std::string& mode) {
  PathRunArgs args;
  args.r = 3;
  args.n = 2;
  args.strategy = "rotation";
  args.trials = trials;
  args.seed = 12345;
  args.seed_given = true;
  args.mode = mode;
  const dqma::OneWayProtocol pi = dqma::eq_protocol(dqma::make_family(2));
  const dqma::PathInstance instance{3, pi, "00", "11"};
  dqma::AcceptanceReport report;
  if (trials > 0)
    report = dqma::sampled_acceptance(instance, dqma::RotationStrategy{}, trials, args.seed,
                                      parse_mode(mode));
  else
    report = dqma::exact_acceptance(instance, dqma::RotationStrategy{}, parse_mode(mode));
  return dqma::dump_json(dqma::path_report_json(report));
}

int run_self_check() {
  struct Check {
    const char* name;
    std::string a, b;
  };
  std::vector<Check> checks;
  checks.push_back({"exact path report, serial vs parallel", path_run_payload(0, "serial"),
                    path_run_payload(0, "parallel")});
  checks.push_back({"sampled path report, repeated run", path_run_payload(2000, "parallel"),
                    path_run_payload(2000, "parallel")});
  checks.push_back({"sampled path report, serial vs parallel",
                    path_run_payload(2000, "serial"), path_run_payload(2000, "parallel")});
  bool ok = true;
  for (const auto& check : checks) {
    const bool same = check.a == check.b;
    ok = ok && same;
    std::cout << (same ? "[PASS] " : "[FAIL] ") << check.name << "\n";
  }
  std::cout << (ok ? "self-check passed\n" : "self-check failed\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified-equality protocol analyzer"};
  app.require_subcommand(1);

  // swap-test ---------------------------------------------------------------
  SwapTestArgs swap_args;
  CLI::App* swap_cmd = app.add_subcommand(
      "swap-test", "SWAP-test acceptance probability for a described state pair");
  swap_cmd->add_option("--dim", swap_args.dim, "local dimension")->check(CLI::Range(2, 4096));
  swap_cmd->add_option("--left-basis", swap_args.left_basis, "left basis index");
  swap_cmd->add_option("--right-basis", swap_args.right_basis, "right basis index");
  swap_cmd->add_flag("--haar", swap_args.haar, "draw a Haar-random pair");
  swap_cmd->add_option("--fingerprint-bits", swap_args.fingerprint_bits,
                       "use fingerprints of this input width");
  swap_cmd->add_option("--x", swap_args.x, "left fingerprint input");
  swap_cmd->add_option("--y", swap_args.y, "right fingerprint input");
  swap_cmd->add_option("--seed", swap_args.seed, "64-bit seed for --haar");
  swap_cmd->add_option("--out", swap_args.out, "output file (default stdout)");

  // path-run ----------------------------------------------------------------
  PathRunArgs path_args;
  CLI::App* path_cmd =
      app.add_subcommand("path-run", "analyze one path instance, emit a JSON report");
  path_cmd->add_option("--config", "JSON config file (flags override)");
  path_cmd->add_option("--r", path_args.r, "path length (edges)")->check(CLI::Range(1, 16));
  path_cmd->add_option("--n", path_args.n, "input bits")->check(CLI::Range(1, 64));
  path_cmd->add_flag("--toy", path_args.toy, "use the qubit equality protocol");
  path_cmd->add_option("--x", path_args.x, "left input (default all zeros)");
  path_cmd->add_option("--y", path_args.y, "right input (default all ones)");
  path_cmd->add_option("--strategy", path_args.strategy,
                       "honest|rotation|product-random|global-random");
  path_cmd->add_option("--seed", path_args.seed, "64-bit seed");
  path_cmd->add_option("--trials", path_args.trials, "Monte Carlo trials (0 = exact)");
  path_cmd->add_option("--reps", path_args.reps, "parallel repetitions (exact runs)");
  path_cmd->add_option("--mode", path_args.mode, "serial|parallel");
  path_cmd->add_option("--dim-cap", path_args.dim_cap, "joint-dimension cap");
  path_cmd->add_option("--out", path_args.out, "output file (default stdout)");

  // path-sweep ----------------------------------------------------------------
  PathSweepArgs sweep_args;
  bool sweep_describe = false;
  CLI::App* sweep_cmd = app.add_subcommand(
      "path-sweep", "sweep r, emit CSV of acceptance/rejection vs the bound curves");
  sweep_cmd->add_option("--r-min", sweep_args.r_min, "first path length");
  sweep_cmd->add_option("--r-max", sweep_args.r_max, "last path length");
  sweep_cmd->add_option("--n", sweep_args.n, "input bits")->check(CLI::Range(1, 64));
  sweep_cmd->add_flag("--toy", sweep_args.toy, "use the qubit equality protocol");
  sweep_cmd->add_option("--strategy", sweep_args.strategy,
                        "honest|rotation|product-random|global-random");
  sweep_cmd->add_option("--seed", sweep_args.seed, "64-bit seed");
  sweep_cmd->add_flag("--describe", sweep_describe, "print the column documentation");
  sweep_cmd->add_option("--mode", sweep_args.mode, "serial|parallel");
  sweep_cmd->add_option("--out", sweep_args.out, "output file (default stdout)");

  // tree-run ------------------------------------------------------------------
  TreeRunArgs tree_args;
  CLI::App* tree_cmd = app.add_subcommand(
      "tree-run", "build the certification tree for a network, verify labels, run the protocol");
  tree_cmd->add_option("--config", "JSON config file (flags override)");
  tree_cmd->add_option("--network", tree_args.network_file, "network JSON file");
  tree_cmd->add_option("--demo", tree_args.demo, "built-in network: star|line");
  tree_cmd->add_option("--arms", tree_args.arms, "star demo: number of arms");
  tree_cmd->add_option("--arm-length", tree_args.arm_length, "demo: arm/line length");
  tree_cmd->add_option("--inputs", tree_args.inputs,
                       "demo: comma-separated inputs, one per terminal");
  tree_cmd->add_flag("--toy", tree_args.toy, "use the qubit equality protocol");
  tree_cmd->add_option("--strategy", tree_args.strategy,
                       "honest|rotation|product-random|global-random");
  tree_cmd->add_option("--target", tree_args.target, "rotation: target terminal id");
  tree_cmd->add_option("--seed", tree_args.seed, "64-bit seed");
  tree_cmd->add_option("--trials", tree_args.trials, "Monte Carlo trials (0 = exact)");
  tree_cmd->add_option("--reps", tree_args.reps, "parallel repetitions (exact runs)");
  tree_cmd->add_option("--mode", tree_args.mode, "serial|parallel");
  tree_cmd->add_option("--dim-cap", tree_args.dim_cap, "joint-dimension cap");
  tree_cmd->add_option("--out", tree_args.out, "output file (default stdout)");

  // classical-attack ----------------------------------------------------------
  ClassicalAttackArgs attack_args;
  CLI::App* attack_cmd = app.add_subcommand(
      "classical-attack", "run the fooling-set attack against a bundled classical protocol");
  attack_cmd->add_option("--config", "JSON config file (flags override)");
  attack_cmd->add_option("--protocol", attack_args.protocol,
                         "parity-hash|always-accept|eq1");
  attack_cmd->add_option("--n", attack_args.n, "input bits")->check(CLI::Range(1, 20));
  attack_cmd->add_option("--r", attack_args.r, "path length");
  attack_cmd->add_option("--p", attack_args.p, "gate probability parameter");
  attack_cmd->add_option("--certificate-bits", attack_args.certificate_bits,
                         "always-accept: certificate width");
  attack_cmd->add_option("--mode", attack_args.mode, "serial|parallel");
  attack_cmd->add_option("--out", attack_args.out, "output file (default stdout)");

  // verify-all ----------------------------------------------------------------
  std::string verify_mode = "parallel";
  std::vector<int> verify_only;
  std::string verify_out;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify-all", "run the acceptance-criteria suite; nonzero exit on any failure");
  verify_cmd->add_option("--mode", verify_mode, "serial|parallel");
  verify_cmd->add_option("--criterion", verify_only, "run only these criterion ids (1..12)");
  verify_cmd->add_option("--out", verify_out, "output file (default stdout)");

  CLI::App* self_cmd = app.add_subcommand(
      "self-check", "verify byte-identical reruns and serial/parallel agreement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (swap_cmd->parsed()) return run_swap_test(swap_args);
    if (path_cmd->parsed()) {
      std::string config_path;
      if (path_cmd->get_option("--config")->count() > 0)
        config_path = path_cmd->get_option("--config")->as<std::string>();
      if (!config_path.empty()) {
        const ordered_json doc = load_config_file(config_path);
        ConfigMerge merge(path_cmd, doc);
        merge.field("r", "--r", path_args.r);
        merge.field("n", "--n", path_args.n);
        merge.field("toy", "--toy", path_args.toy);
        merge.field("x", "--x", path_args.x);
        merge.field("y", "--y", path_args.y);
        merge.field("strategy", "--strategy", path_args.strategy);
        merge.field("seed", "--seed", path_args.seed);
        merge.field("trials", "--trials", path_args.trials);
        merge.field("repetitions", "--reps", path_args.reps);
        merge.field("mode", "--mode", path_args.mode);
        merge.field("dimCap", "--dim-cap", path_args.dim_cap);
        merge.finish();
        path_args.seed_given = merge.provided("seed");
      }
      path_args.seed_given =
          path_args.seed_given || path_cmd->get_option("--seed")->count() > 0;
      return run_path_run(path_args);
    }
    if (sweep_cmd->parsed()) {
      if (sweep_describe) {
        emit(sweep_args.out, kSweepDescription);
        return 0;
      }
      sweep_args.seed_given = sweep_cmd->get_option("--seed")->count() > 0;
      return run_path_sweep(sweep_args);
    }
    if (tree_cmd->parsed()) {
      std::string config_path;
      if (tree_cmd->get_option("--config")->count() > 0)
        config_path = tree_cmd->get_option("--config")->as<std::string>();
      if (!config_path.empty()) {
        const ordered_json doc = load_config_file(config_path);
        ConfigMerge merge(tree_cmd, doc);
        merge.field("network", "--network", tree_args.network_file);
        merge.field("demo", "--demo", tree_args.demo);
        merge.field("arms", "--arms", tree_args.arms);
        merge.field("armLength", "--arm-length", tree_args.arm_length);
        merge.field("inputs", "--inputs", tree_args.inputs);
        merge.field("toy", "--toy", tree_args.toy);
        merge.field("strategy", "--strategy", tree_args.strategy);
        merge.field("target", "--target", tree_args.target);
        merge.field("seed", "--seed", tree_args.seed);
        merge.field("trials", "--trials", tree_args.trials);
        merge.field("repetitions", "--reps", tree_args.reps);
        merge.field("mode", "--mode", tree_args.mode);
        merge.field("dimCap", "--dim-cap", tree_args.dim_cap);
        merge.finish();
        tree_args.seed_given = merge.provided("seed");
      }
      tree_args.seed_given =
          tree_args.seed_given || tree_cmd->get_option("--seed")->count() > 0;
      return run_tree_run(tree_args);
    }
    if (attack_cmd->parsed()) {
      std::string config_path;
      if (attack_cmd->get_option("--config")->count() > 0)
        config_path = attack_cmd->get_option("--config")->as<std::string>();
      if (!config_path.empty()) {
        const ordered_json doc = load_config_file(config_path);
        ConfigMerge merge(attack_cmd, doc);
        merge.field("protocol", "--protocol", attack_args.protocol);
        merge.field("n", "--n", attack_args.n);
        merge.field("r", "--r", attack_args.r);
        merge.field("p", "--p", attack_args.p);
        merge.field("certificateBits", "--certificate-bits", attack_args.certificate_bits);
        merge.field("mode", "--mode", attack_args.mode);
        merge.finish();
      }
      return run_classical_attack(attack_args);
    }
    if (verify_cmd->parsed()) return run_verify_all(verify_mode, verify_only, verify_out);
    if (self_cmd->parsed()) return run_self_check();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dqma::cap_exceeded_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dqma::scope_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
