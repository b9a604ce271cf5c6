// cli.hpp
// Command-line surface: argument parsing into a RunConfig, dispatch to the
// experiments, and report delivery.
//
// Exit codes: 0 success, 1 usage or I/O problem, 2 a physics check failed.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qchoc/classical.hpp"
#include "qchoc/experiments.hpp"
#include "qchoc/quantum.hpp"
#include "qchoc/report.hpp"

namespace qchoc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitEnvironment = 1;
inline constexpr int kExitPhysics = 2;

/// Directory used for reports when --output is absent or relative.
inline constexpr const char* kOutputDirEnv = "QCHOC_OUTPUT_DIR";

enum class Command { singlet_bell, bell_sweep, ghz_parity, order_demo, lhv_enumerate, classical_mc, state_report };
enum class Model { singlet, ghz };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::singlet_bell: return "singlet-bell";
    case Command::bell_sweep: return "bell-sweep";
    case Command::ghz_parity: return "ghz-parity";
    case Command::order_demo: return "order-demo";
    case Command::lhv_enumerate: return "lhv-enumerate";
    case Command::classical_mc: return "classical-mc";
    case Command::state_report: return "state-report";
  }
  return "?";
}

inline std::string to_string(Model m) { return m == Model::singlet ? "singlet" : "ghz"; }

inline std::string to_string(Format f) {
  switch (f) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::text: return "text";
  }
  return "?";
}

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

struct RunConfig {
  Command command = Command::ghz_parity;
  // angles in degrees, as given on the command line
  double theta1_deg = 60.0;
  double theta2_deg = 120.0;
  double grid_step_deg = 1.0;
  double theta1_min_deg = 0.0;
  double theta1_max_deg = 180.0;
  double theta2_min_deg = 0.0;
  double theta2_max_deg = 180.0;
  bool diagonal = false;
  double axis_theta_deg = 90.0;
  double axis_phi_deg = 0.0;
  std::uint64_t samples = 0;  // 0 means "no Monte Carlo" for singlet-bell
  std::uint64_t seed = 1;
  unsigned shards = 1;
  unsigned threads = 1;
  Model model = Model::singlet;
  Format format = Format::json;
  std::optional<std::string> output_path;

  double theta1() const { return deg_to_rad(theta1_deg); }
  double theta2() const { return deg_to_rad(theta2_deg); }
};

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// --help or --version: the message goes to stdout and the exit code is 0.
class InfoRequested : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void add_format(CLI::App* sub, RunConfig& cfg) {
  static const std::map<std::string, Format> formats{
      {"json", Format::json}, {"csv", Format::csv}, {"text", Format::text}};
  sub->add_option("--format", cfg.format, "Report format")->transform(CLI::CheckedTransformer(formats));
  sub->add_option("-o,--output", cfg.output_path, "Write the report here instead of stdout");
}

inline void add_angles(CLI::App* sub, RunConfig& cfg, bool required) {
  auto* a = sub->add_option("--theta1", cfg.theta1_deg, "Polar angle of n2 in degrees (n1 is +z)");
  auto* b = sub->add_option("--theta2", cfg.theta2_deg, "Polar angle of n3 in degrees");
  if (required) {
    a->required();
    b->required();
  }
}

inline void add_sampling(CLI::App* sub, RunConfig& cfg, bool samples_required) {
  auto* s = sub->add_option("--samples", cfg.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
  if (samples_required) s->required();
  sub->add_option("--seed", cfg.seed, "Random seed");
  sub->add_option("--shards", cfg.shards, "Independent sampling shards, run in parallel")->check(CLI::Range(1U, 1024U));
}

inline void add_model(CLI::App* sub, RunConfig& cfg) {
  static const std::map<std::string, Model> models{{"singlet", Model::singlet}, {"ghz", Model::ghz}};
  sub->add_option("model", cfg.model, "Ensemble: singlet or ghz")->transform(CLI::CheckedTransformer(models));
}

}  // namespace detail

/// Parses argv (argv[0] is the program name). Throws UsageError naming the offending flag.
inline RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Quantum entanglement vs classical chocolate ensembles", "qchoc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  auto* singlet_bell = app.add_subcommand("singlet-bell", "Singlet Bell probabilities at one angle pair");
  detail::add_angles(singlet_bell, cfg, true);
  singlet_bell->add_option("--samples", cfg.samples, "Also estimate by sampling")->check(CLI::PositiveNumber);
  singlet_bell->add_option("--seed", cfg.seed, "Random seed");
  singlet_bell->add_option("--shards", cfg.shards, "Sampling shards")->check(CLI::Range(1U, 1024U));
  detail::add_format(singlet_bell, cfg);

  auto* sweep = app.add_subcommand("bell-sweep", "Bell gap over a theta1 x theta2 grid");
  sweep->add_option("--grid-step", cfg.grid_step_deg, "Grid step in degrees")->check(CLI::PositiveNumber);
  sweep->add_option("--theta1-min", cfg.theta1_min_deg, "Degrees");
  sweep->add_option("--theta1-max", cfg.theta1_max_deg, "Degrees");
  sweep->add_option("--theta2-min", cfg.theta2_min_deg, "Degrees");
  sweep->add_option("--theta2-max", cfg.theta2_max_deg, "Degrees");
  sweep->add_flag("--diagonal", cfg.diagonal, "Only theta2 == theta1");
  sweep->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1U, 256U));
  detail::add_format(sweep, cfg);

  auto* ghz = app.add_subcommand("ghz-parity", "GHZ parity products: quantum vs chocolate ensemble");
  detail::add_format(ghz, cfg);

  auto* order = app.add_subcommand("order-demo", "Sequential measurement order dependence");
  detail::add_angles(order, cfg, true);
  detail::add_format(order, cfg);

  auto* lhv = app.add_subcommand("lhv-enumerate", "Exhaustive enumeration of deterministic boxings");
  detail::add_model(lhv, cfg);
  detail::add_format(lhv, cfg);

  auto* mc = app.add_subcommand("classical-mc", "Monte Carlo over a chocolate ensemble");
  detail::add_model(mc, cfg);
  detail::add_sampling(mc, cfg, true);
  detail::add_format(mc, cfg);

  auto* state = app.add_subcommand("state-report", "Single-spin facts about the singlet and GHZ states");
  state->add_option("--axis-theta", cfg.axis_theta_deg, "Axis polar angle in degrees");
  state->add_option("--axis-phi", cfg.axis_phi_deg, "Axis azimuth in degrees");
  detail::add_format(state, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw InfoRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw InfoRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::CallForVersion&) {
    throw InfoRequested(std::string(kToolName) + " " + kToolVersion);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const std::pair<CLI::App*, Command> table[] = {
      {singlet_bell, Command::singlet_bell}, {sweep, Command::bell_sweep},    {ghz, Command::ghz_parity},
      {order, Command::order_demo},         {lhv, Command::lhv_enumerate},    {mc, Command::classical_mc},
      {state, Command::state_report}};
  for (const auto& [sub, cmd] : table) {
    if (sub->parsed()) cfg.command = cmd;
  }

  auto finite = [](double v, const char* flag) {
    if (!std::isfinite(v)) throw UsageError(std::string(flag) + ": must be finite");
  };
  finite(cfg.theta1_deg, "--theta1");
  finite(cfg.theta2_deg, "--theta2");
  finite(cfg.axis_theta_deg, "--axis-theta");
  finite(cfg.axis_phi_deg, "--axis-phi");
  if (cfg.command == Command::bell_sweep) {
    finite(cfg.grid_step_deg, "--grid-step");
    if (cfg.theta1_max_deg < cfg.theta1_min_deg) throw UsageError("--theta1-max: below --theta1-min");
    if (!cfg.diagonal && cfg.theta2_max_deg < cfg.theta2_min_deg) {
      throw UsageError("--theta2-max: below --theta2-min");
    }
  }
  return cfg;
}

inline RunConfig parse_args(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"qchoc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

/// Echo of the parameters that influence the given command.
inline ordered_json config_echo(const RunConfig& cfg) {
  ordered_json j;
  j["command"] = to_string(cfg.command);
  switch (cfg.command) {
    case Command::singlet_bell:
      j["theta1_deg"] = real(cfg.theta1_deg);
      j["theta2_deg"] = real(cfg.theta2_deg);
      j["theta1_rad"] = real(cfg.theta1());
      j["theta2_rad"] = real(cfg.theta2());
      if (cfg.samples > 0) {
        j["samples"] = cfg.samples;
        j["seed"] = cfg.seed;
        j["shards"] = cfg.shards;
      }
      break;
    case Command::order_demo:
      j["theta1_deg"] = real(cfg.theta1_deg);
      j["theta2_deg"] = real(cfg.theta2_deg);
      j["theta1_rad"] = real(cfg.theta1());
      j["theta2_rad"] = real(cfg.theta2());
      break;
    case Command::bell_sweep:
      j["grid_step_deg"] = real(cfg.grid_step_deg);
      j["theta1_min_deg"] = real(cfg.theta1_min_deg);
      j["theta1_max_deg"] = real(cfg.theta1_max_deg);
      j["theta2_min_deg"] = real(cfg.theta2_min_deg);
      j["theta2_max_deg"] = real(cfg.theta2_max_deg);
      j["diagonal"] = cfg.diagonal;
      break;
    case Command::lhv_enumerate:
      j["model"] = to_string(cfg.model);
      break;
    case Command::classical_mc:
      j["model"] = to_string(cfg.model);
      j["samples"] = cfg.samples;
      j["seed"] = cfg.seed;
      j["shards"] = cfg.shards;
      break;
    case Command::state_report:
      j["axis_theta_deg"] = real(cfg.axis_theta_deg);
      j["axis_phi_deg"] = real(cfg.axis_phi_deg);
      break;
    case Command::ghz_parity:
      break;
  }
  j["format"] = to_string(cfg.format);
  return j;
}

namespace detail {

inline ordered_json table(std::vector<std::string> columns) {
  return {{"columns", std::move(columns)}, {"rows", ordered_json::array()}};
}

inline std::string sign_text(Sign s) { return s == Sign::plus ? "+1" : "-1"; }

inline ordered_json bell_row(const BellPoint& p) {
  return ordered_json::array({real(p.theta1 * 180.0 / std::numbers::pi), real(p.theta2 * 180.0 / std::numbers::pi),
                              real(p.p_ab), real(p.p_bc), real(p.p_ac), real(p.bell_gap), p.violated});
}

inline const std::vector<std::string> kBellColumns{"theta1_deg", "theta2_deg", "p_ab",     "p_bc",
                                                   "p_ac",       "bell_gap",   "violated"};

inline ordered_json exact_report(const CorrelationReport<Rational>& r) {
  return {{"p_ab", exact(r.p_ab)},         {"p_bc", exact(r.p_bc)},     {"p_ac", exact(r.p_ac)},
          {"bell_lhs", exact(r.bell_lhs)}, {"satisfied", r.satisfied}, {"source", to_string(r.source)}};
}

inline ordered_json estimate_json(const McEstimate& e) {
  return {{"estimate", real(e.estimate)}, {"std_error", real(e.std_error)}, {"samples", e.samples}, {"seed", e.seed}};
}

inline ordered_json density_json(const DensityMatrix& rho) {
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < rho.dim(); ++c) row.push_back({real(rho(r, c).real()), real(rho(r, c).imag())});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void run_singlet_bell(const RunConfig& cfg, ReportEnvelope& env) {
  const BellPoint p = quantum_bell_point(cfg.theta1(), cfg.theta2());
  const auto classical = bell_check(build_singlet_ensemble());
  env.exact = true;
  env.results["quantum"] = {{"p_ab", real(p.p_ab)},         {"p_bc", real(p.p_bc)},
                            {"p_ac", real(p.p_ac)},         {"bell_gap", real(p.bell_gap)},
                            {"violated", p.violated},       {"source", "exact"}};
  env.results["classical"] = exact_report(classical);
  env.checks.push_back({"classical_bell_satisfied", classical.satisfied});
  if (cfg.samples > 0) {
    const auto mc = mc_bell_estimate(cfg.theta1(), cfg.theta2(), cfg.samples, cfg.seed, cfg.shards);
    env.sampled = true;
    env.results["sampled"] = {{"p_ab", estimate_json(mc[0])}, {"p_bc", estimate_json(mc[1])},
                              {"p_ac", estimate_json(mc[2])}};
  }
  env.results["table"] = table(kBellColumns);
  env.results["table"]["rows"].push_back(bell_row(p));
}

inline void run_bell_sweep(const RunConfig& cfg, ReportEnvelope& env) {
  GridSpec grid;
  grid.theta1_min = deg_to_rad(cfg.theta1_min_deg);
  grid.theta1_max = deg_to_rad(cfg.theta1_max_deg);
  grid.theta2_min = deg_to_rad(cfg.theta2_min_deg);
  grid.theta2_max = deg_to_rad(cfg.theta2_max_deg);
  grid.step = deg_to_rad(cfg.grid_step_deg);
  grid.diagonal_only = cfg.diagonal;
  BellSweep sweep;
  try {
    sweep = quantum_bell_sweep(grid, cfg.threads);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bell-sweep: ") + e.what());
  }
  const BellPoint& best = sweep.points[sweep.argmin];
  env.exact = true;
  env.results["summary"] = {{"points", sweep.points.size()},
                            {"min_gap", real(sweep.min_gap)},
                            {"argmin_theta1_deg", real(best.theta1 * 180.0 / std::numbers::pi)},
                            {"argmin_theta2_deg", real(best.theta2 * 180.0 / std::numbers::pi)},
                            {"any_violated", sweep.min_gap < 0.0}};
  env.results["table"] = table(kBellColumns);
  auto& rows = env.results["table"]["rows"];
  for (const auto& p : sweep.points) rows.push_back(bell_row(p));
}

inline void run_ghz_parity(ReportEnvelope& env) {
  const auto report = ghz_contradiction_report();
  const auto impossible = impossible_outcomes_check();
  env.exact = true;
  ordered_json quantum, classical;
  for (auto p : kParityPatterns) {
    quantum[to_string(p)] = real(report.quantum.at(p));
    const auto c = report.classical.at(p);
    classical[to_string(p)] = c ? ordered_json(to_int(*c)) : ordered_json(nullptr);
  }
  env.results["quantum"] = quantum;
  env.results["classical"] = classical;
  env.results["contradiction"] = report.contradiction;
  ordered_json outcomes = ordered_json::array();
  for (const auto& row : impossible.rows) {
    std::string o;
    for (auto s : row.outcomes) o += to_char(s);
    outcomes.push_back({{"setting", to_string(row.setting)}, {"outcomes", o}, {"probability", real(row.probability)}});
  }
  env.results["impossible_outcomes"] = {{"negatives_zero", impossible.negatives_zero},
                                        {"positives_quarter", impossible.positives_quarter},
                                        {"rows", outcomes}};
  env.checks.push_back({"ghz_contradiction", report.contradiction});
  env.checks.push_back({"negative_parity_outcomes_impossible", impossible.negatives_zero});
  env.checks.push_back({"positive_parity_outcomes_quarter", impossible.positives_quarter});
  env.results["table"] = table({"pattern", "quantum_expectation", "classical_constant"});
  for (auto p : kParityPatterns) {
    env.results["table"]["rows"].push_back(
        ordered_json::array({to_string(p), quantum[to_string(p)], classical[to_string(p)]}));
  }
}

inline void run_order_demo(const RunConfig& cfg, ReportEnvelope& env) {
  const auto r = order_dependence_report(cfg.theta1(), cfg.theta2());
  env.exact = true;
  env.results["order_123"] = real(r.order_123);
  env.results["order_132"] = real(r.order_132);
  env.results["equal"] = r.equal;
  env.results["table"] = table({"theta1_deg", "theta2_deg", "order_123", "order_132", "equal"});
  env.results["table"]["rows"].push_back(ordered_json::array(
      {real(cfg.theta1_deg), real(cfg.theta2_deg), real(r.order_123), real(r.order_132), r.equal}));
}

inline void run_lhv_enumerate(const RunConfig& cfg, ReportEnvelope& env) {
  env.exact = true;
  if (cfg.model == Model::singlet) {
    const auto cert = enumerate_singlet_lhv();
    env.results["vertices"] = cert.vertices.size();
    env.results["min_slack"] = cert.min_slack;
    env.results["tight_vertices"] = cert.tight;
    env.results["all_satisfied"] = cert.all_satisfied;
    env.results["uniform_mixture"] = exact_report(cert.uniform_mixture);
    env.checks.push_back({"all_vertices_satisfy_bell", cert.all_satisfied});
    env.results["table"] = table({"compartment1", "compartment2", "ab", "bc", "ac", "slack"});
    for (const auto& v : cert.vertices) {
      env.results["table"]["rows"].push_back(ordered_json::array(
          {to_string(v.compartment1), to_string(v.compartment1.negated()), v.ab, v.bc, v.ac, v.slack()}));
    }
  } else {
    const auto cert = enumerate_ghz_lhv();
    env.results["assignments"] = cert.total;
    env.results["survivors"] = cert.survivors.size();
    env.results["all_xxx_plus"] = cert.all_xxx_plus;
    env.results["matches_designed"] = cert.matches_designed;
    env.checks.push_back({"eight_survivors", cert.survivors.size() == 8});
    env.checks.push_back({"all_xxx_plus", cert.all_xxx_plus});
    env.checks.push_back({"survivors_match_designed", cert.matches_designed});
    env.results["table"] = table({"assignment", "x1", "x2", "x3", "y1", "y2", "y3", "xxx"});
    for (const auto& g : cert.survivors) {
      env.results["table"]["rows"].push_back(ordered_json::array(
          {to_string(g), to_int(g.x[0]), to_int(g.x[1]), to_int(g.x[2]), to_int(g.y[0]), to_int(g.y[1]),
           to_int(g.y[2]), to_int(g.product(ParityPattern::xxx))}));
    }
  }
}

inline void run_classical_mc(const RunConfig& cfg, ReportEnvelope& env) {
  env.sampled = true;
  env.exact = true;  // exact oracle values ride along for comparison
  if (cfg.model == Model::singlet) {
    const auto ens = build_singlet_ensemble();
    const auto mc = mc_classical_estimate(ens, cfg.samples, cfg.seed, cfg.shards);
    const auto oracle = bell_check(ens);
    env.results["sampled"] = {{"p_ab", estimate_json(mc.p_ab)},   {"p_bc", estimate_json(mc.p_bc)},
                              {"p_ac", estimate_json(mc.p_ac)},   {"bell_lhs", real(mc.bell_lhs)},
                              {"satisfied", mc.satisfied},        {"source", to_string(mc.source)}};
    env.results["exact"] = exact_report(oracle);
    env.checks.push_back({"sampled_bell_satisfied", mc.satisfied});
    env.results["table"] = table({"quantity", "estimate", "std_error", "samples", "seed", "exact"});
    const std::pair<const char*, const McEstimate*> rows[] = {{"p_ab", &mc.p_ab}, {"p_bc", &mc.p_bc}, {"p_ac", &mc.p_ac}};
    const Rational exacts[] = {oracle.p_ab, oracle.p_bc, oracle.p_ac};
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& e = *rows[i].second;
      env.results["table"]["rows"].push_back(ordered_json::array(
          {rows[i].first, real(e.estimate), real(e.std_error), e.samples, e.seed, exact(exacts[i])}));
    }
  } else {
    const auto ens = build_ghz_ensemble();
    const auto mc = mc_ghz_parity(ens, cfg.samples, cfg.seed, cfg.shards);
    ordered_json parity;
    env.results["table"] = table({"pattern", "plus", "minus", "mean"});
    for (auto p : kParityPatterns) {
      const auto& s = mc.at(p);
      parity[to_string(p)] = {{"plus", s.plus}, {"minus", s.minus}, {"mean", real(s.mean())}};
      env.results["table"]["rows"].push_back(ordered_json::array({to_string(p), s.plus, s.minus, real(s.mean())}));
    }
    env.results["parity"] = parity;
    env.checks.push_back({"xxx_never_negative", mc.at(ParityPattern::xxx).minus == 0});
  }
}

inline void run_state_report(const RunConfig& cfg, ReportEnvelope& env) {
  const MeasurementAxis axis(deg_to_rad(cfg.axis_theta_deg), deg_to_rad(cfg.axis_phi_deg));
  const auto r = state_report(axis);
  env.exact = true;
  env.results["axis"] = {{"theta_rad", real(axis.theta())}, {"phi_rad", real(axis.phi())}};
  env.results["mixed"] = {{"p_plus", real(r.mixed_vs_phi.mixed.plus)}, {"p_minus", real(r.mixed_vs_phi.mixed.minus)}};
  env.results["superposition"] = {{"p_plus", real(r.mixed_vs_phi.phi.plus)},
                                  {"p_minus", real(r.mixed_vs_phi.phi.minus)}};
  env.results["singlet_invariance_residual"] = real(r.invariance_residual);
  env.results["singlet_marginals"] = {
      {"spin1_plus", real(r.singlet_marginals[0].plus)}, {"spin1_minus", real(r.singlet_marginals[0].minus)},
      {"spin2_plus", real(r.singlet_marginals[1].plus)}, {"spin2_minus", real(r.singlet_marginals[1].minus)}};
  env.results["singlet_reduced"] = {density_json(r.singlet_reduced[0]), density_json(r.singlet_reduced[1])};
  env.results["ghz_reduced"] = {density_json(r.ghz_reduced[0]), density_json(r.ghz_reduced[1]),
                                density_json(r.ghz_reduced[2])};
  bool marginals_half = true;
  for (const auto& m : r.singlet_marginals) {
    marginals_half = marginals_half && std::abs(m.plus - 0.5) <= kExactTol && std::abs(m.minus - 0.5) <= kExactTol;
  }
  env.checks.push_back({"singlet_rotational_invariance", r.invariance_residual <= kExactTol});
  env.checks.push_back({"singlet_marginals_half", marginals_half});
  env.results["table"] = table({"quantity", "value"});
  auto& rows = env.results["table"]["rows"];
  rows.push_back(ordered_json::array({"mixed_p_plus", real(r.mixed_vs_phi.mixed.plus)}));
  rows.push_back(ordered_json::array({"mixed_p_minus", real(r.mixed_vs_phi.mixed.minus)}));
  rows.push_back(ordered_json::array({"superposition_p_plus", real(r.mixed_vs_phi.phi.plus)}));
  rows.push_back(ordered_json::array({"superposition_p_minus", real(r.mixed_vs_phi.phi.minus)}));
  rows.push_back(ordered_json::array({"singlet_invariance_residual", real(r.invariance_residual)}));
  rows.push_back(ordered_json::array({"singlet_spin1_plus", real(r.singlet_marginals[0].plus)}));
  rows.push_back(ordered_json::array({"singlet_spin2_plus", real(r.singlet_marginals[1].plus)}));
}

}  // namespace detail

struct RunResult {
  ReportEnvelope envelope;
  int exit_code = kExitOk;
};

/// Runs one command. A PhysicsViolation becomes a failed check and exit code 2.
inline RunResult run(const RunConfig& cfg) {
  RunResult out;
  auto& env = out.envelope;
  env.command = to_string(cfg.command);
  env.config = config_echo(cfg);
  try {
    switch (cfg.command) {
      case Command::singlet_bell: detail::run_singlet_bell(cfg, env); break;
      case Command::bell_sweep: detail::run_bell_sweep(cfg, env); break;
      case Command::ghz_parity: detail::run_ghz_parity(env); break;
      case Command::order_demo: detail::run_order_demo(cfg, env); break;
      case Command::lhv_enumerate: detail::run_lhv_enumerate(cfg, env); break;
      case Command::classical_mc: detail::run_classical_mc(cfg, env); break;
      case Command::state_report: detail::run_state_report(cfg, env); break;
    }
  } catch (const PhysicsViolation& e) {
    env.checks.push_back({e.what(), false});
    if (!env.results.contains("table")) env.results["table"] = detail::table({});
  }
  out.exit_code = env.physics_ok() ? kExitOk : kExitPhysics;
  return out;
}

/// Where the report goes: std::nullopt means stdout.
inline std::optional<std::filesystem::path> resolve_output(const RunConfig& cfg) {
  const char* dir = std::getenv(kOutputDirEnv);
  static const char* ext[] = {".json", ".csv", ".txt"};
  if (cfg.output_path) {
    std::filesystem::path p(*cfg.output_path);
    if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
    return p;
  }
  if (dir && *dir) {
    return std::filesystem::path(dir) / (to_string(cfg.command) + ext[static_cast<int>(cfg.format)]);
  }
  return std::nullopt;
}

/// Renders and delivers the report. Throws IoError when the destination cannot be written.
inline void deliver(const ReportEnvelope& env, const RunConfig& cfg, std::ostream& stdout_stream) {
  const auto path = resolve_output(cfg);
  if (!path) {
    emit(env, cfg.format, stdout_stream);
    stdout_stream.flush();
    if (!stdout_stream) throw IoError("failed writing report to stdout");
    return;
  }
  std::ofstream file(*path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path->string() + " for writing");
  emit(env, cfg.format, file);
  file.close();
  if (!file) throw IoError("failed writing " + path->string());
}

/// Whole-program entry used by the qchoc binary.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const InfoRequested& e) {
    out << e.what() << '\n';
    return kExitOk;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitEnvironment;
  }
  RunResult result;
  try {
    result = run(cfg);
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kExitEnvironment;
  }
  try {
    deliver(result.envelope, cfg, out);
  } catch (const IoError& e) {
    err << "qchoc: " << e.what() << '\n';
    return kExitEnvironment;
  }
  for (const auto& c : result.envelope.checks) {
    if (!c.passed) err << "qchoc: physics check failed: " << c.name << '\n';
  }
  return result.exit_code;
}

}  // namespace qchoc::cli
