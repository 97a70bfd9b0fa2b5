// qlane: command-line entry point.
//
//   qlane gen-payoffs  --config cfg.json --out DIR
//   qlane transform R S T P B2
//   qlane regimes R S T P [--step 0.01]
//   qlane simulate     --config cfg.json --out DIR
//   qlane calibrate    --config cfg.json --out DIR
//   qlane scenario     --config cfg.json --out DIR
//   qlane sensitivity  --config cfg.json --out DIR
//
// Global flags: --config, --seed, --jobs, --out.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlane/calibration.hpp"
#include "qlane/config.hpp"
#include "qlane/errors.hpp"
#include "qlane/game.hpp"
#include "qlane/lattice.hpp"
#include "qlane/parallel.hpp"
#include "qlane/quantum.hpp"
#include "qlane/scenarios.hpp"
#include "qlane/table_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qlane;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kInvalidConfig = 3,
  kMissingInput = 4,
  kUnwritableOutput = 5,
  kBadInputFile = 6,
  kNoCrossing = 7,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = default_jobs();
  std::string out_dir;
};

double parse_scalar(const std::string& s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError(std::string("malformed number for ") + what + ": '" + s + "'");
  }
  return v;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Config handling

json load_config(const GlobalOptions& g) {
  if (g.config_path.empty()) throw UsageError("--config is required for this subcommand");
  if (!fs::exists(g.config_path)) throw MissingInput("config file '" + g.config_path + "' not found");
  json cfg;
  try {
    cfg = json::parse(read_text_file(g.config_path));
  } catch (const json::exception& e) {
    throw ConfigError(g.config_path + ": " + e.what());
  }
  reject_unknown_keys(cfg, {"table", "seed", "params", "gen_payoffs", "calibrate", "scenario", "sensitivity",
                            "_manifest"},
                      "config");
  cfg.erase("_manifest");
  if (g.seed) cfg["seed"] = *g.seed;
  return cfg;
}

std::uint64_t master_seed(const json& cfg) {
  try {
    return cfg.value("seed", std::uint64_t{0});
  } catch (const json::exception&) {
    throw ConfigError("config.seed must be a non-negative integer");
  }
}

SimParams base_params(const json& cfg, SimParams base) {
  if (cfg.contains("params")) base = sim_params_from_json(cfg["params"], base);
  base.seed = master_seed(cfg);
  return base;
}

template <class T>
T section_value(const json& section, const char* key, T fallback, const std::string& ctx) {
  if (!section.contains(key)) return fallback;
  try {
    return section.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(ctx + "." + key + ": wrong type");
  }
}

json section(const json& cfg, const char* name, std::initializer_list<std::string_view> allowed) {
  json s = cfg.value(name, json::object());
  reject_unknown_keys(s, allowed, name);
  return s;
}

struct LoadedTable {
  PayoffTable table;
  std::string path;
  std::string digest;
};

LoadedTable load_input_table(const json& cfg) {
  if (!cfg.contains("table") || !cfg["table"].is_string()) throw ConfigError("config.table (path) is required");
  const std::string path = cfg["table"].get<std::string>();
  if (!fs::exists(path)) throw MissingInput("payoff table '" + path + "' not found");
  LoadedTable lt{load_table(path), path, {}};
  lt.digest = table_digest(lt.table);
  return lt;
}

// ---------------------------------------------------------------------------
// Output handling

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : root_(dir.empty() ? fs::path("qlane-out") : fs::path(dir)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) {
      throw OutputError("cannot create output directory '" + root_.string() + "'");
    }
    const fs::path probe = root_ / ".qlane-write-test";
    try {
      write_text_file(probe, "");
    } catch (const IoError&) {
      throw OutputError("output directory '" + root_.string() + "' is not writable");
    }
    fs::remove(probe, ec);
  }

  // `name` must be a plain file name; nothing is written outside root.
  fs::path path(const std::string& name) const {
    const fs::path p(name);
    if (p.has_parent_path() || p.is_absolute() || name == ".." || name == ".") {
      throw ConfigError("output name '" + name + "' must be a plain file name");
    }
    return root_ / p;
  }

  void write(const std::string& name, std::string_view text) {
    try {
      write_text_file(path(name), text);
    } catch (const IoError& e) {
      throw OutputError(e.what());
    }
    written_.push_back(name);
  }

  void write_manifest(const std::string& command, json effective_config, const std::optional<LoadedTable>& table) {
    json m;
    m["tool"] = "qlane";
    m["version"] = QLANE_VERSION;
    m["command"] = command;
    m["seed"] = master_seed(effective_config);
    if (table) {
      m["table"] = {{"path", table->path},
                    {"digest_fnv1a64", table->digest},
                    {"n_states", table->table.size()},
                    {"provenance", table->table.provenance().kind == TableProvenance::Kind::Synthetic
                                       ? "synthetic"
                                       : "loaded"}};
    }
    m["outputs"] = written_;
    effective_config["_manifest"] = m;
    write("manifest.json", effective_config.dump(2) + "\n");
  }

 private:
  fs::path root_;
  std::vector<std::string> written_;
};

// ---------------------------------------------------------------------------
// Subcommands

int cmd_gen_payoffs(const GlobalOptions& g) {
  json cfg = load_config(g);
  const json sec = section(cfg, "gen_payoffs", {"n_states", "seed", "synthetic", "coefficients", "output"});
  const std::string ctx = "gen_payoffs";
  const auto n_states = section_value<std::int64_t>(sec, "n_states", 7636, ctx);
  if (n_states < 1) throw ConfigError("gen_payoffs.n_states must be >= 1");
  const std::uint64_t seed = g.seed ? *g.seed : section_value<std::uint64_t>(sec, "seed", master_seed(cfg), ctx);
  const std::string output = section_value<std::string>(sec, "output", "payoffs.csv", ctx);
  const SyntheticTableSpec spec =
      sec.contains("synthetic") ? synthetic_spec_from_json(sec["synthetic"]) : SyntheticTableSpec::defaults();

  OutputDir out(g.out_dir);
  SyntheticTable synth = synth_table(static_cast<std::size_t>(n_states), spec, seed);
  if (sec.contains("coefficients")) {
    const std::string path = section_value<std::string>(sec, "coefficients", "", ctx);
    if (!fs::exists(path)) throw MissingInput("coefficient file '" + path + "' not found");
    synth.coefficients = load_coefficients(path);
    synth.table = table_from_coefficients(synth.states, *synth.table.stats(), synth.coefficients,
                                          {TableProvenance::Kind::Synthetic, seed});
  }

  out.write(output, serialize_table(synth.table));
  out.write(table_metadata_path(output).string(), serialize_table_metadata(synth.table));
  out.write("coefficients.json", serialize_coefficients(synth.coefficients));

  const ClassCounts cc = class_distribution(synth.table);
  std::cout << "game classes over " << cc.total << " (state, role, type) quads:\n";
  for (auto gc : {GameClass::PrisonersDilemma, GameClass::StagHunt, GameClass::Chicken, GameClass::Harmony,
                  GameClass::Other}) {
    const auto it = cc.counts.find(gc);
    const std::size_t n = it == cc.counts.end() ? 0 : it->second;
    std::cout << "  " << to_string(gc) << ": " << n << " (" << fmt(100.0 * n / cc.total) << "%)\n";
  }

  cfg["seed"] = master_seed(cfg);
  json eff = cfg;
  eff["gen_payoffs"] = {{"n_states", n_states},
                        {"seed", seed},
                        {"synthetic", to_json(spec)},
                        {"output", output}};
  if (sec.contains("coefficients")) eff["gen_payoffs"]["coefficients"] = sec["coefficients"];
  out.write_manifest("gen-payoffs", eff, std::nullopt);
  return kOk;
}

int cmd_transform(const std::vector<std::string>& args) {
  if (args.size() != 5) throw UsageError("transform expects R S T P B2");
  const PayoffQuad quad{parse_scalar(args[0], "R"), parse_scalar(args[1], "S"), parse_scalar(args[2], "T"),
                        parse_scalar(args[3], "P")};
  const double b2 = parse_scalar(args[4], "B2");
  if (!(b2 >= 0.0 && b2 <= 1.0)) throw UsageError("B2 must lie in [0, 1]");
  const QuantumPayoffQuad q = quantum_payoffs(quad, EntanglementParam(b2));
  std::cout << "rq,sq,tq,pq\n" << fmt(q.rq) << "," << fmt(q.sq) << "," << fmt(q.tq) << "," << fmt(q.pq) << "\n";
  return kOk;
}

int cmd_regimes(const std::vector<std::string>& args, double step) {
  if (args.size() != 4) throw UsageError("regimes expects R S T P");
  if (!(step > 0.0 && step <= 1.0)) throw UsageError("--step must lie in (0, 1]");
  const PayoffQuad quad{parse_scalar(args[0], "R"), parse_scalar(args[1], "S"), parse_scalar(args[2], "T"),
                        parse_scalar(args[3], "P")};
  const int n = static_cast<int>(std::llround(1.0 / step));
  std::cout << "b2,regime,p_star\n";
  std::vector<std::pair<double, std::string>> kinds;
  for (int i = 0; i <= n; ++i) {
    const double b2 = std::min(1.0, i * step);
    std::string name = "none";
    std::string pstar = "NA";
    try {
      const EssRegime r = ess_regime(quad, EntanglementParam(b2));
      name = std::string(to_string(r.kind));
      if (r.p_star) pstar = fmt(*r.p_star);
    } catch (const DomainError&) {
    }
    std::cout << fmt(b2) << "," << name << "," << pstar << "\n";
    kinds.emplace_back(b2, name);
  }
  for (std::size_t i = 1; i < kinds.size(); ++i) {
    if (kinds[i].second != kinds[i - 1].second) {
      std::cout << "# boundary " << fmt(0.5 * (kinds[i - 1].first + kinds[i].first)) << " " << kinds[i - 1].second
                << " -> " << kinds[i].second << "\n";
    }
  }
  return kOk;
}

int cmd_simulate(const GlobalOptions& g) {
  json cfg = load_config(g);
  const SimParams params = base_params(cfg, SimParams{});
  params.validate();
  const LoadedTable lt = load_input_table(cfg);
  OutputDir out(g.out_dir);

  RunRecord rec = run(params, lt.table);
  rec.table_digest = lt.digest;
  out.write("run.csv", serialize_run(rec));

  cfg["params"] = to_json(params);
  cfg["seed"] = params.seed;
  out.write_manifest("simulate", cfg, lt);
  const auto& last = rec.series.empty() ? rec.initial : rec.series.back();
  std::cout << "final cooperation: AV " << fmt(last.av) << ", HDV " << fmt(last.hdv) << ", all " << fmt(last.all)
            << "\n";
  return kOk;
}

std::vector<double> read_grid(const json& sec, const std::string& ctx) {
  if (!sec.contains("b2_grid")) {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i * 0.05);
    return grid;
  }
  const json& gj = sec["b2_grid"];
  if (gj.is_array()) return section_value<std::vector<double>>(sec, "b2_grid", {}, ctx);
  reject_unknown_keys(gj, {"start", "stop", "step"}, ctx + ".b2_grid");
  const double start = section_value<double>(gj, "start", 0.0, ctx);
  const double stop = section_value<double>(gj, "stop", 1.0, ctx);
  const double step = section_value<double>(gj, "step", 0.05, ctx);
  if (!(step > 0.0) || stop < start) throw ConfigError(ctx + ".b2_grid: invalid range");
  std::vector<double> grid;
  const long n = std::lround((stop - start) / step);
  for (long i = 0; i <= n; ++i) grid.push_back(std::min(stop, start + i * step));
  return grid;
}

int cmd_calibrate(const GlobalOptions& g) {
  json cfg = load_config(g);
  const std::string ctx = "calibrate";
  const json sec = section(cfg, "calibrate", {"b2_grid", "n_replicates", "window", "target"});
  SimParams params = base_params(cfg, SimParams{});
  params.mpr = 0.0;
  params.validate();
  SweepOptions opts;
  opts.n_replicates = section_value<int>(sec, "n_replicates", 20, ctx);
  opts.window = section_value<int>(sec, "window", kDefaultWindow, ctx);
  opts.jobs = g.jobs;
  const double target = section_value<double>(sec, "target", kObservedHdvCooperation, ctx);
  if (!(target >= 0.0 && target <= 1.0)) throw ConfigError("calibrate.target must lie in [0, 1]");
  const std::vector<double> grid = read_grid(sec, ctx);

  const LoadedTable lt = load_input_table(cfg);
  OutputDir out(g.out_dir);
  const auto curve = sweep(grid, params, lt.table, opts);
  out.write("curve.csv", serialize_curve(curve));

  cfg["params"] = to_json(params);
  cfg["seed"] = params.seed;
  cfg["calibrate"] = {{"b2_grid", grid}, {"n_replicates", opts.n_replicates}, {"window", opts.window},
                      {"target", target}};
  int code = kOk;
  try {
    CalibrationResult result = find_crossing(curve, target);
    result.window = opts.window;
    out.write("calibration.json", serialize_calibration(result));
    std::cout << "b2_star = " << fmt(result.b2_star) << " (target " << fmt(target) << ", brackets "
              << result.bracket_count << ")\n";
  } catch (const NoCrossingError& e) {
    json j{{"error", "no crossing"},
           {"target", target},
           {"curve_min", e.curve_min()},
           {"curve_max", e.curve_max()},
           {"window", opts.window}};
    out.write("calibration.json", j.dump(2) + "\n");
    std::cerr << "qlane: " << e.what() << "\n";
    code = kNoCrossing;
  }
  out.write_manifest("calibrate", cfg, lt);
  return code;
}

std::vector<AvProfile> read_profiles(const json& sec, const std::string& ctx) {
  const auto names =
      section_value<std::vector<std::string>>(sec, "profiles", {"classical", "entangled", "inverted"}, ctx);
  std::vector<AvProfile> out;
  for (const auto& n : names) out.push_back(parse_profile(n));
  return out;
}

int cmd_scenario(const GlobalOptions& g) {
  json cfg = load_config(g);
  const std::string ctx = "scenario";
  const json sec = section(cfg, "scenario", {"profiles", "mprs", "s_values", "n_replicates"});
  ScenarioSpec spec;
  spec.base = base_params(cfg, scenario_base_params());
  spec.mprs = section_value<std::vector<double>>(sec, "mprs", spec.mprs, ctx);
  spec.s_values = section_value<std::vector<double>>(sec, "s_values", spec.s_values, ctx);
  spec.n_replicates = section_value<int>(sec, "n_replicates", spec.n_replicates, ctx);
  const auto profiles = read_profiles(sec, ctx);

  const LoadedTable lt = load_input_table(cfg);
  OutputDir out(g.out_dir);
  std::vector<std::string> names;
  for (auto profile : profiles) {
    spec.profile = profile;
    for (const auto& panel : run_scenario(spec, lt.table, g.jobs)) {
      out.write(panel_file_name(panel), serialize_panel(panel));
      const auto& last = panel.rows.back();
      std::cout << to_string(profile) << " mpr=" << fmt(panel.mpr) << " s=" << fmt(panel.s) << ": AV "
                << fmt(last.av.mean) << ", HDV " << fmt(last.hdv.mean) << ", all " << fmt(last.all.mean) << "\n";
    }
    names.emplace_back(to_string(profile));
  }

  cfg["params"] = to_json(spec.base);
  cfg["seed"] = spec.base.seed;
  cfg["scenario"] = {{"profiles", names},
                     {"mprs", spec.mprs},
                     {"s_values", spec.s_values},
                     {"n_replicates", spec.n_replicates}};
  out.write_manifest("scenario", cfg, lt);
  return kOk;
}

int cmd_sensitivity(const GlobalOptions& g) {
  json cfg = load_config(g);
  const std::string ctx = "sensitivity";
  const json sec = section(cfg, "sensitivity", {"profiles", "axes", "values", "n_replicates", "window"});
  SensitivitySpec spec;
  spec.base = base_params(cfg, spec.base);
  spec.n_replicates = section_value<int>(sec, "n_replicates", spec.n_replicates, ctx);
  spec.window = section_value<int>(sec, "window", spec.window, ctx);
  const auto profiles = read_profiles(sec, ctx);
  const auto axis_names = section_value<std::vector<std::string>>(sec, "axes", {"d", "K", "s", "mpr"}, ctx);
  const json values = sec.value("values", json::object());
  reject_unknown_keys(values, {"d", "K", "s", "mpr"}, ctx + ".values");

  const LoadedTable lt = load_input_table(cfg);
  OutputDir out(g.out_dir);
  json eff_values = json::object();
  std::vector<std::string> profile_names;
  for (auto profile : profiles) {
    for (const auto& an : axis_names) {
      spec.axis = parse_axis(an);
      spec.values = section_value<std::vector<double>>(values, an.c_str(), default_axis_values(spec.axis), ctx);
      eff_values[an] = spec.values;
      const auto rows = run_sensitivity(spec, lt.table, profile, g.jobs);
      out.write(sensitivity_file_name(profile, spec.axis), serialize_sensitivity(rows));
      for (const auto& r : rows) {
        std::cout << to_string(profile) << " " << an << "=" << fmt(r.value) << ": median " << fmt(r.median)
                  << " IQR [" << fmt(r.q1) << ", " << fmt(r.q3) << "]\n";
      }
    }
    profile_names.emplace_back(to_string(profile));
  }

  cfg["params"] = to_json(spec.base);
  cfg["seed"] = spec.base.seed;
  cfg["sensitivity"] = {{"profiles", profile_names},
                        {"axes", axis_names},
                        {"values", eff_values},
                        {"n_replicates", spec.n_replicates},
                        {"window", spec.window}};
  out.write_manifest("sensitivity", cfg, lt);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlane: quantum lane-change evolutionary game simulator"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config_path, "Experiment config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed_value, "Master seed; overrides the config everywhere");
  app.add_option("--jobs", g.jobs, "Maximum worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out_dir, "Output directory");
  app.fallthrough();

  std::vector<std::string> numbers;
  double step = 0.01;
  auto* gen = app.add_subcommand("gen-payoffs", "Synthesize a payoff table");
  auto* transform = app.add_subcommand("transform", "Quantum payoffs of one quad: R S T P B2");
  transform->add_option("values", numbers)->expected(5);
  auto* regimes = app.add_subcommand("regimes", "ESS regime table over b2: R S T P");
  regimes->add_option("values", numbers)->expected(4);
  regimes->add_option("--step", step, "b2 grid resolution");
  auto* simulate = app.add_subcommand("simulate", "Single evolutionary run");
  auto* calibrate = app.add_subcommand("calibrate", "Sweep b2_HDV and locate the target crossing");
  auto* scenario = app.add_subcommand("scenario", "AV profile x MPR x s time-series panels");
  auto* sensitivity = app.add_subcommand("sensitivity", "One-at-a-time parameter sensitivity");
  for (auto* sub : {gen, transform, regimes, simulate, calibrate, scenario, sensitivity}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (*gen) return cmd_gen_payoffs(g);
    if (*transform) return cmd_transform(numbers);
    if (*regimes) return cmd_regimes(numbers, step);
    if (*simulate) return cmd_simulate(g);
    if (*calibrate) return cmd_calibrate(g);
    if (*scenario) return cmd_scenario(g);
    if (*sensitivity) return cmd_sensitivity(g);
  } catch (const UsageError& e) {
    std::cerr << "qlane: " << e.what() << "\n";
    return kUsage;
  } catch (const MissingInput& e) {
    std::cerr << "qlane: " << e.what() << "\n";
    return kMissingInput;
  } catch (const OutputError& e) {
    std::cerr << "qlane: " << e.what() << "\n";
    return kUnwritableOutput;
  } catch (const ConfigError& e) {
    std::cerr << "qlane: invalid configuration: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const DomainError& e) {
    std::cerr << "qlane: invalid configuration: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const ParseError& e) {
    std::cerr << "qlane: " << e.what() << "\n";
    return kBadInputFile;
  } catch (const CompletenessError& e) {
    std::cerr << "qlane: " << e.what() << "\n";
    return kBadInputFile;
  } catch (const IoError& e) {
    std::cerr << "qlane: " << e.what() << "\n";
    return kMissingInput;
  } catch (const std::exception& e) {
    std::cerr << "qlane: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
