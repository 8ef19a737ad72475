#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pemwe/config.hpp"
#include "pemwe/csv_io.hpp"
#include "pemwe/errors.hpp"
#include "pemwe/fit.hpp"
#include "pemwe/multiscale.hpp"
#include "pemwe/reference.hpp"

namespace pemwe::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Writes through a string so that a failed run never leaves a half file.
void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path manifest_path(const fs::path& out_dir, const std::string& stem) {
  return out_dir / (stem + ".manifest.json");
}

json base_manifest(std::string_view command) {
  json m;
  m["tool"] = "pemwe";
  m["version"] = PEMWE_VERSION;
  m["command"] = command;
  return m;
}

void finish_manifest(json& m, const fs::path& out_dir, const std::string& stem,
                     const std::vector<std::string>& outputs, double wall,
                     const std::vector<std::string>& warnings) {
  m["out_dir"] = fs::absolute(out_dir).lexically_normal().string();
  m["outputs"] = outputs;
  m["wall_clock_s"] = wall;
  m["warnings"] = warnings;
  m["status"] = "ok";
  write_file(manifest_path(out_dir, stem), m.dump(2) + "\n");
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError(fmt::format("cannot create output directory '{}'", dir.string()), "");
  }
}

// Runs `prepare` with usage-class failures mapped to exit 2 and `execute`
// with everything mapped to exit 3.
template <class Prepare, class Execute>
int guarded(std::ostream& err, Prepare&& prepare, Execute&& execute) {
  try {
    prepare();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    execute();
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateRequest {
  std::string config;  // canonical text
  std::vector<long> dump_cycles;
  std::string stem;
};

json to_json(const SimulateRequest& r) {
  return json{{"config", r.config}, {"dump_cycles", r.dump_cycles}, {"stem", r.stem}};
}

SimulateRequest simulate_from_json(const json& j) {
  return {j.at("config").get<std::string>(), j.at("dump_cycles").get<std::vector<long>>(),
          j.at("stem").get<std::string>()};
}

int execute_simulate(const SimulateRequest& req, const fs::path& out_dir, std::ostream& out,
                     std::ostream& err) {
  SimulationSetup setup;
  return guarded(
      err,
      [&] {
        setup = parse_setup(req.config);
        try {
          setup.multiscale.validate();
        } catch (const DomainError& e) {
          throw ConfigError(fmt::format("invalid configuration: {}", e.what()), "");
        }
        for (long k : req.dump_cycles) {
          if (k < 0 || k >= setup.multiscale.macro_steps()) {
            throw ConfigError(fmt::format("--dump-cycle {} outside [0, {})", k,
                                          setup.multiscale.macro_steps()),
                              "dump-cycle");
          }
        }
        prepare_out_dir(out_dir);
      },
      [&] {
        const auto start = Clock::now();
        std::map<long, PeriodTrajectory> cycles;
        MultiscaleOptions options;
        options.on_cycle = [&](long k, const CycleResult& c) {
          if (std::find(req.dump_cycles.begin(), req.dump_cycles.end(), k) !=
              req.dump_cycles.end()) {
            cycles[k] = c.trajectory;
          }
        };
        const SlowTrajectory traj = run_multiscale(setup.multiscale, setup.profile, setup.params,
                                                   setup.constants, {setup.n_ir0}, options);
        const double wall = seconds_since(start);

        std::vector<std::string> outputs;
        std::ostringstream slow;
        write_slow_csv(slow, traj, setup.params, setup.constants);
        outputs.push_back(req.stem + ".csv");
        write_file(out_dir / outputs.back(), slow.str());
        for (const auto& [k, cycle] : cycles) {
          std::ostringstream fast;
          write_fast_csv(fast, cycle);
          outputs.push_back(fmt::format("{}_cycle_{}.csv", req.stem, k));
          write_file(out_dir / outputs.back(), fast.str());
        }

        std::vector<std::string> warnings;
        if (traj.nonconverged_cycles > 0) {
          warnings.push_back(fmt::format("{} limit-cycle searches hit max_periods",
                                         traj.nonconverged_cycles));
        }
        if (traj.depleted_at) {
          warnings.push_back(fmt::format("catalyst depleted at t = {} s", *traj.depleted_at));
        }
        json m = base_manifest("simulate");
        m["profile"] = to_string(setup.profile.shape);
        m["config_hash"] = hash_hex(fnv1a64(req.config));
        m["request"] = to_json(req);
        m["fast_steps"] = traj.fast_steps;
        m["macro_steps"] = traj.steps.empty() ? 0 : static_cast<long>(traj.steps.size()) - 1;
        finish_manifest(m, out_dir, req.stem, outputs, wall, warnings);

        for (const auto& w : warnings) err << "warning: " << w << '\n';
        const auto& last = traj.steps.back();
        out << fmt::format("simulate {}: {} macro steps, final n_ir/n_ir0 = {:.6f}, {:.3f} s\n",
                           to_string(setup.profile.shape), traj.steps.size() - 1,
                           last.n_ir / traj.n_ir0, wall);
      });
}

// --------------------------------------------------------------- reference

struct ReferenceRequest {
  std::string config;
  bool fast_out = false;
  std::string stem;
};

json to_json(const ReferenceRequest& r) {
  return json{{"config", r.config}, {"fast_out", r.fast_out}, {"stem", r.stem}};
}

ReferenceRequest reference_from_json(const json& j) {
  return {j.at("config").get<std::string>(), j.at("fast_out").get<bool>(),
          j.at("stem").get<std::string>()};
}

int execute_reference(const ReferenceRequest& req, const fs::path& out_dir, std::ostream& out,
                      std::ostream& err) {
  SimulationSetup setup;
  return guarded(
      err,
      [&] {
        setup = parse_setup(req.config);
        try {
          fast_steps_for_horizon(setup.multiscale.horizon, setup.multiscale.dk);
        } catch (const DomainError& e) {
          throw ConfigError(e.what(), "horizon_s");
        }
        prepare_out_dir(out_dir);
      },
      [&] {
        const auto start = Clock::now();
        const FullTrajectory traj =
            run_fully_resolved(setup.multiscale, setup.profile, setup.params, setup.constants,
                               {setup.n_ir0}, {setup.reference_stride});
        const double wall = seconds_since(start);

        std::vector<std::string> outputs;
        std::ostringstream slow;
        write_slow_csv(slow, traj, setup.params, setup.constants);
        outputs.push_back(req.stem + ".csv");
        write_file(out_dir / outputs.back(), slow.str());
        if (req.fast_out) {
          std::ostringstream fast;
          write_fast_csv(fast, traj);
          outputs.push_back(req.stem + "_fast.csv");
          write_file(out_dir / outputs.back(), fast.str());
        }
        std::vector<std::string> warnings;
        if (traj.depleted_at) {
          warnings.push_back(fmt::format("catalyst depleted at t = {} s", *traj.depleted_at));
        }
        json m = base_manifest("reference");
        m["profile"] = to_string(setup.profile.shape);
        m["config_hash"] = hash_hex(fnv1a64(req.config));
        m["request"] = to_json(req);
        m["fast_steps"] = traj.fast_steps;
        m["macro_steps"] = 0;
        m["stride"] = traj.stride;
        finish_manifest(m, out_dir, req.stem, outputs, wall, warnings);

        for (const auto& w : warnings) err << "warning: " << w << '\n';
        out << fmt::format("reference {}: {} fast steps, final n_ir/n_ir0 = {:.6f}, {:.3f} s\n",
                           to_string(setup.profile.shape), traj.fast_steps,
                           traj.n_ir.back() / traj.n_ir0, wall);
      });
}

// ----------------------------------------------------------------- compare

struct CompareRequest {
  std::string a;
  std::string b;
  std::string stem;
};

json to_json(const CompareRequest& r) { return json{{"a", r.a}, {"b", r.b}, {"stem", r.stem}}; }

CompareRequest compare_from_json(const json& j) {
  return {j.at("a").get<std::string>(), j.at("b").get<std::string>(),
          j.at("stem").get<std::string>()};
}

// Wall-clock seconds from the manifest written next to a trajectory CSV.
std::optional<double> manifest_wall_clock(const fs::path& csv) {
  fs::path path = csv;
  path.replace_extension(".manifest.json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const json m = json::parse(in);
    if (m.contains("wall_clock_s") && m["wall_clock_s"].is_number()) {
      return m["wall_clock_s"].get<double>();
    }
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

int execute_compare(const CompareRequest& req, const fs::path& out_dir, std::ostream& out,
                    std::ostream& err) {
  Comparison cmp;
  return guarded(
      err,
      [&] {
        auto load = [](const std::string& path) {
          std::istringstream in(read_file(path));
          try {
            return read_slow_csv(in);
          } catch (const ParseError& e) {
            throw ParseError(fmt::format("{}: {}", path, e.what()), e.line());
          }
        };
        const SlowCsv a = load(req.a);
        const SlowCsv b = load(req.b);
        cmp = compare_detailed(a.normalized(), b.normalized());
        prepare_out_dir(out_dir);
      },
      [&] {
        const auto wall_a = manifest_wall_clock(req.a);
        const auto wall_b = manifest_wall_clock(req.b);
        const std::string ratio = wall_a && wall_b && *wall_a > 0.0
                                      ? fmt::format("{:.3f}", *wall_b / *wall_a)
                                      : std::string("n/a");
        std::string csv = "t_days,a_normalized,b_normalized,difference\n";
        for (std::size_t i = 0; i < cmp.points; ++i) {
          csv += fmt::format("{},{},{},{}\n", cmp.times[i] / kSecondsPerDay, cmp.a[i], cmp.b[i],
                             cmp.a[i] - cmp.b[i]);
        }
        const std::vector<std::string> outputs{req.stem + ".csv"};
        write_file(out_dir / outputs.front(), csv);

        json m = base_manifest("compare");
        m["request"] = to_json(req);
        m["mse_normalized"] = cmp.mse;
        m["max_abs_normalized"] = cmp.max_abs;
        m["points"] = cmp.points;
        m["wall_clock_ratio_b_over_a"] = ratio;
        finish_manifest(m, out_dir, req.stem, outputs, 0.0, {});

        out << fmt::format("mse_normalized = {:.6e}\n", cmp.mse);
        out << fmt::format("max_abs_normalized = {:.6e}\n", cmp.max_abs);
        out << fmt::format("points = {}\n", cmp.points);
        out << fmt::format("wall_clock_ratio_b_over_a = {}\n", ratio);
      });
}

// --------------------------------------------------------------------- fit

struct DataInput {
  std::string profile;  // may be empty: taken from the file's profile tag
  std::string path;
};

struct FitRequest {
  std::string config;
  std::string fit_config;
  std::vector<DataInput> data;
  std::string stem;
};

json to_json(const FitRequest& r) {
  json data = json::array();
  for (const auto& d : r.data) data.push_back({{"profile", d.profile}, {"path", d.path}});
  return json{{"config", r.config}, {"fit_config", r.fit_config}, {"data", data},
              {"stem", r.stem}};
}

FitRequest fit_from_json(const json& j) {
  FitRequest r{j.at("config").get<std::string>(), j.at("fit_config").get<std::string>(), {},
               j.at("stem").get<std::string>()};
  for (const auto& d : j.at("data")) {
    r.data.push_back({d.at("profile").get<std::string>(), d.at("path").get<std::string>()});
  }
  return r;
}

DataInput parse_data_argument(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) return {"", fs::absolute(arg).string()};
  return {arg.substr(0, eq), fs::absolute(arg.substr(eq + 1)).string()};
}

int execute_fit(const FitRequest& req, const fs::path& out_dir, std::ostream& out,
                std::ostream& err) {
  FitProblem problem;
  FitConfig fit;
  return guarded(
      err,
      [&] {
        problem.setup = parse_setup(req.config);
        fit = parse_fit_config(req.fit_config);
        if (req.data.empty()) throw ConfigError("fit needs at least one --data input", "data");
        for (const auto& input : req.data) {
          ExperimentSeries series = load_experiment_csv(input.path);
          const std::string tag = input.profile.empty() ? series.profile_tag : input.profile;
          if (tag.empty()) {
            throw ConfigError(fmt::format("no profile given for '{}'", input.path), "data");
          }
          problem.datasets.push_back({std::move(series), parse_profile_shape(tag)});
        }
        prepare_out_dir(out_dir);
      },
      [&] {
        const auto start = Clock::now();
        const AnnealResult result =
            anneal([&problem](const Sigma& s) { return fit_objective(s, problem); }, fit);
        const double wall = seconds_since(start);

        std::vector<std::string> outputs;
        std::ostringstream history;
        write_history_csv(history, result.history);
        outputs.push_back(req.stem + "_history.csv");
        write_file(out_dir / outputs.back(), history.str());
        const std::string best = fmt::format(
            "log10_kr = {}\nlog10_kdiss2 = {}\nk_r_per_Pa_s = {}\nk_diss2 = {}\nobjective = {}\n",
            result.best.log10_kr, result.best.log10_kdiss2, std::pow(10.0, result.best.log10_kr),
            std::pow(10.0, result.best.log10_kdiss2), result.best_objective);
        outputs.push_back(req.stem + "_best.txt");
        write_file(out_dir / outputs.back(), best);

        std::vector<std::string> warnings;
        if (result.stalls > 0) {
          warnings.push_back(fmt::format("{} iterations without a feasible candidate",
                                         result.stalls));
        }
        json m = base_manifest("fit");
        m["config_hash"] = hash_hex(fnv1a64(req.config + req.fit_config));
        m["request"] = to_json(req);
        m["iterations"] = fit.iterations;
        m["evaluations"] = result.history.size();
        finish_manifest(m, out_dir, req.stem, outputs, wall, warnings);

        for (const auto& w : warnings) err << "warning: " << w << '\n';
        out << best;
      });
}

// ------------------------------------------------------------------- synth

struct SynthRequest {
  std::string config;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string stem;
};

json to_json(const SynthRequest& r) {
  return json{{"config", r.config}, {"noise", r.noise}, {"seed", r.seed}, {"stem", r.stem}};
}

SynthRequest synth_from_json(const json& j) {
  return {j.at("config").get<std::string>(), j.at("noise").get<double>(),
          j.at("seed").get<std::uint64_t>(), j.at("stem").get<std::string>()};
}

int execute_synth(const SynthRequest& req, const fs::path& out_dir, std::ostream& out,
                  std::ostream& err) {
  SimulationSetup setup;
  return guarded(
      err,
      [&] {
        setup = parse_setup(req.config);
        try {
          setup.multiscale.validate();
        } catch (const DomainError& e) {
          throw ConfigError(fmt::format("invalid configuration: {}", e.what()), "");
        }
        if (!(req.noise >= 0.0)) throw ConfigError("--noise must be >= 0", "noise");
        prepare_out_dir(out_dir);
      },
      [&] {
        const auto start = Clock::now();
        std::vector<double> t;
        const long steps = setup.multiscale.macro_steps();
        for (long k = 0; k <= steps; ++k) {
          t.push_back(static_cast<double>(k) * setup.multiscale.dK / kSecondsPerDay);
        }
        const ExperimentSeries series =
            synthesize_series(setup, setup.profile.shape, t, req.noise, req.seed);
        std::ostringstream csv;
        csv << fmt::format("# synthetic series: noise {}, seed {}, config {}\n", req.noise,
                           req.seed, hash_hex(fnv1a64(req.config)));
        write_experiment_csv(csv, series);
        const std::vector<std::string> outputs{req.stem + ".csv"};
        write_file(out_dir / outputs.front(), csv.str());

        json m = base_manifest("synth");
        m["profile"] = to_string(setup.profile.shape);
        m["config_hash"] = hash_hex(fnv1a64(req.config));
        m["request"] = to_json(req);
        finish_manifest(m, out_dir, req.stem, outputs, seconds_since(start), {});
        out << fmt::format("synth {}: {} samples\n", to_string(setup.profile.shape), t.size());
      });
}

// ------------------------------------------------------------------- rerun

int execute_rerun(const std::string& manifest, const fs::path& out_dir, std::ostream& out,
                  std::ostream& err) {
  json m;
  std::string command;
  try {
    m = json::parse(read_file(manifest));
    command = m.at("command").get<std::string>();
    const json& r = m.at("request");
    if (command == "simulate") return execute_simulate(simulate_from_json(r), out_dir, out, err);
    if (command == "reference") {
      return execute_reference(reference_from_json(r), out_dir, out, err);
    }
    if (command == "compare") return execute_compare(compare_from_json(r), out_dir, out, err);
    if (command == "fit") return execute_fit(fit_from_json(r), out_dir, out, err);
    if (command == "synth") return execute_synth(synth_from_json(r), out_dir, out, err);
    err << "error: manifest command '" << command << "' cannot be re-run\n";
  } catch (const std::exception& e) {
    err << "error: bad manifest '" << manifest << "': " << e.what() << '\n';
  }
  return kExitUsage;
}

// Reads the config file and folds command-line overrides into canonical
// text. Later entries win.
std::string resolve_config(const std::string& path, std::vector<std::string> sets,
                           const std::vector<std::string>& flags) {
  sets.insert(sets.end(), flags.begin(), flags.end());
  return canonical_setup(load_setup(path, sets));
}

std::string stem_or(const std::string& stem, const std::string& prefix,
                    const std::string& config_text) {
  if (!stem.empty()) return stem;
  return prefix + std::string(to_string(parse_setup(config_text).profile.shape));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"PEM electrolysis anode degradation: multiscale and fully-resolved simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PEMWE_VERSION);

  std::string config = PEMWE_DEFAULT_CONFIG_PATH;
  std::string profile;
  double horizon = 0.0;
  std::vector<std::string> sets;
  std::string out_dir = ".";
  std::string stem;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "Simulation config file")->capture_default_str();
    cmd->add_option("--profile", profile,
                    "hold | square | triangle | sawtooth_up | sawtooth_down");
    cmd->add_option("--horizon-s", horizon, "Simulated time in seconds");
    cmd->add_option("--set", sets, "Config override key=value (repeatable)");
    cmd->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--name", stem, "Output file stem");
  };

  auto* simulate = app.add_subcommand("simulate", "Temporal multiscale run");
  common(simulate);
  std::vector<long> dump_cycles;
  simulate->add_option("--dump-cycle", dump_cycles,
                       "Write the limit cycle of macro step K (repeatable)");

  auto* reference = app.add_subcommand("reference", "Fully-resolved run");
  common(reference);
  bool fast_out = false;
  long stride = -1;
  reference->add_flag("--fast-out", fast_out, "Also write decimated fast samples");
  reference->add_option("--stride", stride, "Fast steps per stored sample (0 = one per period)");

  auto* compare = app.add_subcommand("compare", "MSE between two slow trajectories");
  std::string path_a;
  std::string path_b;
  compare->add_option("a", path_a, "Trajectory A (slow CSV)")->required();
  compare->add_option("b", path_b, "Trajectory B (slow CSV)")->required();
  compare->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  compare->add_option("--name", stem, "Output file stem");

  auto* fit = app.add_subcommand("fit", "Anneal (k_r, k_diss2) against ECSA series");
  std::string fit_config = PEMWE_FIT_CONFIG_PATH;
  std::vector<std::string> fit_sets;
  std::vector<std::string> data;
  std::uint64_t seed = 0;
  fit->add_option("--config", config, "Simulation config file")->capture_default_str();
  fit->add_option("--set", sets, "Simulation config override key=value (repeatable)");
  fit->add_option("--fit-config", fit_config, "Annealing config file")->capture_default_str();
  fit->add_option("--fit-set", fit_sets, "Annealing config override key=value (repeatable)");
  fit->add_option("--data", data, "Experiment CSV, as profile=path or path (repeatable)")
      ->required();
  auto* seed_opt = fit->add_option("--seed", seed, "Random seed");
  fit->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  fit->add_option("--name", stem, "Output file stem");

  auto* synth = app.add_subcommand("synth", "Write a synthetic ECSA series from a simulation");
  common(synth);
  double noise = 0.0;
  std::uint64_t synth_seed = 1;
  synth->add_option("--noise", noise, "Relative Gaussian noise")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Noise seed")->capture_default_str();

  auto* rerun = app.add_subcommand("rerun", "Re-execute a command from its manifest");
  std::string manifest;
  rerun->add_option("--manifest", manifest, "Manifest JSON")->required();
  rerun->add_option("--out-dir", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::vector<std::string> flags;
  auto gather_flags = [&](CLI::App* cmd) {
    if (cmd->count("--profile") > 0) flags.push_back("profile=" + profile);
    if (cmd->count("--horizon-s") > 0) flags.push_back(fmt::format("horizon_s={}", horizon));
  };

  try {
    if (simulate->parsed()) {
      gather_flags(simulate);
      SimulateRequest req;
      req.config = resolve_config(config, sets, flags);
      req.dump_cycles = dump_cycles;
      req.stem = stem_or(stem, "tms_", req.config);
      return execute_simulate(req, out_dir, out, err);
    }
    if (reference->parsed()) {
      gather_flags(reference);
      if (stride >= 0) flags.push_back(fmt::format("reference_stride_steps={}", stride));
      ReferenceRequest req;
      req.config = resolve_config(config, sets, flags);
      req.fast_out = fast_out;
      req.stem = stem_or(stem, "frp_", req.config);
      return execute_reference(req, out_dir, out, err);
    }
    if (compare->parsed()) {
      CompareRequest req{fs::absolute(path_a).string(), fs::absolute(path_b).string(),
                         stem.empty() ? "compare" : stem};
      return execute_compare(req, out_dir, out, err);
    }
    if (fit->parsed()) {
      if (seed_opt->count() > 0) fit_sets.push_back(fmt::format("seed={}", seed));
      FitRequest req;
      req.config = canonical_setup(load_setup(config, sets));
      req.fit_config = canonical_fit_config(load_fit_config(fit_config, fit_sets));
      for (const auto& d : data) req.data.push_back(parse_data_argument(d));
      req.stem = stem.empty() ? "fit" : stem;
      return execute_fit(req, out_dir, out, err);
    }
    if (synth->parsed()) {
      gather_flags(synth);
      SynthRequest req;
      req.config = resolve_config(config, sets, flags);
      req.noise = noise;
      req.seed = synth_seed;
      req.stem = stem_or(stem, "synth_", req.config);
      return execute_synth(req, out_dir, out, err);
    }
    if (rerun->parsed()) return execute_rerun(manifest, out_dir, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"pemwe"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pemwe::cli
