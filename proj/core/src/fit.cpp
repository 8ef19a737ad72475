#include "pemwe/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "pemwe/csv_io.hpp"
#include "pemwe/errors.hpp"
#include "pemwe/multiscale.hpp"
#include "pemwe/reference.hpp"

namespace pemwe {

namespace {

constexpr std::string_view kExperimentHeader = "t_days,ecsa_normalized";
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

ExperimentSeries parse_experiment_csv(std::istream& in) {
  ExperimentSeries series;
  std::string raw;
  int line = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const std::string_view body = trim(text.substr(1));
      if (body.substr(0, 8) == "profile:") series.profile_tag = std::string(trim(body.substr(8)));
      continue;
    }
    if (!header) {
      if (text != kExperimentHeader) {
        throw ParseError(fmt::format("line {}: expected header '{}', got '{}'", line,
                                     kExperimentHeader, text),
                         line);
      }
      header = true;
      continue;
    }
    const auto fields = split_csv_line(text);
    if (fields.size() != 2) {
      throw ParseError(fmt::format("line {}: expected 2 fields, got {}", line, fields.size()),
                       line);
    }
    const double t = parse_csv_double(fields[0], line);
    const double v = parse_csv_double(fields[1], line);
    if (!std::isfinite(t) || t < 0.0) {
      throw ParseError(fmt::format("line {}: time {} must be finite and >= 0", line, t), line);
    }
    if (!series.t_days.empty() && !(t > series.t_days.back())) {
      throw ParseError(fmt::format("line {}: time {} does not increase (previous {})", line, t,
                                   series.t_days.back()),
                       line);
    }
    if (!(v > 0.0 && v <= 1.0)) {
      throw ParseError(fmt::format("line {}: ecsa_normalized {} outside (0, 1]", line, v), line);
    }
    if (series.ecsa.empty() && std::abs(v - 1.0) > 1e-9) {
      throw ParseError(fmt::format("line {}: first ecsa_normalized must be 1 (got {})", line, v),
                       line);
    }
    series.t_days.push_back(t);
    series.ecsa.push_back(v);
  }
  if (!header) throw ParseError(fmt::format("line {}: missing header", line + 1), line + 1);
  if (series.t_days.size() < 2) {
    throw ParseError(fmt::format("line {}: need at least two data rows", line), line);
  }
  return series;
}

ExperimentSeries load_experiment_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()), 0);
  try {
    return parse_experiment_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()), e.line());
  }
}

void write_experiment_csv(std::ostream& out, const ExperimentSeries& series) {
  if (!series.profile_tag.empty()) out << "# profile: " << series.profile_tag << '\n';
  out << kExperimentHeader << '\n';
  for (std::size_t i = 0; i < series.t_days.size(); ++i) {
    out << fmt::format("{},{}\n", series.t_days[i], series.ecsa[i]);
  }
}

void FitConfig::validate() const {
  auto ordered = [](double lo, double hi, std::string_view name) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw DomainError(fmt::format("{} bounds must be finite with min < max (got {}, {})",
                                    name, lo, hi));
    }
  };
  ordered(log10_kr_min, log10_kr_max, "log10_kr");
  ordered(log10_kdiss2_min, log10_kdiss2_max, "log10_kdiss2");
  if (!(initial_temperature > 0.0) || !std::isfinite(initial_temperature)) {
    throw DomainError("initial_temperature must be > 0");
  }
  if (!(cooling > 0.0 && cooling < 1.0)) throw DomainError("cooling must be in (0, 1)");
  if (iterations < 0) throw DomainError("iterations must be >= 0");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("scale must be > 0");
  if (batch_size < 1) throw DomainError("batch_size must be >= 1");
  if (workers < 0) throw DomainError("workers must be >= 0");
  if (initial.log10_kr < log10_kr_min || initial.log10_kr > log10_kr_max ||
      initial.log10_kdiss2 < log10_kdiss2_min || initial.log10_kdiss2 > log10_kdiss2_max) {
    throw DomainError("initial point lies outside the search bounds");
  }
}

Sigma FitConfig::clamp(Sigma s) const {
  s.log10_kr = std::clamp(s.log10_kr, log10_kr_min, log10_kr_max);
  s.log10_kdiss2 = std::clamp(s.log10_kdiss2, log10_kdiss2_min, log10_kdiss2_max);
  return s;
}

FitConfig parse_fit_config(std::string_view text, const std::vector<std::string>& overrides) {
  ConfigEntries entries = parse_entries(text);
  apply_overrides(entries, overrides);
  ConfigReader r(entries);
  FitConfig c;
  c.log10_kr_min = r.number("log10_kr_min");
  c.log10_kr_max = r.number("log10_kr_max");
  c.log10_kdiss2_min = r.number("log10_kdiss2_min");
  c.log10_kdiss2_max = r.number("log10_kdiss2_max");
  c.initial.log10_kr = r.number("initial_log10_kr");
  c.initial.log10_kdiss2 = r.number("initial_log10_kdiss2");
  c.initial_temperature = r.number("initial_temperature");
  c.cooling = r.number("cooling_factor");
  c.iterations = static_cast<int>(r.integer("iterations"));
  c.scale = r.number("scale_log10");
  c.batch_size = static_cast<int>(r.integer("batch_size"));
  const long seed = r.integer("seed");
  if (seed < 0) throw ConfigError("key 'seed' must be >= 0", "seed");
  c.seed = static_cast<std::uint64_t>(seed);
  c.workers = static_cast<int>(r.integer("workers"));
  r.finish();
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("invalid fit configuration: {}", e.what()), "");
  }
  return c;
}

FitConfig load_fit_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides) {
  return parse_fit_config(read_text_file(path), overrides);
}

std::string canonical_fit_config(const FitConfig& c) {
  std::string out;
  out += fmt::format("log10_kr_min = {}\n", c.log10_kr_min);
  out += fmt::format("log10_kr_max = {}\n", c.log10_kr_max);
  out += fmt::format("log10_kdiss2_min = {}\n", c.log10_kdiss2_min);
  out += fmt::format("log10_kdiss2_max = {}\n", c.log10_kdiss2_max);
  out += fmt::format("initial_log10_kr = {}\n", c.initial.log10_kr);
  out += fmt::format("initial_log10_kdiss2 = {}\n", c.initial.log10_kdiss2);
  out += fmt::format("initial_temperature = {}\n", c.initial_temperature);
  out += fmt::format("cooling_factor = {}\n", c.cooling);
  out += fmt::format("iterations = {}\n", c.iterations);
  out += fmt::format("scale_log10 = {}\n", c.scale);
  out += fmt::format("batch_size = {}\n", c.batch_size);
  out += fmt::format("seed = {}\n", c.seed);
  out += fmt::format("workers = {}\n", c.workers);
  return out;
}

std::vector<double> simulate_ecsa(const SimulationSetup& setup, ProfileShape shape,
                                  const std::vector<double>& t_days) {
  if (t_days.empty()) return {};
  SimulationSetup s = setup;
  s.profile.shape = shape;
  const double dK = s.multiscale.dK;
  const double last = t_days.back() * kSecondsPerDay;
  s.multiscale.horizon = std::max(1.0, std::ceil(last / dK - 1e-9)) * dK;

  const SlowTrajectory traj =
      run_multiscale(s.multiscale, s.profile, s.params, s.constants, SlowState{s.n_ir0});
  const double area0 = ecsa_and_radius(s.n_ir0, s.params, s.constants).area;
  std::vector<double> times;
  std::vector<double> values;
  for (const auto& row : traj.steps) {
    times.push_back(row.t_s / kSecondsPerDay);
    values.push_back(ecsa_and_radius(row.n_ir, s.params, s.constants).area / area0);
  }
  if (traj.depleted_at) {
    times.push_back(*traj.depleted_at / kSecondsPerDay);
    values.push_back(0.0);
  }
  std::vector<double> out;
  out.reserve(t_days.size());
  for (double t : t_days) {
    out.push_back(traj.depleted_at && t >= times.back() ? 0.0 : interpolate(times, values, t));
  }
  return out;
}

double fit_objective(const Sigma& sigma, const FitProblem& problem) {
  try {
    SimulationSetup s = problem.setup;
    s.params.k_r = std::pow(10.0, sigma.log10_kr);
    s.params.k_diss2 = std::pow(10.0, sigma.log10_kdiss2);
    double total = 0.0;
    for (const auto& d : problem.datasets) {
      const auto& t = d.data.t_days;
      const std::vector<double> sim = simulate_ecsa(s, d.shape, t);
      double integral = 0.0;
      for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double r0 = sim[i] - d.data.ecsa[i];
        const double r1 = sim[i + 1] - d.data.ecsa[i + 1];
        integral += 0.5 * (t[i + 1] - t[i]) * (r0 * r0 + r1 * r1);
      }
      total += integral / (t.back() - t.front());
    }
    return std::isfinite(total) ? total : kInf;
  } catch (const std::exception&) {
    return kInf;
  }
}

namespace {

void evaluate_batch(const ObjectiveFn& objective, const std::vector<Sigma>& candidates,
                    std::vector<double>& values, int workers) {
  values.assign(candidates.size(), kInf);
  auto eval = [&](std::size_t i) {
    try {
      values[i] = objective(candidates[i]);
    } catch (...) {
      values[i] = kInf;
    }
    if (std::isnan(values[i])) values[i] = kInf;
  };
  const auto n = static_cast<int>(candidates.size());
  const int threads = std::min(workers, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < candidates.size(); ++i) eval(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < candidates.size(); i = next++) eval(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

AnnealResult anneal(const ObjectiveFn& objective, const FitConfig& config) {
  config.validate();
  int workers = config.workers;
  if (workers == 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  AnnealResult result;
  Sigma current = config.initial;
  double current_value = kInf;
  try {
    current_value = objective(current);
  } catch (...) {
  }
  if (std::isnan(current_value)) current_value = kInf;
  result.best = current;
  result.best_objective = current_value;

  double stall_factor = 1.0;
  std::vector<Sigma> batch(static_cast<std::size_t>(config.batch_size));
  std::vector<double> values;
  for (int k = 0; k < config.iterations; ++k) {
    const double temperature = config.initial_temperature * std::pow(config.cooling, k);
    const double step =
        config.scale * std::sqrt(temperature / config.initial_temperature) * stall_factor;
    for (auto& c : batch) {
      const double dx = normal(rng);
      const double dy = normal(rng);
      c = config.clamp({current.log10_kr + step * dx, current.log10_kdiss2 + step * dy});
    }
    // Drawn every iteration so the random stream does not depend on outcomes.
    const double u = uniform(rng);
    evaluate_batch(objective, batch, values, workers);

    std::size_t best = batch.size();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (std::isfinite(values[i]) && (best == batch.size() || values[i] < values[best])) best = i;
    }
    bool accepted = false;
    if (best == batch.size()) {
      ++result.stalls;
      stall_factor *= 0.5;
    } else {
      const double delta = values[best] - current_value;
      accepted = delta <= 0.0 || u < std::exp(-delta / temperature);
      if (accepted) {
        current = batch[best];
        current_value = values[best];
      }
      if (values[best] < result.best_objective) {
        result.best = batch[best];
        result.best_objective = values[best];
      }
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      result.history.push_back(
          {k, static_cast<int>(i), batch[i], values[i], accepted && i == best});
    }
  }
  return result;
}

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& history) {
  out << kHistoryCsvHeader << '\n';
  for (const auto& row : history) {
    out << fmt::format("{},{},{},{},{},{}\n", row.iter, row.candidate, row.sigma.log10_kr,
                       row.sigma.log10_kdiss2, row.objective, row.accepted ? 1 : 0);
  }
}

ExperimentSeries synthesize_series(const SimulationSetup& setup, ProfileShape shape,
                                   const std::vector<double>& t_days, double noise,
                                   std::uint64_t seed) {
  if (!(noise >= 0.0)) throw DomainError("noise must be >= 0");
  ExperimentSeries s;
  s.profile_tag = std::string(to_string(shape));
  s.t_days = t_days;
  s.ecsa = simulate_ecsa(setup, shape, t_days);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < s.ecsa.size(); ++i) {
    const double z = normal(rng);
    if (i == 0) {
      s.ecsa[i] = 1.0;
      continue;
    }
    s.ecsa[i] = std::clamp(s.ecsa[i] * (1.0 + noise * z), 1e-12, 1.0);
  }
  return s;
}

}  // namespace pemwe
