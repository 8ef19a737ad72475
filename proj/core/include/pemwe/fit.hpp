#pragma once

// Estimation of (k_r, k_diss2) from normalized-ECSA series by simulated
// annealing in log10 space with batched, parallel candidate evaluation.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pemwe/config.hpp"
#include "pemwe/model.hpp"

namespace pemwe {

struct ExperimentSeries {
  std::string profile_tag;      // from a "# profile: <name>" line, may be empty
  std::vector<double> t_days;   // strictly increasing
  std::vector<double> ecsa;     // normalized, in (0, 1], first value 1
};

// Header `t_days,ecsa_normalized`; lines starting with '#' are comments.
// Throws ParseError with the offending 1-based line.
ExperimentSeries parse_experiment_csv(std::istream& in);
ExperimentSeries load_experiment_csv(const std::filesystem::path& path);
void write_experiment_csv(std::ostream& out, const ExperimentSeries& series);

struct Sigma {
  double log10_kr = 0.0;
  double log10_kdiss2 = 0.0;
};

struct FitConfig {
  double log10_kr_min = 0.0;
  double log10_kr_max = 0.0;
  double log10_kdiss2_min = 0.0;
  double log10_kdiss2_max = 0.0;
  double initial_temperature = 0.0;  // objective units
  double cooling = 0.0;              // geometric factor per iteration
  int iterations = 0;
  double scale = 0.0;                // proposal std dev at T0, log10 units
  int batch_size = 0;
  std::uint64_t seed = 0;
  int workers = 0;                   // 0 = hardware concurrency
  Sigma initial;

  // Throws DomainError on unordered or non-finite bounds, batch < 1,
  // cooling outside (0, 1) or an initial point outside the bounds.
  void validate() const;
  Sigma clamp(Sigma s) const;
};

FitConfig parse_fit_config(std::string_view text, const std::vector<std::string>& overrides = {});
FitConfig load_fit_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});
std::string canonical_fit_config(const FitConfig& config);

struct FitDataset {
  ExperimentSeries data;
  ProfileShape shape = ProfileShape::hold;
};

struct FitProblem {
  SimulationSetup setup;  // k_r and k_diss2 are replaced per candidate
  std::vector<FitDataset> datasets;
};

// Normalized ECSA simulated by the multiscale driver at the given times.
// The horizon is the smallest multiple of dK covering the last time; after
// depletion the ECSA is taken to fall linearly to zero at the depletion time.
std::vector<double> simulate_ecsa(const SimulationSetup& setup, ProfileShape shape,
                                  const std::vector<double>& t_days);

// Sum over datasets of (1/T) * integral of the squared residual, integrated
// with trapezoidal weights over the data times. +inf if a simulation fails.
double fit_objective(const Sigma& sigma, const FitProblem& problem);

struct HistoryRow {
  int iter = 0;
  int candidate = 0;
  Sigma sigma;
  double objective = 0.0;
  bool accepted = false;
};

struct AnnealResult {
  Sigma best;
  double best_objective = 0.0;
  std::vector<HistoryRow> history;
  int stalls = 0;  // iterations with no feasible candidate
};

using ObjectiveFn = std::function<double(const Sigma&)>;

// Deterministic for a given seed: candidates are drawn sequentially by the
// caller's thread, evaluated by a worker pool and reduced by index.
AnnealResult anneal(const ObjectiveFn& objective, const FitConfig& config);

inline constexpr std::string_view kHistoryCsvHeader =
    "iter,candidate_idx,log10_kr,log10_kdiss2,objective,accepted";
void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& history);

// Simulated series at `t_days` with multiplicative Gaussian noise of the
// given relative size; the first value is kept at exactly 1.
ExperimentSeries synthesize_series(const SimulationSetup& setup, ProfileShape shape,
                                   const std::vector<double>& t_days, double noise,
                                   std::uint64_t seed);

}  // namespace pemwe
