#pragma once

// CSV writers and readers for trajectories. Numbers are written in the
// shortest form that round-trips, so output is byte-stable across runs.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pemwe/fast_solver.hpp"
#include "pemwe/model.hpp"
#include "pemwe/multiscale.hpp"
#include "pemwe/reference.hpp"

namespace pemwe {

inline constexpr double kSecondsPerDay = 86400.0;

inline constexpr std::string_view kSlowCsvHeader =
    "t_days,n_ir_mol,ecsa_m2,ecsa_normalized,avg_rate_mol_s,periods_used,periodicity_error";

std::string fast_csv_header(std::size_t membrane_nodes);

// One row per sample; s is offset by `time_offset` seconds.
void write_fast_csv(std::ostream& out, const PeriodTrajectory& cycle, double time_offset = 0.0);
void write_fast_csv(std::ostream& out, const FullTrajectory& trajectory);

void write_slow_csv(std::ostream& out, const SlowTrajectory& trajectory,
                    const ModelParameters& params, const PhysicalConstants& constants);
// Fully-resolved output in the slow schema: periods_used 0, error nan.
void write_slow_csv(std::ostream& out, const FullTrajectory& trajectory,
                    const ModelParameters& params, const PhysicalConstants& constants);

struct SlowCsv {
  std::vector<double> t_days;
  std::vector<double> n_ir;
  std::vector<double> ecsa;
  std::vector<double> ecsa_normalized;
  std::vector<double> avg_rate;
  std::vector<long> periods_used;
  std::vector<double> periodicity_error;

  NormalizedSeries normalized() const;  // n / n(first row), times in s
};

// Throws ParseError (with a 1-based line) on header or value problems.
SlowCsv read_slow_csv(std::istream& in);

std::vector<std::string_view> split_csv_line(std::string_view line);
// Whole-field number parse; throws ParseError naming the field.
double parse_csv_double(std::string_view field, int line);

}  // namespace pemwe
