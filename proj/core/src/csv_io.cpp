#include "pemwe/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "pemwe/errors.hpp"

namespace pemwe {

std::string fast_csv_header(std::size_t membrane_nodes) {
  std::string h = "s,E,theta1,c_O2_acl,c_H2_acl";
  for (std::size_t i = 0; i < membrane_nodes; ++i) h += fmt::format(",c_mem_{}", i);
  return h;
}

namespace {

void write_fast_row(fmt::memory_buffer& buf, double s, double e, double theta, double c_o2,
                    double c_h2, const double* mem, std::size_t nodes) {
  fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}", s, e, theta, c_o2, c_h2);
  for (std::size_t i = 0; i < nodes; ++i) fmt::format_to(std::back_inserter(buf), ",{}", mem[i]);
  buf.push_back('\n');
}

void flush(std::ostream& out, fmt::memory_buffer& buf) {
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  buf.clear();
}

}  // namespace

void write_fast_csv(std::ostream& out, const PeriodTrajectory& cycle, double time_offset) {
  const std::size_t nodes = cycle.membrane_nodes;
  out << fast_csv_header(nodes) << '\n';
  fmt::memory_buffer buf;
  for (std::size_t j = 0; j < cycle.size(); ++j) {
    write_fast_row(buf, time_offset + cycle.times[j], cycle.potential[j], cycle.theta1[j],
                   cycle.c_o2[j], cycle.c_h2[j], cycle.c_mem.data() + j * nodes, nodes);
    if (buf.size() > (1u << 16)) flush(out, buf);
  }
  flush(out, buf);
}

void write_fast_csv(std::ostream& out, const FullTrajectory& t) {
  const std::size_t nodes = t.membrane_nodes;
  out << fast_csv_header(nodes) << '\n';
  fmt::memory_buffer buf;
  for (std::size_t j = 0; j < t.size(); ++j) {
    write_fast_row(buf, t.times[j], t.potential[j], t.theta1[j], t.c_o2[j], t.c_h2[j],
                   t.c_mem.data() + j * nodes, nodes);
    if (buf.size() > (1u << 16)) flush(out, buf);
  }
  flush(out, buf);
}

namespace {

void write_slow_row(std::ostream& out, double t_s, double n_ir, double area0, double rate,
                    long periods, double error, const ModelParameters& params,
                    const PhysicalConstants& constants) {
  const double area = ecsa_and_radius(n_ir, params, constants).area;
  out << fmt::format("{},{},{},{},{},{},{}\n", t_s / kSecondsPerDay, n_ir, area, area / area0,
                     rate, periods, error);
}

}  // namespace

void write_slow_csv(std::ostream& out, const SlowTrajectory& t, const ModelParameters& params,
                    const PhysicalConstants& constants) {
  out << kSlowCsvHeader << '\n';
  const double area0 = ecsa_and_radius(t.n_ir0, params, constants).area;
  for (const auto& row : t.steps) {
    write_slow_row(out, row.t_s, row.n_ir, area0, row.avg_rate, row.periods_used,
                   row.periodicity_error, params, constants);
  }
}

void write_slow_csv(std::ostream& out, const FullTrajectory& t, const ModelParameters& params,
                    const PhysicalConstants& constants) {
  out << kSlowCsvHeader << '\n';
  const double area0 = ecsa_and_radius(t.n_ir0, params, constants).area;
  for (std::size_t j = 0; j < t.size(); ++j) {
    // Instantaneous rate at the stored sample.
    const double rate = dissolution_rate(t.theta1[j], t.potential[j], t.n_ir[j], params, constants);
    write_slow_row(out, t.times[j], t.n_ir[j], area0, rate, 0, std::nan(""), params, constants);
  }
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_csv_double(std::string_view field, int line) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(fmt::format("line {}: '{}' is not a number", line, field), line);
  }
  return value;
}

NormalizedSeries SlowCsv::normalized() const {
  if (n_ir.empty()) throw DomainError("empty slow trajectory");
  NormalizedSeries s;
  for (std::size_t i = 0; i < n_ir.size(); ++i) {
    s.times.push_back(t_days[i] * kSecondsPerDay);
    s.values.push_back(n_ir[i] / n_ir.front());
  }
  return s;
}

SlowCsv read_slow_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSlowCsvHeader) {
    throw ParseError(fmt::format("line 1: expected header '{}', got '{}'", kSlowCsvHeader, line),
                     1);
  }
  SlowCsv csv;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) {
      throw ParseError(fmt::format("line {}: expected 7 fields, got {}", number, fields.size()),
                       number);
    }
    csv.t_days.push_back(parse_csv_double(fields[0], number));
    csv.n_ir.push_back(parse_csv_double(fields[1], number));
    csv.ecsa.push_back(parse_csv_double(fields[2], number));
    csv.ecsa_normalized.push_back(parse_csv_double(fields[3], number));
    csv.avg_rate.push_back(parse_csv_double(fields[4], number));
    csv.periods_used.push_back(std::lround(parse_csv_double(fields[5], number)));
    csv.periodicity_error.push_back(parse_csv_double(fields[6], number));
    if (csv.t_days.size() > 1 && !(csv.t_days.back() > csv.t_days[csv.t_days.size() - 2])) {
      throw ParseError(fmt::format("line {}: times must be strictly increasing", number), number);
    }
    if (!(csv.n_ir.back() > 0.0)) {
      throw ParseError(fmt::format("line {}: n_ir_mol must be > 0", number), number);
    }
  }
  if (csv.t_days.empty()) throw ParseError("no data rows", number);
  return csv;
}

}  // namespace pemwe
