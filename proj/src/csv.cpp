#include "egaa/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "egaa/ode.hpp"

namespace egaa {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& records,
                     bool deterministic_timing) {
  os << "k,f,grad_norm,M_eff,delta_M,rho,c_k,gain_delta,consistency_sum,wall_nanos\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : records) {
    const StepDiagnostics d = r.diagnostics.value_or(StepDiagnostics{});
    os << r.k << ',' << format_double(r.f_value) << ',' << format_double(r.grad_norm)
       << ',' << format_double(r.diagnostics ? d.effective_mass_M : nan) << ','
       << format_double(r.diagnostics ? d.delta_M : nan) << ','
       << format_double(r.diagnostics ? d.guard_rho : nan) << ','
       << format_double(r.diagnostics ? d.damping_c : nan) << ','
       << format_double(r.diagnostics ? d.gain_delta : nan) << ','
       << format_double(r.diagnostics ? d.consistency_sum : nan) << ','
       << (deterministic_timing ? 0 : r.wall_nanos) << '\n';
  }
}

void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& records,
                     bool deterministic_timing) {
  auto os = open_out(path);
  write_trace_csv(os, records, deterministic_timing);
}

std::vector<IterationRecord> read_trace_csv(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("empty trace file: " + path);
  if (line.rfind("k,f,grad_norm", 0) != 0)
    throw std::runtime_error("unrecognized trace header in " + path);
  std::vector<IterationRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() != 10)
      throw std::runtime_error("malformed trace row in " + path + ": " + line);
    IterationRecord r;
    r.k = std::strtol(cols[0].c_str(), nullptr, 10);
    r.f_value = parse_double(cols[1]);
    r.grad_norm = parse_double(cols[2]);
    StepDiagnostics d;
    d.effective_mass_M = parse_double(cols[3]);
    d.delta_M = parse_double(cols[4]);
    d.guard_rho = parse_double(cols[5]);
    d.damping_c = parse_double(cols[6]);
    d.gain_delta = parse_double(cols[7]);
    d.consistency_sum = parse_double(cols[8]);
    if (std::isfinite(d.effective_mass_M)) r.diagnostics = d;
    r.wall_nanos = std::strtoll(cols[9].c_str(), nullptr, 10);
    out.push_back(std::move(r));
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<OdeState>& trajectory) {
  if (trajectory.empty()) throw std::invalid_argument("write_trajectory_csv: empty trajectory");
  const Eigen::Index n = trajectory.front().x.size();
  os << 't';
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i;
  os << ",v_norm,energy_E,dissipation_rate\n";
  for (const auto& s : trajectory) {
    os << format_double(s.t);
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(s.x[i]);
    os << ',' << format_double(s.v.norm()) << ',' << format_double(s.energy_E) << ','
       << format_double(s.dissipation) << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const std::vector<OdeState>& trajectory) {
  auto os = open_out(path);
  write_trajectory_csv(os, trajectory);
}

void write_iterates_csv(const std::string& path, const std::vector<Eigen::VectorXd>& xs) {
  auto os = open_out(path);
  if (xs.empty()) throw std::invalid_argument("write_iterates_csv: no iterates");
  const Eigen::Index n = xs.front().size();
  os << 'k';
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i;
  os << '\n';
  for (std::size_t k = 0; k < xs.size(); ++k) {
    os << k;
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(xs[k][i]);
    os << '\n';
  }
}

std::vector<Eigen::VectorXd> read_iterates_csv(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("empty iterates file: " + path);
  std::vector<Eigen::VectorXd> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() < 2)
      throw std::runtime_error("malformed iterates row in " + path);
    Eigen::VectorXd x(cols.size() - 1);
    for (std::size_t i = 1; i < cols.size(); ++i) x[i - 1] = parse_double(cols[i]);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace egaa
