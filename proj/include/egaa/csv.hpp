#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "egaa/optimizers.hpp"

namespace egaa {

struct OdeState;  // ode.hpp

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Trace schema: k,f,grad_norm,M_eff,delta_M,rho,c_k,gain_delta,consistency_sum,
/// wall_nanos. Missing diagnostics are written as nan. With deterministic_timing
/// the wall_nanos column is zeroed so identical runs produce identical bytes;
/// measured timings stay available on the in-memory records.
void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& records,
                     bool deterministic_timing = true);
void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& records,
                     bool deterministic_timing = true);
std::vector<IterationRecord> read_trace_csv(const std::string& path);

/// Trajectory schema: t,x0..x{n-1},v_norm,energy_E,dissipation_rate.
void write_trajectory_csv(std::ostream& os, const std::vector<OdeState>& trajectory);
void write_trajectory_csv(const std::string& path, const std::vector<OdeState>& trajectory);

/// Iterate dump (k,x0..x{n-1}) consumed by the compare subcommand.
void write_iterates_csv(const std::string& path, const std::vector<Eigen::VectorXd>& xs);
std::vector<Eigen::VectorXd> read_iterates_csv(const std::string& path);

}  // namespace egaa
