#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egaa/optimizers.hpp"
#include "egaa/problems.hpp"

namespace egaa {

enum class X0Policy { origin, standard_normal, explicit_vector };

struct MethodSpec {
  std::string name;  // label used in file names and summaries
  OptimizerConfig config;
  bool operator==(const MethodSpec&) const = default;
};

struct ExperimentSpec {
  std::string name;  // "<family>_<variant>"
  ProblemSpec problem;
  std::vector<MethodSpec> methods;
  X0Policy x0_policy = X0Policy::origin;
  std::uint64_t x0_seed = 0;
  std::vector<double> x0_explicit;
  long max_iters = 1000;
  double grad_tol = 1e-8;
  std::string output_dir = "out";

  bool operator==(const ExperimentSpec&) const = default;
};

struct SummaryRecord {
  std::string method;
  long iters_to_tol = -1;  // -1 when the method did not converge
  double final_grad_norm = 0.0;
  double final_f = 0.0;
  double guard_fire_fraction = 0.0;
  double stability_violation_fraction = 0.0;
  std::string status;
};

/// Family name of an experiment, the part of the name before the first '_'.
std::string experiment_family(const ExperimentSpec& spec);

/// The four built-in experiment families: rosenbrock (a in {1, 20, 100}),
/// logistic recovery sweep, nnls (three regularization levels) and the
/// ill-conditioned quadratic grid. Step sizes that depend on a generated
/// instance are resolved here and frozen into the specs.
std::vector<ExperimentSpec> builtin_experiments();

nlohmann::ordered_json experiment_spec_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json optimizer_config_to_json(const OptimizerConfig& cfg);
OptimizerConfig optimizer_config_from_json(const nlohmann::json& j);

/// Runs every method of the experiment (methods execute in parallel), writes
/// one trace CSV per method plus a summary JSON, and returns the summaries.
/// A diverging method produces a summary row, not a failure.
std::vector<SummaryRecord> run_experiment(const ExperimentSpec& spec,
                                          bool save_iterates = false,
                                          std::optional<std::uint64_t> seed_override = {});

Eigen::VectorXd resolve_x0(const ExperimentSpec& spec, int dimension,
                           std::optional<std::uint64_t> seed_override = {});

/// Command-line entry point (subcommands run, bench, ode, compare).
/// Returns 0 on success, 1 when the only failures were diverging methods,
/// 2 on usage or I/O errors.
int cli_main(int argc, char** argv);

}  // namespace egaa
