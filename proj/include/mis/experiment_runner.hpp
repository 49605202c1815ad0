#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mis/experiment_config.hpp"
#include "mis/variance_lab.hpp"

namespace mis {

/// One (scheme, M, estimator) cell. Counters are per-run means.
struct ResultRow {
  std::string experiment;
  std::string scheme;
  std::size_t M = 0;
  std::size_t R = 0;
  EstimatorKind estimator = EstimatorKind::Unnormalized;
  double empirical_mse = 0.0;
  double stderr_mse = 0.0;
  std::optional<double> analytic_variance;
  double target_evals = 0.0;
  double proposal_evals = 0.0;
  double proposal_evals_distinct = 0.0;
  std::optional<double> wall_time;
};

/// Per-iteration adaptive diagnostics averaged over replicates.
struct DiagnosticRow {
  std::string experiment;
  std::string scheme;
  std::size_t t = 0;
  std::optional<double> acceptance_rate;
  double ess = 0.0;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::size_t threads = 0;  // 0: default_thread_count()
  bool timing = false;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // sorted by (scheme, M, estimator)
  std::vector<DiagnosticRow> diagnostics;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options);

/// "scheme=<s> M=<m> estimator=<e> field=<f>" for every non-finite value.
std::vector<std::string> nonfinite_cells(const ExperimentResult& result);

}  // namespace mis
