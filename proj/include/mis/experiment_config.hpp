#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mis/adaptive_mis.hpp"
#include "mis/estimators.hpp"
#include "mis/mis_scheme.hpp"
#include "mis/proposal_pool.hpp"
#include "mis/target_model.hpp"
#include "mis/variance_lab.hpp"

namespace mis {

/// Invalid configuration. what() reads "<source>:<line>:<column>: <field>: <problem>".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Either explicit proposals or N locations drawn uniformly in [lo, hi].
/// Drawn pools are redrawn from each replicate's stream when `redraw` is
/// set, otherwise drawn once from the master seed.
struct PoolSpec {
  std::vector<Proposal> proposals;
  bool random = false;
  ProposalFamily family = ProposalFamily::Gaussian;
  std::size_t count = 0;
  std::vector<double> lo;
  std::vector<double> hi;
  double scale = 1.0;
  double dof = 0.0;
  bool redraw = true;

  std::size_t size() const noexcept { return random ? count : proposals.size(); }
};

struct AdaptiveBlock {
  AdaptiveConfig base;  // variant overwritten per entry of `variants`
  std::vector<AdaptiveVariant> variants;
  std::optional<std::string> diagnostics_path;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::size_t replicates = 1000;
  std::optional<std::string> output;
  bool expert = false;

  std::optional<TargetDensity> target;
  std::optional<RunningExampleConfig> running_example;  // set for family running_example
  std::optional<PoolSpec> pool;
  std::optional<AdaptiveBlock> adaptive;

  std::vector<SchemeSpec> schemes;  // blocks = 1; M fixes the block count
  std::vector<std::size_t> samples;
  std::vector<EstimatorKind> estimators;
  Estimand estimand;
  std::optional<std::vector<double>> truth;  // overrides the target's own moments
};

/// Parses and validates; nothing is computed. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

}  // namespace mis
