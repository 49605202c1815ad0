#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mis/estimators.hpp"
#include "mis/mis_scheme.hpp"
#include "mis/proposal_pool.hpp"
#include "mis/target_model.hpp"

namespace mis {

/// pi = 1/2 N(-mu, sigma^2) + 1/2 N(mu, sigma^2) with q_0 = N(-mu, sigma^2),
/// q_1 = N(mu, sigma^2), so the full mixture equals the target. Z = 1, I = 0.
struct RunningExampleConfig {
  double mu = 1.0;
  double sigma = 1.0;

  TargetDensity target() const;
  ProposalPool pool() const;
};

/// Closed-form variances for one block (M = N = 2) of each named scheme.
/// With k blocks divide by k.
double analytic_variance_Z(const RunningExampleConfig& cfg, SchemeName scheme);
double analytic_variance_mean(const RunningExampleConfig& cfg, SchemeName scheme);

enum class EstimatorKind { Unnormalized, NormalizingConstant, SelfNormalized };

std::string_view to_string(EstimatorKind kind) noexcept;
std::optional<EstimatorKind> parse_estimator_kind(std::string_view text) noexcept;

struct ReplicateOptions {
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  std::uint64_t tag = 0;  // separates cells sharing a master seed
  std::size_t threads = 0;
};

/// Per-replicate squared error ||estimate - truth||^2 summarized over
/// replicates. mse_stderr is the standard error of the mean of the squared
/// errors; mean_error / mean_error_stderr give the per-component bias.
struct EmpiricalStats {
  std::size_t replicates = 0;
  double mse = 0.0;
  double mse_stderr = 0.0;
  std::vector<double> mean_error;
  std::vector<double> mean_error_stderr;
  EvaluationCounters counters;  // summed over replicates
  bool finite = true;           // false if any replicate produced NaN/inf
};

struct EstimatorRequest {
  EstimatorKind kind = EstimatorKind::Unnormalized;
  Estimand g;
  std::vector<double> truth;  // length dim, or 1 for NormalizingConstant
  double Z = 1.0;             // used by Unnormalized
};

/// Called once per replicate with the replicate index and its stream.
using SampleFn = std::function<WeightedSampleSet(std::size_t, RandomStream&)>;

/// One sample set per replicate, every requested estimator evaluated on it.
std::vector<EmpiricalStats> empirical_mse(const SampleFn& sampler, std::span<const EstimatorRequest> requests,
                                          const ReplicateOptions& options);

EmpiricalStats empirical_mse(const SchemeSpec& spec, const TargetDensity& target, const ProposalPool& pool,
                             const EstimatorRequest& request, const ReplicateOptions& options);

struct VarianceEntry {
  std::optional<double> analytic;
  std::optional<EmpiricalStats> empirical;
};

/// Keyed by scheme label ("R1".."N3").
using VarianceReport = std::map<std::string, VarianceEntry>;

enum class Theorem { Theorem1, Theorem2 };

struct Verdict {
  std::string relation;  // e.g. "R1 >= R3"
  bool holds = false;
  bool analytic = false;  // decided from closed forms rather than estimates
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // 3 sigma of the difference for empirical verdicts
};

/// Theorem1: R1 = N1 >= R3 >= N3.
/// Theorem2 (two proposals): R1 = N1 >= R2 = N2 >= N3 plus
/// R2 = (N1 + N3) / 2.
/// Analytic values are compared to 1e-12 relative when both sides have one;
/// otherwise empirical values are compared with 3 sigma slack. Throws
/// InputError if a named scheme is missing.
std::vector<Verdict> check_theorem_ordering(const VarianceReport& report, Theorem which);

/// b - a > 3 sigma: `a` is significantly smaller than `b`.
bool significantly_less(const EmpiricalStats& a, const EmpiricalStats& b);
/// a - b >= -3 sigma.
bool not_significantly_less(const EmpiricalStats& a, const EmpiricalStats& b);
/// |a - b| <= 3 sigma.
bool within_3sigma(const EmpiricalStats& a, const EmpiricalStats& b);

}  // namespace mis
