#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mis/mis_scheme.hpp"
#include "mis/proposal_pool.hpp"
#include "mis/random.hpp"
#include "mis/target_model.hpp"

namespace mis {

enum class Adapter { LAIS, PMC };

/// Denominator of w_{j,t} over the J x T grid of proposals q_{j,t}:
///   PerProposal      q_{j,t}
///   FullMixture      (1/JT) sum_{k,r} q_{k,r}
///   TemporalMixture  (1/T) sum_r q_{j,r}
///   SpatialMixture   (1/J) sum_k q_{k,t}
///   GenericPartition mixture over the group holding (j,t)
enum class AdaptiveVariant { PerProposal, FullMixture, TemporalMixture, SpatialMixture, GenericPartition };

std::string_view to_string(Adapter adapter) noexcept;
std::optional<Adapter> parse_adapter(std::string_view text) noexcept;
std::string_view to_string(AdaptiveVariant variant) noexcept;
/// Also accepts "N1" for PerProposal and "N3" for SpatialMixture.
std::optional<AdaptiveVariant> parse_adaptive_variant(std::string_view text) noexcept;

struct GridCell {
  std::size_t j = 0;
  std::size_t t = 0;
};

struct AdaptiveConfig {
  std::size_t J = 1;
  std::size_t T = 1;
  double sigma_upper = 1.0;  // MH random-walk std
  double sigma_lower = 1.0;  // IS proposal std
  Adapter adapter = Adapter::LAIS;
  AdaptiveVariant variant = AdaptiveVariant::SpatialMixture;
  std::vector<double> init_lo;
  std::vector<double> init_hi;
  /// FullMixture costs (JT)^2 proposal evaluations; refused unless set.
  bool allow_full_mixture = false;
  std::vector<std::vector<GridCell>> grouping;  // GenericPartition only
};

/// Throws InputError on inconsistent settings. PMC supports PerProposal and
/// SpatialMixture only, since its resampling needs weights at iteration t
/// before later proposals exist.
void validate(const AdaptiveConfig& cfg, std::size_t dim);

/// Means of q_{j,t}, stored at (t * J + j) * dim.
struct ProposalHistory {
  std::size_t J = 0;
  std::size_t T = 0;
  std::size_t dim = 0;
  std::vector<double> means;
  std::vector<double> acceptance_rate;  // per iteration; LAIS only

  std::span<const double> mean(std::size_t j, std::size_t t) const noexcept {
    return {means.data() + (t * J + j) * dim, dim};
  }
  bool complete() const noexcept { return J > 0 && T > 0 && means.size() == J * T * dim; }
};

/// J independent random-walk Metropolis chains on the target, T steps each,
/// started uniformly in the init region; the state after step t is the mean
/// of q_{j,t}. No burn-in.
ProposalHistory lais_adapt(const AdaptiveConfig& cfg, const TargetDensity& target, RandomStream& rng);

struct PmcResult {
  ProposalHistory history;
  std::vector<double> draws;  // x_{j,t} at (t * J + j) * dim
};

/// Per iteration: one draw per proposal, weights per cfg.variant, then J
/// multinomial resamples become the next means.
PmcResult pmc_adapt(const AdaptiveConfig& cfg, const TargetDensity& target, RandomStream& rng);

/// Isotropic Gaussians N(mean(j,t), sigma^2 I); proposal t * J + j.
ProposalPool history_pool(const ProposalHistory& history, double sigma);

struct AdaptiveWeights {
  std::vector<double> log_weights;  // at t * J + j
  std::uint64_t target_evals = 0;
  std::uint64_t proposal_evals = 0;
};

AdaptiveWeights adaptive_weights(const ProposalHistory& history, std::span<const double> draws,
                                 AdaptiveVariant variant, const TargetDensity& target, double sigma_lower,
                                 const std::vector<std::vector<GridCell>>& grouping = {});

struct IterationDiagnostics {
  std::size_t t = 0;
  std::optional<double> acceptance_rate;
  double ess = 0.0;  // sum w / max w over the iteration's draws
};

struct AdaptiveRun {
  ProposalHistory history;
  WeightedSampleSet samples;  // J * T draws in (t, j) order
  std::vector<IterationDiagnostics> diagnostics;
};

/// Adapt, draw the lower layer (LAIS) or reuse the adaptation draws (PMC),
/// and weight.
AdaptiveRun run_adaptive(const AdaptiveConfig& cfg, const TargetDensity& target, RandomStream& rng);

}  // namespace mis
