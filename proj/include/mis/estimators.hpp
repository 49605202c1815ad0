#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mis/mis_scheme.hpp"
#include "mis/partition.hpp"
#include "mis/proposal_pool.hpp"
#include "mis/random.hpp"
#include "mis/target_model.hpp"

namespace mis {

/// Component-wise moment g(x). Identity gives the mean, Square the raw
/// second moment.
enum class Moment { Identity, Square };

std::string_view to_string(Moment moment) noexcept;
std::optional<Moment> parse_moment(std::string_view text) noexcept;

struct Estimand {
  Moment moment = Moment::Identity;

  double apply(double x) const noexcept { return moment == Moment::Identity ? x : x * x; }
  /// E_pi[g(X)] component-wise, when the target admits it.
  std::vector<double> truth(const TargetDensity& target) const;
};

/// (1/(M Z)) sum_n w_n g(x_n). Throws InputError if Z <= 0 or the set is
/// empty.
std::vector<double> estimate_unnormalized(const WeightedSampleSet& ws, const Estimand& g, double Z);

/// (1/M) sum_n w_n.
double estimate_Z(const WeightedSampleSet& ws);
/// Same, from raw log-weights.
double estimate_Z(std::span<const double> log_weights);

/// sum_n w_n g(x_n) / sum_n w_n. Throws InputError when every weight is 0.
std::vector<double> estimate_self_normalized(const WeightedSampleSet& ws, const Estimand& g);

struct PartitionWeights {
  std::vector<double> log_weights;
  std::uint64_t proposal_evals = 0;
};

/// Re-weights an S3 sample set: sample n's denominator is the equal-weight
/// mixture over the subset owning proposal n. Cost is sum_p |J_p|^2 per block.
PartitionWeights partition_log_weights(const WeightedSampleSet& ws, const ProposalPool& pool,
                                       const TargetDensity& target, const Partition& partition);

/// M exact draws from the target with unit weights.
WeightedSampleSet direct_sampling(const TargetDensity& target, std::size_t count, RandomStream& rng);

}  // namespace mis
