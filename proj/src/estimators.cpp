#include "mis/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mis/errors.hpp"

namespace mis {

std::string_view to_string(Moment moment) noexcept {
  return moment == Moment::Identity ? "identity" : "square";
}

std::optional<Moment> parse_moment(std::string_view text) noexcept {
  if (text == "identity") return Moment::Identity;
  if (text == "square") return Moment::Square;
  return std::nullopt;
}

std::vector<double> Estimand::truth(const TargetDensity& target) const {
  GroundTruth truth = target.ground_truth();
  return moment == Moment::Identity ? truth.mean : truth.second_moment;
}

namespace {

double max_log_weight(std::span<const double> log_weights) {
  if (log_weights.empty()) {
    throw InputError("estimator: empty sample set");
  }
  return *std::max_element(log_weights.begin(), log_weights.end());
}

// sum_n exp(lw_n - shift) g(x_n) into `acc`, sum_n exp(lw_n - shift) returned.
double shifted_sums(const WeightedSampleSet& ws, const Estimand& g, double shift, std::vector<double>& acc) {
  acc.assign(ws.dim, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const double w = std::exp(ws.log_weights[i] - shift);
    total += w;
    const auto x = ws.sample(i);
    for (std::size_t d = 0; d < ws.dim; ++d) {
      acc[d] += w * g.apply(x[d]);
    }
  }
  return total;
}

}  // namespace

std::vector<double> estimate_unnormalized(const WeightedSampleSet& ws, const Estimand& g, double Z) {
  if (!(Z > 0.0)) {
    throw InputError("estimate_unnormalized: Z must be strictly positive");
  }
  const double shift = max_log_weight(ws.log_weights);
  std::vector<double> acc(ws.dim, 0.0);
  if (shift == -std::numeric_limits<double>::infinity()) {
    return acc;
  }
  shifted_sums(ws, g, shift, acc);
  const double scale = std::exp(shift - std::log(static_cast<double>(ws.size()) * Z));
  for (double& v : acc) {
    v *= scale;
  }
  return acc;
}

double estimate_Z(std::span<const double> log_weights) {
  const double shift = max_log_weight(log_weights);
  if (!std::isfinite(shift)) {
    return shift == -std::numeric_limits<double>::infinity() ? 0.0 : shift;
  }
  double total = 0.0;
  for (double lw : log_weights) {
    total += std::exp(lw - shift);
  }
  return std::exp(shift) * (total / static_cast<double>(log_weights.size()));
}

double estimate_Z(const WeightedSampleSet& ws) {
  return estimate_Z(ws.log_weights);
}

std::vector<double> estimate_self_normalized(const WeightedSampleSet& ws, const Estimand& g) {
  const double shift = max_log_weight(ws.log_weights);
  if (shift == -std::numeric_limits<double>::infinity()) {
    throw InputError("estimate_self_normalized: all weights are zero");
  }
  std::vector<double> acc;
  const double total = shifted_sums(ws, g, shift, acc);
  for (double& v : acc) {
    v /= total;
  }
  return acc;
}

PartitionWeights partition_log_weights(const WeightedSampleSet& ws, const ProposalPool& pool,
                                       const TargetDensity& target, const Partition& partition) {
  const std::size_t N = pool.size();
  const auto owner = subset_owner(partition, N);
  if (ws.dim != pool.dimension() || ws.size() != ws.index_sequences.size() * N) {
    throw InputError("partition_log_weights: sample set does not match the pool");
  }
  for (const auto& seq : ws.index_sequences) {
    if (seq.mode != SamplingMode::S3) {
      throw InputError("partition_log_weights: samples must come from S3 sampling");
    }
    validate(seq, N);
  }
  PartitionWeights out;
  out.log_weights.resize(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const auto& subset = partition.subsets[owner[i % N]];
    const auto x = ws.sample(i);
    out.log_weights[i] = target.log_density(x) - pool.log_mixture_eval(subset, x);
    out.proposal_evals += subset.size();
  }
  return out;
}

WeightedSampleSet direct_sampling(const TargetDensity& target, std::size_t count, RandomStream& rng) {
  if (count == 0) {
    throw InputError("direct_sampling: count must be positive");
  }
  WeightedSampleSet out;
  out.dim = target.dimension();
  out.samples.resize(count * out.dim);
  out.log_weights.assign(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    target.sample(rng, std::span<double>(out.samples.data() + i * out.dim, out.dim));
  }
  return out;
}

}  // namespace mis
