#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mis/index_sampler.hpp"
#include "mis/proposal_pool.hpp"
#include "mis/target_model.hpp"

namespace mis {

/// Interpretation of the density a sample was drawn from:
///   W1  p(x_n | j_0..j_{n-1})   conditional on the selection history
///   W2  q_{j_n}(x_n)            the proposal actually used
///   W3  p(x_n)                  marginal of the n-th sample
///   W4  (1/N) sum_k q_{j_k}     mixture of the realized indexes
///   W5  psi = (1/N) sum_k q_k   the full mixture
enum class WeightingOption { W1, W2, W3, W4, W5 };

std::string_view to_string(WeightingOption option) noexcept;
std::optional<WeightingOption> parse_weighting_option(std::string_view text) noexcept;

/// Multiset of proposal indexes; the weight denominator is their
/// equal-weight mixture.
using IndexSubset = std::vector<std::size_t>;

/// Denominator multiset for sample n of a validated block. Resolves the
/// mode dependence:
///   W1: S1 -> all, S2 -> indexes not yet used, S3 -> {n}
///   W2: {j_n}
///   W3: S1, S2 -> all, S3 -> {n}
///   W4: the realized multiset {j_0..j_{N-1}}
///   W5: all
/// Writes into `out` so hot loops can reuse the buffer.
void denominator_subset_into(WeightingOption option, const IndexSequence& seq, std::size_t n, IndexSubset& out);

/// Checked variant: validates `seq` against its mode and `n` against N.
IndexSubset denominator_subset(WeightingOption option, const IndexSequence& seq, std::size_t n,
                               std::size_t pool_size);

/// log pi(x) - log phi(x), phi the mixture over denominator_subset.
double log_weight(const TargetDensity& target, const ProposalPool& pool, WeightingOption option,
                  const IndexSequence& seq, std::size_t n, std::span<const double> x);

}  // namespace mis
