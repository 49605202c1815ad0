#include "mis/weight_engine.hpp"

#include <numeric>
#include <string>

#include "mis/errors.hpp"
#include "mis/partition.hpp"

namespace mis {

std::string_view to_string(WeightingOption option) noexcept {
  switch (option) {
    case WeightingOption::W1: return "W1";
    case WeightingOption::W2: return "W2";
    case WeightingOption::W3: return "W3";
    case WeightingOption::W4: return "W4";
    case WeightingOption::W5: return "W5";
  }
  return "?";
}

std::optional<WeightingOption> parse_weighting_option(std::string_view text) noexcept {
  if (text == "W1") return WeightingOption::W1;
  if (text == "W2") return WeightingOption::W2;
  if (text == "W3") return WeightingOption::W3;
  if (text == "W4") return WeightingOption::W4;
  if (text == "W5") return WeightingOption::W5;
  return std::nullopt;
}

namespace {

void all_indexes(std::size_t pool_size, IndexSubset& out) {
  out.resize(pool_size);
  std::iota(out.begin(), out.end(), std::size_t{0});
}

}  // namespace

void denominator_subset_into(WeightingOption option, const IndexSequence& seq, std::size_t n, IndexSubset& out) {
  const std::size_t pool_size = seq.indexes.size();
  switch (option) {
    case WeightingOption::W1:
      switch (seq.mode) {
        case SamplingMode::S1:
          all_indexes(pool_size, out);
          return;
        case SamplingMode::S2: {
          thread_local std::vector<bool> used;
          used.assign(pool_size, false);
          for (std::size_t i = 0; i < n; ++i) {
            used[seq.indexes[i]] = true;
          }
          out.clear();
          for (std::size_t k = 0; k < pool_size; ++k) {
            if (!used[k]) {
              out.push_back(k);
            }
          }
          return;
        }
        case SamplingMode::S3:
          out.assign(1, n);
          return;
      }
      return;
    case WeightingOption::W2:
      out.assign(1, seq.indexes[n]);
      return;
    case WeightingOption::W3:
      if (seq.mode == SamplingMode::S3) {
        out.assign(1, n);
      } else {
        all_indexes(pool_size, out);
      }
      return;
    case WeightingOption::W4:
      out.assign(seq.indexes.begin(), seq.indexes.end());
      return;
    case WeightingOption::W5:
      all_indexes(pool_size, out);
      return;
  }
}

IndexSubset denominator_subset(WeightingOption option, const IndexSequence& seq, std::size_t n,
                               std::size_t pool_size) {
  validate(seq, pool_size);
  if (n >= pool_size) {
    throw InputError("sample position " + std::to_string(n) + " out of range for block of size " +
                     std::to_string(pool_size));
  }
  IndexSubset out;
  denominator_subset_into(option, seq, n, out);
  return out;
}

double log_weight(const TargetDensity& target, const ProposalPool& pool, WeightingOption option,
                  const IndexSequence& seq, std::size_t n, std::span<const double> x) {
  const IndexSubset subset = denominator_subset(option, seq, n, pool.size());
  return target.log_density(x) - pool.log_mixture_eval(subset, x);
}

// Partition helpers live here too: they are the a-priori analogue of the
// denominator subsets above.

void validate(const Partition& partition, std::size_t pool_size) {
  if (partition.subsets.empty()) {
    throw InputError("partition has no subsets");
  }
  std::vector<bool> seen(pool_size, false);
  std::size_t covered = 0;
  for (std::size_t p = 0; p < partition.subsets.size(); ++p) {
    const auto& subset = partition.subsets[p];
    if (subset.empty()) {
      throw InputError("partition subset " + std::to_string(p) + " is empty");
    }
    for (std::size_t j : subset) {
      if (j >= pool_size) {
        throw InputError("partition index " + std::to_string(j) + " out of range for pool of size " +
                         std::to_string(pool_size));
      }
      if (seen[j]) {
        throw InputError("partition subsets overlap at index " + std::to_string(j));
      }
      seen[j] = true;
      ++covered;
    }
  }
  if (covered != pool_size) {
    throw InputError("partition covers " + std::to_string(covered) + " of " + std::to_string(pool_size) +
                     " proposals");
  }
}

std::vector<std::size_t> subset_owner(const Partition& partition, std::size_t pool_size) {
  validate(partition, pool_size);
  std::vector<std::size_t> owner(pool_size);
  for (std::size_t p = 0; p < partition.subsets.size(); ++p) {
    for (std::size_t j : partition.subsets[p]) {
      owner[j] = p;
    }
  }
  return owner;
}

Partition singleton_partition(std::size_t pool_size) {
  Partition partition;
  for (std::size_t n = 0; n < pool_size; ++n) {
    partition.subsets.push_back({n});
  }
  return partition;
}

Partition whole_partition(std::size_t pool_size) {
  Partition partition;
  partition.subsets.emplace_back(pool_size);
  std::iota(partition.subsets.front().begin(), partition.subsets.front().end(), std::size_t{0});
  return partition;
}

Partition contiguous_partition(std::size_t pool_size, std::size_t group) {
  if (group == 0) {
    throw InputError("contiguous_partition: group size must be positive");
  }
  Partition partition;
  for (std::size_t start = 0; start < pool_size; start += group) {
    std::vector<std::size_t> subset;
    for (std::size_t n = start; n < std::min(pool_size, start + group); ++n) {
      subset.push_back(n);
    }
    partition.subsets.push_back(std::move(subset));
  }
  return partition;
}

}  // namespace mis
