#include "mis/index_sampler.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mis/errors.hpp"

namespace mis {

std::string_view to_string(SamplingMode mode) noexcept {
  switch (mode) {
    case SamplingMode::S1: return "S1";
    case SamplingMode::S2: return "S2";
    case SamplingMode::S3: return "S3";
  }
  return "?";
}

std::optional<SamplingMode> parse_sampling_mode(std::string_view text) noexcept {
  if (text == "S1") return SamplingMode::S1;
  if (text == "S2") return SamplingMode::S2;
  if (text == "S3") return SamplingMode::S3;
  return std::nullopt;
}

namespace {

// Checks a prefix of a sequence against its mode. For S2 only distinctness
// can be checked on a prefix.
void validate_prefix(SamplingMode mode, std::size_t pool_size, std::span<const std::size_t> prefix) {
  if (prefix.size() > pool_size) {
    throw InputError("index sequence longer than the pool (" + std::to_string(prefix.size()) + " > " +
                     std::to_string(pool_size) + ")");
  }
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i] >= pool_size) {
      throw InputError("index " + std::to_string(prefix[i]) + " out of range for pool of size " +
                       std::to_string(pool_size));
    }
  }
  if (mode == SamplingMode::S3) {
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      if (prefix[i] != i) {
        throw InputError("S3 sequence must be the identity; position " + std::to_string(i) + " holds " +
                         std::to_string(prefix[i]));
      }
    }
  } else if (mode == SamplingMode::S2) {
    std::vector<bool> seen(pool_size, false);
    for (std::size_t j : prefix) {
      if (seen[j]) {
        throw InputError("S2 sequence repeats index " + std::to_string(j));
      }
      seen[j] = true;
    }
  }
}

}  // namespace

void validate(const IndexSequence& seq, std::size_t pool_size) {
  if (pool_size == 0) {
    throw InputError("pool size must be positive");
  }
  if (seq.indexes.size() != pool_size) {
    throw InputError("index sequence has length " + std::to_string(seq.indexes.size()) + ", expected " +
                     std::to_string(pool_size));
  }
  validate_prefix(seq.mode, pool_size, seq.indexes);
}

IndexSequence select_indexes(SamplingMode mode, std::size_t pool_size, RandomStream& rng) {
  if (pool_size == 0) {
    throw InputError("select_indexes: pool size must be positive");
  }
  IndexSequence seq{mode, std::vector<std::size_t>(pool_size)};
  switch (mode) {
    case SamplingMode::S1:
      for (auto& j : seq.indexes) {
        j = rng.index(pool_size);
      }
      break;
    case SamplingMode::S2:
      std::iota(seq.indexes.begin(), seq.indexes.end(), std::size_t{0});
      // Fisher-Yates; induces the same law as sequential urn draws.
      for (std::size_t i = pool_size - 1; i > 0; --i) {
        std::swap(seq.indexes[i], seq.indexes[rng.index(i + 1)]);
      }
      break;
    case SamplingMode::S3:
      std::iota(seq.indexes.begin(), seq.indexes.end(), std::size_t{0});
      break;
  }
  return seq;
}

double conditional_pmf(SamplingMode mode, std::size_t pool_size, std::span<const std::size_t> history,
                       std::size_t k) {
  if (pool_size == 0) {
    throw InputError("conditional_pmf: pool size must be positive");
  }
  if (history.size() >= pool_size && mode != SamplingMode::S1) {
    throw InputError("conditional_pmf: history already covers the whole pool");
  }
  validate_prefix(mode, pool_size, history);
  if (k >= pool_size) {
    return 0.0;
  }
  switch (mode) {
    case SamplingMode::S1:
      return 1.0 / static_cast<double>(pool_size);
    case SamplingMode::S2: {
      const bool used = std::find(history.begin(), history.end(), k) != history.end();
      return used ? 0.0 : 1.0 / static_cast<double>(pool_size - history.size());
    }
    case SamplingMode::S3:
      return k == history.size() ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace mis
