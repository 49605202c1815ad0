#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mis/random.hpp"

namespace mis {

/// S1: iid uniform indexes (with replacement).
/// S2: uniform random permutation (without replacement).
/// S3: the identity sequence 0, 1, ..., N-1.
enum class SamplingMode { S1, S2, S3 };

std::string_view to_string(SamplingMode mode) noexcept;
std::optional<SamplingMode> parse_sampling_mode(std::string_view text) noexcept;

struct IndexSequence {
  SamplingMode mode = SamplingMode::S3;
  std::vector<std::size_t> indexes;
};

/// Throws InputError unless every entry is in [0, N) and the sequence obeys
/// its mode (permutation for S2, identity for S3).
void validate(const IndexSequence& seq, std::size_t pool_size);

/// S3 consumes no randomness.
IndexSequence select_indexes(SamplingMode mode, std::size_t pool_size, RandomStream& rng);

/// P(J_n = k | j_0..j_{n-1}) where n = history.size().
double conditional_pmf(SamplingMode mode, std::size_t pool_size, std::span<const std::size_t> history, std::size_t k);

}  // namespace mis
