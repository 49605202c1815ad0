#pragma once

#include <cstddef>
#include <span>

namespace mis {

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

/// log(sum(exp(v))). Returns -inf for an empty range or all -inf entries.
double log_sum_exp(std::span<const double> values) noexcept;

/// log(mean(exp(v))), the log of an equal-weight mixture of the inputs.
double log_mean_exp(std::span<const double> values) noexcept;

/// Gaussian log-density from a whitened squared distance. Every Gaussian in
/// the library goes through this so that matched target/proposal pairs
/// evaluate bit-identically.
inline double gaussian_log_kernel(double squared_norm, double log_sqrt_det, std::size_t dim) noexcept {
  return -0.5 * squared_norm - log_sqrt_det - 0.5 * static_cast<double>(dim) * kLogTwoPi;
}

}  // namespace mis
