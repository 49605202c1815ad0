#include "mis/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mis {

double log_sum_exp(std::span<const double> values) noexcept {
  if (values.empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) {
    return top;
  }
  double acc = 0.0;
  for (double v : values) {
    acc += std::exp(v - top);
  }
  return top + std::log(acc);
}

double log_mean_exp(std::span<const double> values) noexcept {
  return log_sum_exp(values) - std::log(static_cast<double>(values.size()));
}

}  // namespace mis
