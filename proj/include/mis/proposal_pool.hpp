#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "mis/random.hpp"

namespace mis {

enum class ProposalFamily { Gaussian, StudentT };

std::string_view to_string(ProposalFamily family) noexcept;

/// Product-form proposal: independent location-scale Gaussian or
/// non-standardized Student-t marginals per dimension.
struct Proposal {
  ProposalFamily family = ProposalFamily::Gaussian;
  std::vector<double> location;
  std::vector<double> scale;
  double dof = 0.0;  // StudentT only
};

/// Ordered proposals q_0..q_{N-1} sharing one dimension. Index n is
/// meaningful: deterministic selection draws exactly one sample from each
/// proposal in index order. Indexes are zero-based throughout.
class ProposalPool {
 public:
  explicit ProposalPool(std::vector<Proposal> proposals);

  /// N proposals of one family with locations uniform in [lo, hi]^dim.
  static ProposalPool uniform_locations(ProposalFamily family, std::size_t count, std::span<const double> lo,
                                        std::span<const double> hi, double scale, double dof, RandomStream& rng);

  std::size_t size() const noexcept { return proposals_.size(); }
  std::size_t dimension() const noexcept { return dim_; }
  const Proposal& proposal(std::size_t index) const;

  /// One variate from q_index. Gaussian consumes two engine words per
  /// dimension, Student-t one (inverse-CDF).
  void draw(std::size_t index, RandomStream& rng, std::span<double> out) const;
  std::vector<double> draw(std::size_t index, RandomStream& rng) const;

  double log_eval(std::size_t index, std::span<const double> x) const;

  /// log of (1/|S|) sum_{j in S} q_j(x) for a multiset S; repeated indexes
  /// count once per occurrence.
  double log_mixture_eval(std::span<const std::size_t> subset, std::span<const double> x) const;

 private:
  struct Cached {
    double log_norm = 0.0;  // all x-independent terms
    double half_dof_plus_one = 0.0;
  };

  void check_index(std::size_t index) const;
  double log_eval_unchecked(std::size_t index, std::span<const double> x) const;

  std::vector<Proposal> proposals_;
  std::vector<Cached> cached_;
  std::size_t dim_ = 0;
};

}  // namespace mis
