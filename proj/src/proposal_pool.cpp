#include "mis/proposal_pool.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <boost/math/distributions/students_t.hpp>

#include "mis/errors.hpp"
#include "mis/numeric.hpp"

namespace mis {

std::string_view to_string(ProposalFamily family) noexcept {
  switch (family) {
    case ProposalFamily::Gaussian: return "gaussian";
    case ProposalFamily::StudentT: return "student_t";
  }
  return "unknown";
}

ProposalPool::ProposalPool(std::vector<Proposal> proposals) : proposals_(std::move(proposals)) {
  if (proposals_.empty()) {
    throw InputError("proposal pool needs at least one proposal");
  }
  dim_ = proposals_.front().location.size();
  if (dim_ == 0) {
    throw InputError("proposal pool: zero-dimensional proposal");
  }
  cached_.reserve(proposals_.size());
  for (std::size_t n = 0; n < proposals_.size(); ++n) {
    const Proposal& p = proposals_[n];
    if (p.location.size() != dim_) {
      throw InputError("proposal pool: proposal " + std::to_string(n) + " has dimension " +
                       std::to_string(p.location.size()) + ", expected " + std::to_string(dim_));
    }
    if (p.scale.size() != dim_) {
      throw InputError("proposal pool: proposal " + std::to_string(n) + " needs one scale per dimension");
    }
    Cached c;
    for (double s : p.scale) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw InputError("proposal pool: scales must be finite and strictly positive");
      }
      c.log_norm += std::log(s);
    }
    if (p.family == ProposalFamily::StudentT) {
      if (!(p.dof > 0.0) || !std::isfinite(p.dof)) {
        throw InputError("proposal pool: Student-t degrees of freedom must be positive");
      }
      const double nu = p.dof;
      const double per_dim = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                             0.5 * std::log(nu * std::numbers::pi);
      c.log_norm = static_cast<double>(dim_) * per_dim - c.log_norm;
      c.half_dof_plus_one = 0.5 * (nu + 1.0);
    }
    cached_.push_back(c);
  }
}

ProposalPool ProposalPool::uniform_locations(ProposalFamily family, std::size_t count, std::span<const double> lo,
                                             std::span<const double> hi, double scale, double dof,
                                             RandomStream& rng) {
  if (lo.size() != hi.size() || lo.empty()) {
    throw InputError("uniform_locations: bounds must be nonempty and of equal length");
  }
  std::vector<Proposal> proposals(count);
  for (auto& p : proposals) {
    p.family = family;
    p.dof = dof;
    p.scale.assign(lo.size(), scale);
    p.location.resize(lo.size());
    for (std::size_t d = 0; d < lo.size(); ++d) {
      p.location[d] = lo[d] + (hi[d] - lo[d]) * rng.uniform();
    }
  }
  return ProposalPool(std::move(proposals));
}

const Proposal& ProposalPool::proposal(std::size_t index) const {
  check_index(index);
  return proposals_[index];
}

void ProposalPool::check_index(std::size_t index) const {
  if (index >= proposals_.size()) {
    throw InputError("proposal index " + std::to_string(index) + " out of range for pool of size " +
                     std::to_string(proposals_.size()));
  }
}

void ProposalPool::draw(std::size_t index, RandomStream& rng, std::span<double> out) const {
  check_index(index);
  if (out.size() != dim_) {
    throw InputError("draw: output has wrong dimension");
  }
  const Proposal& p = proposals_[index];
  if (p.family == ProposalFamily::Gaussian) {
    for (std::size_t d = 0; d < dim_; ++d) {
      out[d] = p.location[d] + p.scale[d] * rng.normal();
    }
  } else {
    const boost::math::students_t_distribution<double> standard(p.dof);
    for (std::size_t d = 0; d < dim_; ++d) {
      out[d] = p.location[d] + p.scale[d] * boost::math::quantile(standard, rng.uniform_open());
    }
  }
}

std::vector<double> ProposalPool::draw(std::size_t index, RandomStream& rng) const {
  std::vector<double> out(dim_);
  draw(index, rng, out);
  return out;
}

double ProposalPool::log_eval(std::size_t index, std::span<const double> x) const {
  check_index(index);
  if (x.size() != dim_) {
    throw InputError("log_eval: expected dimension " + std::to_string(dim_) + ", got " + std::to_string(x.size()));
  }
  return log_eval_unchecked(index, x);
}

double ProposalPool::log_eval_unchecked(std::size_t index, std::span<const double> x) const {
  const Proposal& p = proposals_[index];
  const Cached& c = cached_[index];
  if (p.family == ProposalFamily::Gaussian) {
    double squared = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double z = (x[d] - p.location[d]) / p.scale[d];
      squared += z * z;
    }
    return gaussian_log_kernel(squared, c.log_norm, dim_);
  }
  double value = c.log_norm;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double z = (x[d] - p.location[d]) / p.scale[d];
    value -= c.half_dof_plus_one * std::log1p(z * z / p.dof);
  }
  return value;
}

double ProposalPool::log_mixture_eval(std::span<const std::size_t> subset, std::span<const double> x) const {
  if (subset.empty()) {
    throw InputError("log_mixture_eval: empty subset");
  }
  if (x.size() != dim_) {
    throw InputError("log_mixture_eval: expected dimension " + std::to_string(dim_) + ", got " +
                     std::to_string(x.size()));
  }
  for (std::size_t j : subset) {
    check_index(j);
  }
  if (subset.size() == 1) {
    return log_eval_unchecked(subset.front(), x);
  }
  thread_local std::vector<double> terms;
  terms.resize(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    terms[i] = log_eval_unchecked(subset[i], x);
  }
  return log_mean_exp(terms);
}

}  // namespace mis
