#include "mis/adaptive_mis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mis/errors.hpp"
#include "mis/numeric.hpp"

namespace mis {

std::string_view to_string(Adapter adapter) noexcept {
  return adapter == Adapter::LAIS ? "LAIS" : "PMC";
}

std::optional<Adapter> parse_adapter(std::string_view text) noexcept {
  if (text == "LAIS") return Adapter::LAIS;
  if (text == "PMC") return Adapter::PMC;
  return std::nullopt;
}

std::string_view to_string(AdaptiveVariant variant) noexcept {
  switch (variant) {
    case AdaptiveVariant::PerProposal: return "per_proposal";
    case AdaptiveVariant::FullMixture: return "full_mixture";
    case AdaptiveVariant::TemporalMixture: return "temporal_mixture";
    case AdaptiveVariant::SpatialMixture: return "spatial_mixture";
    case AdaptiveVariant::GenericPartition: return "generic_partition";
  }
  return "?";
}

std::optional<AdaptiveVariant> parse_adaptive_variant(std::string_view text) noexcept {
  if (text == "per_proposal" || text == "N1") return AdaptiveVariant::PerProposal;
  if (text == "full_mixture") return AdaptiveVariant::FullMixture;
  if (text == "temporal_mixture") return AdaptiveVariant::TemporalMixture;
  if (text == "spatial_mixture" || text == "N3") return AdaptiveVariant::SpatialMixture;
  if (text == "generic_partition") return AdaptiveVariant::GenericPartition;
  return std::nullopt;
}

namespace {

Partition grid_partition(const std::vector<std::vector<GridCell>>& grouping, std::size_t J, std::size_t T) {
  Partition partition;
  for (const auto& group : grouping) {
    std::vector<std::size_t> subset;
    for (const GridCell& c : group) {
      if (c.j >= J || c.t >= T) {
        throw InputError("grouping cell (" + std::to_string(c.j) + ", " + std::to_string(c.t) +
                         ") lies outside the " + std::to_string(J) + " x " + std::to_string(T) + " grid");
      }
      subset.push_back(c.t * J + c.j);
    }
    partition.subsets.push_back(std::move(subset));
  }
  validate(partition, J * T);
  return partition;
}

void init_means(const AdaptiveConfig& cfg, std::size_t dim, RandomStream& rng, std::vector<double>& out) {
  out.resize(cfg.J * dim);
  for (std::size_t j = 0; j < cfg.J; ++j) {
    for (std::size_t d = 0; d < dim; ++d) {
      out[j * dim + d] = cfg.init_lo[d] + (cfg.init_hi[d] - cfg.init_lo[d]) * rng.uniform();
    }
  }
}

// log of multiset mixture over `subset` of isotropic Gaussians with means
// taken from `means`; mirrors ProposalPool::log_mixture_eval.
class IterationPool {
 public:
  IterationPool(const double* means, std::size_t count, std::size_t dim, double sigma)
      : means_(means), count_(count), dim_(dim), sigma_(sigma), log_sigma_(static_cast<double>(dim) * std::log(sigma)) {}

  double log_eval(std::size_t k, std::span<const double> x) const {
    double squared = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double z = (x[d] - means_[k * dim_ + d]) / sigma_;
      squared += z * z;
    }
    return gaussian_log_kernel(squared, log_sigma_, dim_);
  }

  double log_mixture(std::span<const double> x) const {
    if (count_ == 1) {
      return log_eval(0, x);
    }
    terms_.resize(count_);
    for (std::size_t k = 0; k < count_; ++k) {
      terms_[k] = log_eval(k, x);
    }
    return log_mean_exp(terms_);
  }

 private:
  const double* means_;
  std::size_t count_;
  std::size_t dim_;
  double sigma_;
  double log_sigma_;
  mutable std::vector<double> terms_;
};

}  // namespace

void validate(const AdaptiveConfig& cfg, std::size_t dim) {
  if (cfg.J == 0 || cfg.T == 0) {
    throw InputError("adaptive: J and T must be at least 1");
  }
  if (!(cfg.sigma_upper > 0.0) || !(cfg.sigma_lower > 0.0) || !std::isfinite(cfg.sigma_upper) ||
      !std::isfinite(cfg.sigma_lower)) {
    throw InputError("adaptive: sigma_upper and sigma_lower must be finite and positive");
  }
  if (cfg.init_lo.size() != dim || cfg.init_hi.size() != dim) {
    throw InputError("adaptive: init region must have " + std::to_string(dim) + " bounds per side");
  }
  for (std::size_t d = 0; d < dim; ++d) {
    if (!(cfg.init_lo[d] <= cfg.init_hi[d])) {
      throw InputError("adaptive: init region lower bound exceeds upper bound in dimension " + std::to_string(d));
    }
  }
  if (cfg.variant == AdaptiveVariant::FullMixture && !cfg.allow_full_mixture) {
    throw InputError("adaptive: full_mixture weighting costs (J*T)^2 proposal evaluations; set allow_full_mixture");
  }
  if (cfg.variant == AdaptiveVariant::GenericPartition) {
    grid_partition(cfg.grouping, cfg.J, cfg.T);
  }
  if (cfg.adapter == Adapter::PMC && cfg.variant != AdaptiveVariant::PerProposal &&
      cfg.variant != AdaptiveVariant::SpatialMixture) {
    throw InputError("adaptive: PMC supports per_proposal and spatial_mixture weighting only");
  }
}

ProposalHistory lais_adapt(const AdaptiveConfig& cfg, const TargetDensity& target, RandomStream& rng) {
  const std::size_t dim = target.dimension();
  validate(cfg, dim);
  ProposalHistory history{cfg.J, cfg.T, dim, std::vector<double>(cfg.J * cfg.T * dim), {}};
  history.acceptance_rate.reserve(cfg.T);

  std::vector<double> state;
  init_means(cfg, dim, rng, state);
  std::vector<double> log_p(cfg.J);
  for (std::size_t j = 0; j < cfg.J; ++j) {
    log_p[j] = target.log_density(std::span<const double>(state.data() + j * dim, dim));
  }
  std::vector<double> candidate(dim);
  for (std::size_t t = 0; t < cfg.T; ++t) {
    std::size_t accepted = 0;
    for (std::size_t j = 0; j < cfg.J; ++j) {
      double* x = state.data() + j * dim;
      for (std::size_t d = 0; d < dim; ++d) {
        candidate[d] = x[d] + cfg.sigma_upper * rng.normal();
      }
      const double log_candidate = target.log_density(candidate);
      // Symmetric increments: the Hastings ratio is the density ratio.
      if (std::log(rng.uniform_open()) < log_candidate - log_p[j]) {
        std::copy(candidate.begin(), candidate.end(), x);
        log_p[j] = log_candidate;
        ++accepted;
      }
      std::copy(x, x + dim, history.means.begin() + static_cast<std::ptrdiff_t>((t * cfg.J + j) * dim));
    }
    history.acceptance_rate.push_back(static_cast<double>(accepted) / static_cast<double>(cfg.J));
  }
  return history;
}

PmcResult pmc_adapt(const AdaptiveConfig& cfg, const TargetDensity& target, RandomStream& rng) {
  const std::size_t dim = target.dimension();
  validate(cfg, dim);
  PmcResult out;
  out.history = ProposalHistory{cfg.J, cfg.T, dim, std::vector<double>(cfg.J * cfg.T * dim), {}};
  out.draws.resize(cfg.J * cfg.T * dim);

  std::vector<double> means;
  init_means(cfg, dim, rng, means);
  std::vector<double> log_w(cfg.J);
  std::vector<double> cumulative(cfg.J);
  std::vector<double> next(cfg.J * dim);
  for (std::size_t t = 0; t < cfg.T; ++t) {
    std::copy(means.begin(), means.end(), out.history.means.begin() + static_cast<std::ptrdiff_t>(t * cfg.J * dim));
    double* draws = out.draws.data() + t * cfg.J * dim;
    for (std::size_t j = 0; j < cfg.J; ++j) {
      for (std::size_t d = 0; d < dim; ++d) {
        draws[j * dim + d] = means[j * dim + d] + cfg.sigma_lower * rng.normal();
      }
    }
    const IterationPool pool(means.data(), cfg.J, dim, cfg.sigma_lower);
    for (std::size_t j = 0; j < cfg.J; ++j) {
      const std::span<const double> x(draws + j * dim, dim);
      const double denominator =
          cfg.variant == AdaptiveVariant::SpatialMixture ? pool.log_mixture(x) : pool.log_eval(j, x);
      log_w[j] = target.log_density(x) - denominator;
    }
    const double top = *std::max_element(log_w.begin(), log_w.end());
    if (!std::isfinite(top)) {
      throw InputError("pmc: iteration " + std::to_string(t) + " produced no usable weight");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < cfg.J; ++j) {
      total += std::exp(log_w[j] - top);
      cumulative[j] = total;
    }
    for (std::size_t j = 0; j < cfg.J; ++j) {
      const double u = rng.uniform() * total;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const auto pick = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cfg.J - 1);
      std::copy(draws + pick * dim, draws + (pick + 1) * dim, next.begin() + static_cast<std::ptrdiff_t>(j * dim));
    }
    means.swap(next);
  }
  return out;
}

ProposalPool history_pool(const ProposalHistory& history, double sigma) {
  if (!history.complete()) {
    throw InputError("history_pool: incomplete proposal history");
  }
  std::vector<Proposal> proposals(history.J * history.T);
  for (std::size_t t = 0; t < history.T; ++t) {
    for (std::size_t j = 0; j < history.J; ++j) {
      const auto m = history.mean(j, t);
      auto& p = proposals[t * history.J + j];
      p.family = ProposalFamily::Gaussian;
      p.location.assign(m.begin(), m.end());
      p.scale.assign(history.dim, sigma);
    }
  }
  return ProposalPool(std::move(proposals));
}

AdaptiveWeights adaptive_weights(const ProposalHistory& history, std::span<const double> draws,
                                 AdaptiveVariant variant, const TargetDensity& target, double sigma_lower,
                                 const std::vector<std::vector<GridCell>>& grouping) {
  if (!history.complete()) {
    throw InputError("adaptive_weights: incomplete proposal history");
  }
  const std::size_t J = history.J;
  const std::size_t T = history.T;
  const std::size_t dim = history.dim;
  if (draws.size() != J * T * dim || target.dimension() != dim) {
    throw InputError("adaptive_weights: draws do not match the J x T grid");
  }
  const ProposalPool pool = history_pool(history, sigma_lower);
  std::vector<std::size_t> owner;
  Partition partition;
  if (variant == AdaptiveVariant::GenericPartition) {
    partition = grid_partition(grouping, J, T);
    owner = subset_owner(partition, J * T);
  }

  AdaptiveWeights out;
  out.log_weights.resize(J * T);
  std::vector<std::size_t> subset;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < J; ++j) {
      const std::size_t i = t * J + j;
      switch (variant) {
        case AdaptiveVariant::PerProposal:
          subset.assign(1, i);
          break;
        case AdaptiveVariant::FullMixture:
          subset.resize(J * T);
          std::iota(subset.begin(), subset.end(), std::size_t{0});
          break;
        case AdaptiveVariant::TemporalMixture:
          subset.clear();
          for (std::size_t r = 0; r < T; ++r) {
            subset.push_back(r * J + j);
          }
          break;
        case AdaptiveVariant::SpatialMixture:
          subset.resize(J);
          std::iota(subset.begin(), subset.end(), t * J);
          break;
        case AdaptiveVariant::GenericPartition: {
          const auto& members = partition.subsets[owner[i]];
          subset.assign(members.begin(), members.end());
          break;
        }
      }
      const std::span<const double> x(draws.data() + i * dim, dim);
      out.log_weights[i] = target.log_density(x) - pool.log_mixture_eval(subset, x);
      out.target_evals += 1;
      out.proposal_evals += subset.size();
    }
  }
  return out;
}

AdaptiveRun run_adaptive(const AdaptiveConfig& cfg, const TargetDensity& target, RandomStream& rng) {
  const std::size_t dim = target.dimension();
  validate(cfg, dim);
  AdaptiveRun run;
  std::vector<double> draws;
  if (cfg.adapter == Adapter::LAIS) {
    run.history = lais_adapt(cfg, target, rng);
    draws.resize(cfg.J * cfg.T * dim);
    // Lower layer: one draw per proposal per iteration.
    for (std::size_t t = 0; t < cfg.T; ++t) {
      for (std::size_t j = 0; j < cfg.J; ++j) {
        const auto m = run.history.mean(j, t);
        double* x = draws.data() + (t * cfg.J + j) * dim;
        for (std::size_t d = 0; d < dim; ++d) {
          x[d] = m[d] + cfg.sigma_lower * rng.normal();
        }
      }
    }
  } else {
    PmcResult pmc = pmc_adapt(cfg, target, rng);
    run.history = std::move(pmc.history);
    draws = std::move(pmc.draws);
  }

  AdaptiveWeights weights = adaptive_weights(run.history, draws, cfg.variant, target, cfg.sigma_lower, cfg.grouping);

  run.samples.dim = dim;
  run.samples.samples = std::move(draws);
  run.samples.log_weights = std::move(weights.log_weights);
  run.samples.counters.target_evals = weights.target_evals;
  run.samples.counters.proposal_evals = weights.proposal_evals;
  run.samples.counters.proposal_evals_distinct = weights.proposal_evals;
  std::vector<std::size_t> identity(cfg.J);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  run.samples.index_sequences.assign(cfg.T, IndexSequence{SamplingMode::S3, identity});

  run.diagnostics.resize(cfg.T);
  for (std::size_t t = 0; t < cfg.T; ++t) {
    const auto first = run.samples.log_weights.begin() + static_cast<std::ptrdiff_t>(t * cfg.J);
    const auto last = first + static_cast<std::ptrdiff_t>(cfg.J);
    const double top = *std::max_element(first, last);
    double total = 0.0;
    for (auto it = first; it != last; ++it) {
      total += std::exp(*it - top);
    }
    auto& diag = run.diagnostics[t];
    diag.t = t;
    diag.ess = std::isfinite(top) ? total : 0.0;
    if (!run.history.acceptance_rate.empty()) {
      diag.acceptance_rate = run.history.acceptance_rate[t];
    }
  }
  return run;
}

}  // namespace mis
