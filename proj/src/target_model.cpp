#include "mis/target_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "mis/errors.hpp"
#include "mis/numeric.hpp"

namespace mis {

namespace {

void check_simplex(const std::vector<double>& weights, std::size_t count) {
  if (weights.size() != count) {
    throw InputError("mixture weight count " + std::to_string(weights.size()) +
                     " does not match component count " + std::to_string(count));
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InputError("mixture weights must be finite and nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InputError("mixture weights must sum to 1 (got " + std::to_string(total) + ")");
  }
}

bool all_equal(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

std::vector<double>& scratch(std::size_t n) {
  thread_local std::vector<double> buffer;
  buffer.resize(n);
  return buffer;
}

std::size_t pick_component(const std::vector<double>& weights, bool equal, RandomStream& rng) {
  if (equal) {
    return rng.index(weights.size());
  }
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    cumulative += weights[k];
    if (u < cumulative) {
      return k;
    }
  }
  return weights.size() - 1;
}

}  // namespace

std::string_view to_string(TargetFamily family) noexcept {
  switch (family) {
    case TargetFamily::GaussianMixture: return "gaussian_mixture";
    case TargetFamily::GGDMixture: return "ggd_mixture";
    case TargetFamily::Banana: return "banana";
    case TargetFamily::Custom: return "custom";
  }
  return "unknown";
}

TargetDensity::TargetDensity(TargetFamily family, std::size_t dim, Model model)
    : family_(family), dim_(dim), model_(std::move(model)) {}

TargetDensity TargetDensity::gaussian_mixture(const GaussianMixtureParams& params) {
  const std::size_t count = params.means.size();
  if (count == 0) {
    throw InputError("gaussian mixture needs at least one component");
  }
  if (params.covariances.size() != count) {
    throw InputError("gaussian mixture: means and covariances differ in length");
  }
  check_simplex(params.weights, count);
  const auto dim = static_cast<std::size_t>(params.means.front().size());
  if (dim == 0) {
    throw InputError("gaussian mixture: zero-dimensional component");
  }

  GaussianMixtureModel model;
  model.weights = params.weights;
  model.equal_weights = all_equal(params.weights);
  for (std::size_t k = 0; k < count; ++k) {
    const Eigen::VectorXd& mean = params.means[k];
    const Eigen::MatrixXd& cov = params.covariances[k];
    if (static_cast<std::size_t>(mean.size()) != dim || static_cast<std::size_t>(cov.rows()) != dim ||
        static_cast<std::size_t>(cov.cols()) != dim) {
      throw InputError("gaussian mixture: component " + std::to_string(k) + " has inconsistent dimension");
    }
    if (!cov.isApprox(cov.transpose(), 1e-12)) {
      throw InputError("gaussian mixture: covariance " + std::to_string(k) + " is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw InputError("gaussian mixture: covariance " + std::to_string(k) + " is not positive definite");
    }
    GaussianComponent c;
    c.log_weight = std::log(params.weights[k]);
    c.mean.assign(mean.data(), mean.data() + dim);
    c.chol = llt.matrixL();
    for (std::size_t d = 0; d < dim; ++d) {
      c.log_sqrt_det += std::log(c.chol(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    }
    model.components.push_back(std::move(c));
  }
  return TargetDensity(TargetFamily::GaussianMixture, dim, std::move(model));
}

TargetDensity TargetDensity::ggd_mixture(const GGDMixtureParams& params) {
  const std::size_t count = params.location.size();
  if (count == 0) {
    throw InputError("ggd mixture needs at least one component");
  }
  if (params.scale.size() != count || params.shape.size() != count) {
    throw InputError("ggd mixture: location/scale/shape component counts differ");
  }
  std::vector<double> weights = params.weights;
  if (weights.empty()) {
    weights.assign(count, 1.0 / static_cast<double>(count));
  }
  check_simplex(weights, count);
  const std::size_t dim = params.location.front().size();
  if (dim == 0) {
    throw InputError("ggd mixture: zero-dimensional component");
  }

  GGDMixtureModel model;
  model.weights = weights;
  model.equal_weights = all_equal(weights);
  for (std::size_t k = 0; k < count; ++k) {
    if (params.location[k].size() != dim || params.scale[k].size() != dim || params.shape[k].size() != dim) {
      throw InputError("ggd mixture: component " + std::to_string(k) + " has inconsistent dimension");
    }
    GGDComponent c;
    c.log_weight = std::log(weights[k]);
    c.location = params.location[k];
    c.scale = params.scale[k];
    c.shape = params.shape[k];
    for (std::size_t d = 0; d < dim; ++d) {
      const double alpha = c.scale[d];
      const double beta = c.shape[d];
      if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw InputError("ggd mixture: scale and shape must be strictly positive");
      }
      // lgamma avoids overflow of Gamma(1/beta) for small beta.
      c.log_norm += std::log(beta) - std::log(2.0 * alpha) - std::lgamma(1.0 / beta);
    }
    model.components.push_back(std::move(c));
  }
  return TargetDensity(TargetFamily::GGDMixture, dim, std::move(model));
}

TargetDensity TargetDensity::banana(const BananaParams& params) {
  if (params.dim < 2) {
    throw InputError("banana target needs dimension >= 2");
  }
  if (!(params.sigma2 > 0.0) || !std::isfinite(params.bend)) {
    throw InputError("banana target needs sigma2 > 0 and a finite bend");
  }
  return TargetDensity(TargetFamily::Banana, params.dim, params);
}

TargetDensity TargetDensity::custom(std::size_t dim, LogDensityFn log_density) {
  if (dim == 0 || !log_density) {
    throw InputError("custom target needs a dimension and a callable");
  }
  return TargetDensity(TargetFamily::Custom, dim, CustomModel{std::move(log_density)});
}

TargetDensity TargetDensity::scaled(double log_scale) const {
  TargetDensity copy = *this;
  copy.log_scale_ += log_scale;
  return copy;
}

std::optional<double> TargetDensity::known_Z() const {
  if (family_ == TargetFamily::Custom) {
    return std::nullopt;
  }
  return std::exp(log_scale_);
}

double TargetDensity::log_density(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw InputError("log_density: expected dimension " + std::to_string(dim_) + ", got " +
                     std::to_string(x.size()));
  }
  const double value = log_density_unscaled(x);
  return log_scale_ == 0.0 ? value : value + log_scale_;
}

double TargetDensity::log_density_unscaled(std::span<const double> x) const {
  switch (family_) {
    case TargetFamily::GaussianMixture: {
      const auto& model = std::get<GaussianMixtureModel>(model_);
      auto& terms = scratch(model.components.size() + dim_);
      std::span<double> per_component(terms.data(), model.components.size());
      std::span<double> whitened(terms.data() + model.components.size(), dim_);
      for (std::size_t k = 0; k < model.components.size(); ++k) {
        const auto& c = model.components[k];
        double squared = 0.0;
        // Forward substitution L y = x - mean.
        for (std::size_t i = 0; i < dim_; ++i) {
          double r = x[i] - c.mean[i];
          for (std::size_t j = 0; j < i; ++j) {
            r -= c.chol(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * whitened[j];
          }
          whitened[i] = r / c.chol(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
          squared += whitened[i] * whitened[i];
        }
        const double lg = gaussian_log_kernel(squared, c.log_sqrt_det, dim_);
        per_component[k] = model.equal_weights ? lg : lg + c.log_weight;
      }
      return model.equal_weights ? log_mean_exp(per_component) : log_sum_exp(per_component);
    }
    case TargetFamily::GGDMixture: {
      const auto& model = std::get<GGDMixtureModel>(model_);
      auto& terms = scratch(model.components.size());
      for (std::size_t k = 0; k < model.components.size(); ++k) {
        const auto& c = model.components[k];
        double value = c.log_norm;
        for (std::size_t d = 0; d < dim_; ++d) {
          value -= std::pow(std::abs(x[d] - c.location[d]) / c.scale[d], c.shape[d]);
        }
        terms[k] = model.equal_weights ? value : value + c.log_weight;
      }
      return model.equal_weights ? log_mean_exp(terms) : log_sum_exp(terms);
    }
    case TargetFamily::Banana: {
      const auto& p = std::get<BananaParams>(model_);
      const double sigma = std::sqrt(p.sigma2);
      const double z1 = x[0] / sigma;
      const double z2 = x[1] - p.bend * (x[0] * x[0] - p.sigma2);
      double squared = z1 * z1 + z2 * z2;
      for (std::size_t d = 2; d < dim_; ++d) {
        squared += x[d] * x[d];
      }
      return gaussian_log_kernel(squared, std::log(sigma), dim_);
    }
    case TargetFamily::Custom:
      return std::get<CustomModel>(model_).fn(x);
  }
  return 0.0;
}

GroundTruth TargetDensity::ground_truth() const {
  GroundTruth truth;
  truth.mean.assign(dim_, 0.0);
  truth.second_moment.assign(dim_, 0.0);
  truth.Z = std::exp(log_scale_);
  switch (family_) {
    case TargetFamily::GaussianMixture: {
      const auto& model = std::get<GaussianMixtureModel>(model_);
      for (std::size_t k = 0; k < model.components.size(); ++k) {
        const auto& c = model.components[k];
        for (std::size_t d = 0; d < dim_; ++d) {
          const auto i = static_cast<Eigen::Index>(d);
          const double variance = c.chol.row(i).squaredNorm();
          truth.mean[d] += model.weights[k] * c.mean[d];
          truth.second_moment[d] += model.weights[k] * (variance + c.mean[d] * c.mean[d]);
        }
      }
      return truth;
    }
    case TargetFamily::GGDMixture: {
      const auto& model = std::get<GGDMixtureModel>(model_);
      for (std::size_t k = 0; k < model.components.size(); ++k) {
        const auto& c = model.components[k];
        for (std::size_t d = 0; d < dim_; ++d) {
          const double beta = c.shape[d];
          const double variance =
              c.scale[d] * c.scale[d] * std::exp(std::lgamma(3.0 / beta) - std::lgamma(1.0 / beta));
          truth.mean[d] += model.weights[k] * c.location[d];
          truth.second_moment[d] += model.weights[k] * (variance + c.location[d] * c.location[d]);
        }
      }
      return truth;
    }
    case TargetFamily::Banana: {
      const auto& p = std::get<BananaParams>(model_);
      // x2 = z + b (x1^2 - sigma2), Var(x1^2) = 2 sigma2^2.
      truth.second_moment.assign(dim_, 1.0);
      truth.second_moment[0] = p.sigma2;
      truth.second_moment[1] = 1.0 + 2.0 * p.bend * p.bend * p.sigma2 * p.sigma2;
      return truth;
    }
    case TargetFamily::Custom:
      break;
  }
  throw UnsupportedQuery("ground_truth: target family '" + std::string(to_string(family_)) +
                         "' has no closed-form moments");
}

void TargetDensity::sample(RandomStream& rng, std::span<double> out) const {
  if (out.size() != dim_) {
    throw InputError("sample: output has wrong dimension");
  }
  switch (family_) {
    case TargetFamily::GaussianMixture: {
      const auto& model = std::get<GaussianMixtureModel>(model_);
      const auto& c = model.components[pick_component(model.weights, model.equal_weights, rng)];
      auto& z = scratch(dim_);
      for (auto& v : z) {
        v = rng.normal();
      }
      for (std::size_t i = 0; i < dim_; ++i) {
        double v = c.mean[i];
        for (std::size_t j = 0; j <= i; ++j) {
          v += c.chol(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * z[j];
        }
        out[i] = v;
      }
      return;
    }
    case TargetFamily::GGDMixture: {
      const auto& model = std::get<GGDMixtureModel>(model_);
      const auto& c = model.components[pick_component(model.weights, model.equal_weights, rng)];
      for (std::size_t d = 0; d < dim_; ++d) {
        // (|x - mu| / alpha)^beta ~ Gamma(1/beta, 1).
        std::gamma_distribution<double> gamma(1.0 / c.shape[d], 1.0);
        const double magnitude = c.scale[d] * std::pow(gamma(rng.engine()), 1.0 / c.shape[d]);
        out[d] = c.location[d] + (rng.uniform() < 0.5 ? -magnitude : magnitude);
      }
      return;
    }
    case TargetFamily::Banana: {
      const auto& p = std::get<BananaParams>(model_);
      out[0] = std::sqrt(p.sigma2) * rng.normal();
      out[1] = rng.normal() + p.bend * (out[0] * out[0] - p.sigma2);
      for (std::size_t d = 2; d < dim_; ++d) {
        out[d] = rng.normal();
      }
      return;
    }
    case TargetFamily::Custom:
      break;
  }
  throw UnsupportedQuery("sample: custom targets cannot be sampled directly");
}

}  // namespace mis
