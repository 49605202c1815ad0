#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mis/random.hpp"

namespace mis {

enum class TargetFamily { GaussianMixture, GGDMixture, Banana, Custom };

std::string_view to_string(TargetFamily family) noexcept;

struct GaussianMixtureParams {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
};

/// Mixture of products of univariate generalized Gaussians,
///   GG(x; mu, alpha, beta) = kappa * exp(-(|x - mu| / alpha)^beta),
///   kappa = beta / (2 alpha Gamma(1/beta)).
/// beta = 2 is Gaussian with sigma = alpha / sqrt(2); beta = 1 is Laplace.
struct GGDMixtureParams {
  std::vector<double> weights;  // empty means equal weights
  std::vector<std::vector<double>> location;
  std::vector<std::vector<double>> scale;
  std::vector<std::vector<double>> shape;
};

/// N(x1; 0, sigma2) * N(x2 - b (x1^2 - sigma2); 0, 1) * prod_{d>2} N(xd; 0, 1).
/// The shear has unit Jacobian, so the density is normalized with zero mean.
struct BananaParams {
  double sigma2 = 4.0;
  double bend = 3.0;
  std::size_t dim = 2;
};

struct GroundTruth {
  std::vector<double> mean;
  std::vector<double> second_moment;  // E[x_d^2] per component
  double Z = 1.0;
};

/// Unnormalized log-density with optional analytic moments. Immutable after
/// construction; safe to share across threads.
class TargetDensity {
 public:
  using LogDensityFn = std::function<double(std::span<const double>)>;

  static TargetDensity gaussian_mixture(const GaussianMixtureParams& params);
  static TargetDensity ggd_mixture(const GGDMixtureParams& params);
  static TargetDensity banana(const BananaParams& params);
  /// Black-box log-density. Has no ground truth and cannot be sampled.
  static TargetDensity custom(std::size_t dim, LogDensityFn log_density);

  /// Same density multiplied by exp(log_scale); Z scales accordingly.
  TargetDensity scaled(double log_scale) const;

  TargetFamily family() const noexcept { return family_; }
  std::size_t dimension() const noexcept { return dim_; }
  std::optional<double> known_Z() const;

  double log_density(std::span<const double> x) const;

  /// Exact mean, component-wise second moment and Z. Throws UnsupportedQuery for custom targets.
  GroundTruth ground_truth() const;

  /// Exact draw from the normalized target (direct-sampling baseline).
  void sample(RandomStream& rng, std::span<double> out) const;

 private:
  struct GaussianComponent {
    double log_weight = 0.0;
    std::vector<double> mean;
    Eigen::MatrixXd chol;  // lower factor of the covariance
    double log_sqrt_det = 0.0;
  };
  struct GaussianMixtureModel {
    std::vector<GaussianComponent> components;
    std::vector<double> weights;
    bool equal_weights = true;
  };
  struct GGDComponent {
    double log_weight = 0.0;
    std::vector<double> location;
    std::vector<double> scale;
    std::vector<double> shape;
    double log_norm = 0.0;  // sum_d log kappa_d
  };
  struct GGDMixtureModel {
    std::vector<GGDComponent> components;
    std::vector<double> weights;
    bool equal_weights = true;
  };
  struct CustomModel {
    LogDensityFn fn;
  };

  using Model = std::variant<GaussianMixtureModel, GGDMixtureModel, BananaParams, CustomModel>;

  TargetDensity(TargetFamily family, std::size_t dim, Model model);

  double log_density_unscaled(std::span<const double> x) const;

  TargetFamily family_;
  std::size_t dim_;
  Model model_;
  double log_scale_ = 0.0;
};

}  // namespace mis
