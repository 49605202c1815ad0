#include "mis/variance_lab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mis/errors.hpp"
#include "mis/replicates.hpp"

namespace mis {

TargetDensity RunningExampleConfig::target() const {
  if (!(sigma > 0.0)) {
    throw InputError("running example: sigma must be positive");
  }
  GaussianMixtureParams params;
  params.weights = {0.5, 0.5};
  params.means = {Eigen::VectorXd::Constant(1, -mu), Eigen::VectorXd::Constant(1, mu)};
  params.covariances = {Eigen::MatrixXd::Constant(1, 1, sigma * sigma), Eigen::MatrixXd::Constant(1, 1, sigma * sigma)};
  return TargetDensity::gaussian_mixture(params);
}

ProposalPool RunningExampleConfig::pool() const {
  std::vector<Proposal> proposals(2);
  proposals[0] = {ProposalFamily::Gaussian, {-mu}, {sigma}, 0.0};
  proposals[1] = {ProposalFamily::Gaussian, {mu}, {sigma}, 0.0};
  return ProposalPool(std::move(proposals));
}

double analytic_variance_Z(const RunningExampleConfig& cfg, SchemeName scheme) {
  const double e = std::exp(4.0 * cfg.mu * cfg.mu / (cfg.sigma * cfg.sigma));
  switch (scheme) {
    case SchemeName::R1:
    case SchemeName::N1:
      return (3.0 + e) / 8.0 - 0.5;
    case SchemeName::R2:
    case SchemeName::N2:
      return (3.0 + e) / 16.0 - 0.25;
    case SchemeName::R3:
    case SchemeName::N3:
      return 0.0;
  }
  return 0.0;
}

double analytic_variance_mean(const RunningExampleConfig& cfg, SchemeName scheme) {
  const double s2 = cfg.sigma * cfg.sigma;
  const double m2 = cfg.mu * cfg.mu;
  const double e = std::exp(4.0 * m2 / s2);
  const double r2 = 3.0 * (s2 + m2) / 16.0 + (s2 + 9.0 * m2) * e / 16.0 + s2 / 4.0;
  switch (scheme) {
    case SchemeName::R1:
    case SchemeName::N1:
      return 3.0 * (s2 + m2) / 8.0 + (s2 + 9.0 * m2) * e / 8.0;
    case SchemeName::R2:
      return r2;
    case SchemeName::N2:
      // The permutation's first index shifts E[I | j] by -/+ mu/2; that
      // between-permutation spread adds mu^2/4 on top of R2.
      return r2 + m2 / 4.0;
    case SchemeName::R3:
      return (s2 + m2) / 2.0;
    case SchemeName::N3:
      return s2 / 2.0;
  }
  return 0.0;
}

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::Unnormalized: return "unnormalized";
    case EstimatorKind::NormalizingConstant: return "normalizing_constant";
    case EstimatorKind::SelfNormalized: return "self_normalized";
  }
  return "?";
}

std::optional<EstimatorKind> parse_estimator_kind(std::string_view text) noexcept {
  if (text == "unnormalized") return EstimatorKind::Unnormalized;
  if (text == "normalizing_constant") return EstimatorKind::NormalizingConstant;
  if (text == "self_normalized") return EstimatorKind::SelfNormalized;
  return std::nullopt;
}

namespace {

std::vector<double> evaluate(const WeightedSampleSet& ws, const EstimatorRequest& request) {
  switch (request.kind) {
    case EstimatorKind::Unnormalized:
      return estimate_unnormalized(ws, request.g, request.Z);
    case EstimatorKind::NormalizingConstant:
      return {estimate_Z(ws)};
    case EstimatorKind::SelfNormalized:
      return estimate_self_normalized(ws, request.g);
  }
  return {};
}

double mean_of(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) {
    total += v;
  }
  return total / static_cast<double>(values.size());
}

// Standard error of the mean, two-pass.
double stderr_of(const std::vector<double>& values, double mean) {
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  const auto n = static_cast<double>(values.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

std::vector<EmpiricalStats> empirical_mse(const SampleFn& sampler, std::span<const EstimatorRequest> requests,
                                          const ReplicateOptions& options) {
  const std::size_t R = options.replicates;
  if (R < 2) {
    throw InputError("empirical_mse: need at least 2 replicates");
  }
  const std::size_t K = requests.size();
  // errors[k][c][r]: component c of replicate r's error for request k.
  std::vector<std::vector<std::vector<double>>> errors(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (requests[k].truth.empty()) {
      throw InputError("empirical_mse: truth must be supplied");
    }
    errors[k].assign(requests[k].truth.size(), std::vector<double>(R));
  }
  std::vector<EvaluationCounters> counters(R);

  for_each_replicate(R, options.seed, options.tag, options.threads, [&](std::size_t r, RandomStream& rng) {
    const WeightedSampleSet ws = sampler(r, rng);
    counters[r] = ws.counters;
    for (std::size_t k = 0; k < K; ++k) {
      const auto estimate = evaluate(ws, requests[k]);
      if (estimate.size() != requests[k].truth.size()) {
        throw InputError("empirical_mse: truth has length " + std::to_string(requests[k].truth.size()) +
                         ", estimate has length " + std::to_string(estimate.size()));
      }
      for (std::size_t c = 0; c < estimate.size(); ++c) {
        errors[k][c][r] = estimate[c] - requests[k].truth[c];
      }
    }
  });

  std::vector<EmpiricalStats> out(K);
  for (std::size_t k = 0; k < K; ++k) {
    EmpiricalStats& s = out[k];
    s.replicates = R;
    std::vector<double> squared(R, 0.0);
    for (const auto& component : errors[k]) {
      for (std::size_t r = 0; r < R; ++r) {
        squared[r] += component[r] * component[r];
      }
      const double m = mean_of(component);
      s.mean_error.push_back(m);
      s.mean_error_stderr.push_back(stderr_of(component, m));
    }
    s.mse = mean_of(squared);
    s.mse_stderr = stderr_of(squared, s.mse);
    s.finite = std::isfinite(s.mse) && std::isfinite(s.mse_stderr);
    for (const auto& c : counters) {
      s.counters += c;
    }
  }
  return out;
}

EmpiricalStats empirical_mse(const SchemeSpec& spec, const TargetDensity& target, const ProposalPool& pool,
                             const EstimatorRequest& request, const ReplicateOptions& options) {
  const SampleFn sampler = [&](std::size_t, RandomStream& rng) { return run_scheme(spec, target, pool, rng); };
  return empirical_mse(sampler, std::span<const EstimatorRequest>(&request, 1), options).front();
}

namespace {

double difference_sigma(const EmpiricalStats& a, const EmpiricalStats& b) {
  return 3.0 * std::hypot(a.mse_stderr, b.mse_stderr);
}

constexpr double kAnalyticTolerance = 1e-12;

double analytic_slack(double a, double b) {
  return kAnalyticTolerance * std::max(std::abs(a), std::abs(b));
}

enum class Relation { Equal, GreaterEqual };

struct Side {
  std::string label;
  std::optional<double> analytic;
  const EmpiricalStats* empirical = nullptr;
};

Side lookup(const VarianceReport& report, const std::string& label) {
  const auto it = report.find(label);
  if (it == report.end()) {
    throw InputError("check_theorem_ordering: report lacks scheme " + label);
  }
  Side side{label, it->second.analytic, it->second.empirical ? &*it->second.empirical : nullptr};
  return side;
}

Verdict compare(const Side& a, const Side& b, Relation relation) {
  Verdict v;
  v.relation = a.label + (relation == Relation::Equal ? " = " : " >= ") + b.label;
  if (a.analytic && b.analytic) {
    v.analytic = true;
    v.lhs = *a.analytic;
    v.rhs = *b.analytic;
    v.slack = analytic_slack(v.lhs, v.rhs);
  } else if (a.empirical && b.empirical) {
    v.lhs = a.empirical->mse;
    v.rhs = b.empirical->mse;
    v.slack = difference_sigma(*a.empirical, *b.empirical);
  } else {
    throw InputError("check_theorem_ordering: " + a.label + " and " + b.label +
                     " share neither analytic nor empirical values");
  }
  v.holds = relation == Relation::Equal ? std::abs(v.lhs - v.rhs) <= v.slack : v.lhs - v.rhs >= -v.slack;
  return v;
}

}  // namespace

std::vector<Verdict> check_theorem_ordering(const VarianceReport& report, Theorem which) {
  const Side r1 = lookup(report, "R1");
  const Side n1 = lookup(report, "N1");
  const Side n3 = lookup(report, "N3");
  std::vector<Verdict> out;
  out.push_back(compare(r1, n1, Relation::Equal));
  if (which == Theorem::Theorem1) {
    const Side r3 = lookup(report, "R3");
    out.push_back(compare(n1, r3, Relation::GreaterEqual));
    out.push_back(compare(r3, n3, Relation::GreaterEqual));
    return out;
  }
  const Side r2 = lookup(report, "R2");
  const Side n2 = lookup(report, "N2");
  out.push_back(compare(n1, r2, Relation::GreaterEqual));
  out.push_back(compare(n1, n2, Relation::GreaterEqual));
  out.push_back(compare(r2, n2, Relation::Equal));
  out.push_back(compare(r2, n3, Relation::GreaterEqual));
  out.push_back(compare(n2, n3, Relation::GreaterEqual));

  Verdict average;
  average.relation = "R2 = (N1 + N3) / 2";
  if (r2.analytic && n1.analytic && n3.analytic) {
    average.analytic = true;
    average.lhs = *r2.analytic;
    average.rhs = 0.5 * (*n1.analytic + *n3.analytic);
    average.slack = analytic_slack(average.lhs, average.rhs);
  } else if (r2.empirical && n1.empirical && n3.empirical) {
    average.lhs = r2.empirical->mse;
    average.rhs = 0.5 * (n1.empirical->mse + n3.empirical->mse);
    average.slack = 3.0 * std::sqrt(r2.empirical->mse_stderr * r2.empirical->mse_stderr +
                                    0.25 * n1.empirical->mse_stderr * n1.empirical->mse_stderr +
                                    0.25 * n3.empirical->mse_stderr * n3.empirical->mse_stderr);
  } else {
    throw InputError("check_theorem_ordering: R2, N1 and N3 need values of one kind");
  }
  average.holds = std::abs(average.lhs - average.rhs) <= average.slack;
  out.push_back(average);
  return out;
}

bool significantly_less(const EmpiricalStats& a, const EmpiricalStats& b) {
  return b.mse - a.mse > difference_sigma(a, b);
}

bool not_significantly_less(const EmpiricalStats& a, const EmpiricalStats& b) {
  return a.mse - b.mse >= -difference_sigma(a, b);
}

bool within_3sigma(const EmpiricalStats& a, const EmpiricalStats& b) {
  return std::abs(a.mse - b.mse) <= difference_sigma(a, b);
}

}  // namespace mis
