#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "mis/errors.hpp"
#include "mis/variance_lab.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using mis::SchemeName;
using mis::SchemeSpec;

namespace {

oracle::Scheme to_oracle(SchemeName name) {
  switch (name) {
    case SchemeName::R1: return oracle::Scheme::R1;
    case SchemeName::R2: return oracle::Scheme::R2;
    case SchemeName::R3: return oracle::Scheme::R3;
    case SchemeName::N1: return oracle::Scheme::N1;
    case SchemeName::N2: return oracle::Scheme::N2;
    case SchemeName::N3: return oracle::Scheme::N3;
  }
  return oracle::Scheme::R1;
}

mis::VarianceReport analytic_report(const mis::RunningExampleConfig& cfg, bool mean) {
  mis::VarianceReport report;
  for (SchemeName name : mis::kAllSchemes) {
    report[std::string(to_string(name))].analytic =
        mean ? mis::analytic_variance_mean(cfg, name) : mis::analytic_variance_Z(cfg, name);
  }
  return report;
}

mis::EmpiricalStats stats(double mse, double stderr_mse) {
  mis::EmpiricalStats s;
  s.replicates = 100;
  s.mse = mse;
  s.mse_stderr = stderr_mse;
  return s;
}

mis::TargetDensity three_gaussian_target() {
  mis::GaussianMixtureParams params;
  params.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  for (double m : {-3.0, 0.0, 3.0}) {
    params.means.push_back(Eigen::VectorXd::Constant(1, m));
    params.covariances.push_back(Eigen::MatrixXd::Identity(1, 1));
  }
  return mis::TargetDensity::gaussian_mixture(params);
}

}  // namespace

TEST_CASE("closed forms at mu = 3, sigma = 1") {
  const mis::RunningExampleConfig cfg{3.0, 1.0};
  const double e36 = std::exp(36.0);
  CHECK_THAT(mis::analytic_variance_Z(cfg, SchemeName::R1), WithinRel(5.4e14, 0.01));
  CHECK_THAT(mis::analytic_variance_Z(cfg, SchemeName::R1), WithinRel((e36 - 1.0) / 8.0, 1e-14));
  CHECK_THAT(mis::analytic_variance_Z(cfg, SchemeName::N1), WithinRel((e36 - 1.0) / 8.0, 1e-14));
  CHECK_THAT(mis::analytic_variance_Z(cfg, SchemeName::R2), WithinRel((e36 - 1.0) / 16.0, 1e-14));
  CHECK_THAT(mis::analytic_variance_Z(cfg, SchemeName::R2), WithinRel(2.7e14, 0.01));
  CHECK(mis::analytic_variance_Z(cfg, SchemeName::R3) == 0.0);
  CHECK(mis::analytic_variance_Z(cfg, SchemeName::N3) == 0.0);
  CHECK_THAT(mis::analytic_variance_mean(cfg, SchemeName::R3), WithinRel(5.0, 1e-15));
  CHECK_THAT(mis::analytic_variance_mean(cfg, SchemeName::N3), WithinRel(0.5, 1e-15));
  CHECK_THAT(mis::analytic_variance_mean(cfg, SchemeName::R1), WithinRel(4.42e16, 0.005));
  CHECK_THAT(mis::analytic_variance_mean(cfg, SchemeName::R2), WithinRel(2.21e16, 0.005));
}

TEST_CASE("closed form at mu = 1") {
  const mis::RunningExampleConfig cfg{1.0, 1.0};
  CHECK_THAT(mis::analytic_variance_Z(cfg, SchemeName::R1), WithinAbs(6.69977, 1e-5));
}

TEST_CASE("closed forms agree with quadrature over index realizations") {
  const std::vector<mis::RunningExampleConfig> configs{{0.5, 1.0}, {1.0, 1.0}, {0.8, 0.7}, {1.2, 2.0}, {0.0, 1.5}};
  for (const auto& cfg : configs) {
    for (SchemeName name : mis::kAllSchemes) {
      INFO(to_string(name) << " mu=" << cfg.mu << " sigma=" << cfg.sigma);
      const double z = oracle::running_example_variance(cfg.mu, cfg.sigma, to_oracle(name), false);
      const double i = oracle::running_example_variance(cfg.mu, cfg.sigma, to_oracle(name), true);
      CHECK_THAT(mis::analytic_variance_Z(cfg, name), WithinAbs(z, 1e-8 * std::max(1.0, std::abs(z))));
      CHECK_THAT(mis::analytic_variance_mean(cfg, name), WithinAbs(i, 1e-8 * std::max(1.0, std::abs(i))));
    }
  }
}

TEST_CASE("R2 averages N1 and N3 exactly") {
  mis::RandomStream rng(81);
  for (int k = 0; k < 10; ++k) {
    const mis::RunningExampleConfig cfg{0.1 + 2.9 * rng.uniform(), 0.5 + 1.5 * rng.uniform()};
    const auto verdicts = mis::check_theorem_ordering(analytic_report(cfg, true), mis::Theorem::Theorem2);
    CHECK(verdicts.back().relation == "R2 = (N1 + N3) / 2");
    CHECK(verdicts.back().analytic);
    CHECK(verdicts.back().holds);
  }
}

TEST_CASE("analytic ordering of the with-replacement chain") {
  const mis::RunningExampleConfig cfg{3.0, 1.0};
  for (bool mean : {false, true}) {
    const auto verdicts = mis::check_theorem_ordering(analytic_report(cfg, mean), mis::Theorem::Theorem1);
    REQUIRE(verdicts.size() == 3);
    CHECK(verdicts[0].relation == "R1 = N1");
    CHECK(verdicts[1].relation == "N1 >= R3");
    CHECK(verdicts[2].relation == "R3 >= N3");
    for (const auto& v : verdicts) {
      CHECK(v.analytic);
      CHECK(v.holds);
    }
  }
  const auto strict = mis::check_theorem_ordering(analytic_report(cfg, true), mis::Theorem::Theorem1);
  CHECK(strict[1].lhs > strict[1].rhs);
  CHECK(strict[2].lhs > strict[2].rhs);
}

TEST_CASE("two-proposal chain") {
  const mis::RunningExampleConfig cfg{1.0, 1.0};
  const auto z = mis::check_theorem_ordering(analytic_report(cfg, false), mis::Theorem::Theorem2);
  for (const auto& v : z) {
    INFO(v.relation);
    CHECK(v.holds);
  }
  // For the mean, the permutation's first draw biases E[I | j], so N2 exceeds R2.
  const auto mean = mis::check_theorem_ordering(analytic_report(cfg, true), mis::Theorem::Theorem2);
  for (const auto& v : mean) {
    INFO(v.relation);
    CHECK(v.holds == (v.relation != "R2 = N2"));
  }
}

TEST_CASE("coincident proposals make every variance equal") {
  const mis::RunningExampleConfig cfg{0.0, 1.3};
  for (mis::Theorem which : {mis::Theorem::Theorem1, mis::Theorem::Theorem2}) {
    for (const auto& v : mis::check_theorem_ordering(analytic_report(cfg, true), which)) {
      INFO(v.relation);
      CHECK(v.holds);
      CHECK_THAT(v.lhs, WithinRel(v.rhs, 1e-12));
    }
  }
}

TEST_CASE("empirical verdicts use three-sigma slack") {
  mis::VarianceReport report;
  report["R1"].empirical = stats(10.0, 1.0);
  report["N1"].empirical = stats(11.0, 1.0);
  report["R3"].empirical = stats(12.0, 0.5);  // above N1 but inside the slack
  report["N3"].empirical = stats(1.0, 0.1);
  const auto verdicts = mis::check_theorem_ordering(report, mis::Theorem::Theorem1);
  for (const auto& v : verdicts) {
    CHECK_FALSE(v.analytic);
    CHECK(v.holds);
  }
  CHECK_THAT(verdicts[1].slack, WithinRel(3.0 * std::hypot(1.0, 0.5), 1e-15));
  report["R3"].empirical = stats(20.0, 0.5);
  CHECK_FALSE(mis::check_theorem_ordering(report, mis::Theorem::Theorem1)[1].holds);

  CHECK(mis::significantly_less(stats(1.0, 0.1), stats(2.0, 0.1)));
  CHECK_FALSE(mis::significantly_less(stats(1.0, 0.3), stats(2.0, 0.3)));
  CHECK(mis::not_significantly_less(stats(1.9, 0.1), stats(2.0, 0.1)));
  CHECK_FALSE(mis::not_significantly_less(stats(1.0, 0.1), stats(2.0, 0.1)));
  CHECK(mis::within_3sigma(stats(1.0, 0.3), stats(2.0, 0.3)));
  CHECK_FALSE(mis::within_3sigma(stats(1.0, 0.1), stats(2.0, 0.1)));
}

TEST_CASE("missing schemes are an input error") {
  mis::VarianceReport report;
  report["R1"].analytic = 1.0;
  report["N1"].analytic = 1.0;
  report["N3"].analytic = 1.0;
  CHECK_THROWS_AS(mis::check_theorem_ordering(report, mis::Theorem::Theorem1), mis::InputError);
  report["R3"].empirical = stats(1.0, 0.1);
  CHECK_THROWS_AS(mis::check_theorem_ordering(report, mis::Theorem::Theorem1), mis::InputError);
}

TEST_CASE("full-mixture schemes estimate Z with zero error") {
  const mis::RunningExampleConfig cfg{1.0, 1.0};
  const mis::EstimatorRequest request{mis::EstimatorKind::NormalizingConstant, {}, {1.0}, 1.0};
  for (SchemeName name : {SchemeName::R3, SchemeName::N3}) {
    const auto s = mis::empirical_mse(SchemeSpec::named(name), cfg.target(), cfg.pool(), request, {500, 3, 0, 1});
    CHECK(s.mse == 0.0);
    CHECK(s.mse_stderr == 0.0);
    CHECK(s.finite);
  }
}

TEST_CASE("empirical variance tracks the closed form where it is light-tailed") {
  const mis::RunningExampleConfig cfg{0.5, 1.0};
  const mis::EstimatorRequest request{mis::EstimatorKind::Unnormalized, {}, {0.0}, 1.0};
  for (SchemeName name : mis::kAllSchemes) {
    const auto s = mis::empirical_mse(SchemeSpec::named(name, 2), cfg.target(), cfg.pool(), request, {40000, 5, 1, 0});
    INFO(to_string(name));
    CHECK(std::abs(s.mse - mis::analytic_variance_mean(cfg, name) / 2.0) < 4.0 * s.mse_stderr);
    CHECK(s.counters.target_evals == 40000u * 4u);
  }
}

TEST_CASE("direct sampling MSE is Var(X) / M") {
  const mis::TargetDensity target = three_gaussian_target();
  const double variance = oracle::simpson(
      [&](double x) { return x * x * std::exp(target.log_density(std::vector<double>{x})); }, -20.0, 20.0);
  REQUIRE_THAT(variance, WithinRel(7.0, 1e-10));
  const std::size_t M = 10;
  const mis::EstimatorRequest request{mis::EstimatorKind::Unnormalized, {}, {0.0}, 1.0};
  const std::vector<mis::EstimatorRequest> requests{request};
  const auto s = mis::empirical_mse(
      [&](std::size_t, mis::RandomStream& rng) { return mis::direct_sampling(target, M, rng); }, requests,
      {20000, 12, 0, 0});
  CHECK(std::abs(s[0].mse - variance / M) < 4.0 * s[0].mse_stderr);
}

TEST_CASE("results do not depend on the thread count") {
  const mis::RunningExampleConfig cfg{1.0, 1.0};
  const std::vector<mis::EstimatorRequest> requests{
      {mis::EstimatorKind::Unnormalized, {}, {0.0}, 1.0},
      {mis::EstimatorKind::SelfNormalized, {}, {0.0}, 1.0},
      {mis::EstimatorKind::NormalizingConstant, {}, {1.0}, 1.0}};
  const auto target = cfg.target();
  const auto pool = cfg.pool();
  auto sampler = [&](std::size_t, mis::RandomStream& rng) {
    return mis::run_scheme(SchemeSpec::named(SchemeName::R2, 3), target, pool, rng);
  };
  const auto one = mis::empirical_mse(sampler, requests, {3000, 17, 5, 1});
  const auto four = mis::empirical_mse(sampler, requests, {3000, 17, 5, 4});
  REQUIRE(one.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(one[k].mse == four[k].mse);
    CHECK(one[k].mse_stderr == four[k].mse_stderr);
    CHECK(one[k].mean_error == four[k].mean_error);
    CHECK(one[k].counters == four[k].counters);
  }
}

TEST_CASE("replicate errors propagate") {
  const std::vector<mis::EstimatorRequest> requests{{mis::EstimatorKind::Unnormalized, {}, {0.0}, 1.0}};
  auto failing = [](std::size_t r, mis::RandomStream&) -> mis::WeightedSampleSet {
    if (r == 7) {
      throw mis::InputError("boom");
    }
    mis::WeightedSampleSet ws;
    ws.dim = 1;
    ws.samples = {0.0};
    ws.log_weights = {0.0};
    return ws;
  };
  CHECK_THROWS_AS(mis::empirical_mse(failing, requests, {20, 1, 0, 3}), mis::InputError);
  CHECK_THROWS_AS(mis::empirical_mse(failing, requests, {0, 1, 0, 1}), mis::InputError);
}

TEST_CASE("estimator kind names") {
  for (auto kind : {mis::EstimatorKind::Unnormalized, mis::EstimatorKind::NormalizingConstant,
                    mis::EstimatorKind::SelfNormalized}) {
    CHECK(mis::parse_estimator_kind(mis::to_string(kind)) == kind);
  }
  CHECK_FALSE(mis::parse_estimator_kind("biased").has_value());
}
