#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mis/errors.hpp"
#include "mis/variance_lab.hpp"
#include "mis/weight_engine.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using mis::IndexSequence;
using mis::IndexSubset;
using mis::SamplingMode;
using mis::WeightingOption;

namespace {

IndexSubset sorted(IndexSubset s) {
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST_CASE("W4 keeps repeated indexes of the realized sequence") {
  const IndexSequence seq{SamplingMode::S1, {2, 2, 0}};
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(sorted(mis::denominator_subset(WeightingOption::W4, seq, n, 3)) == IndexSubset{0, 2, 2});
  }
}

TEST_CASE("W1 under S2 uses the indexes not yet selected") {
  const IndexSequence seq{SamplingMode::S2, {2, 0, 1}};
  CHECK(sorted(mis::denominator_subset(WeightingOption::W1, seq, 0, 3)) == IndexSubset{0, 1, 2});
  CHECK(sorted(mis::denominator_subset(WeightingOption::W1, seq, 1, 3)) == IndexSubset{0, 1});
  CHECK(sorted(mis::denominator_subset(WeightingOption::W1, seq, 2, 3)) == IndexSubset{1});
}

TEST_CASE("mode-dependent options resolve per mode") {
  const IndexSequence s1{SamplingMode::S1, {1, 1, 0}};
  const IndexSequence s3{SamplingMode::S3, {0, 1, 2}};
  CHECK(mis::denominator_subset(WeightingOption::W3, s3, 1, 3) == IndexSubset{1});
  CHECK(mis::denominator_subset(WeightingOption::W1, s3, 2, 3) == IndexSubset{2});
  CHECK(sorted(mis::denominator_subset(WeightingOption::W3, s1, 1, 3)) == IndexSubset{0, 1, 2});
  CHECK(sorted(mis::denominator_subset(WeightingOption::W1, s1, 1, 3)) == IndexSubset{0, 1, 2});
  CHECK(mis::denominator_subset(WeightingOption::W2, s1, 1, 3) == IndexSubset{1});
  CHECK(sorted(mis::denominator_subset(WeightingOption::W5, s3, 0, 3)) == IndexSubset{0, 1, 2});
}

TEST_CASE("checked denominator rejects bad input") {
  CHECK_THROWS_AS(mis::denominator_subset(WeightingOption::W2, {SamplingMode::S3, {0, 1}}, 2, 2), mis::InputError);
  CHECK_THROWS_AS(mis::denominator_subset(WeightingOption::W2, {SamplingMode::S2, {0, 0}}, 0, 2), mis::InputError);
  CHECK_THROWS_AS(mis::denominator_subset(WeightingOption::W2, {SamplingMode::S1, {0, 3}}, 0, 2), mis::InputError);
}

TEST_CASE("log weights match hand-written densities") {
  const mis::RunningExampleConfig cfg{1.3, 0.8};
  const mis::TargetDensity target = cfg.target();
  const mis::ProposalPool pool = cfg.pool();
  auto q = [&](std::size_t k, double x) { return oracle::normal_pdf(x, k == 0 ? -1.3 : 1.3, 0.8); };
  auto pi = [&](double x) { return 0.5 * (q(0, x) + q(1, x)); };
  const IndexSequence seq{SamplingMode::S1, {1, 1}};
  for (double x : {-2.0, 0.0, 0.4, 3.1}) {
    const std::vector<double> xv{x};
    CHECK_THAT(mis::log_weight(target, pool, WeightingOption::W2, seq, 0, xv), WithinAbs(std::log(pi(x) / q(1, x)), 1e-12));
    CHECK_THAT(mis::log_weight(target, pool, WeightingOption::W4, seq, 0, xv), WithinAbs(std::log(pi(x) / q(1, x)), 1e-12));
  }
  // The weight at the origin is the target over the proposal there.
  const std::vector<double> origin{0.0};
  CHECK_THAT(std::exp(mis::log_weight(target, pool, WeightingOption::W2, seq, 1, origin)),
             WithinAbs(pi(0.0) / q(1, 0.0), 1e-14));
}

TEST_CASE("full mixture equal to the target gives zero log weight exactly") {
  const mis::RunningExampleConfig cfg{2.0, 1.0};
  const mis::TargetDensity target = cfg.target();
  const mis::ProposalPool pool = cfg.pool();
  const IndexSequence seq{SamplingMode::S3, {0, 1}};
  for (double x : {-7.5, -2.0, 0.0, 0.3, 5.0}) {
    const std::vector<double> xv{x};
    CHECK(mis::log_weight(target, pool, WeightingOption::W5, seq, 0, xv) == 0.0);
    CHECK(mis::log_weight(target, pool, WeightingOption::W5, seq, 1, xv) == 0.0);
  }
}

TEST_CASE("a single proposal collapses every option to the same weight") {
  const mis::TargetDensity target = mis::TargetDensity::gaussian_mixture(
      {{1.0}, {Eigen::VectorXd::Constant(1, 0.5)}, {Eigen::MatrixXd::Constant(1, 1, 2.0)}});
  const mis::ProposalPool pool({{mis::ProposalFamily::Gaussian, {0.0}, {1.0}, 0.0}});
  const std::vector<double> x{0.9};
  for (SamplingMode mode : {SamplingMode::S1, SamplingMode::S2, SamplingMode::S3}) {
    const IndexSequence seq{mode, {0}};
    const double reference = mis::log_weight(target, pool, WeightingOption::W2, seq, 0, x);
    for (WeightingOption option :
         {WeightingOption::W1, WeightingOption::W3, WeightingOption::W4, WeightingOption::W5}) {
      CHECK(mis::log_weight(target, pool, option, seq, 0, x) == reference);
    }
  }
}

TEST_CASE("option names round-trip") {
  for (WeightingOption option :
       {WeightingOption::W1, WeightingOption::W2, WeightingOption::W3, WeightingOption::W4, WeightingOption::W5}) {
    CHECK(mis::parse_weighting_option(mis::to_string(option)) == option);
  }
  CHECK_FALSE(mis::parse_weighting_option("W6").has_value());
}
