#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "mis/errors.hpp"
#include "mis/mis_scheme.hpp"
#include "mis/variance_lab.hpp"

using mis::SamplingMode;
using mis::SchemeName;
using mis::SchemeSpec;
using mis::WeightingOption;

namespace {

mis::TargetDensity three_gaussian_target() {
  mis::GaussianMixtureParams params;
  params.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  for (double m : {-3.0, 0.0, 3.0}) {
    params.means.push_back(Eigen::VectorXd::Constant(1, m));
    params.covariances.push_back(Eigen::MatrixXd::Identity(1, 1));
  }
  return mis::TargetDensity::gaussian_mixture(params);
}

mis::ProposalPool three_gaussian_pool() {
  return mis::ProposalPool({{mis::ProposalFamily::Gaussian, {-3.0}, {1.0}, 0.0},
                            {mis::ProposalFamily::Gaussian, {0.0}, {1.0}, 0.0},
                            {mis::ProposalFamily::Gaussian, {3.0}, {1.0}, 0.0}});
}

mis::ProposalPool wide_pool(std::size_t n) {
  std::vector<mis::Proposal> proposals;
  for (std::size_t i = 0; i < n; ++i) {
    proposals.push_back({mis::ProposalFamily::Gaussian, {static_cast<double>(i) - 0.5 * static_cast<double>(n)}, {1.5}, 0.0});
  }
  return mis::ProposalPool(std::move(proposals));
}

}  // namespace

TEST_CASE("canonical pairs") {
  CHECK(SchemeSpec::named(SchemeName::R1).mode == SamplingMode::S1);
  CHECK(SchemeSpec::named(SchemeName::R1).option == WeightingOption::W2);
  CHECK(SchemeSpec::named(SchemeName::R2).option == WeightingOption::W4);
  CHECK(SchemeSpec::named(SchemeName::R3).option == WeightingOption::W5);
  CHECK(SchemeSpec::named(SchemeName::N1).mode == SamplingMode::S3);
  CHECK(SchemeSpec::named(SchemeName::N1).option == WeightingOption::W2);
  CHECK(SchemeSpec::named(SchemeName::N2).mode == SamplingMode::S2);
  CHECK(SchemeSpec::named(SchemeName::N2).option == WeightingOption::W1);
  CHECK(SchemeSpec::named(SchemeName::N3).mode == SamplingMode::S3);
  CHECK(SchemeSpec::named(SchemeName::N3).option == WeightingOption::W5);
  for (SchemeName name : mis::kAllSchemes) {
    CHECK(mis::equivalent_scheme(mis::canonical_mode(name), mis::canonical_option(name)) == name);
  }
}

TEST_CASE("matched full mixture gives unit weights") {
  mis::RandomStream rng(5);
  const mis::WeightedSampleSet ws =
      mis::run_scheme(SchemeSpec::named(SchemeName::N3, 4), three_gaussian_target(), three_gaussian_pool(), rng);
  REQUIRE(ws.size() == 12);
  for (double lw : ws.log_weights) {
    CHECK(lw == 0.0);
  }
}

TEST_CASE("every scheme coincides on a single proposal") {
  const mis::TargetDensity target = mis::TargetDensity::gaussian_mixture(
      {{1.0}, {Eigen::VectorXd::Constant(1, 0.5)}, {Eigen::MatrixXd::Constant(1, 1, 2.0)}});
  const mis::ProposalPool pool({{mis::ProposalFamily::Gaussian, {0.0}, {1.0}, 0.0}});
  mis::RandomStream a(77);
  mis::RandomStream b(77);
  const auto r1 = mis::run_scheme(SchemeSpec::named(SchemeName::R1, 5), target, pool, a);
  const auto n1 = mis::run_scheme(SchemeSpec::named(SchemeName::N1, 5), target, pool, b);
  CHECK(r1 == n1);
  CHECK(r1.counters == n1.counters);
}

TEST_CASE("R2 denominators use the realized multiset with repeats") {
  const mis::TargetDensity target = three_gaussian_target();
  const mis::ProposalPool pool = three_gaussian_pool();
  bool found = false;
  for (std::uint64_t seed = 0; seed < 2000 && !found; ++seed) {
    mis::RandomStream rng(seed);
    const auto ws = mis::run_scheme(SchemeSpec::named(SchemeName::R2), target, pool, rng);
    if (ws.index_sequences.front().indexes != std::vector<std::size_t>{2, 2, 0}) {
      continue;
    }
    found = true;
    CHECK(ws.counters.proposal_evals == 9);
    CHECK(ws.counters.proposal_evals_distinct == 6);
    CHECK(ws.counters.target_evals == 3);
    for (std::size_t n = 0; n < 3; ++n) {
      const std::span<const double> x = ws.sample(n);
      const double phi = (std::exp(pool.log_eval(0, x)) + 2.0 * std::exp(pool.log_eval(2, x))) / 3.0;
      CHECK(ws.log_weights[n] == Catch::Approx(target.log_density(x) - std::log(phi)).epsilon(1e-12));
    }
  }
  CHECK(found);
}

TEST_CASE("predicted evaluation counts") {
  CHECK(mis::evaluation_counts(SchemeSpec::named(SchemeName::N3), 500).proposal_max == 250000);
  CHECK(mis::evaluation_counts(SchemeSpec::named(SchemeName::N2), 4).proposal_min == 10);
  CHECK(mis::evaluation_counts(SchemeSpec::named(SchemeName::N2), 4).proposal_max == 10);
  const auto r2 = mis::evaluation_counts(SchemeSpec::named(SchemeName::R2), 7);
  CHECK(r2.proposal_min == 7);
  CHECK(r2.proposal_max == 49);
  CHECK(mis::evaluation_counts(SchemeSpec::named(SchemeName::R1, 3), 7).proposal_max == 21);
  CHECK(mis::evaluation_counts(SchemeSpec::named(SchemeName::R1, 3), 7).target == 21);
  CHECK_THROWS_AS(mis::evaluation_counts(SchemeSpec::named(SchemeName::R1), 0), mis::InputError);
}

TEST_CASE("measured counters match the predicted counts") {
  for (std::size_t n : {2u, 3u, 10u, 100u}) {
    const mis::ProposalPool pool = wide_pool(n);
    const mis::TargetDensity target = three_gaussian_target();
    for (SchemeName name : mis::kAllSchemes) {
      mis::RandomStream rng(n * 31 + static_cast<std::size_t>(name));
      const SchemeSpec spec = SchemeSpec::named(name);
      const auto ws = mis::run_scheme(spec, target, pool, rng);
      const auto predicted = mis::evaluation_counts(spec, n);
      INFO(to_string(name) << " N=" << n);
      CHECK(ws.counters.target_evals == n);
      if (name == SchemeName::R2) {
        CHECK(ws.counters.proposal_evals == n * n);
        CHECK(ws.counters.proposal_evals_distinct >= n);
        CHECK(ws.counters.proposal_evals_distinct <= n * n);
      } else {
        CHECK(ws.counters.proposal_evals == predicted.proposal_max);
        CHECK(ws.counters.proposal_evals_distinct == predicted.proposal_max);
      }
    }
  }
}

TEST_CASE("colliding cells reproduce their scheme's samples") {
  const mis::TargetDensity target = three_gaussian_target();
  const mis::ProposalPool pool = wide_pool(4);
  auto run = [&](const SchemeSpec& spec) {
    mis::RandomStream rng(1234);
    return mis::run_scheme(spec, target, pool, rng);
  };
  const auto n1 = run(SchemeSpec::named(SchemeName::N1, 2));
  for (WeightingOption option : {WeightingOption::W1, WeightingOption::W3}) {
    CHECK(run(SchemeSpec::custom(SamplingMode::S3, option, 2)) == n1);
  }
  const auto r3 = run(SchemeSpec::named(SchemeName::R3, 2));
  for (WeightingOption option : {WeightingOption::W1, WeightingOption::W3}) {
    CHECK(run(SchemeSpec::custom(SamplingMode::S1, option, 2)) == r3);
  }
  const auto n3 = run(SchemeSpec::named(SchemeName::N3, 2));
  CHECK(run(SchemeSpec::custom(SamplingMode::S3, WeightingOption::W4, 2)) == n3);
  CHECK_FALSE(n1 == n3);
}

TEST_CASE("scheme parsing and expert gating") {
  CHECK(mis::parse_scheme("N2", false).name == SchemeName::N2);
  CHECK(mis::parse_scheme("R3", false, 4).blocks == 4);
  CHECK_THROWS_AS(mis::parse_scheme("S2/W4", false), mis::InputError);
  const SchemeSpec custom = mis::parse_scheme("S2/W4", true);
  CHECK(custom.mode == SamplingMode::S2);
  CHECK(custom.option == WeightingOption::W4);
  CHECK(custom.label() == "S2/W4");
  CHECK_THROWS_AS(mis::parse_scheme("R4", true), mis::InputError);
  CHECK_THROWS_AS(mis::parse_scheme("S4/W1", true), mis::InputError);
  CHECK(SchemeSpec::partitioned(mis::contiguous_partition(4, 2)).label() == "P2");
}

TEST_CASE("scheme table") {
  const std::string table = mis::scheme_table(false);
  CHECK(table.find("R2 | S1 | W4 | N to N² proposal evals") != std::string::npos);
  CHECK(table.find("N2 | S2 | W1 | N(N+1)/2 proposal evals") != std::string::npos);
  CHECK(table.find("N3 | S3 | W5 | N² proposal evals") != std::string::npos);
  CHECK(table.find("reduces to") == std::string::npos);
  const std::string expert = mis::scheme_table(true);
  CHECK(expert.find("S1 | W5 | R3 | canonical") != std::string::npos);
  CHECK(expert.find("S1 | W3 | R3 | identical weighted samples") != std::string::npos);
  CHECK(expert.find("S2 | W2 | N1 | same estimator distribution") != std::string::npos);
}

TEST_CASE("run_scheme validation") {
  mis::RandomStream rng(1);
  const mis::ProposalPool pool2({{mis::ProposalFamily::Gaussian, {0.0, 0.0}, {1.0, 1.0}, 0.0}});
  CHECK_THROWS_AS(mis::run_scheme(SchemeSpec::named(SchemeName::N3), three_gaussian_target(), pool2, rng),
                  mis::InputError);
  SchemeSpec bad = SchemeSpec::partitioned(mis::whole_partition(3));
  bad.mode = SamplingMode::S1;
  CHECK_THROWS_AS(mis::run_scheme(bad, three_gaussian_target(), three_gaussian_pool(), rng), mis::InputError);
}

TEST_CASE("every named scheme is unbiased on the two-proposal example") {
  const mis::RunningExampleConfig cfg{1.0, 1.0};
  const mis::TargetDensity target = cfg.target();
  const mis::ProposalPool pool = cfg.pool();
  const mis::EstimatorRequest request{mis::EstimatorKind::Unnormalized, {}, {0.0}, 1.0};
  for (SchemeName name : mis::kAllSchemes) {
    const mis::ReplicateOptions options{10000, 8, mis::hash_label(std::string(to_string(name))), 1};
    const auto stats = mis::empirical_mse(SchemeSpec::named(name), target, pool, request, options);
    INFO(to_string(name));
    CHECK(std::abs(stats.mean_error[0]) < 4.0 * stats.mean_error_stderr[0]);
  }
}
