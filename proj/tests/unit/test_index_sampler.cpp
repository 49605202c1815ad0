#include <catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "mis/errors.hpp"
#include "mis/index_sampler.hpp"

using mis::IndexSequence;
using mis::SamplingMode;

TEST_CASE("S3 is the identity and consumes no randomness") {
  mis::RandomStream rng(1);
  const mis::RandomStream before = rng;
  const IndexSequence seq = mis::select_indexes(SamplingMode::S3, 5, rng);
  CHECK(seq.indexes == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(rng == before);
}

TEST_CASE("S2 draws every permutation equally often") {
  mis::RandomStream rng(9);
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    const IndexSequence seq = mis::select_indexes(SamplingMode::S2, 3, rng);
    REQUIRE_NOTHROW(mis::validate(seq, 3));
    ++counts[seq.indexes];
  }
  REQUIRE(counts.size() == 6);
  double chi2 = 0.0;
  for (const auto& [perm, c] : counts) {
    chi2 += (c - draws / 6.0) * (c - draws / 6.0) / (draws / 6.0);
  }
  CHECK(chi2 < 20.52);  // 5 degrees of freedom, level 0.001
}

TEST_CASE("S1 draws every sequence equally often") {
  mis::RandomStream rng(4);
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 90000;
  for (int i = 0; i < draws; ++i) {
    ++counts[mis::select_indexes(SamplingMode::S1, 3, rng).indexes];
  }
  REQUIRE(counts.size() == 27);
  double chi2 = 0.0;
  for (const auto& [seq, c] : counts) {
    chi2 += (c - draws / 27.0) * (c - draws / 27.0) / (draws / 27.0);
  }
  CHECK(chi2 < 54.05);  // 26 degrees of freedom, level 0.001
}

TEST_CASE("validate rejects sequences that break their mode") {
  CHECK_THROWS_AS(mis::validate({SamplingMode::S3, {1, 0}}, 2), mis::InputError);
  CHECK_THROWS_AS(mis::validate({SamplingMode::S2, {1, 1}}, 2), mis::InputError);
  CHECK_THROWS_AS(mis::validate({SamplingMode::S1, {0, 2}}, 2), mis::InputError);
  CHECK_THROWS_AS(mis::validate({SamplingMode::S1, {0}}, 2), mis::InputError);
  CHECK_NOTHROW(mis::validate({SamplingMode::S1, {1, 1}}, 2));
  CHECK_NOTHROW(mis::validate({SamplingMode::S2, {1, 0}}, 2));
  mis::RandomStream rng(1);
  CHECK_THROWS_AS(mis::select_indexes(SamplingMode::S1, 0, rng), mis::InputError);
}

TEST_CASE("conditional pmf") {
  const std::vector<std::size_t> none;
  const std::vector<std::size_t> first{2};
  CHECK(mis::conditional_pmf(SamplingMode::S1, 3, first, 2) == Catch::Approx(1.0 / 3.0));
  CHECK(mis::conditional_pmf(SamplingMode::S2, 3, first, 2) == 0.0);
  CHECK(mis::conditional_pmf(SamplingMode::S2, 3, first, 0) == Catch::Approx(0.5));
  CHECK(mis::conditional_pmf(SamplingMode::S3, 3, none, 0) == 1.0);
  CHECK(mis::conditional_pmf(SamplingMode::S3, 3, none, 1) == 0.0);
  CHECK_THROWS_AS(mis::conditional_pmf(SamplingMode::S3, 3, first, 0), mis::InputError);
  CHECK_THROWS_AS(mis::conditional_pmf(SamplingMode::S2, 1, std::vector<std::size_t>{0}, 0), mis::InputError);
  for (SamplingMode mode : {SamplingMode::S1, SamplingMode::S2}) {
    double total = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      total += mis::conditional_pmf(mode, 3, first, k);
    }
    CHECK(total == Catch::Approx(1.0));
  }
}

TEST_CASE("mode names round-trip") {
  for (SamplingMode mode : {SamplingMode::S1, SamplingMode::S2, SamplingMode::S3}) {
    CHECK(mis::parse_sampling_mode(mis::to_string(mode)) == mode);
  }
  CHECK_FALSE(mis::parse_sampling_mode("S4").has_value());
}
