#include <catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "mis/random.hpp"

using mis::RandomStream;

TEST_CASE("derive_seed is a pure function of its arguments") {
  CHECK(mis::derive_seed(1, 2) == mis::derive_seed(1, 2));
  CHECK(mis::derive_seed(1, 2) != mis::derive_seed(2, 1));
  CHECK(mis::derive_seed(1, 2, 3) == mis::derive_seed(mis::derive_seed(1, 3), 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    seen.insert(mis::derive_seed(42, r));
  }
  CHECK(seen.size() == 10000);
}

TEST_CASE("hash_label is FNV-1a") {
  CHECK(mis::hash_label("") == 0xcbf29ce484222325ULL);
  CHECK(mis::hash_label("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("stream consumption contract") {
  RandomStream a(7);
  RandomStream b(7);
  SECTION("index(1) consumes nothing") {
    CHECK(a.index(1) == 0);
    CHECK(a.index(0) == 0);
    CHECK(a == b);
  }
  SECTION("normal consumes two words") {
    a.normal();
    b.engine()();
    b.engine()();
    CHECK(a == b);
  }
  SECTION("uniform consumes one word") {
    a.uniform();
    a.uniform_open();
    b.engine().discard(2);
    CHECK(a == b);
  }
}

TEST_CASE("uniform ranges") {
  RandomStream rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = rng.uniform_open();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("index is uniform") {
  RandomStream rng(11);
  const std::size_t n = 7;
  const std::size_t draws = 700000;
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t i = 0; i < draws; ++i) {
    const std::size_t k = rng.index(n);
    REQUIRE(k < n);
    ++counts[k];
  }
  // Chi-square with 6 degrees of freedom; 22.46 is the 0.001 quantile.
  const double expected = static_cast<double>(draws) / static_cast<double>(n);
  double chi2 = 0.0;
  for (std::size_t c : counts) {
    chi2 += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  }
  CHECK(chi2 < 22.46);
}

TEST_CASE("normal moments") {
  RandomStream rng(5);
  const int n = 400000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sum2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}
