#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mis/index_sampler.hpp"
#include "mis/partition.hpp"
#include "mis/proposal_pool.hpp"
#include "mis/random.hpp"
#include "mis/target_model.hpp"
#include "mis/weight_engine.hpp"

namespace mis {

enum class SchemeName { R1, R2, R3, N1, N2, N3 };

inline constexpr SchemeName kAllSchemes[] = {SchemeName::R1, SchemeName::R2, SchemeName::R3,
                                             SchemeName::N1, SchemeName::N2, SchemeName::N3};

std::string_view to_string(SchemeName name) noexcept;
std::optional<SchemeName> parse_scheme_name(std::string_view text) noexcept;

/// Canonical (mode, option) pair of a named scheme:
///   R1=(S1,W2) R2=(S1,W4) R3=(S1,W5) N1=(S3,W2) N2=(S2,W1) N3=(S3,W5)
SamplingMode canonical_mode(SchemeName name) noexcept;
WeightingOption canonical_option(SchemeName name) noexcept;

/// The named scheme whose estimator a (mode, option) cell reproduces. When
/// the cell's mode equals the scheme's canonical mode the weighted sample
/// sets are identical for the same seed; otherwise (S2 onto N1/N3) only the
/// estimator's distribution agrees, since a permutation visits every
/// proposal exactly once.
SchemeName equivalent_scheme(SamplingMode mode, WeightingOption option) noexcept;

/// M = blocks * N samples per run. With a partition the sampling is S3 and
/// each sample's denominator is the mixture over the subset owning its
/// proposal; `option` is then unused.
struct SchemeSpec {
  SamplingMode mode = SamplingMode::S3;
  WeightingOption option = WeightingOption::W5;
  std::size_t blocks = 1;
  std::optional<SchemeName> name;
  std::optional<Partition> partition;

  static SchemeSpec named(SchemeName name, std::size_t blocks = 1);
  static SchemeSpec custom(SamplingMode mode, WeightingOption option, std::size_t blocks = 1);
  static SchemeSpec partitioned(Partition partition, std::size_t blocks = 1);

  /// "N3", "S2/W4", or "P<count>".
  std::string label() const;
};

/// Parses "R1".."N3" or "S<m>/W<o>". Custom pairs require `expert`.
SchemeSpec parse_scheme(std::string_view text, bool expert, std::size_t blocks = 1);

/// A proposal evaluation is one log_eval of one mixand at one point. The raw
/// count charges every occurrence in a denominator multiset; the distinct
/// count charges each mixand once per sample.
struct EvaluationCounters {
  std::uint64_t target_evals = 0;
  std::uint64_t proposal_evals = 0;
  std::uint64_t proposal_evals_distinct = 0;

  EvaluationCounters& operator+=(const EvaluationCounters& other) noexcept;
  friend bool operator==(const EvaluationCounters&, const EvaluationCounters&) = default;
};

/// Samples stored row-major: sample i occupies [i*dim, (i+1)*dim).
struct WeightedSampleSet {
  std::size_t dim = 0;
  std::vector<double> samples;
  std::vector<double> log_weights;
  std::vector<IndexSequence> index_sequences;  // one per block
  EvaluationCounters counters;

  std::size_t size() const noexcept { return log_weights.size(); }
  std::span<const double> sample(std::size_t i) const noexcept { return {samples.data() + i * dim, dim}; }

  friend bool operator==(const WeightedSampleSet&, const WeightedSampleSet&);
};

/// Per block: select indexes, draw every x_n, then weight. Blocks share only
/// the random stream.
WeightedSampleSet run_scheme(const SchemeSpec& spec, const TargetDensity& target, const ProposalPool& pool,
                             RandomStream& rng);

struct EvaluationCounts {
  std::uint64_t target = 0;
  std::uint64_t proposal_min = 0;
  std::uint64_t proposal_max = 0;
};

/// Predicted counts for `spec` on a pool of size N. Exact (min == max)
/// except where the denominator depends on the realized indexes (W4 under
/// S1), where the range bounds the distinct count; the raw count is then
/// always proposal_max.
EvaluationCounts evaluation_counts(const SchemeSpec& spec, std::size_t pool_size);

/// "<scheme> | <mode> | <option> | <cost> proposal evals" for the six named
/// schemes. `expert` appends the 15-cell (mode, option) matrix with the
/// scheme each cell reduces to.
std::string scheme_table(bool expert);

}  // namespace mis
