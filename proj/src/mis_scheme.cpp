#include "mis/mis_scheme.hpp"

#include <algorithm>
#include <string>

#include "mis/errors.hpp"

namespace mis {

std::string_view to_string(SchemeName name) noexcept {
  switch (name) {
    case SchemeName::R1: return "R1";
    case SchemeName::R2: return "R2";
    case SchemeName::R3: return "R3";
    case SchemeName::N1: return "N1";
    case SchemeName::N2: return "N2";
    case SchemeName::N3: return "N3";
  }
  return "?";
}

std::optional<SchemeName> parse_scheme_name(std::string_view text) noexcept {
  for (SchemeName name : kAllSchemes) {
    if (text == to_string(name)) {
      return name;
    }
  }
  return std::nullopt;
}

SamplingMode canonical_mode(SchemeName name) noexcept {
  switch (name) {
    case SchemeName::R1:
    case SchemeName::R2:
    case SchemeName::R3:
      return SamplingMode::S1;
    case SchemeName::N2:
      return SamplingMode::S2;
    case SchemeName::N1:
    case SchemeName::N3:
      return SamplingMode::S3;
  }
  return SamplingMode::S3;
}

WeightingOption canonical_option(SchemeName name) noexcept {
  switch (name) {
    case SchemeName::R1: return WeightingOption::W2;
    case SchemeName::R2: return WeightingOption::W4;
    case SchemeName::R3: return WeightingOption::W5;
    case SchemeName::N1: return WeightingOption::W2;
    case SchemeName::N2: return WeightingOption::W1;
    case SchemeName::N3: return WeightingOption::W5;
  }
  return WeightingOption::W5;
}

SchemeName equivalent_scheme(SamplingMode mode, WeightingOption option) noexcept {
  switch (mode) {
    case SamplingMode::S1:
      switch (option) {
        case WeightingOption::W2: return SchemeName::R1;
        case WeightingOption::W4: return SchemeName::R2;
        case WeightingOption::W1:
        case WeightingOption::W3:
        case WeightingOption::W5:
          return SchemeName::R3;
      }
      break;
    case SamplingMode::S2:
      switch (option) {
        case WeightingOption::W1: return SchemeName::N2;
        case WeightingOption::W2: return SchemeName::N1;
        case WeightingOption::W3:
        case WeightingOption::W4:
        case WeightingOption::W5:
          return SchemeName::N3;
      }
      break;
    case SamplingMode::S3:
      switch (option) {
        case WeightingOption::W1:
        case WeightingOption::W2:
        case WeightingOption::W3:
          return SchemeName::N1;
        case WeightingOption::W4:
        case WeightingOption::W5:
          return SchemeName::N3;
      }
      break;
  }
  return SchemeName::N3;
}

SchemeSpec SchemeSpec::named(SchemeName name, std::size_t blocks) {
  SchemeSpec spec;
  spec.mode = canonical_mode(name);
  spec.option = canonical_option(name);
  spec.blocks = blocks;
  spec.name = name;
  return spec;
}

SchemeSpec SchemeSpec::custom(SamplingMode mode, WeightingOption option, std::size_t blocks) {
  SchemeSpec spec;
  spec.mode = mode;
  spec.option = option;
  spec.blocks = blocks;
  return spec;
}

SchemeSpec SchemeSpec::partitioned(Partition partition, std::size_t blocks) {
  SchemeSpec spec;
  spec.mode = SamplingMode::S3;
  spec.blocks = blocks;
  spec.partition = std::move(partition);
  return spec;
}

std::string SchemeSpec::label() const {
  if (partition) {
    return "P" + std::to_string(partition->size());
  }
  if (name) {
    return std::string(to_string(*name));
  }
  return std::string(to_string(mode)) + "/" + std::string(to_string(option));
}

SchemeSpec parse_scheme(std::string_view text, bool expert, std::size_t blocks) {
  if (auto name = parse_scheme_name(text)) {
    return SchemeSpec::named(*name, blocks);
  }
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    const auto mode = parse_sampling_mode(text.substr(0, slash));
    const auto option = parse_weighting_option(text.substr(slash + 1));
    if (mode && option) {
      if (!expert) {
        throw InputError("scheme '" + std::string(text) + "' is a custom (mode, option) pair; enable expert mode");
      }
      return SchemeSpec::custom(*mode, *option, blocks);
    }
  }
  throw InputError("unknown scheme '" + std::string(text) + "' (expected R1, R2, R3, N1, N2, N3 or S<m>/W<o>)");
}

EvaluationCounters& EvaluationCounters::operator+=(const EvaluationCounters& other) noexcept {
  target_evals += other.target_evals;
  proposal_evals += other.proposal_evals;
  proposal_evals_distinct += other.proposal_evals_distinct;
  return *this;
}

bool operator==(const WeightedSampleSet& a, const WeightedSampleSet& b) {
  if (a.dim != b.dim || a.samples != b.samples || a.log_weights != b.log_weights || a.counters != b.counters ||
      a.index_sequences.size() != b.index_sequences.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.index_sequences.size(); ++i) {
    // Mode is deliberately ignored: colliding cells share realizations.
    if (a.index_sequences[i].indexes != b.index_sequences[i].indexes) {
      return false;
    }
  }
  return true;
}

namespace {

std::uint64_t count_distinct(const IndexSubset& subset, std::vector<bool>& seen) {
  std::uint64_t distinct = 0;
  for (std::size_t j : subset) {
    if (!seen[j]) {
      seen[j] = true;
      ++distinct;
    }
  }
  for (std::size_t j : subset) {
    seen[j] = false;
  }
  return distinct;
}

}  // namespace

WeightedSampleSet run_scheme(const SchemeSpec& spec, const TargetDensity& target, const ProposalPool& pool,
                             RandomStream& rng) {
  if (pool.dimension() != target.dimension()) {
    throw InputError("run_scheme: pool dimension " + std::to_string(pool.dimension()) +
                     " does not match target dimension " + std::to_string(target.dimension()));
  }
  if (spec.blocks == 0) {
    throw InputError("run_scheme: blocks must be positive");
  }
  const std::size_t N = pool.size();
  const std::size_t dim = pool.dimension();
  std::vector<std::size_t> owner;
  if (spec.partition) {
    if (spec.mode != SamplingMode::S3) {
      throw InputError("run_scheme: partitioned weighting requires S3 sampling");
    }
    owner = subset_owner(*spec.partition, N);
  }

  WeightedSampleSet out;
  out.dim = dim;
  out.samples.resize(spec.blocks * N * dim);
  out.log_weights.resize(spec.blocks * N);
  out.index_sequences.reserve(spec.blocks);

  IndexSubset subset;
  std::vector<bool> seen(N, false);
  for (std::size_t b = 0; b < spec.blocks; ++b) {
    IndexSequence seq = select_indexes(spec.mode, N, rng);
    const std::size_t base = b * N;
    for (std::size_t n = 0; n < N; ++n) {
      pool.draw(seq.indexes[n], rng, std::span<double>(out.samples.data() + (base + n) * dim, dim));
    }
    for (std::size_t n = 0; n < N; ++n) {
      const std::span<const double> x(out.samples.data() + (base + n) * dim, dim);
      if (spec.partition) {
        const auto& members = spec.partition->subsets[owner[n]];
        subset.assign(members.begin(), members.end());
      } else {
        denominator_subset_into(spec.option, seq, n, subset);
      }
      out.log_weights[base + n] = target.log_density(x) - pool.log_mixture_eval(subset, x);
      out.counters.target_evals += 1;
      out.counters.proposal_evals += subset.size();
      out.counters.proposal_evals_distinct += count_distinct(subset, seen);
    }
    out.index_sequences.push_back(std::move(seq));
  }
  return out;
}

EvaluationCounts evaluation_counts(const SchemeSpec& spec, std::size_t pool_size) {
  if (pool_size == 0) {
    throw InputError("evaluation_counts: pool size must be positive");
  }
  const std::uint64_t N = pool_size;
  const std::uint64_t k = spec.blocks;
  EvaluationCounts counts;
  counts.target = N * k;
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  if (spec.partition) {
    validate(*spec.partition, pool_size);
    for (const auto& s : spec.partition->subsets) {
      lo += static_cast<std::uint64_t>(s.size()) * s.size();
    }
    hi = lo;
  } else {
    const bool s3 = spec.mode == SamplingMode::S3;
    switch (spec.option) {
      case WeightingOption::W1:
        lo = hi = s3 ? N : (spec.mode == SamplingMode::S2 ? N * (N + 1) / 2 : N * N);
        break;
      case WeightingOption::W2:
        lo = hi = N;
        break;
      case WeightingOption::W3:
        lo = hi = s3 ? N : N * N;
        break;
      case WeightingOption::W4:
        lo = spec.mode == SamplingMode::S1 ? N : N * N;
        hi = N * N;
        break;
      case WeightingOption::W5:
        lo = hi = N * N;
        break;
    }
  }
  counts.proposal_min = lo * k;
  counts.proposal_max = hi * k;
  return counts;
}

namespace {

const char* cost_formula(SamplingMode mode, WeightingOption option) {
  switch (option) {
    case WeightingOption::W1:
      return mode == SamplingMode::S3 ? "N" : (mode == SamplingMode::S2 ? "N(N+1)/2" : "N²");
    case WeightingOption::W2:
      return "N";
    case WeightingOption::W3:
      return mode == SamplingMode::S3 ? "N" : "N²";
    case WeightingOption::W4:
      return mode == SamplingMode::S1 ? "N to N²" : "N²";
    case WeightingOption::W5:
      return "N²";
  }
  return "?";
}

}  // namespace

std::string scheme_table(bool expert) {
  std::string out = "scheme | mode | option | cost\n";
  for (SchemeName name : kAllSchemes) {
    const SamplingMode mode = canonical_mode(name);
    const WeightingOption option = canonical_option(name);
    out += std::string(to_string(name)) + " | " + std::string(to_string(mode)) + " | " +
           std::string(to_string(option)) + " | " + cost_formula(mode, option) + " proposal evals\n";
  }
  if (!expert) {
    return out;
  }
  out += "\nmode | option | reduces to | relation\n";
  for (SamplingMode mode : {SamplingMode::S1, SamplingMode::S2, SamplingMode::S3}) {
    for (WeightingOption option : {WeightingOption::W1, WeightingOption::W2, WeightingOption::W3,
                                   WeightingOption::W4, WeightingOption::W5}) {
      const SchemeName name = equivalent_scheme(mode, option);
      std::string relation;
      if (canonical_mode(name) == mode && canonical_option(name) == option) {
        relation = "canonical";
      } else if (canonical_mode(name) == mode) {
        relation = "identical weighted samples";
      } else {
        relation = "same estimator distribution";
      }
      out += std::string(to_string(mode)) + " | " + std::string(to_string(option)) + " | " +
             std::string(to_string(name)) + " | " + relation + "\n";
    }
  }
  return out;
}

}  // namespace mis
