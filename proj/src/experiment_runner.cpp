#include "mis/experiment_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <tuple>

#include "mis/adaptive_mis.hpp"
#include "mis/errors.hpp"
#include "mis/replicates.hpp"

namespace mis {

namespace {

std::vector<EstimatorRequest> build_requests(const ExperimentConfig& cfg) {
  const TargetDensity& target = *cfg.target;
  const std::optional<double> Z = target.known_Z();
  std::vector<EstimatorRequest> requests;
  for (EstimatorKind kind : cfg.estimators) {
    EstimatorRequest r;
    r.kind = kind;
    r.g = cfg.estimand;
    if (kind == EstimatorKind::NormalizingConstant) {
      if (!Z) {
        throw InputError("normalizing_constant needs a target with known Z");
      }
      r.truth = {*Z};
    } else {
      r.truth = cfg.truth ? *cfg.truth : cfg.estimand.truth(target);
    }
    if (kind == EstimatorKind::Unnormalized) {
      if (!Z) {
        throw InputError("unnormalized needs a target with known Z");
      }
      r.Z = *Z;
    }
    requests.push_back(std::move(r));
  }
  return requests;
}

std::optional<double> analytic_for(const ExperimentConfig& cfg, const SchemeSpec& spec, std::size_t M,
                                   EstimatorKind kind) {
  if (!cfg.running_example || !spec.name || cfg.target->known_Z() != 1.0 ||
      cfg.estimand.moment != Moment::Identity || cfg.truth) {
    return std::nullopt;
  }
  const double blocks = static_cast<double>(M / 2);
  switch (kind) {
    case EstimatorKind::Unnormalized:
      return analytic_variance_mean(*cfg.running_example, *spec.name) / blocks;
    case EstimatorKind::NormalizingConstant:
      return analytic_variance_Z(*cfg.running_example, *spec.name) / blocks;
    case EstimatorKind::SelfNormalized:
      return std::nullopt;
  }
  return std::nullopt;
}

void append_rows(ExperimentResult& out, const ExperimentConfig& cfg, const std::string& label, std::size_t M,
                 std::size_t R, const std::vector<EmpiricalStats>& stats,
                 const std::vector<std::optional<double>>& analytic, std::optional<double> wall) {
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto& s = stats[k];
    ResultRow row;
    row.experiment = cfg.experiment;
    row.scheme = label;
    row.M = M;
    row.R = R;
    row.estimator = cfg.estimators[k];
    row.empirical_mse = s.mse;
    row.stderr_mse = s.mse_stderr;
    row.analytic_variance = analytic[k];
    const double runs = static_cast<double>(R);
    row.target_evals = static_cast<double>(s.counters.target_evals) / runs;
    row.proposal_evals = static_cast<double>(s.counters.proposal_evals) / runs;
    row.proposal_evals_distinct = static_cast<double>(s.counters.proposal_evals_distinct) / runs;
    row.wall_time = wall;
    out.rows.push_back(std::move(row));
  }
}

void run_static(ExperimentResult& out, const ExperimentConfig& cfg, const ReplicateOptions& base, bool timing) {
  const TargetDensity& target = *cfg.target;
  const PoolSpec& spec_pool = *cfg.pool;
  const auto requests = build_requests(cfg);

  std::optional<ProposalPool> fixed;
  if (!spec_pool.random) {
    fixed.emplace(spec_pool.proposals);
  } else if (!spec_pool.redraw) {
    RandomStream rng(derive_seed(base.seed, 0, hash_label("pool")));
    fixed.emplace(ProposalPool::uniform_locations(spec_pool.family, spec_pool.count, spec_pool.lo, spec_pool.hi,
                                                  spec_pool.scale, spec_pool.dof, rng));
  }

  for (const SchemeSpec& scheme : cfg.schemes) {
    for (std::size_t M : cfg.samples) {
      SchemeSpec spec = scheme;
      spec.blocks = M / spec_pool.size();
      const std::string label = spec.label();
      ReplicateOptions options = base;
      options.tag = hash_label(label + "/" + std::to_string(M));
      const SampleFn sampler = [&](std::size_t, RandomStream& rng) {
        if (fixed) {
          return run_scheme(spec, target, *fixed, rng);
        }
        const ProposalPool pool = ProposalPool::uniform_locations(spec_pool.family, spec_pool.count, spec_pool.lo,
                                                                  spec_pool.hi, spec_pool.scale, spec_pool.dof, rng);
        return run_scheme(spec, target, pool, rng);
      };
      const auto start = std::chrono::steady_clock::now();
      const auto stats = empirical_mse(sampler, requests, options);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      std::vector<std::optional<double>> analytic;
      for (EstimatorKind kind : cfg.estimators) {
        analytic.push_back(analytic_for(cfg, spec, M, kind));
      }
      append_rows(out, cfg, label, M, options.replicates, stats, analytic,
                  timing ? std::optional<double>(elapsed.count()) : std::nullopt);
    }
  }
}

void run_adaptive_grid(ExperimentResult& out, const ExperimentConfig& cfg, const ReplicateOptions& base,
                       bool timing) {
  const TargetDensity& target = *cfg.target;
  const auto requests = build_requests(cfg);
  const AdaptiveBlock& block = *cfg.adaptive;
  for (AdaptiveVariant variant : block.variants) {
    AdaptiveConfig ac = block.base;
    ac.variant = variant;
    const std::string label = std::string(to_string(ac.adapter)) + "/" + std::string(to_string(variant));
    const std::size_t M = ac.J * ac.T;
    ReplicateOptions options = base;
    options.tag = hash_label(label);
    std::vector<std::vector<IterationDiagnostics>> diagnostics(options.replicates);
    const SampleFn sampler = [&](std::size_t r, RandomStream& rng) {
      AdaptiveRun run = run_adaptive(ac, target, rng);
      diagnostics[r] = std::move(run.diagnostics);
      return std::move(run.samples);
    };
    const auto start = std::chrono::steady_clock::now();
    const auto stats = empirical_mse(sampler, requests, options);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    append_rows(out, cfg, label, M, options.replicates, stats,
                std::vector<std::optional<double>>(requests.size()),
                timing ? std::optional<double>(elapsed.count()) : std::nullopt);

    for (std::size_t t = 0; t < ac.T; ++t) {
      DiagnosticRow row;
      row.experiment = cfg.experiment;
      row.scheme = label;
      row.t = t;
      double acceptance = 0.0;
      for (const auto& d : diagnostics) {
        row.ess += d[t].ess;
        if (d[t].acceptance_rate) {
          acceptance += *d[t].acceptance_rate;
        }
      }
      const auto runs = static_cast<double>(diagnostics.size());
      row.ess /= runs;
      if (ac.adapter == Adapter::LAIS) {
        row.acceptance_rate = acceptance / runs;
      }
      out.diagnostics.push_back(std::move(row));
    }
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  if (!cfg.target) {
    throw InputError("run_experiment: configuration has no target");
  }
  ReplicateOptions base;
  base.seed = options.seed.value_or(cfg.seed);
  base.replicates = options.replicates.value_or(cfg.replicates);
  base.threads = options.threads;
  if (base.replicates < 2) {
    throw InputError("run_experiment: need at least 2 replicates");
  }
  ExperimentResult out;
  if (cfg.adaptive) {
    run_adaptive_grid(out, cfg, base, options.timing);
  } else {
    run_static(out, cfg, base, options.timing);
  }
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::forward_as_tuple(a.scheme, a.M, to_string(a.estimator)) <
           std::forward_as_tuple(b.scheme, b.M, to_string(b.estimator));
  });
  std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(), [](const DiagnosticRow& a, const DiagnosticRow& b) {
    return std::tie(a.scheme, a.t) < std::tie(b.scheme, b.t);
  });
  return out;
}

std::vector<std::string> nonfinite_cells(const ExperimentResult& result) {
  std::vector<std::string> cells;
  for (const auto& row : result.rows) {
    const std::string where = "scheme=" + row.scheme + " M=" + std::to_string(row.M) +
                              " estimator=" + std::string(to_string(row.estimator));
    auto check = [&](double v, const char* field) {
      if (!std::isfinite(v)) {
        cells.push_back(where + " field=" + field);
      }
    };
    check(row.empirical_mse, "empirical_mse");
    check(row.stderr_mse, "stderr");
    if (row.analytic_variance) {
      check(*row.analytic_variance, "analytic_variance");
    }
  }
  return cells;
}

}  // namespace mis
