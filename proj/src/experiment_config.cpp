#include "mis/experiment_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string_view>

#include <yaml-cpp/yaml.h>

#include "mis/errors.hpp"

namespace mis {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& problem) const {
    const YAML::Mark mark = at.IsDefined() ? at.Mark() : YAML::Mark::null_mark();
    std::ostringstream msg;
    msg << source_;
    if (mark.line >= 0) {
      msg << ':' << mark.line + 1 << ':' << mark.column + 1;
    }
    msg << ": " << field << ": " << problem;
    throw ConfigError(msg.str());
  }

  void check_keys(const YAML::Node& node, const std::string& field, std::initializer_list<std::string_view> allowed) const {
    if (!node.IsMap()) {
      fail(node, field, "expected a mapping");
    }
    for (const auto& entry : node) {
      const auto key = entry.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(entry.first, join(field, key), "unknown key");
      }
    }
  }

  YAML::Node require(const YAML::Node& parent, const std::string& field, const char* key) const {
    YAML::Node node = parent[key];
    if (!node.IsDefined() || node.IsNull()) {
      fail(parent, join(field, key), "missing required key");
    }
    return node;
  }

  std::string scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) {
      fail(node, field, "expected a scalar");
    }
    return node.Scalar();
  }

  double real(const YAML::Node& node, const std::string& field) const {
    std::string text = scalar(node, field);
    std::string_view view = text;
    if (!view.empty() && view.front() == '+') {
      view.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
    if (ec != std::errc() || ptr != view.data() + view.size() || !std::isfinite(value)) {
      fail(node, field, "expected a finite decimal number, got '" + text + "'");
    }
    return value;
  }

  std::uint64_t integer(const YAML::Node& node, const std::string& field) const {
    const std::string text = scalar(node, field);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(node, field, "expected a nonnegative integer, got '" + text + "'");
    }
    return value;
  }

  std::uint64_t positive(const YAML::Node& node, const std::string& field) const {
    const std::uint64_t value = integer(node, field);
    if (value == 0) {
      fail(node, field, "must be at least 1");
    }
    return value;
  }

  bool boolean(const YAML::Node& node, const std::string& field) const {
    const std::string text = scalar(node, field);
    if (text == "true") return true;
    if (text == "false") return false;
    fail(node, field, "expected true or false, got '" + text + "'");
  }

  const YAML::Node& sequence(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence() || node.size() == 0) {
      fail(node, field, "expected a nonempty list");
    }
    return node;
  }

  std::vector<double> reals(const YAML::Node& node, const std::string& field) const {
    std::vector<double> out;
    for (std::size_t i = 0; i < sequence(node, field).size(); ++i) {
      out.push_back(real(node[i], index(field, i)));
    }
    return out;
  }

  std::vector<std::vector<double>> rows(const YAML::Node& node, const std::string& field) const {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < sequence(node, field).size(); ++i) {
      out.push_back(reals(node[i], index(field, i)));
    }
    return out;
  }

  static std::string join(const std::string& field, std::string_view key) {
    return field.empty() ? std::string(key) : field + "." + std::string(key);
  }
  static std::string index(const std::string& field, std::size_t i) {
    return field + "[" + std::to_string(i) + "]";
  }

 private:
  std::string source_;
};

// Covariance entry: scalar s -> s I, list -> diagonal, list of lists -> full.
Eigen::MatrixXd covariance(const Reader& in, const YAML::Node& node, const std::string& field, std::size_t dim) {
  if (node.IsScalar()) {
    return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)) *
           in.real(node, field);
  }
  in.sequence(node, field);
  const auto n = static_cast<Eigen::Index>(dim);
  if (node[0].IsScalar()) {
    const auto diag = in.reals(node, field);
    if (diag.size() != dim) {
      in.fail(node, field, "diagonal needs " + std::to_string(dim) + " entries");
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t d = 0; d < dim; ++d) {
      out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) = diag[d];
    }
    return out;
  }
  const auto matrix = in.rows(node, field);
  if (matrix.size() != dim) {
    in.fail(node, field, "matrix needs " + std::to_string(dim) + " rows");
  }
  Eigen::MatrixXd out(n, n);
  for (std::size_t r = 0; r < dim; ++r) {
    if (matrix[r].size() != dim) {
      in.fail(node[r], Reader::index(field, r), "row needs " + std::to_string(dim) + " entries");
    }
    for (std::size_t c = 0; c < dim; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = matrix[r][c];
    }
  }
  return out;
}

void parse_target(const Reader& in, const YAML::Node& node, ExperimentConfig& cfg) {
  const std::string field = "target";
  if (!node.IsMap()) {
    in.fail(node, field, "expected a mapping");
  }
  const std::string family = in.scalar(in.require(node, field, "family"), field + ".family");
  try {
    if (family == "running_example") {
      in.check_keys(node, field, {"family", "mu", "sigma", "log_scale"});
      RunningExampleConfig re;
      re.mu = in.real(in.require(node, field, "mu"), field + ".mu");
      re.sigma = in.real(in.require(node, field, "sigma"), field + ".sigma");
      if (!(re.sigma > 0.0)) {
        in.fail(node["sigma"], field + ".sigma", "must be positive");
      }
      cfg.running_example = re;
      cfg.target = re.target();
    } else if (family == "gaussian_mixture") {
      in.check_keys(node, field, {"family", "weights", "means", "covariances", "log_scale"});
      GaussianMixtureParams p;
      const auto means = in.rows(in.require(node, field, "means"), field + ".means");
      const YAML::Node covs = in.sequence(in.require(node, field, "covariances"), field + ".covariances");
      if (covs.size() != means.size()) {
        in.fail(covs, field + ".covariances", "needs one entry per mean");
      }
      for (std::size_t k = 0; k < means.size(); ++k) {
        p.means.emplace_back(Eigen::Map<const Eigen::VectorXd>(means[k].data(), static_cast<Eigen::Index>(means[k].size())));
        p.covariances.push_back(covariance(in, covs[k], Reader::index(field + ".covariances", k), means[k].size()));
      }
      if (node["weights"]) {
        p.weights = in.reals(node["weights"], field + ".weights");
      } else {
        p.weights.assign(means.size(), 1.0 / static_cast<double>(means.size()));
      }
      cfg.target = TargetDensity::gaussian_mixture(p);
    } else if (family == "ggd_mixture") {
      in.check_keys(node, field, {"family", "weights", "location", "scale", "shape", "log_scale"});
      GGDMixtureParams p;
      p.location = in.rows(in.require(node, field, "location"), field + ".location");
      p.scale = in.rows(in.require(node, field, "scale"), field + ".scale");
      p.shape = in.rows(in.require(node, field, "shape"), field + ".shape");
      if (node["weights"]) {
        p.weights = in.reals(node["weights"], field + ".weights");
      }
      cfg.target = TargetDensity::ggd_mixture(p);
    } else if (family == "banana") {
      in.check_keys(node, field, {"family", "sigma2", "bend", "dim", "log_scale"});
      BananaParams p;
      if (node["sigma2"]) p.sigma2 = in.real(node["sigma2"], field + ".sigma2");
      if (node["bend"]) p.bend = in.real(node["bend"], field + ".bend");
      if (node["dim"]) p.dim = in.positive(node["dim"], field + ".dim");
      cfg.target = TargetDensity::banana(p);
    } else {
      in.fail(node["family"], field + ".family",
              "unknown family '" + family + "' (running_example, gaussian_mixture, ggd_mixture, banana)");
    }
  } catch (const InputError& e) {
    in.fail(node, field, e.what());
  }
  if (node["log_scale"]) {
    cfg.target = cfg.target->scaled(in.real(node["log_scale"], field + ".log_scale"));
  }
}

ProposalFamily proposal_family(const Reader& in, const YAML::Node& node, const std::string& field) {
  const std::string name = in.scalar(node, field);
  if (name == "gaussian") return ProposalFamily::Gaussian;
  if (name == "student_t") return ProposalFamily::StudentT;
  in.fail(node, field, "unknown proposal family '" + name + "' (gaussian, student_t)");
}

PoolSpec parse_pool(const Reader& in, const YAML::Node& node) {
  const std::string field = "pool";
  in.check_keys(node, field, {"family", "dof", "locations", "scales", "scale", "count", "lo", "hi", "redraw"});
  PoolSpec pool;
  pool.family = proposal_family(in, in.require(node, field, "family"), field + ".family");
  if (pool.family == ProposalFamily::StudentT) {
    pool.dof = in.real(in.require(node, field, "dof"), field + ".dof");
    if (!(pool.dof > 0.0)) {
      in.fail(node["dof"], field + ".dof", "must be positive");
    }
  } else if (node["dof"]) {
    in.fail(node["dof"], field + ".dof", "only meaningful for student_t");
  }
  if (node["count"]) {
    pool.random = true;
    pool.count = in.positive(node["count"], field + ".count");
    pool.lo = in.reals(in.require(node, field, "lo"), field + ".lo");
    pool.hi = in.reals(in.require(node, field, "hi"), field + ".hi");
    if (pool.lo.size() != pool.hi.size()) {
      in.fail(node["hi"], field + ".hi", "must match lo in length");
    }
    pool.scale = in.real(in.require(node, field, "scale"), field + ".scale");
    if (!(pool.scale > 0.0)) {
      in.fail(node["scale"], field + ".scale", "must be positive");
    }
    if (node["redraw"]) {
      pool.redraw = in.boolean(node["redraw"], field + ".redraw");
    }
    for (const char* key : {"locations", "scales"}) {
      if (node[key]) {
        in.fail(node[key], Reader::join(field, key), "not allowed together with count");
      }
    }
    return pool;
  }
  for (const char* key : {"lo", "hi", "redraw"}) {
    if (node[key]) {
      in.fail(node[key], Reader::join(field, key), "only allowed together with count");
    }
  }
  const auto locations = in.rows(in.require(node, field, "locations"), field + ".locations");
  std::vector<std::vector<double>> scales;
  if (node["scales"] && node["scale"]) {
    in.fail(node["scale"], field + ".scale", "give either scale or scales");
  }
  if (node["scales"]) {
    scales = in.rows(node["scales"], field + ".scales");
    if (scales.size() != locations.size()) {
      in.fail(node["scales"], field + ".scales", "needs one entry per location");
    }
  } else {
    const double s = in.real(in.require(node, field, "scale"), field + ".scale");
    for (const auto& loc : locations) {
      scales.emplace_back(loc.size(), s);
    }
  }
  for (std::size_t n = 0; n < locations.size(); ++n) {
    pool.proposals.push_back({pool.family, locations[n], scales[n], pool.dof});
  }
  try {
    ProposalPool check(pool.proposals);
  } catch (const InputError& e) {
    in.fail(node, field, e.what());
  }
  return pool;
}

AdaptiveBlock parse_adaptive(const Reader& in, const YAML::Node& node) {
  const std::string field = "adaptive";
  in.check_keys(node, field,
                {"adapter", "variants", "J", "T", "sigma_upper", "sigma_lower", "init_lo", "init_hi",
                 "allow_full_mixture", "grouping", "diagnostics"});
  AdaptiveBlock block;
  AdaptiveConfig& c = block.base;
  const YAML::Node adapter = in.require(node, field, "adapter");
  const auto parsed_adapter = parse_adapter(in.scalar(adapter, field + ".adapter"));
  if (!parsed_adapter) {
    in.fail(adapter, field + ".adapter", "expected LAIS or PMC");
  }
  c.adapter = *parsed_adapter;
  const YAML::Node variants = in.sequence(in.require(node, field, "variants"), field + ".variants");
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const auto v = parse_adaptive_variant(in.scalar(variants[i], Reader::index(field + ".variants", i)));
    if (!v) {
      in.fail(variants[i], Reader::index(field + ".variants", i),
              "expected per_proposal, full_mixture, temporal_mixture, spatial_mixture, generic_partition, N1 or N3");
    }
    if (std::find(block.variants.begin(), block.variants.end(), *v) != block.variants.end()) {
      in.fail(variants[i], Reader::index(field + ".variants", i), "duplicate variant");
    }
    block.variants.push_back(*v);
  }
  c.J = in.positive(in.require(node, field, "J"), field + ".J");
  c.T = in.positive(in.require(node, field, "T"), field + ".T");
  c.sigma_upper = in.real(in.require(node, field, "sigma_upper"), field + ".sigma_upper");
  c.sigma_lower = in.real(in.require(node, field, "sigma_lower"), field + ".sigma_lower");
  c.init_lo = in.reals(in.require(node, field, "init_lo"), field + ".init_lo");
  c.init_hi = in.reals(in.require(node, field, "init_hi"), field + ".init_hi");
  if (node["allow_full_mixture"]) {
    c.allow_full_mixture = in.boolean(node["allow_full_mixture"], field + ".allow_full_mixture");
  }
  if (node["grouping"]) {
    const YAML::Node groups = in.sequence(node["grouping"], field + ".grouping");
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::string gfield = Reader::index(field + ".grouping", g);
      std::vector<GridCell> cells;
      for (std::size_t i = 0; i < in.sequence(groups[g], gfield).size(); ++i) {
        const YAML::Node cell = groups[g][i];
        const std::string cfield = Reader::index(gfield, i);
        if (!cell.IsSequence() || cell.size() != 2) {
          in.fail(cell, cfield, "expected a [j, t] pair");
        }
        cells.push_back({in.integer(cell[0], cfield + "[0]"), in.integer(cell[1], cfield + "[1]")});
      }
      c.grouping.push_back(std::move(cells));
    }
  }
  if (node["diagnostics"]) {
    block.diagnostics_path = in.scalar(node["diagnostics"], field + ".diagnostics");
  }
  return block;
}

Partition parse_partition(const Reader& in, const YAML::Node& node, const std::string& field, std::size_t N) {
  Partition p;
  if (node.IsMap()) {
    in.check_keys(node, field, {"group"});
    const std::size_t group = in.positive(in.require(node, field, "group"), field + ".group");
    return contiguous_partition(N, group);
  }
  for (std::size_t s = 0; s < in.sequence(node, field).size(); ++s) {
    const std::string sfield = Reader::index(field, s);
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < in.sequence(node[s], sfield).size(); ++i) {
      subset.push_back(in.integer(node[s][i], Reader::index(sfield, i)));
    }
    p.subsets.push_back(std::move(subset));
  }
  return p;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  const Reader in(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": syntax: " << e.msg;
    throw ConfigError(msg.str());
  }
  if (!root.IsMap()) {
    in.fail(root, "<root>", "expected a mapping of experiment settings");
  }
  in.check_keys(root, "",
                {"experiment", "seed", "replicates", "output", "expert", "target", "pool", "adaptive", "schemes",
                 "partitions", "samples", "estimators", "estimand", "truth"});

  ExperimentConfig cfg;
  cfg.experiment = in.scalar(in.require(root, "", "experiment"), "experiment");
  if (cfg.experiment.empty() || cfg.experiment.find_first_of(",\"\n\r") != std::string::npos) {
    in.fail(root["experiment"], "experiment", "must be nonempty without commas, quotes or newlines");
  }
  if (root["seed"]) cfg.seed = in.integer(root["seed"], "seed");
  if (root["replicates"]) {
    cfg.replicates = in.integer(root["replicates"], "replicates");
    if (cfg.replicates < 2) {
      in.fail(root["replicates"], "replicates", "must be at least 2");
    }
  }
  if (root["output"]) cfg.output = in.scalar(root["output"], "output");
  if (root["expert"]) cfg.expert = in.boolean(root["expert"], "expert");

  parse_target(in, in.require(root, "", "target"), cfg);
  const std::size_t dim = cfg.target->dimension();

  if (root["pool"] && root["adaptive"]) {
    in.fail(root["adaptive"], "adaptive", "give either pool or adaptive, not both");
  }
  if (root["pool"]) {
    if (cfg.running_example) {
      in.fail(root["pool"], "pool", "running_example brings its own two-proposal pool");
    }
    cfg.pool = parse_pool(in, root["pool"]);
    const std::size_t pool_dim = cfg.pool->random ? cfg.pool->lo.size() : cfg.pool->proposals.front().location.size();
    if (pool_dim != dim) {
      in.fail(root["pool"], "pool", "dimension " + std::to_string(pool_dim) + " does not match target dimension " +
                                        std::to_string(dim));
    }
  } else if (cfg.running_example && !root["adaptive"]) {
    PoolSpec pool;
    pool.proposals = {cfg.running_example->pool().proposal(0), cfg.running_example->pool().proposal(1)};
    cfg.pool = pool;
  }

  if (root["estimand"]) {
    const auto moment = parse_moment(in.scalar(root["estimand"], "estimand"));
    if (!moment) {
      in.fail(root["estimand"], "estimand", "expected identity or square");
    }
    cfg.estimand.moment = *moment;
  }
  if (root["estimators"]) {
    const YAML::Node list = in.sequence(root["estimators"], "estimators");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto kind = parse_estimator_kind(in.scalar(list[i], Reader::index("estimators", i)));
      if (!kind) {
        in.fail(list[i], Reader::index("estimators", i),
                "expected unnormalized, normalizing_constant or self_normalized");
      }
      if (std::find(cfg.estimators.begin(), cfg.estimators.end(), *kind) != cfg.estimators.end()) {
        in.fail(list[i], Reader::index("estimators", i), "duplicate estimator");
      }
      cfg.estimators.push_back(*kind);
    }
  } else {
    cfg.estimators = {EstimatorKind::Unnormalized};
  }
  if (root["truth"]) {
    cfg.truth = in.reals(root["truth"], "truth");
    if (cfg.truth->size() != dim) {
      in.fail(root["truth"], "truth", "needs " + std::to_string(dim) + " entries");
    }
  }

  if (root["adaptive"]) {
    cfg.adaptive = parse_adaptive(in, root["adaptive"]);
    for (const char* key : {"schemes", "partitions", "samples"}) {
      if (root[key]) {
        in.fail(root[key], key, "not used by adaptive experiments (M = J * T)");
      }
    }
    for (AdaptiveVariant v : cfg.adaptive->variants) {
      AdaptiveConfig c = cfg.adaptive->base;
      c.variant = v;
      try {
        validate(c, dim);
      } catch (const InputError& e) {
        in.fail(root["adaptive"], "adaptive", e.what());
      }
    }
    return cfg;
  }

  if (!cfg.pool) {
    in.fail(root, "pool", "missing required key");
  }
  const std::size_t N = cfg.pool->size();
  std::set<std::string> labels;
  if (root["schemes"]) {
    const YAML::Node list = in.sequence(root["schemes"], "schemes");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string field = Reader::index("schemes", i);
      try {
        cfg.schemes.push_back(parse_scheme(in.scalar(list[i], field), cfg.expert));
      } catch (const InputError& e) {
        in.fail(list[i], field, e.what());
      }
      if (!labels.insert(cfg.schemes.back().label()).second) {
        in.fail(list[i], field, "duplicate scheme " + cfg.schemes.back().label());
      }
    }
  }
  if (root["partitions"]) {
    const YAML::Node list = in.sequence(root["partitions"], "partitions");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string field = Reader::index("partitions", i);
      Partition p = parse_partition(in, list[i], field, N);
      try {
        validate(p, N);
      } catch (const InputError& e) {
        in.fail(list[i], field, e.what());
      }
      cfg.schemes.push_back(SchemeSpec::partitioned(std::move(p)));
      if (!labels.insert(cfg.schemes.back().label()).second) {
        in.fail(list[i], field, "duplicate partition label " + cfg.schemes.back().label());
      }
    }
  }
  if (cfg.schemes.empty()) {
    in.fail(root, "schemes", "at least one scheme or partition is required");
  }
  const YAML::Node samples = in.sequence(in.require(root, "", "samples"), "samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t M = in.positive(samples[i], Reader::index("samples", i));
    if (M % N != 0) {
      in.fail(samples[i], Reader::index("samples", i),
              "M = " + std::to_string(M) + " is not a multiple of the pool size " + std::to_string(N));
    }
    if (std::find(cfg.samples.begin(), cfg.samples.end(), M) != cfg.samples.end()) {
      in.fail(samples[i], Reader::index("samples", i), "duplicate sample size");
    }
    cfg.samples.push_back(M);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw ConfigError(path + ": cannot open file");
  }
  std::ostringstream text;
  text << file.rdbuf();
  return parse_config(text.str(), path);
}

}  // namespace mis
