#include "nebv/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nebv/estimators.hpp"

namespace nebv {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid scenario:";
  for (const auto& p : problems) out += "\n  - " + p;
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "id",   "p",      "k",          "mu",        "tau2_grid", "x_grid",     "prior",         "design",
      "correlation", "n_rows", "reps", "seed", "gamma", "gamma_star", "b", "estimators", "mean_weighting",
      "description"};
  return keys;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join_problems(problems)), problems_(std::move(problems)) {}

void Scenario::validate() const {
  std::vector<std::string> problems;
  if (id.empty()) problems.push_back("id must be non-empty");
  if (p < 1) problems.push_back("p must be >= 1");
  if (k.value() < 3) problems.push_back("k must be >= 3 for the variance estimator");
  if (!std::isfinite(mu)) problems.push_back("mu must be finite");
  if (tau2_grid.empty() == x_grid.empty()) {
    problems.push_back("exactly one of tau2_grid and x_grid must be given");
  }
  for (double t : tau2_grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) problems.push_back("tau2_grid values must be finite and >= 0");
  }
  for (double x : x_grid) {
    if (!(x >= 0.0 && x < 1.0)) problems.push_back("x_grid values must lie in [0, 1)");
  }
  if (!x_grid.empty() && !std::isfinite(prior.mean())) {
    problems.push_back("x_grid needs a prior with finite mean; use tau2_grid instead");
  }
  if (design == Design::kDependent) {
    if (n_rows != static_cast<std::size_t>(k.value()) + 1) {
      problems.push_back("dependent design requires n_rows = k + 1 = " + std::to_string(k.value() + 1));
    }
  } else if (!std::holds_alternative<IdentityCorrelation>(correlation)) {
    problems.push_back("a correlation structure requires design \"dependent\"");
  }
  if (reps < 1) problems.push_back("reps must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) problems.push_back("gamma must lie in (0, 1)");
  if (!(gamma_star > 0.0 && gamma_star < 1.0)) problems.push_back("gamma_star must lie in (0, 1)");
  if (b < 1) problems.push_back("b must be >= 1");
  if (estimators.empty()) problems.push_back("estimators must list at least one name");
  std::set<std::string> seen;
  for (const auto& name : estimators) {
    if (!default_registry().contains(name)) {
      std::string valid;
      for (const auto& n : default_registry().names()) valid += (valid.empty() ? "" : ", ") + n;
      problems.push_back("unknown estimator '" + name + "' (valid: " + valid + ")");
    } else if (!seen.insert(name).second) {
      problems.push_back("estimator '" + name + "' listed twice");
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

double Scenario::observation_scale() const {
  return design == Design::kDependent ? 1.0 / static_cast<double>(n_rows) : 1.0;
}

std::vector<GridPoint> Scenario::grid() const {
  const double ev = prior.mean() * observation_scale();
  std::vector<GridPoint> out;
  if (!tau2_grid.empty()) {
    for (double t : tau2_grid) out.push_back({std::isfinite(ev) ? t / (t + ev) : 0.0, t});
  } else {
    for (double x : x_grid) out.push_back({x, x / (1.0 - x) * ev});
  }
  return out;
}

Scenario parse_scenario(const std::string& json_text, std::optional<std::uint64_t> seed_override) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("not valid JSON: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"top level must be a JSON object"});

  Scenario s;
  std::vector<std::string> problems;
  for (const auto& [key, _] : doc.items()) {
    if (!known_keys().count(key)) problems.push_back("unknown key '" + key + "'");
  }

  auto number = [&](const char* key, auto& target, auto convert) {
    if (!doc.contains(key)) return;
    const json& v = doc.at(key);
    if (!v.is_number()) {
      problems.push_back(std::string(key) + " must be a number");
      return;
    }
    try {
      target = convert(v);
    } catch (const std::exception& e) {
      problems.push_back(std::string(key) + ": " + e.what());
    }
  };
  auto count = [](const json& v) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw std::invalid_argument("must be a non-negative integer");
    return static_cast<std::size_t>(v.get<long long>());
  };
  auto real = [](const json& v) { return v.get<double>(); };

  if (doc.contains("id")) {
    if (doc["id"].is_string()) s.id = doc["id"].get<std::string>();
    else problems.push_back("id must be a string");
  }
  number("p", s.p, count);
  if (doc.contains("k")) {
    try {
      s.k = DegreesOfFreedom(static_cast<int>(count(doc["k"])));
    } catch (const std::exception& e) {
      problems.push_back(std::string("k: ") + e.what());
    }
  }
  number("mu", s.mu, real);
  number("n_rows", s.n_rows, count);
  number("reps", s.reps, count);
  number("gamma", s.gamma, real);
  number("gamma_star", s.gamma_star, real);
  number("b", s.b, count);

  auto grid = [&](const char* key, std::vector<double>& target) {
    if (!doc.contains(key)) return;
    const json& v = doc[key];
    if (!v.is_array() || v.empty()) {
      problems.push_back(std::string(key) + " must be a non-empty array of numbers");
      return;
    }
    for (const auto& e : v) {
      if (!e.is_number()) {
        problems.push_back(std::string(key) + " must contain only numbers");
        return;
      }
      target.push_back(e.get<double>());
    }
  };
  grid("tau2_grid", s.tau2_grid);
  grid("x_grid", s.x_grid);

  if (doc.contains("prior")) {
    try {
      if (!doc["prior"].is_string()) throw std::invalid_argument("must be a string such as \"IG(3,1)\"");
      s.prior = PriorSpec::parse(doc["prior"].get<std::string>());
    } catch (const std::exception& e) {
      problems.push_back(std::string("prior: ") + e.what());
    }
  } else {
    problems.push_back("prior is required");
  }
  if (doc.contains("design")) {
    const auto d = doc["design"].is_string() ? doc["design"].get<std::string>() : "";
    if (d == "independent") s.design = Design::kIndependent;
    else if (d == "dependent") s.design = Design::kDependent;
    else problems.push_back("design must be \"independent\" or \"dependent\"");
  }
  if (doc.contains("correlation")) {
    try {
      if (!doc["correlation"].is_string()) throw std::invalid_argument("must be a string such as \"ar(0.9)\"");
      s.correlation = parse_correlation(doc["correlation"].get<std::string>());
    } catch (const std::exception& e) {
      problems.push_back(std::string("correlation: ") + e.what());
    }
  }
  if (doc.contains("estimators")) {
    s.estimators.clear();
    const json& v = doc["estimators"];
    if (!v.is_array()) {
      problems.push_back("estimators must be an array of names");
    } else {
      for (const auto& e : v) {
        if (e.is_string()) s.estimators.push_back(e.get<std::string>());
        else problems.push_back("estimators must contain only strings");
      }
    }
  }
  if (doc.contains("mean_weighting")) {
    const auto w = doc["mean_weighting"].is_string() ? doc["mean_weighting"].get<std::string>() : "";
    if (w == "precision") s.weighting = MeanWeighting::kPrecision;
    else if (w == "unweighted") s.weighting = MeanWeighting::kUnweighted;
    else problems.push_back("mean_weighting must be \"precision\" or \"unweighted\"");
  }
  if (seed_override) {
    s.seed = *seed_override;
  } else if (doc.contains("seed")) {
    if (doc["seed"].is_number_unsigned()) s.seed = doc["seed"].get<std::uint64_t>();
    else problems.push_back("seed must be a non-negative integer");
  } else {
    problems.push_back("no seed: give \"seed\" in the file or pass --seed");
  }

  try {
    s.validate();
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return s;
}

Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str(), seed_override);
  } catch (const ConfigError& e) {
    std::vector<std::string> problems;
    for (const auto& p : e.problems()) problems.push_back(path + ": " + p);
    throw ConfigError(std::move(problems));
  }
}

DatasetGenerator::DatasetGenerator(const Scenario& scenario) : scenario_(scenario) {
  scenario_.validate();
  if (scenario_.design == Design::kDependent &&
      !std::holds_alternative<IdentityCorrelation>(scenario_.correlation)) {
    Rng rng(scenario_.seed, 0, Stream::kCorrelation);
    const Eigen::MatrixXd r = build_correlation(scenario_.correlation, scenario_.p, rng);
    CorrelationFactor f = factor_correlation(r);
    factor_ = std::move(f.lower);
    jitter_ = f.jitter;
  }
}

Dataset DatasetGenerator::generate(double tau2, std::uint64_t replication) const {
  if (!(tau2 >= 0.0)) throw std::invalid_argument("tau2 must be >= 0");
  return scenario_.design == Design::kDependent ? generate_dependent(tau2, replication)
                                                 : generate_independent(tau2, replication);
}

Dataset DatasetGenerator::generate_independent(double tau2, std::uint64_t replication) const {
  const std::size_t p = scenario_.p;
  const std::uint64_t seed = scenario_.seed;
  Rng prior_rng(seed, replication, Stream::kPrior);
  Rng theta_rng(seed, replication, Stream::kTheta);
  Rng obs_rng(seed, replication, Stream::kObservation);
  Rng chi_rng(seed, replication, Stream::kChiSquare);
  const double tau = std::sqrt(tau2);

  std::vector<double> sigma2(p), theta(p), x(p), s2(p);
  for (std::size_t i = 0; i < p; ++i) {
    sigma2[i] = draw_prior(scenario_.prior, prior_rng);
    theta[i] = scenario_.mu + tau * theta_rng.normal();
    x[i] = theta[i] + std::sqrt(sigma2[i]) * obs_rng.normal();
    s2[i] = sample_scaled_chisq(sigma2[i], scenario_.k, chi_rng);
  }
  return Dataset{SampleSet(std::move(x), std::move(s2), scenario_.k), std::move(theta), std::move(sigma2), 1.0};
}

Dataset DatasetGenerator::generate_dependent(double tau2, std::uint64_t replication) const {
  const auto p = static_cast<Eigen::Index>(scenario_.p);
  const auto n = static_cast<Eigen::Index>(scenario_.n_rows);
  const std::uint64_t seed = scenario_.seed;
  Rng prior_rng(seed, replication, Stream::kPrior);
  Rng theta_rng(seed, replication, Stream::kTheta);
  Rng obs_rng(seed, replication, Stream::kObservation);
  const double tau = std::sqrt(tau2);

  std::vector<double> sigma2(scenario_.p), theta(scenario_.p);
  for (std::size_t j = 0; j < scenario_.p; ++j) {
    sigma2[j] = draw_prior(scenario_.prior, prior_rng);
    theta[j] = scenario_.mu + tau * theta_rng.normal();
  }

  // Rows of Z are iid N(0, I); rows of Z L^T are N(0, R).
  Eigen::MatrixXd z(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = obs_rng.normal();
  }
  Eigen::MatrixXd y;
  if (factor_.size() == 0) {
    y = std::move(z);
  } else {
    y.noalias() = z * factor_.transpose().triangularView<Eigen::Upper>();
  }

  std::vector<double> x(scenario_.p), s2(scenario_.p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double sd = std::sqrt(sigma2[static_cast<std::size_t>(j)]);
    double mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mean += y(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ss += (y(i, j) - mean) * (y(i, j) - mean);
    x[static_cast<std::size_t>(j)] = theta[static_cast<std::size_t>(j)] + sd * mean;
    s2[static_cast<std::size_t>(j)] = sigma2[static_cast<std::size_t>(j)] * ss / static_cast<double>(n - 1);
  }
  return Dataset{SampleSet(std::move(x), std::move(s2), scenario_.k), std::move(theta), std::move(sigma2),
                 scenario_.observation_scale()};
}

Dataset generate_dataset(const Scenario& scenario, double tau2, std::uint64_t replication) {
  return DatasetGenerator(scenario).generate(tau2, replication);
}

}  // namespace nebv
