#include "nebv/prior.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nebv {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(std::string_view text, std::string_view context) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("prior: cannot parse number '" + t + "' in '" +
                                std::string(context) + "'");
  }
  return value;
}

// Splits on `sep` at parenthesis depth zero.
std::vector<std::string> split_top_level(std::string_view s, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth == 0 && s[i] == sep) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(s.substr(start)));
  return parts;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

PriorSpec parse_atom(std::string_view text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')') {
    throw std::invalid_argument("prior: expected NAME(args) but got '" + t + "'");
  }
  const std::string name = lower(trim(std::string_view(t).substr(0, open)));
  const auto args_text = std::string_view(t).substr(open + 1, t.size() - open - 2);
  std::vector<double> args;
  for (const auto& a : split_top_level(args_text, ',')) args.push_back(parse_double(a, t));

  auto expect = [&](std::size_t n) {
    if (args.size() != n) {
      throw std::invalid_argument("prior: '" + name + "' takes " + std::to_string(n) +
                                  " arguments in '" + t + "'");
    }
  };
  if (name == "ig" || name == "invgamma" || name == "inverse_gamma") {
    expect(2);
    return PriorSpec::inverse_gamma(args[0], args[1]);
  }
  if (name == "gamma") {
    expect(2);
    return PriorSpec::gamma(args[0], args[1]);
  }
  if (name == "ln" || name == "lognormal" || name == "log_normal") {
    expect(2);
    return PriorSpec::log_normal(args[0], args[1]);
  }
  if (name == "point" || name == "pointmass" || name == "point_mass") {
    expect(1);
    return PriorSpec::point_mass(args[0]);
  }
  throw std::invalid_argument("prior: unknown family '" + name +
                              "' (valid: IG, Gamma, LN, Point, or w*A+w*B mixtures)");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

PriorSpec PriorSpec::inverse_gamma(double shape, double scale) {
  require(positive_finite(shape) && positive_finite(scale),
          "InverseGamma prior needs shape > 0 and scale > 0");
  return PriorSpec(InverseGammaPrior{shape, scale});
}

PriorSpec PriorSpec::gamma(double shape, double scale) {
  require(positive_finite(shape) && positive_finite(scale),
          "Gamma prior needs shape > 0 and scale > 0");
  return PriorSpec(GammaPrior{shape, scale});
}

PriorSpec PriorSpec::log_normal(double mu, double tau2) {
  require(std::isfinite(mu) && positive_finite(tau2), "LogNormal prior needs finite mu and tau2 > 0");
  return PriorSpec(LogNormalPrior{mu, tau2});
}

PriorSpec PriorSpec::mixture(std::vector<double> weights, std::vector<PriorSpec> components) {
  require(!weights.empty() && weights.size() == components.size(),
          "Mixture prior needs one weight per component");
  for (double w : weights) require(w >= 0.0 && std::isfinite(w), "Mixture weights must be >= 0");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(std::abs(total - 1.0) <= 1e-12, "Mixture weights must sum to 1 (got " + fmt(total) + ")");
  return PriorSpec(MixturePrior{std::move(weights), std::move(components)});
}

PriorSpec PriorSpec::point_mass(double value) {
  require(positive_finite(value), "PointMass prior needs a positive value");
  return PriorSpec(PointMassPrior{value});
}

PriorSpec PriorSpec::parse(std::string_view text) {
  const auto terms = split_top_level(text, '+');
  if (terms.size() == 1 && terms[0].find('*') == std::string::npos) return parse_atom(terms[0]);

  std::vector<double> weights;
  std::vector<PriorSpec> components;
  for (const auto& term : terms) {
    const auto star = term.find('*');
    if (star == std::string::npos) {
      throw std::invalid_argument("prior: mixture term '" + term + "' needs the form w*PRIOR");
    }
    weights.push_back(parse_double(std::string_view(term).substr(0, star), term));
    components.push_back(parse_atom(std::string_view(term).substr(star + 1)));
  }
  return mixture(std::move(weights), std::move(components));
}

double PriorSpec::mean() const {
  struct Visitor {
    double operator()(const InverseGammaPrior& p) const {
      return p.shape > 1.0 ? p.scale / (p.shape - 1.0) : std::numeric_limits<double>::infinity();
    }
    double operator()(const GammaPrior& p) const { return p.shape * p.scale; }
    double operator()(const LogNormalPrior& p) const { return std::exp(p.mu + 0.5 * p.tau2); }
    double operator()(const MixturePrior& p) const {
      double m = 0.0;
      for (std::size_t i = 0; i < p.weights.size(); ++i) {
        if (p.weights[i] > 0.0) m += p.weights[i] * p.components[i].mean();
      }
      return m;
    }
    double operator()(const PointMassPrior& p) const { return p.value; }
  };
  return std::visit(Visitor{}, value_);
}

std::string PriorSpec::to_string() const {
  struct Visitor {
    std::string operator()(const InverseGammaPrior& p) const {
      return "IG(" + fmt(p.shape) + "," + fmt(p.scale) + ")";
    }
    std::string operator()(const GammaPrior& p) const {
      return "Gamma(" + fmt(p.shape) + "," + fmt(p.scale) + ")";
    }
    std::string operator()(const LogNormalPrior& p) const {
      return "LN(" + fmt(p.mu) + "," + fmt(p.tau2) + ")";
    }
    std::string operator()(const MixturePrior& p) const {
      std::string out;
      for (std::size_t i = 0; i < p.weights.size(); ++i) {
        if (i) out += "+";
        out += fmt(p.weights[i]) + "*" + p.components[i].to_string();
      }
      return out;
    }
    std::string operator()(const PointMassPrior& p) const { return "Point(" + fmt(p.value) + ")"; }
  };
  return std::visit(Visitor{}, value_);
}

double draw_prior(const PriorSpec& prior, Rng& rng) {
  struct Visitor {
    Rng& rng;
    double operator()(const InverseGammaPrior& p) const {
      return 1.0 / rng.gamma(p.shape, 1.0 / p.scale);
    }
    double operator()(const GammaPrior& p) const { return rng.gamma(p.shape, p.scale); }
    double operator()(const LogNormalPrior& p) const {
      return std::exp(rng.normal(p.mu, std::sqrt(p.tau2)));
    }
    double operator()(const MixturePrior& p) const {
      const double u = rng.uniform();
      double cumulative = 0.0;
      std::size_t last = 0;
      for (std::size_t i = 0; i < p.weights.size(); ++i) {
        if (p.weights[i] <= 0.0) continue;
        last = i;
        cumulative += p.weights[i];
        if (u < cumulative) return draw_prior(p.components[i], rng);
      }
      // Rounding left u above the accumulated total.
      return draw_prior(p.components[last], rng);
    }
    double operator()(const PointMassPrior& p) const { return p.value; }
  };
  return std::visit(Visitor{rng}, prior.variant());
}

}  // namespace nebv
