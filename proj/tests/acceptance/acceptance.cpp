// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every requested criterion passes.

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "nebv/bayes_oracle.hpp"
#include "nebv/discordance.hpp"
#include "nebv/harness.hpp"
#include "nebv/nebv.hpp"
#include "nebv/oracle_check.hpp"
#include "nebv/random.hpp"

using namespace nebv;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string config_path(const char* name) { return std::string(NEBV_CONFIG_DIR) + "/" + name; }

// Marginal of S^2 under IG(a, b): S^2 ~ (b / a) F(k, 2a).
double marginal_quantile_invgamma(double a, double b, int k, double q) {
  return b / a * boost::math::quantile(boost::math::fisher_f(k, 2.0 * a), q);
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  std::string where;
  for (auto [a, b] : {std::pair{3.0, 1.0}, {6.0, 1.0}, {6.0, 4.0}}) {
    for (int k : {4, 8}) {
      const auto prior = PriorSpec::inverse_gamma(a, b);
      for (int i = 0; i <= 40; ++i) {
        const double s2 = marginal_quantile_invgamma(a, b, k, 0.01 + 0.98 * i / 40.0);
        const double closed = bayes_oracle_invgamma(s2, DegreesOfFreedom(k), a, b);
        const double numeric = bayes_oracle_numeric(prior, s2, DegreesOfFreedom(k));
        const double rel = std::abs(numeric / closed - 1.0);
        if (rel > worst) {
          worst = rel;
          where = "IG(" + fmt("%g", a) + "," + fmt("%g", b) + ") k=" + std::to_string(k) + " s2=" + fmt("%.4g", s2);
        }
      }
    }
  }
  return {worst <= 1e-6, "max relative error " + fmt("%.3g", worst) + " at " + where + " (tolerance 1e-6)"};
}

Outcome empirical_tail_identity() {
  const DegreesOfFreedom k(4);
  const auto prior = PriorSpec::inverse_gamma(3.0, 1.0);
  const double half_k = 0.5 * k.value();
  const double upper = tail_domain_upper(prior, k, 0.01);
  const std::size_t p = 100000;

  Rng rng(kSeed, 0, Stream::kOracleSample);
  std::vector<double> s2(p);
  for (auto& s : s2) s = sample_scaled_chisq(draw_prior(prior, rng), k, rng);
  std::sort(s2.begin(), s2.end());
  // Suffix sums of t^{-(k/2-1)} in long double.
  std::vector<long double> suffix(p + 1, 0.0L);
  for (std::size_t i = p; i-- > 0;) suffix[i] = suffix[i + 1] + std::pow(static_cast<long double>(s2[i]), -(half_k - 1.0L));

  double sup = 0.0, at = 0.0, quad_gap = 0.0;
  for (std::size_t i = 0; i < p && s2[i] < upper; ++i) {
    const double exact = half_k * std::exp(marginal_tail_moments(prior, s2[i], k).log_b);
    // The empirical sum jumps at each sample point; check both one-sided limits.
    const double incl = static_cast<double>(half_k * suffix[i] / p);
    const double excl = static_cast<double>(half_k * suffix[i + 1] / p);
    const double err = std::max(std::abs(incl - exact), std::abs(excl - exact));
    if (err > sup) {
      sup = err;
      at = s2[i];
    }
    if (i % 2000 == 0) {
      const double quad = half_k * std::exp(marginal_tail_moments_quadrature(prior, s2[i], k).log_b);
      quad_gap = std::max(quad_gap, std::abs(quad / exact - 1.0));
    }
  }
  return {sup <= 0.01, "sup error " + fmt("%.4g", sup) + " at u=" + fmt("%.4g", at) + " over D = (0, " +
                           fmt("%.4f", upper) + "), p=1e5 (tolerance 0.01); closed form vs quadrature rel gap " +
                           fmt("%.2g", quad_gap)};
}

Outcome uniform_convergence() {
  OracleCheckConfig cfg;
  cfg.seed = kSeed;
  const auto report = run_oracle_check(cfg);
  std::vector<double> med;
  std::string list;
  for (const auto& row : report.summary) {
    med.push_back(row.median_sup_error);
    list += (list.empty() ? "" : ", ") + fmt("%.4g", row.median_sup_error);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < med.size(); ++i) monotone = monotone && med[i] <= med[i - 1];
  const double ratio = med[3] / med[1];
  return {monotone && ratio <= 0.5,
          "medians over p=1e2..1e5: " + list + "; ratio p=1e5/p=1e3 " + fmt("%.3f", ratio) + " (needs <= 0.5, monotone)"};
}

// Brute force of the estimator for one coordinate straight from its definition.
long double brute_force(const std::vector<double>& s2, std::size_t i, int k) {
  long double num = 0.0L, den = 0.0L;
  const long double h = k / 2.0L;
  for (double s : s2) {
    if (s >= s2[i]) {
      num += std::pow(static_cast<long double>(s), -(h - 2.0L));
      den += std::pow(static_cast<long double>(s), -(h - 1.0L));
    }
  }
  return std::max(0.0L, h * (num / den - s2[i]));
}

Outcome hand_values() {
  const std::vector<double> s2{1, 2, 4};
  const auto est = nebv_estimate(s2, DegreesOfFreedom(4), 1);
  const double expected[] = {10.0 / 7.0, 4.0 / 3.0, 4.0};
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs(est.values[i] - expected[i]));
    if (i < 2) worst = std::max(worst, std::abs(static_cast<double>(brute_force(s2, i, 4)) - expected[i]));
  }
  const bool flags = !est.protected_flags[0] && !est.protected_flags[1] && est.protected_flags[2];
  return {worst <= 1e-12 && flags, "max deviation from [10/7, 4/3, 4] is " + fmt("%.3g", worst) +
                                       (flags ? "; only the largest is passed through" : "; wrong passthrough flags")};
}

Outcome invariants() {
  Rng rng(kSeed, 0, Stream::kTest);
  const int trials = 1000;
  int scale_fail = 0, perm_fail = 0, neg_fail = 0, topb_fail = 0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t p = 2 + rng.below(200);
    const int k = 3 + static_cast<int>(rng.below(20));
    const std::size_t b = 1 + rng.below(8);
    std::vector<double> s2(p);
    for (auto& s : s2) s = std::exp(rng.normal(0.0, 1.5));
    const auto base = nebv_estimate(s2, DegreesOfFreedom(k), b);

    const double c = std::exp(rng.uniform(-4.0, 4.0));
    std::vector<double> scaled(s2);
    for (auto& s : scaled) s *= c;
    const auto sc = nebv_estimate(scaled, DegreesOfFreedom(k), b);

    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = p - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<double> shuffled(p);
    for (std::size_t i = 0; i < p; ++i) shuffled[i] = s2[perm[i]];
    const auto sh = nebv_estimate(shuffled, DegreesOfFreedom(k), b);

    std::vector<double> sorted(s2);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double cutoff = sorted[std::min(b, p) - 1];

    bool scale_ok = true, perm_ok = true, neg_ok = true, topb_ok = true;
    for (std::size_t i = 0; i < p; ++i) {
      scale_ok = scale_ok && std::abs(sc.values[i] - c * base.values[i]) <= 1e-9 * (c * base.values[i] + c * s2[i]);
      perm_ok = perm_ok && std::abs(sh.values[i] - base.values[perm[i]]) <= 1e-12 * (1.0 + base.values[perm[i]]);
      neg_ok = neg_ok && base.values[i] >= 0.0;
      if (s2[i] >= cutoff) topb_ok = topb_ok && base.values[i] == s2[i] && base.protected_flags[i];
    }
    scale_fail += !scale_ok;
    perm_fail += !perm_ok;
    neg_fail += !neg_ok;
    topb_fail += !topb_ok;
  }
  const int total = scale_fail + perm_fail + neg_fail + topb_fail;
  return {total == 0, std::to_string(trials) + " random inputs per property; failures: scale " +
                          std::to_string(scale_fail) + ", permutation " + std::to_string(perm_fail) +
                          ", nonnegativity " + std::to_string(neg_fail) + ", top-b " + std::to_string(topb_fail)};
}

MetricsSummary run_config(const char* name) {
  RunOptions opt;
  opt.threads = 0;
  opt.keep_records = false;
  return run_scenario(load_scenario(config_path(name), kSeed), opt);
}

Outcome coverage_lognormal() {
  const double bar = 0.95 - 1.96 * std::sqrt(0.95 * 0.05 / 1000.0);
  const auto m = run_config("coverage_lognormal.json");
  bool ok = true;
  std::string nebv, bonf;
  for (std::size_t g = 0; g < m.grid.size(); ++g) {
    const double cn = m.at(g, "nebv").coverage.value, cb = m.at(g, kBonferroniName).coverage.value;
    ok = ok && cn >= bar && cb >= bar;
    nebv += (g ? ", " : "") + fmt("%.3f", cn);
    bonf += (g ? ", " : "") + fmt("%.3f", cb);
  }
  return {ok, "coverage at x=0.2..0.8: nebv " + nebv + "; bonferroni " + bonf + " (needs >= " + fmt("%.4f", bar) + ")"};
}

Outcome length_ratio() {
  const auto m = run_config("coverage_lognormal.json");
  bool ok = true;
  std::string list;
  for (std::size_t g = 0; g < m.grid.size(); ++g) {
    const double r = m.at(g, "nebv").length_ratio.value;
    ok = ok && r < 1.0;
    list += (g ? ", " : "") + fmt("%.3f", r);
  }
  return {ok, "mean nebv/bonferroni length ratio at x=0.2..0.8: " + list + " (needs < 1)"};
}

Outcome risk_ordering() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"risk_invgamma.json", "risk_lognormal.json"}) {
    const auto m = run_config(name);
    std::string list;
    for (std::size_t g = 0; g < m.grid.size(); ++g) {
      const double a = m.at(g, "nebv").risk_l1.value, b = m.at(g, "sample_variance").risk_l1.value;
      ok = ok && a <= b;
      list += (g ? ", " : "") + fmt("%.3g", a) + "/" + fmt("%.3g", b);
    }
    detail += (detail.empty() ? "" : "; ") + m.scenario_id + " L1 risk nebv/sample_variance " + list;
  }
  return {ok, detail};
}

Outcome dependent_coverage() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"dependent_ar.json", "dependent_banded.json"}) {
    const auto m = run_config(name);
    std::string list;
    for (std::size_t g = 0; g < m.grid.size(); ++g) {
      const double c = m.at(g, "nebv").coverage.value;
      ok = ok && c >= 0.93;
      list += (g ? ", " : "") + fmt("%.3f", c);
    }
    detail += (detail.empty() ? "" : "; ") + m.scenario_id + " nebv coverage " + list;
  }
  return {ok, detail + " (needs >= 0.93)"};
}

Outcome discordance() {
  SyntheticExpressionSpec spec;
  spec.seed = kSeed;
  const auto data = make_synthetic_expression(spec);
  DiscordanceConfig cfg;
  cfg.reps = 200;
  cfg.seed = kSeed;
  cfg.threads = 0;
  const auto s = discordance_rate(data, cfg);
  const double sv = s.row("sample_variance").mean, nb = s.row("nebv").mean;
  return {nb < sv, "mean discordance nebv " + fmt("%.4f", nb) + " vs sample_variance " + fmt("%.4f", sv) +
                       " (p=2000, halves of 11/20, 200 splits)"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {"oracle equivalence", oracle_equivalence},
      {"empirical tail identity", empirical_tail_identity},
      {"uniform convergence", uniform_convergence},
      {"hand-computed values", hand_values},
      {"estimator invariants", invariants},
      {"coverage under log-normal prior", coverage_lognormal},
      {"interval length ordering", length_ratio},
      {"risk ordering", risk_ordering},
      {"dependent-design coverage", dependent_coverage},
      {"split-half discordance", discordance},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> which;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      which.push_back(std::stoul(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (which.empty()) {
    for (std::size_t i = 1; i <= criteria().size(); ++i) which.push_back(i);
  }
  bool all = true;
  for (std::size_t n : which) {
    if (n < 1 || n > criteria().size()) {
      std::fprintf(stderr, "no criterion %zu\n", n);
      return 2;
    }
    const auto& c = criteria()[n - 1];
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", n, c.name, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
