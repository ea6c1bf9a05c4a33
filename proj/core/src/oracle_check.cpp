#include "nebv/oracle_check.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "nebv/csv.hpp"
#include "nebv/nebv.hpp"
#include "nebv/random.hpp"
#include "parallel.hpp"

namespace nebv {

namespace {

bool has_closed_form(const PriorSpec& prior) {
  if (prior.get_if<InverseGammaPrior>() || prior.get_if<PointMassPrior>()) return true;
  return false;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

OracleCheckReport run_oracle_check(const OracleCheckConfig& cfg) {
  cfg.k.require_at_least_three("oracle check");
  if (cfg.p_grid.empty() || cfg.delta_grid.empty()) throw std::invalid_argument("oracle check: empty p or delta grid");
  if (cfg.repeats < 1) throw std::invalid_argument("oracle check: repeats must be >= 1");
  for (std::size_t p : cfg.p_grid) {
    if (p < 1) throw std::invalid_argument("oracle check: p must be >= 1");
  }
  for (double d : cfg.delta_grid) {
    if (!(d > 0.0)) throw std::invalid_argument("oracle check: delta must be > 0");
  }
  if (const auto* ig = cfg.prior.get_if<InverseGammaPrior>(); ig && !(ig->shape + cfg.k.half() > 2.0)) {
    throw std::invalid_argument("oracle check: Bayes rule undefined for " + cfg.prior.to_string() +
                                " with k=" + std::to_string(cfg.k.value()) + " (needs alpha + k/2 > 2)");
  }

  std::vector<double> upper(cfg.delta_grid.size());
  for (std::size_t d = 0; d < upper.size(); ++d) {
    upper[d] = tail_domain_upper(cfg.prior, cfg.k, cfg.delta_grid[d], cfg.quadrature);
  }
  const double widest = *std::max_element(upper.begin(), upper.end());
  const bool closed = has_closed_form(cfg.prior);

  const std::size_t n_p = cfg.p_grid.size();
  const std::size_t n_d = cfg.delta_grid.size();
  std::vector<OracleCheckRecord> records(n_p * cfg.repeats * n_d);

  auto task = [&](std::size_t t) {
    const std::size_t pi = t / cfg.repeats;
    const std::size_t r = t % cfg.repeats;
    const std::size_t p = cfg.p_grid[pi];
    Rng rng(cfg.seed, (static_cast<std::uint64_t>(pi) << 32) | r, Stream::kOracleSample);
    std::vector<double> s2(p);
    for (auto& s : s2) s = sample_scaled_chisq(draw_prior(cfg.prior, rng), cfg.k, rng);
    const SuffixTables tables(s2, cfg.k);

    // Candidate points: sorted sample values inside the widest domain.
    const auto sorted = tables.sorted();
    std::size_t n_cand = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), widest) - sorted.begin());
    std::vector<std::size_t> positions;
    if (closed || n_cand <= cfg.max_numeric_points) {
      for (std::size_t i = 0; i < n_cand; ++i) positions.push_back(i);
    } else {
      const std::size_t m = std::max<std::size_t>(cfg.max_numeric_points, 2);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t pos = static_cast<std::size_t>(std::llround(static_cast<double>(i) * (n_cand - 1) / (m - 1)));
        if (positions.empty() || positions.back() != pos) positions.push_back(pos);
      }
    }
    std::vector<double> err(positions.size());
    for (std::size_t j = 0; j < positions.size(); ++j) {
      const double s = sorted[positions[j]];
      err[j] = std::abs(tables.estimate_at(s) - bayes_oracle(cfg.prior, s, cfg.k, cfg.quadrature));
    }
    for (std::size_t d = 0; d < n_d; ++d) {
      OracleCheckRecord& rec = records[(pi * cfg.repeats + r) * n_d + d];
      rec.p = p;
      rec.delta = cfg.delta_grid[d];
      rec.repeat = r;
      rec.domain_upper = upper[d];
      for (std::size_t j = 0; j < positions.size(); ++j) {
        if (!(sorted[positions[j]] < upper[d])) break;
        ++rec.n_in_domain;
        if (err[j] > rec.sup_error) {
          rec.sup_error = err[j];
          rec.argmax_s2 = sorted[positions[j]];
        }
      }
    }
  };
  detail::parallel_for(n_p * cfg.repeats, cfg.threads, task, [&](std::size_t t, std::exception_ptr e) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(e);
    } catch (const std::exception& ex) {
      what = ex.what();
    } catch (...) {
    }
    throw std::runtime_error("oracle check failed at p=" + std::to_string(cfg.p_grid[t / cfg.repeats]) +
                             ", repeat " + std::to_string(t % cfg.repeats) + " (seed " +
                             std::to_string(cfg.seed) + "): " + what);
  });

  OracleCheckReport report;
  for (std::size_t pi = 0; pi < n_p; ++pi) {
    for (std::size_t d = 0; d < n_d; ++d) {
      std::vector<double> errs;
      for (std::size_t r = 0; r < cfg.repeats; ++r) errs.push_back(records[(pi * cfg.repeats + r) * n_d + d].sup_error);
      OracleCheckSummary row;
      row.p = cfg.p_grid[pi];
      row.delta = cfg.delta_grid[d];
      row.domain_upper = upper[d];
      row.repeats = cfg.repeats;
      row.median_sup_error = median(errs);
      row.max_sup_error = *std::max_element(errs.begin(), errs.end());
      double sum = 0.0;
      for (double e : errs) sum += e;
      row.mean_sup_error = sum / static_cast<double>(errs.size());
      report.summary.push_back(row);
    }
  }
  report.records = std::move(records);
  return report;
}

void write_oracle_summary_csv(const OracleCheckReport& report, std::ostream& out) {
  CsvWriter csv(out);
  csv.row({"p", "delta", "domain_upper", "median_sup_error", "mean_sup_error", "max_sup_error", "repeats"});
  for (const auto& row : report.summary) {
    csv.field(row.p)
        .field(row.delta)
        .field(row.domain_upper)
        .field(row.median_sup_error)
        .field(row.mean_sup_error)
        .field(row.max_sup_error)
        .field(row.repeats);
    csv.end_row();
  }
}

void write_oracle_detail_csv(const OracleCheckReport& report, std::ostream& out) {
  CsvWriter csv(out);
  csv.row({"p", "delta", "repeat", "domain_upper", "n_in_domain", "sup_error", "argmax_s2"});
  for (const auto& rec : report.records) {
    csv.field(rec.p)
        .field(rec.delta)
        .field(rec.repeat)
        .field(rec.domain_upper)
        .field(rec.n_in_domain)
        .field(rec.sup_error)
        .field(rec.argmax_s2);
    csv.end_row();
  }
}

}  // namespace nebv
