#include "xmkt/stats/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "xmkt/csv.hpp"

namespace xmkt::stats {

namespace {

void add_line(std::string& out, const char* fmt, auto... args) {
  char buf[512];
  if constexpr (sizeof...(args) == 0) {
    std::snprintf(buf, sizeof buf, "%s", fmt);
  } else {
    std::snprintf(buf, sizeof buf, fmt, args...);
  }
  out += buf;
  out += '\n';
}

void write_histogram_csv(const std::string& path, const Histogram& h) {
  CsvWriter w;
  if (!w.open(path, "bin_left,bin_right,count")) return;
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    w.writef("%.8g,%.8g,%ld\n", h.edges[i], h.edges[i + 1], h.counts[i]);
}

void write_acf_csv(const std::string& path, const AcfResult& acf) {
  CsvWriter w;
  if (!w.open(path, "lag,acf,band")) return;
  for (std::size_t k = 0; k < acf.values.size(); ++k)
    w.writef("%zu,%.8g,%.8g\n", k + 1, acf.values[k], acf.band);
}

}  // namespace

Report build_report(const ReportInputs& in) {
  Report rep;
  const bool have_index = in.index_level.size() == in.futures_price.size() &&
                          !in.index_level.empty();

  if (have_index) {
    rep.basis = compute_basis_series(in.futures_price, in.index_level);
    rep.basis_slope = rep.basis.size() >= 2 ? ols_slope(rep.basis) : 0.0;
    if (rep.basis.size() >= 50) {
      rep.basis_gev = fit_gev(rep.basis);
      rep.basis_gaussian_loglik = gaussian_loglik(rep.basis);
    }
  }

  if (in.futures_price.size() >= 2) {
    rep.returns = log_return_series(in.futures_price);
    rep.abs_returns = absolute(rep.returns);
    if (rep.returns.size() >= 4 && variance(rep.returns) > 0.0) {
      rep.kurtosis = excess_kurtosis(rep.returns);
      const int lags = std::min<int>(in.acf_lags, static_cast<int>(rep.returns.size()) - 1);
      if (lags >= 1) {
        rep.acf_raw = acf(rep.returns, lags);
        rep.acf_abs = acf(rep.abs_returns, lags);
      }
      if (rep.returns.size() >= 500) rep.garch = fit_ar2_garch11(rep.returns);
    }
  }

  std::string& t = rep.text;
  add_line(t, "statistics report: %s", in.label.c_str());
  add_line(t, "observations: %zu", in.futures_price.size());
  if (have_index) {
    add_line(t, "");
    add_line(t, "[basis]  rho = F - S");
    add_line(t, "mean %.4f  sd %.4f  min %.4f  max %.4f", mean(rep.basis),
             std::sqrt(variance(rep.basis)),
             *std::min_element(rep.basis.begin(), rep.basis.end()),
             *std::max_element(rep.basis.begin(), rep.basis.end()));
    add_line(t, "OLS slope on step index: %.6g points/step", rep.basis_slope);
    if (rep.basis_gev) {
      add_line(t, "GEV fit: location %.4f  scale %.4f  shape %.4f  loglik %.2f  KS %.4f",
               rep.basis_gev->location, rep.basis_gev->scale, rep.basis_gev->shape,
               rep.basis_gev->loglik, rep.basis_gev->ks_stat);
      add_line(t, "Gaussian loglik %.2f  (GEV - Gaussian = %.2f)", rep.basis_gaussian_loglik,
               rep.basis_gev->loglik - rep.basis_gaussian_loglik);
    }
  } else {
    add_line(t, "[basis] absent: input had no aligned index series");
  }

  add_line(t, "");
  if (in.have_spreads) {
    add_line(t, "[spread]");
    add_line(t, "quoted steps %zu  skipped (one-sided book) %ld", in.spreads.size(),
             in.spreads_skipped);
    if (!in.spreads.empty())
      add_line(t, "mean %.4f  sd %.4f", mean(in.spreads), std::sqrt(variance(in.spreads)));
  } else {
    add_line(t, "[spread] absent: no quote log in the input");
  }

  add_line(t, "");
  if (!rep.returns.empty()) {
    add_line(t, "[returns]  r_t = ln(F_t / F_{t-1})");
    add_line(t, "n %zu  sd %.6g  excess kurtosis %.3f", rep.returns.size(),
             std::sqrt(variance(rep.returns)), rep.kurtosis);
  } else {
    add_line(t, "[returns] absent: need at least two prices");
  }

  if (rep.acf_abs) {
    int outside = 0;
    const int upto = std::min<int>(50, static_cast<int>(rep.acf_abs->values.size()));
    for (int k = 1; k <= upto; ++k)
      if (std::fabs(rep.acf_abs->at_lag(k)) > rep.acf_abs->band) ++outside;
    add_line(t, "");
    add_line(t, "[acf]  95%% band +/-%.4f", rep.acf_abs->band);
    add_line(t, "|r| lags 1..%d outside band: %d", upto, outside);
  }

  if (rep.garch) {
    add_line(t, "");
    add_line(t, "[AR(2)-GARCH(1,1)]  (standard errors in parentheses)");
    add_line(t, "%-18s %-12s %-12s %-12s %-12s %-12s", "series", "a", "b", "c", "alpha", "beta");
    add_line(t, "%-18s %-12.6f %-12.6f %-12.3e %-12.6f %-12.6f", in.label.c_str(),
             rep.garch->ar1, rep.garch->ar2, rep.garch->c, rep.garch->alpha, rep.garch->beta);
    add_line(t, "%-18s (%.6f)   (%.6f)   (%.2e)    (%.6f)   (%.6f)", "",
             rep.garch->se_ar1, rep.garch->se_ar2, rep.garch->se_c, rep.garch->se_alpha,
             rep.garch->se_beta);
    add_line(t, "loglik %.2f  persistence %.4f  converged %s", rep.garch->loglik,
             rep.garch->persistence(), rep.garch->converged ? "yes" : "no");
  }
  return rep;
}

std::vector<std::string> write_report_files(const Report& report, const ReportInputs& in,
                                            const std::string& dir) {
  std::vector<std::string> written;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto p = [&](const char* name) { return dir + "/" + name; };

  {
    std::FILE* f = std::fopen(p("report.txt").c_str(), "wb");
    if (f) {
      std::fputs(report.text.c_str(), f);
      std::fclose(f);
      written.push_back(p("report.txt"));
    }
  }
  if (!report.basis.empty()) {
    CsvWriter w;
    if (w.open(p("basis_series.csv"), "step,basis")) {
      for (std::size_t i = 0; i < report.basis.size(); ++i)
        w.writef("%zu,%.6f\n", i, report.basis[i]);
      written.push_back(p("basis_series.csv"));
    }
    write_histogram_csv(p("basis_distribution.csv"), histogram(report.basis, 60));
    written.push_back(p("basis_distribution.csv"));
  }
  if (in.have_spreads && !in.spreads.empty()) {
    write_histogram_csv(p("spread_distribution.csv"), histogram(in.spreads, 60));
    written.push_back(p("spread_distribution.csv"));
  }
  if (!report.returns.empty()) {
    write_histogram_csv(p("return_distribution.csv"), histogram(report.returns, 80));
    written.push_back(p("return_distribution.csv"));
  }
  if (report.acf_raw) {
    write_acf_csv(p("acf_raw.csv"), *report.acf_raw);
    written.push_back(p("acf_raw.csv"));
  }
  if (report.acf_abs) {
    write_acf_csv(p("acf_abs.csv"), *report.acf_abs);
    written.push_back(p("acf_abs.csv"));
  }
  return written;
}

}  // namespace xmkt::stats
