#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xmkt/stats/garch.hpp"
#include "xmkt/stats/gev.hpp"
#include "xmkt/stats/series.hpp"

namespace xmkt::stats {

struct ReportInputs {
  std::vector<double> futures_price;  // per-step period price
  std::vector<double> index_level;    // aligned; may be empty (basis-only input)
  std::vector<double> spreads;        // per-step best-ask minus best-bid, where quoted
  long spreads_skipped = 0;
  bool have_spreads = false;
  int acf_lags = 200;
  std::string label = "simulated futures";
};

struct Report {
  std::vector<double> basis;
  std::vector<double> returns;
  std::vector<double> abs_returns;
  std::optional<GevFit> basis_gev;
  double basis_gaussian_loglik = 0;
  double basis_slope = 0;
  double kurtosis = 0;
  std::optional<AcfResult> acf_raw;
  std::optional<AcfResult> acf_abs;
  std::optional<GarchFit> garch;
  std::string text;  // human-readable summary, Table-2-style estimate block
};

Report build_report(const ReportInputs& in);

// Plot-ready CSVs: basis/spread/return distributions plus both ACFs.
// Returns the files written.
std::vector<std::string> write_report_files(const Report& report, const ReportInputs& in,
                                            const std::string& dir);

}  // namespace xmkt::stats
