#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xmkt/config.hpp"
#include "xmkt/csv.hpp"
#include "xmkt/engine.hpp"
#include "xmkt/stats/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

#ifndef XMKT_BUNDLED_CONFIG_DIR
#define XMKT_BUNDLED_CONFIG_DIR "configs"
#endif

std::string bundled_config_dir() {
  if (const char* env = std::getenv("XMKT_CONFIG_DIR")) return env;
  return XMKT_BUNDLED_CONFIG_DIR;
}

std::string default_out_root() {
  if (const char* env = std::getenv("XMKT_OUT")) return env;
  return "out";
}

xmkt::SimConfig load_or_default(const std::string& config_path) {
  if (config_path.empty()) {
    auto cfg = xmkt::SimConfig::defaults();
    xmkt::validate_config(cfg);
    return cfg;
  }
  return xmkt::load_config(config_path);
}

int do_run(const xmkt::SimConfig& cfg, const std::string& out_dir, bool quiet,
           xmkt::RunRecord* record_out = nullptr) {
  xmkt::RunSinks sinks;
  if (!sinks.open_all(out_dir)) {
    std::fprintf(stderr, "error: cannot create output directory '%s'\n", out_dir.c_str());
    return kExitRuntime;
  }
  {
    std::ofstream echo(out_dir + "/config_echo.ini");
    echo << xmkt::config_echo(cfg);
  }
  xmkt::RunRecord rec = xmkt::run(cfg, &sinks);
  if (!quiet) {
    std::printf("run complete: %lld steps, %llu trades, %.1f s\n",
                static_cast<long long>(cfg.total_steps()),
                static_cast<unsigned long long>(rec.trade_count), rec.runtime_seconds);
    std::printf("logs written to %s\n", out_dir.c_str());
  }
  if (record_out) *record_out = std::move(rec);
  return kExitOk;
}

struct StatsInputs {
  xmkt::stats::ReportInputs report;
  bool ok = false;
};

StatsInputs load_stats_from_run_dir(const std::string& dir) {
  StatsInputs in;
  const xmkt::CsvTable basis = xmkt::read_csv(dir + "/basis.csv");
  const int f_col = basis.column("F");
  const int s_col = basis.column("S");
  if (f_col < 0 || s_col < 0)
    throw xmkt::CsvError("basis.csv must have columns F and S", 1);
  for (std::size_t r = 0; r < basis.rows.size(); ++r) {
    in.report.futures_price.push_back(xmkt::csv_number(basis, r, f_col));
    in.report.index_level.push_back(xmkt::csv_number(basis, r, s_col));
  }
  const std::string quotes_path = dir + "/quotes.csv";
  if (std::filesystem::exists(quotes_path)) {
    const xmkt::CsvTable quotes = xmkt::read_csv(quotes_path);
    const int inst = quotes.column("instrument");
    const int bb = quotes.column("best_bid");
    const int ba = quotes.column("best_ask");
    if (inst >= 0 && bb >= 0 && ba >= 0) {
      in.report.have_spreads = true;
      for (std::size_t r = 0; r < quotes.rows.size(); ++r) {
        if (quotes.rows[r][static_cast<std::size_t>(inst)] != "fut") continue;
        const std::string& b = quotes.rows[r][static_cast<std::size_t>(bb)];
        const std::string& a = quotes.rows[r][static_cast<std::size_t>(ba)];
        if (b.empty() || a.empty()) {
          ++in.report.spreads_skipped;
          continue;
        }
        in.report.spreads.push_back(xmkt::csv_number(quotes, r, ba) -
                                    xmkt::csv_number(quotes, r, bb));
      }
    }
  }
  in.ok = true;
  return in;
}

StatsInputs load_stats_from_basis_csv(const std::string& path) {
  StatsInputs in;
  const xmkt::CsvTable t = xmkt::read_csv(path);
  const int f_col = t.column("F");
  const int s_col = t.column("S");
  if (f_col < 0)
    throw xmkt::CsvError("expected a column named F (and optionally S)", 1);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    in.report.futures_price.push_back(xmkt::csv_number(t, r, f_col));
    if (s_col >= 0) in.report.index_level.push_back(xmkt::csv_number(t, r, s_col));
  }
  in.ok = true;
  return in;
}

int do_stats(const StatsInputs& in, const std::string& report_dir, int lags) {
  xmkt::stats::ReportInputs inputs = in.report;
  inputs.acf_lags = lags;
  const xmkt::stats::Report rep = xmkt::stats::build_report(inputs);
  const auto files = xmkt::stats::write_report_files(rep, inputs, report_dir);
  std::fputs(rep.text.c_str(), stdout);
  std::printf("\nwrote %zu files under %s\n", files.size(), report_dir.c_str());
  return kExitOk;
}

int do_reproduce(const std::string& figure, const std::string& out_root) {
  const std::string cfg_dir = bundled_config_dir();
  const std::vector<std::string> known{"fig1", "fig2", "fig3", "fig4", "fig5", "table2", "table3"};
  if (std::find(known.begin(), known.end(), figure) == known.end()) {
    std::fprintf(stderr, "error: unknown figure id '%s'; valid:", figure.c_str());
    for (const auto& k : known) std::fprintf(stderr, " %s", k.c_str());
    std::fprintf(stderr, "\n");
    return kExitUsage;
  }

  auto one = [&](const std::string& config_file, const std::string& label) -> int {
    xmkt::SimConfig cfg = xmkt::load_config(cfg_dir + "/" + config_file);
    const std::string dir = out_root + "/" + figure + (label.empty() ? "" : "_" + label);
    const int rc = do_run(cfg, dir, true);
    if (rc != kExitOk) return rc;
    StatsInputs in = load_stats_from_run_dir(dir);
    in.report.label = label.empty() ? "simulated futures" : label;
    return do_stats(in, dir + "/stats", 200);
  };

  if (figure == "table3") {
    const int rc1 = one("table3_sim1.ini", "sim1");
    if (rc1 != kExitOk) return rc1;
    return one("table3_sim2.ini", "sim2");
  }
  const int rc = one("default.ini", "");
  if (rc != kExitOk) return rc;
  std::printf("\n%s data:\n", figure.c_str());
  const std::string dir = out_root + "/" + figure;
  if (figure == "fig1") std::printf("  %s/stats/basis_series.csv (basis time series)\n", dir.c_str());
  if (figure == "fig2") std::printf("  %s/stats/basis_distribution.csv (+ GEV fit in report.txt)\n", dir.c_str());
  if (figure == "fig3") std::printf("  %s/stats/spread_distribution.csv\n", dir.c_str());
  if (figure == "fig4") std::printf("  %s/stats/return_distribution.csv\n", dir.c_str());
  if (figure == "fig5") std::printf("  %s/stats/acf_abs.csv\n", dir.c_str());
  if (figure == "table2") std::printf("  %s/stats/report.txt (AR(2)-GARCH(1,1) block)\n", dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agent-based stock / index-futures market simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, basis_csv, report_dir, figure;
  long long seed = -1;
  int lags = 200;

  auto* cmd_run = app.add_subcommand("run", "execute a simulation and write CSV logs");
  cmd_run->add_option("--config", config_path, "config file (bundled defaults when omitted)");
  cmd_run->add_option("--seed", seed, "master seed override");
  cmd_run->add_option("--out", out_dir, "output directory");

  auto* cmd_stats = app.add_subcommand("stats", "statistics report from run logs or a CSV");
  cmd_stats->add_option("--run-dir", run_dir, "directory produced by `run`");
  cmd_stats->add_option("--basis-csv", basis_csv, "external CSV with columns step,F,S");
  cmd_stats->add_option("--report", report_dir, "report output directory");
  cmd_stats->add_option("--lags", lags, "ACF lags (default 200)");

  auto* cmd_validate = app.add_subcommand("validate", "check a config file");
  cmd_validate->add_option("--config", config_path, "config file")->required();

  auto* cmd_repro = app.add_subcommand("reproduce", "rebuild the data behind a figure or table");
  cmd_repro->add_option("--figure", figure, "fig1..fig5, table2 or table3")->required();
  cmd_repro->add_option("--out", out_dir, "output root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_run->parsed()) {
      xmkt::SimConfig cfg = load_or_default(config_path);
      if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
      if (out_dir.empty()) out_dir = default_out_root() + "/run_seed" + std::to_string(cfg.seed);
      return do_run(cfg, out_dir, false);
    }
    if (cmd_stats->parsed()) {
      if (run_dir.empty() == basis_csv.empty()) {
        std::fprintf(stderr, "error: pass exactly one of --run-dir or --basis-csv\n");
        return kExitUsage;
      }
      StatsInputs in =
          run_dir.empty() ? load_stats_from_basis_csv(basis_csv) : load_stats_from_run_dir(run_dir);
      if (report_dir.empty())
        report_dir = (run_dir.empty() ? default_out_root() : run_dir) + "/stats";
      return do_stats(in, report_dir, lags);
    }
    if (cmd_validate->parsed()) {
      xmkt::load_config(config_path);
      std::printf("%s: ok\n", config_path.c_str());
      return kExitOk;
    }
    if (cmd_repro->parsed()) {
      if (out_dir.empty()) out_dir = default_out_root();
      return do_reproduce(figure, out_dir);
    }
  } catch (const xmkt::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const xmkt::CsvError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
