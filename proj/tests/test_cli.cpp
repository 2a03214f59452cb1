// Exercises the installed binary end to end: exit codes, determinism of the
// emitted logs, and the run -> stats round trip.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int checks = 0, failures = 0;

void expect(bool ok, const std::string& what) {
  ++checks;
  if (!ok) {
    ++failures;
    std::fprintf(stderr, "FAIL: %s\n", what.c_str());
  }
}

int run_cmd(const std::string& cmd) {
  const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const std::string bin = XMKT_CLI_PATH;
  const std::string cfg_dir = XMKT_CONFIG_SRC_DIR;
  const fs::path work = fs::temp_directory_path() / "xmkt_cli_test";
  fs::remove_all(work);
  fs::create_directories(work);

  // validate: every bundled config parses
  expect(run_cmd(bin + " validate --config " + cfg_dir + "/default.ini") == 0,
         "validate default.ini");
  expect(run_cmd(bin + " validate --config " + cfg_dir + "/table3_sim1.ini") == 0,
         "validate table3_sim1.ini");
  expect(run_cmd(bin + " validate --config " + cfg_dir + "/table3_sim2.ini") == 0,
         "validate table3_sim2.ini");

  // validate: missing file and broken field
  expect(run_cmd(bin + " validate --config /no/such/file.ini") == 2, "missing config exits 2");
  {
    std::ofstream bad(work / "bad.ini");
    bad << "[futures]\nmargin_rate = 0\n";
  }
  expect(run_cmd(bin + " validate --config " + (work / "bad.ini").string()) == 2,
         "margin_rate = 0 exits 2");

  // usage errors
  expect(run_cmd(bin) == 1, "no subcommand exits 1");
  expect(run_cmd(bin + " reproduce --figure fig99 --out " + (work / "r").string()) == 1,
         "unknown figure id exits 1");

  // a small run config for the end-to-end leg
  const fs::path small = work / "small.ini";
  {
    std::ofstream out(small);
    out << "[run]\ndays = 1\nsteps_per_day = 600\nseed = 99\n"
        << "[agents]\ninformed_stock = 40\nuninformed_stock = 120\nnoise_stock = 40\n"
        << "informed_futures = 40\nuninformed_futures = 120\nnoise_futures = 40\n"
        << "[arbitrage]\ncount = 3\n";
  }
  const std::string out_a = (work / "run_a").string();
  const std::string out_b = (work / "run_b").string();
  expect(run_cmd(bin + " run --config " + small.string() + " --out " + out_a) == 0, "run a");
  expect(run_cmd(bin + " run --config " + small.string() + " --out " + out_b) == 0, "run b");
  for (const char* name :
       {"trades.csv", "quotes.csv", "basis.csv", "wealth.csv", "settlement.csv"}) {
    expect(fs::exists(fs::path(out_a) / name), std::string("log exists: ") + name);
    expect(slurp(fs::path(out_a) / name) == slurp(fs::path(out_b) / name),
           std::string("byte-identical across seeds: ") + name);
  }
  expect(fs::exists(fs::path(out_a) / "config_echo.ini"), "config echo written");

  // seed override changes the logs
  const std::string out_c = (work / "run_c").string();
  expect(run_cmd(bin + " run --config " + small.string() + " --seed 123 --out " + out_c) == 0,
         "run with seed override");
  expect(slurp(fs::path(out_a) / "trades.csv") != slurp(fs::path(out_c) / "trades.csv"),
         "different seed changes the trade log");

  // stats on self-produced logs never errors
  expect(run_cmd(bin + " stats --run-dir " + out_a + " --report " + (work / "rep").string()) == 0,
         "stats on run logs");
  expect(fs::exists(work / "rep" / "report.txt"), "report.txt written");
  expect(fs::exists(work / "rep" / "acf_abs.csv"), "acf_abs.csv written");

  // stats on an external basis CSV: basis sections only
  {
    std::ofstream csv(work / "ext.csv");
    csv << "step,F,S\n";
    for (int i = 0; i < 400; ++i)
      csv << i << "," << 3010.0 - 0.02 * i + 0.3 * ((i * 37) % 11 - 5) << "," << 3000.0 << "\n";
  }
  expect(run_cmd(bin + " stats --basis-csv " + (work / "ext.csv").string() + " --report " +
                 (work / "rep_ext").string()) == 0,
         "stats on an external csv");
  {
    const std::string rep = slurp(work / "rep_ext" / "report.txt");
    expect(rep.find("[spread] absent") != std::string::npos,
           "external csv report marks spreads absent");
  }

  // corrupt CSV row: nonzero exit naming the line
  {
    std::ofstream csv(work / "corrupt.csv");
    csv << "step,F,S\n1,3000,3000\n2,zzz,3000\n";
  }
  expect(run_cmd(bin + " stats --basis-csv " + (work / "corrupt.csv").string() + " --report " +
                 (work / "rep_bad").string()) == 3,
         "corrupt csv exits 3");

  std::printf("test_cli: %d checks, %d failures\n", checks, failures);
  return failures == 0 ? 0 : 1;
}
