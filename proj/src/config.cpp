#include "xmkt/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace xmkt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

IniFile IniFile::parse_string(const std::string& text, const std::string& origin) {
  IniFile ini;
  std::istringstream in(text);
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin, "unterminated section header at line " + std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin, "expected key = value at line " + std::to_string(line_no));
    Entry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty())
      throw ConfigError(origin, "empty key at line " + std::to_string(line_no));
    ini.entries.push_back(std::move(e));
  }
  return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "file not found");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

const IniFile::Entry* IniFile::find(const std::string& section, const std::string& key) const {
  for (const auto& e : entries)
    if (e.section == section && e.key == key) return &e;
  return nullptr;
}

std::vector<const IniFile::Entry*> IniFile::find_all(const std::string& section,
                                                     const std::string& key) const {
  std::vector<const Entry*> out;
  for (const auto& e : entries)
    if (e.section == section && e.key == key) out.push_back(&e);
  return out;
}

namespace {

double parse_number(const std::string& field, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError(field, "'" + value + "' is not a number");
  return v;
}

struct Reader {
  const IniFile& ini;

  double number(const std::string& section, const std::string& key, double fallback) const {
    const auto* e = ini.find(section, key);
    return e ? parse_number(section + "." + key, e->value) : fallback;
  }
  long long integer(const std::string& section, const std::string& key, long long fallback) const {
    const double v = number(section, key, static_cast<double>(fallback));
    const long long i = static_cast<long long>(std::llround(v));
    if (static_cast<double>(i) != v)
      throw ConfigError(section + "." + key, "expected an integer");
    return i;
  }
};

}  // namespace

SimConfig config_from_ini(const IniFile& ini) {
  SimConfig cfg = SimConfig::defaults();
  Reader r{ini};

  cfg.days = static_cast<int>(r.integer("run", "days", cfg.days));
  cfg.steps_per_day = static_cast<int>(r.integer("run", "steps_per_day", cfg.steps_per_day));
  cfg.seed = static_cast<std::uint64_t>(r.integer("run", "seed", static_cast<long long>(cfg.seed)));

  cfg.stock_tick = r.number("stocks", "tick", cfg.stock_tick);
  cfg.stock_lot = r.integer("stocks", "lot", cfg.stock_lot);
  auto stock_lines = ini.find_all("stocks", "stock");
  if (!stock_lines.empty()) {
    cfg.stocks.clear();
    for (const auto* e : stock_lines) {
      std::istringstream ss(e->value);
      StockSpec s;
      if (!(ss >> s.id >> s.initial_value >> s.sigma >> s.shares_100m))
        throw ConfigError("stocks.stock",
                          "line " + std::to_string(e->line) +
                              ": expected 'id initial_value sigma shares_100m'");
      std::string extra;
      if (ss >> extra)
        throw ConfigError("stocks.stock", "line " + std::to_string(e->line) + ": trailing token '" +
                                              extra + "'");
      cfg.stocks.push_back(s);
    }
  }

  cfg.futures.expiry_day = static_cast<int>(r.integer("futures", "expiry_day", cfg.days));
  cfg.futures.annual_rate = r.number("futures", "annual_rate", cfg.futures.annual_rate);
  cfg.futures.trading_days_per_year = static_cast<int>(
      r.integer("futures", "trading_days_per_year", cfg.futures.trading_days_per_year));
  cfg.futures.margin_rate = r.number("futures", "margin_rate", cfg.futures.margin_rate);
  cfg.futures.multiplier = r.number("futures", "multiplier", cfg.futures.multiplier);
  cfg.futures.tick_points = r.number("futures", "tick", cfg.futures.tick_points);

  auto& a = cfg.agents;
  a.informed_stock = static_cast<int>(r.integer("agents", "informed_stock", a.informed_stock));
  a.uninformed_stock =
      static_cast<int>(r.integer("agents", "uninformed_stock", a.uninformed_stock));
  a.noise_stock = static_cast<int>(r.integer("agents", "noise_stock", a.noise_stock));
  a.informed_futures =
      static_cast<int>(r.integer("agents", "informed_futures", a.informed_futures));
  a.uninformed_futures =
      static_cast<int>(r.integer("agents", "uninformed_futures", a.uninformed_futures));
  a.noise_futures = static_cast<int>(r.integer("agents", "noise_futures", a.noise_futures));
  a.alpha_min = r.number("agents", "alpha_min", a.alpha_min);
  a.alpha_max = r.number("agents", "alpha_max", a.alpha_max);
  a.tau_min = static_cast<int>(r.integer("agents", "tau_min", a.tau_min));
  a.tau_max = static_cast<int>(r.integer("agents", "tau_max", a.tau_max));
  a.max_order_lots = r.integer("agents", "max_order_lots", a.max_order_lots);
  a.futures_max_order_lots =
      r.integer("agents", "futures_max_order_lots", a.futures_max_order_lots);
  a.noise_order_lots = static_cast<int>(r.integer("agents", "noise_order_lots", a.noise_order_lots));
  a.price_delta = r.number("agents", "price_delta", a.price_delta);
  a.futures_price_delta = r.number("agents", "futures_price_delta", a.futures_price_delta);
  a.arrival_mean = r.number("agents", "arrival_mean", a.arrival_mean);
  a.stock_position_min = r.integer("agents", "stock_position_min", a.stock_position_min);
  a.stock_position_max = r.integer("agents", "stock_position_max", a.stock_position_max);
  a.futures_trader_cash = static_cast<Cents>(
      std::llround(r.number("agents", "futures_cash", static_cast<double>(a.futures_trader_cash) / 100.0) * 100.0));

  a.arbitrageurs = static_cast<int>(r.integer("arbitrage", "count", a.arbitrageurs));
  a.kappa_min = r.number("arbitrage", "profit_min", a.kappa_min);
  a.kappa_max = r.number("arbitrage", "profit_max", a.kappa_max);
  a.close_premium = r.number("arbitrage", "close_premium", a.close_premium);
  a.safety_ratio = r.number("arbitrage", "safety_ratio", a.safety_ratio);
  a.arbitrageur_cash = static_cast<Cents>(
      std::llround(r.number("arbitrage", "cash", static_cast<double>(a.arbitrageur_cash) / 100.0) * 100.0));

  validate_config(cfg);
  return cfg;
}

SimConfig load_config(const std::string& path) { return config_from_ini(IniFile::parse_file(path)); }

void validate_config(const SimConfig& cfg) {
  auto require = [](bool ok, const std::string& field, const std::string& msg) {
    if (!ok) throw ConfigError(field, msg);
  };
  require(cfg.days >= 1, "run.days", "must be >= 1");
  require(cfg.steps_per_day >= 1, "run.steps_per_day", "must be >= 1");
  require(cfg.stock_tick > 0, "stocks.tick", "must be > 0");
  require(cfg.stock_lot >= 1, "stocks.lot", "must be >= 1");
  require(!cfg.stocks.empty(), "stocks.stock", "at least one stock required");
  for (std::size_t i = 0; i < cfg.stocks.size(); ++i) {
    const auto& s = cfg.stocks[i];
    const std::string path = "stocks.stock[" + std::to_string(i) + "]";
    require(s.initial_value > 0, path, "initial value must be > 0");
    require(s.sigma >= 0, path, "sigma must be >= 0");
    require(s.shares_100m > 0, path, "shares must be > 0");
  }
  require(cfg.futures.expiry_day == cfg.days, "futures.expiry_day",
          "must equal run.days (the contract expires when the run ends)");
  require(cfg.futures.annual_rate >= 0, "futures.annual_rate", "must be >= 0");
  require(cfg.futures.trading_days_per_year >= 1, "futures.trading_days_per_year", "must be >= 1");
  require(cfg.futures.margin_rate > 0 && cfg.futures.margin_rate <= 1, "futures.margin_rate",
          "must be in (0, 1]");
  require(cfg.futures.multiplier > 0, "futures.multiplier", "must be > 0");
  require(cfg.futures.tick_points > 0, "futures.tick", "must be > 0");

  const auto& a = cfg.agents;
  auto nonneg = [&](int v, const char* f) { require(v >= 0, f, "must be >= 0"); };
  nonneg(a.informed_stock, "agents.informed_stock");
  nonneg(a.uninformed_stock, "agents.uninformed_stock");
  nonneg(a.noise_stock, "agents.noise_stock");
  nonneg(a.informed_futures, "agents.informed_futures");
  nonneg(a.uninformed_futures, "agents.uninformed_futures");
  nonneg(a.noise_futures, "agents.noise_futures");
  nonneg(a.arbitrageurs, "arbitrage.count");
  require(a.alpha_min > 0 && a.alpha_min <= a.alpha_max, "agents.alpha_min",
          "need 0 < alpha_min <= alpha_max");
  require(a.tau_min >= 2 && a.tau_min <= a.tau_max, "agents.tau_min",
          "need 2 <= tau_min <= tau_max");
  require(a.price_delta > 0 && a.price_delta < 0.5, "agents.price_delta", "must be in (0, 0.5)");
  require(a.futures_price_delta > 0 && a.futures_price_delta < 0.5, "agents.futures_price_delta",
          "must be in (0, 0.5)");
  require(a.arrival_mean >= 1, "agents.arrival_mean", "must be >= 1 step");
  require(a.stock_position_min >= cfg.stock_lot && a.stock_position_min <= a.stock_position_max,
          "agents.stock_position_min", "need lot <= min <= max");
  require(a.stock_position_min % cfg.stock_lot == 0 && a.stock_position_max % cfg.stock_lot == 0,
          "agents.stock_position_min", "initial positions must be lot multiples");
  require(a.futures_trader_cash > 0, "agents.futures_cash", "must be > 0");
  require(a.arbitrageur_cash > 0, "arbitrage.cash", "must be > 0");
  require(a.kappa_min <= a.kappa_max, "arbitrage.profit_min", "need profit_min <= profit_max");
  require(a.safety_ratio > 0 && a.safety_ratio <= 1, "arbitrage.safety_ratio",
          "must be in (0, 1]");
}

std::string config_echo(const SimConfig& cfg) {
  char buf[512];
  std::string out;
  auto add = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  add("[run]\ndays = %d\nsteps_per_day = %d\nseed = %llu\n\n", cfg.days, cfg.steps_per_day,
      static_cast<unsigned long long>(cfg.seed));
  add("[stocks]\ntick = %g\nlot = %lld\n", cfg.stock_tick,
      static_cast<long long>(cfg.stock_lot));
  for (const auto& s : cfg.stocks)
    add("stock = %d %g %g %g\n", s.id, s.initial_value, s.sigma, s.shares_100m);
  add("\n[futures]\nexpiry_day = %d\nannual_rate = %g\ntrading_days_per_year = %d\n",
      cfg.futures.expiry_day, cfg.futures.annual_rate, cfg.futures.trading_days_per_year);
  add("margin_rate = %g\nmultiplier = %g\ntick = %g\n\n", cfg.futures.margin_rate,
      cfg.futures.multiplier, cfg.futures.tick_points);
  const auto& a = cfg.agents;
  add("[agents]\ninformed_stock = %d\nuninformed_stock = %d\nnoise_stock = %d\n",
      a.informed_stock, a.uninformed_stock, a.noise_stock);
  add("informed_futures = %d\nuninformed_futures = %d\nnoise_futures = %d\n", a.informed_futures,
      a.uninformed_futures, a.noise_futures);
  add("alpha_min = %g\nalpha_max = %g\ntau_min = %d\ntau_max = %d\n", a.alpha_min, a.alpha_max,
      a.tau_min, a.tau_max);
  add("noise_order_lots = %d\n", a.noise_order_lots);
  add("futures_max_order_lots = %lld\n", static_cast<long long>(a.futures_max_order_lots));
  add("max_order_lots = %lld\nprice_delta = %g\nfutures_price_delta = %g\narrival_mean = %g\n",
      static_cast<long long>(a.max_order_lots), a.price_delta, a.futures_price_delta,
      a.arrival_mean);
  add("stock_position_min = %lld\nstock_position_max = %lld\nfutures_cash = %.2f\n\n",
      static_cast<long long>(a.stock_position_min), static_cast<long long>(a.stock_position_max),
      static_cast<double>(a.futures_trader_cash) / 100.0);
  add("[arbitrage]\ncount = %d\nprofit_min = %g\nprofit_max = %g\nclose_premium = %g\n",
      a.arbitrageurs, a.kappa_min, a.kappa_max, a.close_premium);
  add("safety_ratio = %g\ncash = %.2f\n", a.safety_ratio,
      static_cast<double>(a.arbitrageur_cash) / 100.0);
  return out;
}

}  // namespace xmkt
