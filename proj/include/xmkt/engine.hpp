#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xmkt/agents.hpp"
#include "xmkt/arbitrage.hpp"
#include "xmkt/assets.hpp"
#include "xmkt/clearing.hpp"
#include "xmkt/csv.hpp"
#include "xmkt/order_book.hpp"
#include "xmkt/types.hpp"

namespace xmkt {

struct PopulationConfig {
  int informed_stock = 200;
  int uninformed_stock = 600;
  int noise_stock = 200;
  int informed_futures = 200;
  int uninformed_futures = 600;
  int noise_futures = 200;
  int arbitrageurs = 10;
  double alpha_min = 0.1;
  double alpha_max = 1.0;
  int tau_min = 10;
  int tau_max = 120;
  Quantity max_order_lots = 0;          // stock per-order cap in lots, 0 = none
  Quantity futures_max_order_lots = 5;  // futures per-order cap (exchange-style)
  int noise_order_lots = 3;             // noise traders quote 1..N lots flat
  double price_delta = 0.01;          // stock candidate-price band (relative)
  double futures_price_delta = 0.001;  // futures band; the 0.2-point tick is
                                       // far finer relative to 3000 points
  double arrival_mean = 60.0;          // steps (5 minutes at 5 s per step)
  Quantity stock_position_min = 300;   // initial shares, drawn in lot multiples
  Quantity stock_position_max = 1500;
  Cents futures_trader_cash = 300'000'000;  // 3M CNY
  Cents arbitrageur_cash = 1'000'000'000;   // 10M CNY
  double kappa_min = 10.0;  // arbitrage entry premium, points
  double kappa_max = 20.0;
  double close_premium = 0.0;
  double safety_ratio = 0.60;
};

struct SimConfig {
  int days = 19;
  int steps_per_day = 2882;
  double stock_tick = 0.01;
  Quantity stock_lot = 100;
  std::vector<StockSpec> stocks;
  FuturesSpec futures;
  PopulationConfig agents;
  std::uint64_t seed = 1;

  Step total_steps() const { return static_cast<Step>(days) * steps_per_day; }
  std::vector<InstrumentSpec> instruments() const;
  static SimConfig defaults();  // Table 1 stocks and the exchange constants
};

// Optional CSV sinks; any subset may be open.
struct RunSinks {
  CsvWriter trades;
  CsvWriter quotes;
  CsvWriter basis;
  CsvWriter wealth;
  CsvWriter settlement;
  CsvWriter arbitrage;
  CsvWriter common_values;

  // opens every log under `dir` (creating it); returns false on I/O failure
  bool open_all(const std::string& dir);
};

struct RunRecord {
  // per-step series
  std::vector<double> index_level;
  std::vector<double> futures_price;  // period transaction price, points
  std::vector<double> basis;
  std::vector<double> futures_spread;  // points, only steps with both sides
  long futures_spread_skipped = 0;
  std::vector<std::vector<double>> stock_price;  // [stock][step]

  // per-day
  std::vector<Ticks> settlement_ticks;
  std::vector<long> forced_close_contracts;

  // conservation and mechanism sweeps, accumulated while running
  bool book_never_crossed = true;
  bool zero_sum_exact = true;
  Cents zero_sum_worst = 0;
  bool shares_conserved = true;
  Quantity min_stock_holding = 0;
  bool stock_holdings_nonnegative = true;
  bool arb_futures_short_only = true;
  bool arb_margin_ratio_ok = true;  // <= safety + one contract at every step
  double arb_margin_ratio_worst = 0.0;
  long bankruptcies = 0;
  long forced_closes_total = 0;
  long forced_closes_deferred = 0;  // empty opposite book, retried next step
  long arb_opens = 0;
  long arb_closes = 0;
  long arb_settles = 0;
  std::uint64_t trade_count = 0;
  std::uint64_t order_count = 0;

  std::uint64_t state_hash = 0;  // running digest of trades/quotes/basis/wealth
  double runtime_seconds = 0.0;
};

RunRecord run(const SimConfig& config, RunSinks* sinks = nullptr);

}  // namespace xmkt
