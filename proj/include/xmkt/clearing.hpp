#pragma once

#include <deque>
#include <span>

#include "xmkt/assets.hpp"
#include "xmkt/types.hpp"

namespace xmkt {

// Integer-cent conversion constants so the zero-sum and cash-conservation
// checks hold exactly. With the defaults (300 CNY/point, 0.2-point tick,
// 18% margin): one tick of one contract is 6000 cents of notional and 1080
// cents of maintenance margin.
struct FuturesCents {
  Cents value_per_tick = 6000;
  Cents maint_per_tick = 1080;

  static FuturesCents from_spec(const FuturesSpec& spec);
};

struct FuturesLot {
  Ticks price = 0;  // mark: entry price, re-marked to settlement daily
  Quantity qty = 0;  // always > 0; direction is the sign of the position
};

struct MarginAccount {
  Cents margin = 0;          // posted collateral; futures P&L lands here
  Quantity position = 0;     // signed contracts
  std::deque<FuturesLot> lots;  // FIFO marks of the open position
  Cents realized_total = 0;  // cumulative realized P&L (zero-sum bookkeeping)
  bool flagged = false;      // scheduled for next-day forced close

  bool flat() const { return position == 0; }
};

// unrealized P&L of the open lots marked at `mark`
Cents unrealized_pnl(const MarginAccount& acct, Ticks mark, const FuturesCents& fc);

// equity = posted margin + unrealized P&L at the reference price
Cents account_equity(const MarginAccount& acct, Ticks ref, const FuturesCents& fc);

// maintenance requirement |position| * ref * maint_per_tick
Cents maintenance_requirement(const MarginAccount& acct, Ticks ref, const FuturesCents& fc);

Cents contract_margin(Ticks ref, const FuturesCents& fc);

// Applies one fill: reducing legs realize P&L into margin FIFO against the
// lot marks, extending legs push new lots. Afterwards margin is rebalanced
// against cash toward the per-lot requirement (excess released, deficit
// topped up as far as cash allows).
void apply_futures_fill(MarginAccount& acct, Cents& cash, Side side, Quantity qty, Ticks price,
                        const FuturesCents& fc);

struct SettlementOutcome {
  Cents pnl = 0;  // equity delta realized by the mark
  bool flagged = false;
};

// Daily mark-to-market: realizes P&L against the settlement price, re-marks
// the open position, sweeps margin against cash toward the maintenance
// requirement, and flags the account when it still falls short.
SettlementOutcome settle_account(MarginAccount& acct, Cents& cash, Ticks settle,
                                 const FuturesCents& fc);

// Expiry: cash-settles the whole position at the final price and returns all
// margin to cash. Exact by construction since `final_ticks` is on the grid.
Cents settle_at_expiry(MarginAccount& acct, Cents& cash, Ticks final_ticks,
                       const FuturesCents& fc);

// wealth = cash + stock value at last prices + futures equity
Cents update_wealth(Cents cash, std::span<const Quantity> holdings,
                    std::span<const Ticks> last_stock_ticks, const MarginAccount& acct,
                    Ticks futures_mark, const FuturesCents& fc);

// bankruptcy thresholds (strict inequality: exactly-at-threshold survives)
bool stock_trader_bankrupt(Cents wealth, Ticks stock_price_ticks, Quantity lot);
bool futures_trader_bankrupt(Cents wealth, Ticks futures_ticks, const FuturesCents& fc);

}  // namespace xmkt
