#include "xmkt/clearing.hpp"

#include <algorithm>
#include <cmath>

namespace xmkt {

FuturesCents FuturesCents::from_spec(const FuturesSpec& spec) {
  FuturesCents fc;
  fc.value_per_tick = static_cast<Cents>(std::llround(spec.multiplier * spec.tick_points * 100.0));
  fc.maint_per_tick =
      static_cast<Cents>(std::llround(spec.multiplier * spec.tick_points * spec.margin_rate * 100.0));
  return fc;
}

namespace {

Cents lot_basis_ticks(const MarginAccount& acct) {
  Cents basis = 0;
  for (const auto& lot : acct.lots) basis += lot.price * lot.qty;
  return basis;
}

Cents per_lot_requirement(const MarginAccount& acct, const FuturesCents& fc) {
  return lot_basis_ticks(acct) * fc.maint_per_tick;
}

// excess margin goes back to cash; deficits are topped up while cash lasts
void rebalance_margin(MarginAccount& acct, Cents& cash, const FuturesCents& fc) {
  const Cents required = per_lot_requirement(acct, fc);
  if (acct.margin > required) {
    cash += acct.margin - required;
    acct.margin = required;
  } else if (acct.margin < required) {
    const Cents top_up = std::min(cash, required - acct.margin);
    cash -= top_up;
    acct.margin += top_up;
  }
}

}  // namespace

Cents unrealized_pnl(const MarginAccount& acct, Ticks mark, const FuturesCents& fc) {
  if (acct.position == 0) return 0;
  const Cents sign = acct.position > 0 ? 1 : -1;
  const Cents abs_pos = std::llabs(acct.position);
  return sign * (mark * abs_pos - lot_basis_ticks(acct)) * fc.value_per_tick;
}

Cents account_equity(const MarginAccount& acct, Ticks ref, const FuturesCents& fc) {
  return acct.margin + unrealized_pnl(acct, ref, fc);
}

Cents maintenance_requirement(const MarginAccount& acct, Ticks ref, const FuturesCents& fc) {
  return std::llabs(acct.position) * ref * fc.maint_per_tick;
}

Cents contract_margin(Ticks ref, const FuturesCents& fc) { return ref * fc.maint_per_tick; }

void apply_futures_fill(MarginAccount& acct, Cents& cash, Side side, Quantity qty, Ticks price,
                        const FuturesCents& fc) {
  const Quantity dir = side == Side::Buy ? 1 : -1;
  Quantity left = qty;
  while (left > 0 && acct.position != 0 && (acct.position > 0) != (dir > 0)) {
    FuturesLot& lot = acct.lots.front();
    const Quantity m = std::min(left, lot.qty);
    const Cents sign = acct.position > 0 ? 1 : -1;  // long closes by selling at `price`
    const Cents realized = sign * (price - lot.price) * m * fc.value_per_tick;
    acct.margin += realized;
    acct.realized_total += realized;
    lot.qty -= m;
    if (lot.qty == 0) acct.lots.pop_front();
    acct.position += dir * m;
    left -= m;
  }
  if (left > 0) {
    acct.lots.push_back({price, left});
    acct.position += dir * left;
  }
  rebalance_margin(acct, cash, fc);
}

SettlementOutcome settle_account(MarginAccount& acct, Cents& cash, Ticks settle,
                                 const FuturesCents& fc) {
  SettlementOutcome out;
  out.pnl = unrealized_pnl(acct, settle, fc);
  acct.margin += out.pnl;
  acct.realized_total += out.pnl;
  acct.lots.clear();
  if (acct.position != 0) acct.lots.push_back({settle, std::llabs(acct.position)});
  rebalance_margin(acct, cash, fc);
  out.flagged = acct.margin < maintenance_requirement(acct, settle, fc);
  acct.flagged = out.flagged;
  return out;
}

Cents settle_at_expiry(MarginAccount& acct, Cents& cash, Ticks final_ticks,
                       const FuturesCents& fc) {
  const Cents pnl = unrealized_pnl(acct, final_ticks, fc);
  acct.margin += pnl;
  acct.realized_total += pnl;
  acct.lots.clear();
  acct.position = 0;
  acct.flagged = false;
  cash += acct.margin;
  acct.margin = 0;
  return pnl;
}

Cents update_wealth(Cents cash, std::span<const Quantity> holdings,
                    std::span<const Ticks> last_stock_ticks, const MarginAccount& acct,
                    Ticks futures_mark, const FuturesCents& fc) {
  Cents wealth = cash;
  for (std::size_t i = 0; i < holdings.size(); ++i) wealth += holdings[i] * last_stock_ticks[i];
  wealth += account_equity(acct, futures_mark, fc);
  return wealth;
}

bool stock_trader_bankrupt(Cents wealth, Ticks stock_price_ticks, Quantity lot) {
  return wealth < lot * stock_price_ticks;  // one board lot at the current price
}

bool futures_trader_bankrupt(Cents wealth, Ticks futures_ticks, const FuturesCents& fc) {
  return wealth < contract_margin(futures_ticks, fc);
}

}  // namespace xmkt
