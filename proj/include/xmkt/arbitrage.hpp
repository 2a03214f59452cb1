#pragma once

#include <span>
#include <vector>

#include "xmkt/assets.hpp"
#include "xmkt/clearing.hpp"
#include "xmkt/types.hpp"

namespace xmkt {

struct ArbitrageurParams {
  double profit_threshold = 15.0;  // kappa, index points
  double close_premium = 0.0;      // unwind once premium falls to this
  double safety_ratio = 0.60;      // margin / total wealth cap
};

enum class ArbPhase : std::uint8_t { Flat, Open, Closing };

// Trading state of one spot-futures arbitrageur. Cash, basket holdings and
// the margin account live with the engine's agent record; this tracks the
// campaign: the targeted hedge and where the round trip started.
struct ArbitrageurState {
  ArbPhase phase = ArbPhase::Flat;
  std::vector<Quantity> basket_target;  // shares per stock
  Quantity futures_target = 0;          // <= 0, short leg
  double entry_premium = 0;
  Step opened_at = -1;
  Cents wealth_at_open = 0;  // for round-trip P&L reporting
};

struct SizedPosition {
  Quantity contracts = 0;
  std::vector<Quantity> basket_shares;  // lot-rounded, proportional to S_i
  Cents basket_cost = 0;                // at the quoted stock prices
  Cents margin_needed = 0;
};

// Largest n with n * margin(F) <= safety_ratio * wealth and
// margin(n) + basket_cost(n) <= wealth. The basket replicates the notional
// n * multiplier * 3000 / M_0 per share of S_i, so its composition depends
// only on the base-period weights.
SizedPosition size_position(Cents wealth, Ticks futures_ticks,
                            std::span<const Ticks> stock_ticks,
                            std::span<const double> shares_100m, double base_market_value,
                            double safety_ratio, const FuturesCents& fc,
                            std::span<const Quantity> stock_lots, double multiplier);

// basket share counts for a given contract count (lot-rounded)
std::vector<Quantity> basket_shares_for(Quantity contracts, std::span<const double> shares_100m,
                                        double base_market_value, double multiplier,
                                        std::span<const Quantity> stock_lots);

struct ArbOrder {
  std::int32_t instrument = 0;
  Side side = Side::Buy;
  Quantity quantity = 0;
};

// What the arbitrageur can observe this step.
struct ArbView {
  double futures_price = 0;      // last transaction, points
  double theoretical_value = 0;  // v_F
  Ticks futures_ticks = 0;
  std::span<const Ticks> stock_ticks;
  std::span<const double> shares_100m;
  double base_market_value = 0;
  double multiplier = 300.0;
  Cents wealth = 0;
  std::span<const Quantity> stock_lots;
  bool final_step = false;  // expiry: liquidate the basket at market
};

// Premium rule: open when F - v_F >= kappa while flat, close once the
// premium gives the whole edge back. Partial fills leave a residue that the
// next arrival repairs; all orders are market orders.
std::vector<ArbOrder> evaluate_and_act(ArbitrageurState& state, const ArbitrageurParams& params,
                                       const ArbView& view, const FuturesCents& fc,
                                       std::span<const Quantity> basket_holdings,
                                       Quantity futures_position, Step now);

}  // namespace xmkt
