#include "xmkt/arbitrage.hpp"

#include <algorithm>
#include <cmath>

namespace xmkt {

std::vector<Quantity> basket_shares_for(Quantity contracts, std::span<const double> shares_100m,
                                        double base_market_value, double multiplier,
                                        std::span<const Quantity> stock_lots) {
  std::vector<Quantity> shares(shares_100m.size(), 0);
  // replicate n * multiplier * 3000 CNY of notional with counts proportional
  // to S_i; the 1e8 share-count scale cancels against M_0's 1e8-CNY units
  for (std::size_t i = 0; i < shares_100m.size(); ++i) {
    const double raw = static_cast<double>(contracts) * multiplier * kIndexBase *
                       shares_100m[i] / base_market_value;
    const Quantity lot = stock_lots[i];
    shares[i] = static_cast<Quantity>(std::floor(raw / static_cast<double>(lot))) * lot;
  }
  return shares;
}

SizedPosition size_position(Cents wealth, Ticks futures_ticks,
                            std::span<const Ticks> stock_ticks,
                            std::span<const double> shares_100m, double base_market_value,
                            double safety_ratio, const FuturesCents& fc,
                            std::span<const Quantity> stock_lots, double multiplier) {
  SizedPosition sized;
  sized.basket_shares.assign(shares_100m.size(), 0);
  if (wealth <= 0 || futures_ticks <= 0) return sized;
  const Cents margin_per = contract_margin(futures_ticks, fc);
  Quantity n = static_cast<Quantity>(
      std::floor(safety_ratio * static_cast<double>(wealth) / static_cast<double>(margin_per)));
  for (; n >= 1; --n) {
    auto shares = basket_shares_for(n, shares_100m, base_market_value, multiplier, stock_lots);
    Cents cost = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) cost += shares[i] * stock_ticks[i];
    if (n * margin_per + cost <= wealth) {
      sized.contracts = n;
      sized.basket_shares = std::move(shares);
      sized.basket_cost = cost;
      sized.margin_needed = n * margin_per;
      break;
    }
  }
  return sized;
}

std::vector<ArbOrder> evaluate_and_act(ArbitrageurState& state, const ArbitrageurParams& params,
                                       const ArbView& view, const FuturesCents& fc,
                                       std::span<const Quantity> basket_holdings,
                                       Quantity futures_position, Step now) {
  std::vector<ArbOrder> orders;
  const std::int32_t futures_instrument = static_cast<std::int32_t>(view.stock_ticks.size());

  auto emit_basket_toward = [&](std::span<const Quantity> target) {
    for (std::size_t i = 0; i < basket_holdings.size(); ++i) {
      const Quantity want = i < target.size() ? target[i] : 0;
      const Quantity delta = want - basket_holdings[i];
      if (delta > 0) {
        orders.push_back({static_cast<std::int32_t>(i), Side::Buy, delta});
      } else if (delta < 0) {
        orders.push_back({static_cast<std::int32_t>(i), Side::Sell, -delta});
      }
    }
  };
  auto emit_futures_toward = [&](Quantity target) {
    const Quantity delta = target - futures_position;
    if (delta < 0) {
      orders.push_back({futures_instrument, Side::Sell, -delta});
    } else if (delta > 0) {
      orders.push_back({futures_instrument, Side::Buy, std::min(delta, -futures_position)});
    }
  };

  if (view.final_step) {
    // expiry: dump the basket at market; the futures leg is cash-settled by
    // the clearing pass after the close
    for (std::size_t i = 0; i < basket_holdings.size(); ++i) {
      if (basket_holdings[i] > 0)
        orders.push_back({static_cast<std::int32_t>(i), Side::Sell, basket_holdings[i]});
    }
    return orders;
  }

  const double premium = view.futures_price - view.theoretical_value;
  switch (state.phase) {
    case ArbPhase::Flat: {
      if (premium < params.profit_threshold) break;
      SizedPosition sized =
          size_position(view.wealth, view.futures_ticks, view.stock_ticks, view.shares_100m,
                        view.base_market_value, params.safety_ratio, fc, view.stock_lots,
                        view.multiplier);
      if (sized.contracts < 1) break;
      state.phase = ArbPhase::Open;
      state.futures_target = -sized.contracts;
      state.basket_target = sized.basket_shares;
      state.entry_premium = premium;
      state.opened_at = now;
      state.wealth_at_open = view.wealth;
      emit_futures_toward(state.futures_target);
      emit_basket_toward(state.basket_target);
      break;
    }
    case ArbPhase::Open: {
      if (premium <= params.close_premium) {
        state.phase = ArbPhase::Closing;
        state.futures_target = 0;
        state.basket_target.assign(basket_holdings.size(), 0);
        emit_futures_toward(0);
        emit_basket_toward(state.basket_target);
      } else {
        // repair any hedge residue left by partial fills
        emit_futures_toward(state.futures_target);
        emit_basket_toward(state.basket_target);
      }
      break;
    }
    case ArbPhase::Closing: {
      emit_futures_toward(0);
      emit_basket_toward(state.basket_target);
      break;
    }
  }
  return orders;
}

}  // namespace xmkt
