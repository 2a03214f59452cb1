#include "xmkt/order_book.hpp"

#include <algorithm>

namespace xmkt {

namespace {
bool expired(Step expires_at, Step now) { return now >= expires_at; }
}  // namespace

template <typename Book>
void OrderBook::purge_front(Book& side_book, Step now) {
  auto it = side_book.begin();
  while (it != side_book.end()) {
    Level& level = it->second;
    while (!level.empty() && expired(level.front().expires_at, now)) {
      locate_.erase(level.front().id);
      level.pop_front();
    }
    if (level.empty()) {
      it = side_book.erase(it);
      continue;
    }
    return;
  }
}

template <typename Book>
bool OrderBook::side_has_live(Book& side_book, Step now) {
  purge_front(side_book, now);
  return !side_book.empty();
}

template <typename Book>
Quantity OrderBook::side_depth(Book& side_book, Step now) {
  Quantity total = 0;
  for (auto it = side_book.begin(); it != side_book.end();) {
    Level& level = it->second;
    for (auto lit = level.begin(); lit != level.end();) {
      if (expired(lit->expires_at, now)) {
        locate_.erase(lit->id);
        lit = level.erase(lit);
      } else {
        total += lit->remaining;
        ++lit;
      }
    }
    it = level.empty() ? side_book.erase(it) : std::next(it);
  }
  return total;
}

void OrderBook::rest_order(const Order& order, Quantity remaining) {
  Resting r{order.id, order.owner, remaining, order.submitted_at, order.expires_at, order.kind};
  if (order.side == Side::Buy) {
    bids_[order.price].push_back(r);
  } else {
    asks_[order.price].push_back(r);
  }
  locate_[order.id] = {order.side, order.price};
}

template <typename Book>
SubmitResult OrderBook::match_and_rest(Book& opposite, const Order& order, Step now,
                                       std::vector<Trade>& trades_out) {
  SubmitResult result;
  Quantity left = order.quantity;
  const bool is_market = order.kind == OrderKind::Market;

  auto crosses = [&](Ticks level_price) {
    if (is_market) return true;
    return order.side == Side::Buy ? order.price >= level_price : order.price <= level_price;
  };

  auto it = opposite.begin();
  while (left > 0 && it != opposite.end()) {
    if (!crosses(it->first)) break;
    Level& level = it->second;
    while (left > 0 && !level.empty()) {
      Resting& maker = level.front();
      if (expired(maker.expires_at, now)) {
        locate_.erase(maker.id);
        level.pop_front();
        continue;
      }
      const Quantity q = std::min(left, maker.remaining);
      Trade t;
      t.instrument = instrument_;
      t.price = it->first;  // resting order's limit price
      t.quantity = q;
      t.buyer = order.side == Side::Buy ? order.owner : maker.owner;
      t.seller = order.side == Side::Buy ? maker.owner : order.owner;
      t.resting_id = maker.id;
      t.aggressor_id = order.id;
      t.step = now;
      t.aggressor = order.side;
      trades_out.push_back(t);
      left -= q;
      maker.remaining -= q;
      result.executed += q;
      if (maker.remaining == 0) {
        locate_.erase(maker.id);
        level.pop_front();
      }
    }
    if (level.empty()) {
      it = opposite.erase(it);
    } else {
      ++it;  // only reachable when the aggressor is exhausted
    }
  }

  if (left > 0) {
    if (is_market) {
      result.cancelled = left;
    } else {
      rest_order(order, left);
      result.resting = left;
    }
  }
  return result;
}

SubmitResult OrderBook::submit(const Order& order, Step now, std::vector<Trade>& trades_out) {
  SubmitResult result;
  if (order.quantity <= 0 || order.quantity % lot_ != 0) {
    result.error = SubmitError::InvalidLot;
    return result;
  }
  if (order.kind == OrderKind::Limit && order.price <= 0) {
    result.error = SubmitError::InvalidTick;
    return result;
  }
  if (order.kind == OrderKind::Market) {
    const bool live = order.side == Side::Buy ? side_has_live(asks_, now) : side_has_live(bids_, now);
    if (!live) {
      result.error = SubmitError::EmptyBookMarketOrder;
      return result;
    }
  }
  return order.side == Side::Buy ? match_and_rest(asks_, order, now, trades_out)
                                 : match_and_rest(bids_, order, now, trades_out);
}

Quantity OrderBook::cancel(OrderId id) {
  auto loc = locate_.find(id);
  if (loc == locate_.end()) return 0;
  const auto [side, price] = loc->second;
  auto erase_from = [&](auto& side_book) -> Quantity {
    auto it = side_book.find(price);
    if (it == side_book.end()) return 0;
    Level& level = it->second;
    for (auto lit = level.begin(); lit != level.end(); ++lit) {
      if (lit->id == id) {
        const Quantity removed = lit->remaining;
        level.erase(lit);
        if (level.empty()) side_book.erase(it);
        return removed;
      }
    }
    return 0;
  };
  const Quantity removed = side == Side::Buy ? erase_from(bids_) : erase_from(asks_);
  locate_.erase(loc);
  return removed;
}

std::vector<Order> OrderBook::clear(Step now) {
  std::vector<Order> removed;
  auto drain = [&](auto& side_book, Side side) {
    for (auto& [price, level] : side_book) {
      for (const Resting& r : level) {
        if (expired(r.expires_at, now)) continue;
        Order o;
        o.id = r.id;
        o.instrument = instrument_;
        o.side = side;
        o.kind = r.kind;
        o.price = price;
        o.quantity = r.remaining;
        o.owner = r.owner;
        o.submitted_at = r.submitted_at;
        o.expires_at = r.expires_at;
        removed.push_back(o);
      }
    }
    side_book.clear();
  };
  drain(bids_, Side::Buy);
  drain(asks_, Side::Sell);
  locate_.clear();
  return removed;
}

QuoteSnapshot OrderBook::snapshot(Ticks last_price, Step now) {
  QuoteSnapshot snap;
  auto collect = [&](auto& side_book, std::vector<Ticks>& levels, Quantity& best_size) {
    for (auto it = side_book.begin(); it != side_book.end() && levels.size() < 5;) {
      Level& level = it->second;
      Quantity q = 0;
      for (auto lit = level.begin(); lit != level.end();) {
        if (expired(lit->expires_at, now)) {
          locate_.erase(lit->id);
          lit = level.erase(lit);
        } else {
          q += lit->remaining;
          ++lit;
        }
      }
      if (level.empty()) {
        it = side_book.erase(it);
        continue;
      }
      if (levels.empty()) best_size = q;
      levels.push_back(it->first);
      ++it;
    }
  };
  collect(bids_, snap.bid_levels, snap.bid_size);
  collect(asks_, snap.ask_levels, snap.ask_size);

  snap.has_bid = !snap.bid_levels.empty();
  snap.has_ask = !snap.ask_levels.empty();
  if (snap.has_bid) snap.best_bid = snap.bid_levels.front();
  if (snap.has_ask) snap.best_ask = snap.ask_levels.front();

  // thin-book fallbacks: deepest available level, or last +/- 5 ticks when a
  // side is empty, so Eq.-style five-level reads stay evaluable
  snap.bid5 = snap.has_bid ? snap.bid_levels.back() : last_price - 5;
  snap.ask5 = snap.has_ask ? snap.ask_levels.back() : last_price + 5;
  if (snap.has_bid && snap.has_ask) {
    snap.midpoint = 0.5 * (static_cast<double>(snap.best_bid) + static_cast<double>(snap.best_ask));
  } else {
    snap.midpoint = static_cast<double>(last_price);
  }
  return snap;
}

bool OrderBook::has_live(Side side, Step now) {
  return side == Side::Buy ? side_has_live(bids_, now) : side_has_live(asks_, now);
}

Ticks OrderBook::best_price(Side side, Step now) {
  if (side == Side::Buy) {
    purge_front(bids_, now);
    return bids_.begin()->first;
  }
  purge_front(asks_, now);
  return asks_.begin()->first;
}

Quantity OrderBook::live_quantity(OrderId id) const {
  auto loc = locate_.find(id);
  if (loc == locate_.end()) return 0;
  const auto [side, price] = loc->second;
  auto scan = [&](const auto& side_book) -> Quantity {
    auto it = side_book.find(price);
    if (it == side_book.end()) return 0;
    for (const Resting& r : it->second) {
      if (r.id == id) return r.remaining;
    }
    return 0;
  };
  return side == Side::Buy ? scan(bids_) : scan(asks_);
}

Quantity OrderBook::depth(Side side, Step now) {
  return side == Side::Buy ? side_depth(bids_, now) : side_depth(asks_, now);
}

Quantity OrderBook::visible_depth(Side side, int levels, Step now) {
  auto sum_levels = [&](auto& side_book) {
    Quantity total = 0;
    int taken = 0;
    for (auto it = side_book.begin(); it != side_book.end() && taken < levels;) {
      Level& level = it->second;
      Quantity q = 0;
      for (auto lit = level.begin(); lit != level.end();) {
        if (expired(lit->expires_at, now)) {
          locate_.erase(lit->id);
          lit = level.erase(lit);
        } else {
          q += lit->remaining;
          ++lit;
        }
      }
      if (level.empty()) {
        it = side_book.erase(it);
        continue;
      }
      total += q;
      ++taken;
      ++it;
    }
    return total;
  };
  return side == Side::Buy ? sum_levels(bids_) : sum_levels(asks_);
}

}  // namespace xmkt
