#pragma once

#include <deque>
#include <functional>
#include <map>
#include <unordered_map>
#include <vector>

#include "xmkt/types.hpp"

namespace xmkt {

struct Order {
  OrderId id = kNoOrder;
  std::int32_t instrument = 0;
  Side side = Side::Buy;
  OrderKind kind = OrderKind::Limit;
  Ticks price = 0;  // unused for market orders
  Quantity quantity = 0;
  AgentId owner = kNoAgent;
  Step submitted_at = 0;
  Step expires_at = 0;  // dead once now >= expires_at
};

struct Trade {
  std::int32_t instrument = 0;
  Ticks price = 0;  // the resting order's limit price
  Quantity quantity = 0;
  AgentId buyer = kNoAgent;
  AgentId seller = kNoAgent;
  OrderId resting_id = kNoOrder;
  OrderId aggressor_id = kNoOrder;
  Step step = 0;
  Side aggressor = Side::Buy;
};

enum class SubmitError : std::uint8_t {
  None,
  InvalidTick,          // non-positive limit price
  InvalidLot,           // quantity not a positive lot multiple
  EmptyBookMarketOrder  // market order with no live opposite side
};

struct SubmitResult {
  SubmitError error = SubmitError::None;
  Quantity executed = 0;
  Quantity resting = 0;    // limit remainder left on the book
  Quantity cancelled = 0;  // market remainder dropped after the walk
  bool accepted() const { return error == SubmitError::None; }
};

struct QuoteSnapshot {
  bool has_bid = false;
  bool has_ask = false;
  Ticks best_bid = 0;
  Ticks best_ask = 0;
  Quantity bid_size = 0;  // live quantity at the best level
  Quantity ask_size = 0;
  std::vector<Ticks> bid_levels;  // up to five, best first
  std::vector<Ticks> ask_levels;
  Ticks bid5 = 0;  // fifth level, with the thin-book fallbacks applied
  Ticks ask5 = 0;
  double midpoint = 0.0;  // tick units; may sit on a half tick
};

// One continuous-double-auction book with price-time priority. Expired
// orders are removed lazily: matching and snapshots purge them as they are
// encountered, which is observationally identical to eager removal.
class OrderBook {
 public:
  OrderBook(std::int32_t instrument, Quantity lot) : instrument_(instrument), lot_(lot) {}

  // Crossing quantity executes immediately at resting prices, walking levels
  // in priority order. A limit remainder rests; a market remainder is
  // cancelled rather than converted to a limit.
  SubmitResult submit(const Order& order, Step now, std::vector<Trade>& trades_out);

  // Removes whatever is still live. Returns the removed quantity, 0 if the
  // order is already gone (idempotent).
  Quantity cancel(OrderId id);

  // Day boundary: drops every live order and returns them so owners can
  // refresh their state. Expired leftovers are dropped silently.
  std::vector<Order> clear(Step now);

  // Up to five levels per side. Empty side: levels absent, bid5/ask5 fall
  // back to last_price -/+ 5 ticks and the midpoint to last_price. Fewer
  // than five levels: bid5/ask5 are the deepest available level.
  QuoteSnapshot snapshot(Ticks last_price, Step now);

  bool has_live(Side side, Step now);
  Ticks best_price(Side side, Step now);  // only valid when has_live(side)
  Quantity live_quantity(OrderId id) const;
  Quantity depth(Side side, Step now);  // total live quantity on a side
  Quantity visible_depth(Side side, int levels, Step now);  // top-N level quantity

  std::int32_t instrument() const { return instrument_; }
  Quantity lot() const { return lot_; }

 private:
  struct Resting {
    OrderId id;
    AgentId owner;
    Quantity remaining;
    Step submitted_at;
    Step expires_at;
    OrderKind kind;
  };
  using Level = std::deque<Resting>;

  template <typename Book>
  SubmitResult match_and_rest(Book& opposite, const Order& order, Step now,
                              std::vector<Trade>& trades_out);
  template <typename Book>
  void purge_front(Book& side_book, Step now);
  template <typename Book>
  bool side_has_live(Book& side_book, Step now);
  template <typename Book>
  Quantity side_depth(Book& side_book, Step now);
  void rest_order(const Order& order, Quantity remaining);

  std::int32_t instrument_;
  Quantity lot_;
  std::map<Ticks, Level, std::greater<Ticks>> bids_;
  std::map<Ticks, Level> asks_;
  // order id -> (side, price) locator for cancels and liveness queries
  std::unordered_map<OrderId, std::pair<Side, Ticks>> locate_;
};

}  // namespace xmkt
