#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace xmkt {

using Ticks = std::int64_t;     // price in integer tick units of one instrument
using Quantity = std::int64_t;  // shares or contracts
using Cents = std::int64_t;     // cash in 0.01 CNY
using AgentId = std::int32_t;
using OrderId = std::uint64_t;
using Step = std::int64_t;

constexpr AgentId kNoAgent = -1;
constexpr OrderId kNoOrder = 0;

enum class Side : std::uint8_t { Buy, Sell };

inline Side opposite(Side s) { return s == Side::Buy ? Side::Sell : Side::Buy; }

enum class OrderKind : std::uint8_t { Limit, Market };

// Instruments are indexed 0..n_stocks-1 (stocks), with the index futures last.
struct InstrumentSpec {
  std::string label;
  double tick_size = 0.01;  // CNY per tick for stocks, index points for futures
  Quantity lot = 100;       // board lot (shares) or 1 contract
  bool is_futures = false;
};

inline double ticks_to_price(Ticks t, const InstrumentSpec& ins) {
  return static_cast<double>(t) * ins.tick_size;
}

inline Ticks price_to_ticks(double p, const InstrumentSpec& ins) {
  return static_cast<Ticks>(std::llround(p / ins.tick_size));
}

}  // namespace xmkt
