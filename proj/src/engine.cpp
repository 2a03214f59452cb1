#include "xmkt/engine.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

namespace xmkt {

std::vector<InstrumentSpec> SimConfig::instruments() const {
  std::vector<InstrumentSpec> out;
  for (const auto& s : stocks) {
    InstrumentSpec ins;
    ins.label = "s" + std::to_string(s.id);
    ins.tick_size = stock_tick;
    ins.lot = stock_lot;
    ins.is_futures = false;
    out.push_back(ins);
  }
  InstrumentSpec fut;
  fut.label = "fut";
  fut.tick_size = futures.tick_points;
  fut.lot = 1;
  fut.is_futures = true;
  out.push_back(fut);
  return out;
}

SimConfig SimConfig::defaults() {
  SimConfig cfg;
  cfg.stocks = {
      {1, 10.0, 0.0, 0.0007, 50.0}, {2, 20.0, 0.0, 0.0007, 40.0}, {3, 30.0, 0.0, 0.0003, 60.0},
      {4, 40.0, 0.0, 0.0003, 30.0}, {5, 50.0, 0.0, 0.0005, 50.0},
  };
  return cfg;
}

bool RunSinks::open_all(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return false;
  auto p = [&](const char* name) { return dir + "/" + name; };
  return trades.open(p("trades.csv"), "step,instrument,price,quantity,buyer,seller,aggressor") &&
         quotes.open(p("quotes.csv"), "step,instrument,best_bid,best_ask,bid5,ask5,midpoint") &&
         basis.open(p("basis.csv"), "step,F,S,basis") &&
         wealth.open(p("wealth.csv"), "day,agent,type,cash,stock_value,futures_equity,total") &&
         settlement.open(p("settlement.csv"), "day,settlement_price,forced_close_count") &&
         arbitrage.open(p("arbitrage.csv"),
                        "step,action,premium,contracts,basket_cost,realized_pnl") &&
         common_values.open(p("common_values.csv"), "step,stock,value");
}

namespace {

enum class AgentClass : std::uint8_t { StockTrader, FuturesTrader, Arbitrageur };

struct AgentRecord {
  AgentId id = kNoAgent;
  AgentClass cls = AgentClass::StockTrader;
  TraderParams trader;
  ArbitrageurParams arb_params;
  ArbitrageurState arb;
  Cents cash = 0;
  std::vector<Quantity> holdings;
  MarginAccount margin;
  Step next_arrival = 0;
  OrderId live_order = kNoOrder;
  Rng rng;
  Cents init_cash = 0;
  Quantity init_shares = 0;
};

struct Digest {
  std::uint64_t h = 1469598103934665603ull;
  void mix(std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  }
  void mix_double(double v) { mix(std::bit_cast<std::uint64_t>(v)); }
};

const char* trader_type_label(const AgentRecord& a, bool is_futures) {
  if (a.cls == AgentClass::Arbitrageur) return "arbitrageur";
  switch (a.trader.type) {
    case TraderType::Informed:
      return is_futures ? "informed_futures" : "informed_stock";
    case TraderType::Uninformed:
      return is_futures ? "uninformed_futures" : "uninformed_stock";
    case TraderType::Noise:
      return is_futures ? "noise_futures" : "noise_stock";
  }
  return "?";
}

class World {
 public:
  World(const SimConfig& cfg, RunSinks* sinks)
      : cfg_(cfg),
        sinks_(sinks),
        instruments_(cfg.instruments()),
        n_stocks_(static_cast<int>(cfg.stocks.size())),
        fut_(n_stocks_),
        fc_(FuturesCents::from_spec(cfg.futures)),
        m0_(base_market_value(cfg.stocks)),
        shuffle_rng_(make_stream(cfg.seed, rng_domain::kShuffle)) {
    Rng path_rng = make_stream(cfg.seed, rng_domain::kCommonValues);
    path_ = CommonValuePath::generate(cfg.stocks, cfg.total_steps(), path_rng);

    for (int i = 0; i <= n_stocks_; ++i) books_.emplace_back(i, instruments_[i].lot);

    shares_100m_.reserve(cfg.stocks.size());
    for (const auto& s : cfg.stocks) shares_100m_.push_back(s.shares_100m);
    stock_lots_.assign(static_cast<std::size_t>(n_stocks_), cfg.stock_lot);

    last_ticks_.resize(instruments_.size());
    for (int i = 0; i < n_stocks_; ++i)
      last_ticks_[i] = price_to_ticks(cfg.stocks[i].initial_value, instruments_[i]);
    const double vf0 =
        futures_common_value(kIndexBase, cfg.futures.per_day_rate(), cfg.futures.expiry_day, 1);
    last_ticks_[fut_] = price_to_ticks(vf0, instruments_[fut_]);
    prev_settle_ = last_ticks_[fut_];
    index_view_ = kIndexBase;
    vf_view_ = vf0;

    history_.resize(instruments_.size());
    for (auto& h : history_) h.reserve(static_cast<std::size_t>(cfg.total_steps()));
    step_price_sum_.assign(instruments_.size(), 0);
    step_trade_count_.assign(instruments_.size(), 0);
    lr_var_.assign(instruments_.size(), 0.0);
    lr_n_.assign(instruments_.size(), 0);

    arrival_buckets_.resize(static_cast<std::size_t>(cfg.total_steps()) + 1);
    build_population();

    sink_holdings_.assign(static_cast<std::size_t>(n_stocks_), 0);
    expected_shares_.assign(static_cast<std::size_t>(n_stocks_), 0);
    for (const auto& a : agents_)
      for (int i = 0; i < n_stocks_; ++i) expected_shares_[i] += a.holdings[i];

    record_.stock_price.resize(static_cast<std::size_t>(n_stocks_));
    const auto steps = static_cast<std::size_t>(cfg.total_steps());
    for (auto& v : record_.stock_price) v.reserve(steps);
    record_.index_level.reserve(steps);
    record_.futures_price.reserve(steps);
    record_.basis.reserve(steps);
  }

  RunRecord run_all() {
    const auto t0 = std::chrono::steady_clock::now();
    write_common_values();
    const Step total = cfg_.total_steps();
    for (Step t = 0; t < total; ++t) step(t);
    record_.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    record_.state_hash = digest_.h;
    return std::move(record_);
  }

 private:
  // ---- population -----------------------------------------------------

  void build_population() {
    Rng pop = make_stream(cfg_.seed, rng_domain::kPopulation);
    const auto& pc = cfg_.agents;
    auto add_trader = [&](TraderType type, bool futures_market) {
      AgentRecord a;
      a.id = static_cast<AgentId>(agents_.size());
      a.cls = futures_market ? AgentClass::FuturesTrader : AgentClass::StockTrader;
      a.trader.type = type;
      a.trader.instrument =
          futures_market ? fut_ : static_cast<std::int32_t>(pop.below(static_cast<std::uint64_t>(n_stocks_)));
      a.trader.risk_aversion = pop.uniform(pc.alpha_min, pc.alpha_max);
      a.trader.window = static_cast<int>(pop.uniform_int(pc.tau_min, pc.tau_max));
      if (type == TraderType::Uninformed) {
        do {
          a.trader.wa = pop.next_unit();
          a.trader.wb = pop.next_unit();
          a.trader.wc = pop.next_unit();
        } while (a.trader.wa + a.trader.wb + a.trader.wc <= 0.0);
      }
      a.holdings.assign(static_cast<std::size_t>(n_stocks_), 0);
      if (!futures_market) {
        const Quantity lo = pc.stock_position_min / cfg_.stock_lot;
        const Quantity hi = pc.stock_position_max / cfg_.stock_lot;
        const Quantity shares = pop.uniform_int(lo, hi) * cfg_.stock_lot;
        a.holdings[static_cast<std::size_t>(a.trader.instrument)] = shares;
        a.init_shares = shares;
        // initial cash equals the initial value of the endowed shares
        a.cash = shares * last_ticks_[a.trader.instrument];
      } else {
        a.cash = pc.futures_trader_cash;
      }
      a.init_cash = a.cash;
      a.rng = make_stream(cfg_.seed, rng_domain::kAgent, agents_.size());
      a.next_arrival = next_arrival_interval(pc.arrival_mean, a.rng);
      push_arrival(a.id, a.next_arrival);
      agents_.push_back(std::move(a));
    };

    for (int i = 0; i < pc.informed_stock; ++i) add_trader(TraderType::Informed, false);
    for (int i = 0; i < pc.uninformed_stock; ++i) add_trader(TraderType::Uninformed, false);
    for (int i = 0; i < pc.noise_stock; ++i) add_trader(TraderType::Noise, false);
    for (int i = 0; i < pc.informed_futures; ++i) add_trader(TraderType::Informed, true);
    for (int i = 0; i < pc.uninformed_futures; ++i) add_trader(TraderType::Uninformed, true);
    for (int i = 0; i < pc.noise_futures; ++i) add_trader(TraderType::Noise, true);
    for (int i = 0; i < pc.arbitrageurs; ++i) {
      AgentRecord a;
      a.id = static_cast<AgentId>(agents_.size());
      a.cls = AgentClass::Arbitrageur;
      a.arb_params.profit_threshold = pop.uniform(pc.kappa_min, pc.kappa_max);
      a.arb_params.close_premium = pc.close_premium;
      a.arb_params.safety_ratio = pc.safety_ratio;
      a.holdings.assign(static_cast<std::size_t>(n_stocks_), 0);
      a.cash = pc.arbitrageur_cash;
      a.init_cash = a.cash;
      a.rng = make_stream(cfg_.seed, rng_domain::kAgent, agents_.size());
      arb_ids_.push_back(a.id);
      agents_.push_back(std::move(a));
    }
  }

  void push_arrival(AgentId id, Step when) {
    if (when < static_cast<Step>(arrival_buckets_.size()))
      arrival_buckets_[static_cast<std::size_t>(when)].push_back(id);
  }

  // ---- per-step orchestration -----------------------------------------

  void step(Step t) {
    const int day = static_cast<int>(t / cfg_.steps_per_day);
    const bool last_step_of_day = (t + 1) % cfg_.steps_per_day == 0;
    const bool final_step = t + 1 == cfg_.total_steps();
    listed_day_ = day + 1;

    std::fill(step_price_sum_.begin(), step_price_sum_.end(), 0);
    std::fill(step_trade_count_.begin(), step_trade_count_.end(), 0);
    forced_this_step(t);

    // due agents in a seeded random order; arbitrageurs watch every step
    due_.clear();
    auto& bucket = arrival_buckets_[static_cast<std::size_t>(t)];
    for (AgentId id : bucket) {
      if (agents_[static_cast<std::size_t>(id)].next_arrival == t) due_.push_back(id);
    }
    bucket.clear();
    bucket.shrink_to_fit();
    for (AgentId id : arb_ids_) due_.push_back(id);
    for (std::size_t i = due_.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle_rng_.below(i));
      std::swap(due_[i - 1], due_[j]);
    }

    for (AgentId id : due_) {
      AgentRecord& a = agents_[static_cast<std::size_t>(id)];
      if (a.cls == AgentClass::Arbitrageur) {
        arbitrageur_turn(a, t, final_step);
      } else {
        trader_turn(a, t);
      }
    }

    // period transaction prices, index, theoretical value
    for (int i = 0; i <= n_stocks_; ++i) {
      double price;
      if (step_trade_count_[i] > 0) {
        const double mean_ticks = static_cast<double>(step_price_sum_[i]) /
                                  static_cast<double>(step_trade_count_[i]);
        price = mean_ticks * instruments_[i].tick_size;
      } else {
        price = history_[i].empty() ? ticks_to_price(last_ticks_[i], instruments_[i])
                                    : history_[i].back();
      }
      const auto& h = history_[i];
      if (!h.empty() && h.back() > 0.0 && price > 0.0) {
        const double r = std::log(price / h.back());
        auto& n = lr_n_[static_cast<std::size_t>(i)];
        auto& v = lr_var_[static_cast<std::size_t>(i)];
        ++n;
        constexpr double kLambda = 0.999;  // half-life ~700 steps (~1 hour)
        v = n == 1 ? r * r : kLambda * v + (1.0 - kLambda) * r * r;
      }
      history_[i].push_back(price);
      if (i < n_stocks_) record_.stock_price[static_cast<std::size_t>(i)].push_back(price);
    }
    step_prices_.clear();
    for (int i = 0; i < n_stocks_; ++i) step_prices_.push_back(history_[i].back());
    index_view_ = compute_index(step_prices_, shares_100m_, m0_);
    vf_view_ = futures_common_value(index_view_, cfg_.futures.per_day_rate(),
                                    cfg_.futures.expiry_day, listed_day_);
    const double fut_price = history_[fut_].back();
    record_.index_level.push_back(index_view_);
    record_.futures_price.push_back(fut_price);
    record_.basis.push_back(fut_price - index_view_);
    log_basis(t, fut_price, index_view_);
    log_quotes(t);

    wealth_and_bankruptcy(t);

    if (last_step_of_day) day_end(t, day, final_step);
  }

  // ---- trader decisions ------------------------------------------------

  double trailing_mean(const std::vector<double>& h, int window) const {
    const int n = std::min<int>(window, static_cast<int>(h.size()));
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += h[h.size() - 1 - static_cast<std::size_t>(j)];
    return n > 0 ? sum / n : 0.0;
  }

  void trader_turn(AgentRecord& a, Step t) {
    cancel_live(a);
    const std::int32_t inst = a.trader.instrument;
    const InstrumentSpec& spec = instruments_[static_cast<std::size_t>(inst)];
    const bool is_fut = spec.is_futures;

    const Step interval = next_arrival_interval(cfg_.agents.arrival_mean, a.rng);
    a.next_arrival = t + interval;
    push_arrival(a.id, a.next_arrival);

    QuoteSnapshot snap = books_[static_cast<std::size_t>(inst)].snapshot(last_ticks_[inst], t);
    double phat = 0.0;
    switch (a.trader.type) {
      case TraderType::Informed:
        phat = is_fut ? expected_price_informed_futures(
                            path_, t, a.trader.window, shares_100m_, m0_,
                            cfg_.futures.per_day_rate(), cfg_.futures.expiry_day, listed_day_)
                      : expected_price_informed_stock(
                            path_, static_cast<std::size_t>(inst), t, a.trader.window);
        break;
      case TraderType::Uninformed: {
        const double v = is_fut ? vf_view_ : path_.value(static_cast<std::size_t>(inst), t);
        const double pbar = trailing_mean(history_[static_cast<std::size_t>(inst)], a.trader.window);
        if (pbar <= 0.0) return;  // warm-up
        const double pm = snap.midpoint * spec.tick_size;
        phat = expected_price_uninformed(v, pbar, pm, a.trader.wa, a.trader.wb, a.trader.wc);
        break;
      }
      case TraderType::Noise: {
        const double lo = ticks_to_price(std::min(snap.bid5, snap.ask5), spec);
        const double hi = ticks_to_price(std::max(snap.bid5, snap.ask5), spec);
        phat = expected_price_noise(lo, hi, a.rng.next_unit());
        break;
      }
    }
    if (!(phat > 0.0)) return;

    DecisionInputs in;
    in.instrument = &spec;
    in.expected_price = phat;
    in.reference_price = ticks_to_price(last_ticks_[inst], spec);
    in.price_history = history_[static_cast<std::size_t>(inst)];
    in.long_run_variance = lr_var_[static_cast<std::size_t>(inst)];
    in.cash = a.cash;
    if (is_fut) {
      in.holdings = a.margin.position;
      in.position_scale = cfg_.futures.multiplier;
      const Cents cm = contract_margin(last_ticks_[fut_], fc_);
      const Cents wealth = update_wealth(a.cash, a.holdings, stock_ticks_span(), a.margin,
                                         last_ticks_[fut_], fc_);
      const Quantity by_safety = static_cast<Quantity>(std::floor(
          cfg_.agents.safety_ratio * static_cast<double>(std::max<Cents>(wealth, 0)) /
          static_cast<double>(cm)));
      const Quantity by_cash = (a.cash + a.margin.margin) / cm;
      in.max_abs_position = std::max<Quantity>(std::min(by_safety, by_cash), 0);
    } else {
      in.holdings = a.holdings[static_cast<std::size_t>(inst)];
    }

    const Quantity cap_lots = is_fut ? cfg_.agents.futures_max_order_lots : cfg_.agents.max_order_lots;
    if (cap_lots > 0) in.max_order_quantity = cap_lots * spec.lot;
    in.noise_order_lots = cfg_.agents.noise_order_lots;
    const double delta = is_fut ? cfg_.agents.futures_price_delta : cfg_.agents.price_delta;
    auto intent = make_order_intent(a.trader, in, delta, a.rng);
    if (!intent) return;

    Order o;
    o.id = next_order_id_++;
    o.instrument = inst;
    o.side = intent->side;
    o.kind = OrderKind::Limit;
    o.price = intent->price;
    o.quantity = intent->quantity;
    o.owner = a.id;
    o.submitted_at = t;
    o.expires_at = t + interval;  // order life equals the arrival interval
    submit_and_apply(o, t, &a);
  }

  Cents arb_basket_value(const AgentRecord& a) const {
    Cents v = 0;
    for (int i = 0; i < n_stocks_; ++i) v += a.holdings[static_cast<std::size_t>(i)] * last_ticks_[i];
    return v;
  }

  void arbitrageur_turn(AgentRecord& a, Step t, bool final_step) {
    const Cents wealth =
        update_wealth(a.cash, a.holdings, stock_ticks_span(), a.margin, last_ticks_[fut_], fc_);
    ArbView view;
    view.futures_price = ticks_to_price(last_ticks_[fut_], instruments_[static_cast<std::size_t>(fut_)]);
    view.theoretical_value = vf_view_;
    view.futures_ticks = last_ticks_[fut_];
    view.stock_ticks = stock_ticks_span();
    view.shares_100m = shares_100m_;
    view.base_market_value = m0_;
    view.multiplier = cfg_.futures.multiplier;
    view.wealth = wealth;
    view.stock_lots = stock_lots_;
    view.final_step = final_step;

    const ArbPhase phase_before = a.arb.phase;
    auto orders = evaluate_and_act(a.arb, a.arb_params, view, fc_, a.holdings, a.margin.position, t);

    Cents stock_spend = 0;
    Cents cash_left = a.cash;
    for (const ArbOrder& ao : orders) {
      Quantity qty = ao.quantity;
      auto& book = books_[static_cast<std::size_t>(ao.instrument)];
      const Quantity lot = instruments_[static_cast<std::size_t>(ao.instrument)].lot;
      // seek immediate execution without chasing liquidity: take at most the
      // visible five levels per arrival and repair the residue next step
      const Quantity visible = book.visible_depth(opposite(ao.side), 5, t);
      qty = std::min(qty, visible - visible % lot);
      if (qty <= 0) continue;
      if (ao.instrument < n_stocks_ && ao.side == Side::Buy) {
        // 2% price buffer so walking the levels cannot drive cash negative
        const Ticks ask = book.best_price(Side::Sell, t);
        const double per_share = static_cast<double>(ask) * 1.02;
        const Quantity affordable = static_cast<Quantity>(
            std::floor(static_cast<double>(cash_left) / per_share));
        qty = std::min(qty, affordable - affordable % cfg_.stock_lot);
        if (qty <= 0) continue;
      }
      Order o;
      o.id = next_order_id_++;
      o.instrument = ao.instrument;
      o.side = ao.side;
      o.kind = OrderKind::Market;
      o.quantity = qty;
      o.owner = a.id;
      o.submitted_at = t;
      o.expires_at = t + 1;
      const Cents cash_before = a.cash;
      submit_and_apply(o, t, nullptr);
      if (ao.instrument < n_stocks_ && ao.side == Side::Buy)
        stock_spend += cash_before - a.cash;
      cash_left = a.cash;
    }

    if (phase_before == ArbPhase::Flat && a.arb.phase == ArbPhase::Open) {
      ++record_.arb_opens;
      log_arbitrage(t, "open", a.arb.entry_premium, -a.arb.futures_target, stock_spend, 0);
    }
    if (a.arb.phase == ArbPhase::Closing && a.margin.position == 0 &&
        arb_basket_value(a) == 0) {
      const Cents realized =
          update_wealth(a.cash, a.holdings, stock_ticks_span(), a.margin, last_ticks_[fut_], fc_) -
          a.arb.wealth_at_open;
      ++record_.arb_closes;
      const double premium =
          ticks_to_price(last_ticks_[fut_], instruments_[static_cast<std::size_t>(fut_)]) - vf_view_;
      log_arbitrage(t, "close", premium, 0, 0, realized);
      a.arb.phase = ArbPhase::Flat;
      a.arb.basket_target.clear();
      a.arb.futures_target = 0;
    }

    // mechanism sweep: margin stays within the safety ratio plus one contract
    const Cents cm = contract_margin(last_ticks_[fut_], fc_);
    const Cents wealth_now =
        update_wealth(a.cash, a.holdings, stock_ticks_span(), a.margin, last_ticks_[fut_], fc_);
    if (wealth_now > 0) {
      const double ratio = static_cast<double>(a.margin.margin) / static_cast<double>(wealth_now);
      record_.arb_margin_ratio_worst = std::max(record_.arb_margin_ratio_worst, ratio);
      if (a.margin.margin > static_cast<Cents>(a.arb_params.safety_ratio *
                                               static_cast<double>(wealth_now)) +
                                cm)
        record_.arb_margin_ratio_ok = false;
    }
    if (a.margin.position > 0) record_.arb_futures_short_only = false;
  }

  // ---- order routing ----------------------------------------------------

  void submit_and_apply(const Order& o, Step t, AgentRecord* track_live) {
    ++record_.order_count;
    trades_buf_.clear();
    const SubmitResult res = books_[static_cast<std::size_t>(o.instrument)].submit(o, t, trades_buf_);
    if (!res.accepted()) return;
    for (const Trade& tr : trades_buf_) apply_trade(tr);
    if (track_live && res.resting > 0) track_live->live_order = o.id;
    auto& book = books_[static_cast<std::size_t>(o.instrument)];
    if (book.has_live(Side::Buy, t) && book.has_live(Side::Sell, t) &&
        book.best_price(Side::Buy, t) >= book.best_price(Side::Sell, t))
      record_.book_never_crossed = false;
  }

  void apply_trade(const Trade& tr) {
    ++record_.trade_count;
    AgentRecord& buyer = agents_[static_cast<std::size_t>(tr.buyer)];
    AgentRecord& seller = agents_[static_cast<std::size_t>(tr.seller)];
    if (tr.instrument < n_stocks_) {
      const Cents cost = tr.price * tr.quantity;  // stock ticks are cents/share
      buyer.cash -= cost;
      seller.cash += cost;
      buyer.holdings[static_cast<std::size_t>(tr.instrument)] += tr.quantity;
      seller.holdings[static_cast<std::size_t>(tr.instrument)] -= tr.quantity;
      if (seller.holdings[static_cast<std::size_t>(tr.instrument)] < 0)
        record_.stock_holdings_nonnegative = false;
    } else {
      apply_futures_fill(buyer.margin, buyer.cash, Side::Buy, tr.quantity, tr.price, fc_);
      apply_futures_fill(seller.margin, seller.cash, Side::Sell, tr.quantity, tr.price, fc_);
    }
    last_ticks_[tr.instrument] = tr.price;
    // trade-count (not volume) weighted: one sample per transaction
    step_price_sum_[static_cast<std::size_t>(tr.instrument)] += tr.price;
    ++step_trade_count_[static_cast<std::size_t>(tr.instrument)];
    log_trade(tr);
  }

  void cancel_live(AgentRecord& a) {
    if (a.live_order == kNoOrder) return;
    books_[static_cast<std::size_t>(a.trader.instrument)].cancel(a.live_order);
    a.live_order = kNoOrder;
  }

  // ---- clearing hooks ----------------------------------------------------

  void forced_this_step(Step t) {
    if (flagged_ids_.empty()) return;
    for (AgentId id : flagged_ids_) {
      AgentRecord& a = agents_[static_cast<std::size_t>(id)];
      if (!a.margin.flagged) continue;
      const Ticks ref = prev_settle_;
      if (a.margin.position == 0 ||
          account_equity(a.margin, ref, fc_) >= maintenance_requirement(a.margin, ref, fc_)) {
        a.margin.flagged = false;
        continue;
      }
      if (a.cls != AgentClass::Arbitrageur) cancel_live(a);  // broker takes over
      Order o;
      o.id = next_order_id_++;
      o.instrument = fut_;
      o.side = a.margin.position > 0 ? Side::Sell : Side::Buy;
      o.kind = OrderKind::Market;
      o.quantity = 1;  // one contract per step until compliant
      o.owner = a.id;
      o.submitted_at = t;
      o.expires_at = t + 1;
      trades_buf_.clear();
      ++record_.order_count;
      const SubmitResult res = books_[static_cast<std::size_t>(fut_)].submit(o, t, trades_buf_);
      if (!res.accepted() || res.executed == 0) {
        ++record_.forced_closes_deferred;  // no liquidity: retry next step
        continue;
      }
      for (const Trade& tr : trades_buf_) apply_trade(tr);
      ++record_.forced_closes_total;
      ++forced_today_;
    }
  }

  void wealth_and_bankruptcy(Step t) {
    for (auto& a : agents_) {
      bool broke = false;
      if (a.cls == AgentClass::StockTrader) {
        const std::int32_t inst = a.trader.instrument;
        const Cents wealth =
            a.cash + a.holdings[static_cast<std::size_t>(inst)] * last_ticks_[inst];
        broke = stock_trader_bankrupt(wealth, last_ticks_[inst], cfg_.stock_lot);
      } else if (a.cls == AgentClass::FuturesTrader) {
        const Cents wealth = a.cash + account_equity(a.margin, last_ticks_[fut_], fc_);
        broke = futures_trader_bankrupt(wealth, last_ticks_[fut_], fc_);
      }
      if (broke) replace_bankrupt(a, t);
    }
  }

  // The bankrupt agent exits with its cash; open positions transfer to a
  // residual (clearing-house) account at their marks so the futures zero-sum
  // and share-conservation checks stay exact. The replacement re-enters with
  // the recorded initial endowment.
  void replace_bankrupt(AgentRecord& a, Step t) {
    ++record_.bankruptcies;
    cancel_live(a);
    for (int i = 0; i < n_stocks_; ++i) {
      sink_holdings_[static_cast<std::size_t>(i)] += a.holdings[static_cast<std::size_t>(i)];
      a.holdings[static_cast<std::size_t>(i)] = 0;
    }
    if (a.margin.position != 0) {
      const Side side = a.margin.position > 0 ? Side::Buy : Side::Sell;
      for (const FuturesLot& lot : a.margin.lots)
        apply_futures_fill(sink_margin_, sink_cash_, side, lot.qty, lot.price, fc_);
    }
    sink_cash_ += a.margin.margin;
    sink_margin_.realized_total += a.margin.realized_total;
    a.margin = MarginAccount{};

    a.cash = a.init_cash;
    if (a.cls == AgentClass::StockTrader) {
      a.holdings[static_cast<std::size_t>(a.trader.instrument)] = a.init_shares;
      expected_shares_[static_cast<std::size_t>(a.trader.instrument)] += a.init_shares;
    }
    const Step interval = next_arrival_interval(cfg_.agents.arrival_mean, a.rng);
    a.next_arrival = t + interval;
    push_arrival(a.id, a.next_arrival);
  }

  void day_end(Step t, int day, bool final_day) {
    for (int i = 0; i <= n_stocks_; ++i) {
      auto removed = books_[static_cast<std::size_t>(i)].clear(t);
      for (const Order& o : removed) {
        AgentRecord& owner = agents_[static_cast<std::size_t>(o.owner)];
        if (owner.live_order == o.id) owner.live_order = kNoOrder;
      }
    }

    Ticks settle = last_ticks_[fut_];
    if (final_day) {
      // expiry: cash-settle at the spot index, rounded to the futures grid
      settle = price_to_ticks(index_view_, instruments_[static_cast<std::size_t>(fut_)]);
    }

    for (auto& a : agents_) {
      if (final_day) {
        const bool had_position = a.margin.position != 0;
        settle_at_expiry(a.margin, a.cash, settle, fc_);
        if (a.cls == AgentClass::Arbitrageur && a.arb.phase != ArbPhase::Flat) {
          const Cents realized = update_wealth(a.cash, a.holdings, stock_ticks_span(), a.margin,
                                               settle, fc_) -
                                 a.arb.wealth_at_open;
          ++record_.arb_settles;
          log_arbitrage(t, "settle", record_.basis.back(), had_position ? 1 : 0,
                        arb_basket_value(a), realized);
          a.arb.phase = ArbPhase::Flat;
          a.arb.basket_target.clear();
          a.arb.futures_target = 0;
        }
      } else {
        settle_account(a.margin, a.cash, settle, fc_);
      }
    }
    if (final_day) {
      settle_at_expiry(sink_margin_, sink_cash_, settle, fc_);
    } else {
      settle_account(sink_margin_, sink_cash_, settle, fc_);
    }

    // futures market is a closed system: realized P&L sums to zero exactly
    Cents zero_sum = sink_margin_.realized_total;
    for (const auto& a : agents_) zero_sum += a.margin.realized_total;
    if (zero_sum != 0) record_.zero_sum_exact = false;
    record_.zero_sum_worst = std::max<Cents>(record_.zero_sum_worst, std::llabs(zero_sum));

    check_share_conservation();

    record_.settlement_ticks.push_back(settle);
    record_.forced_close_contracts.push_back(forced_today_);
    log_settlement(day, settle, forced_today_);
    log_wealth(day);
    forced_today_ = 0;
    prev_settle_ = settle;

    flagged_ids_.clear();
    for (const auto& a : agents_)
      if (a.margin.flagged) flagged_ids_.push_back(a.id);
  }

  void check_share_conservation() {
    Quantity min_holding = 0;
    for (int i = 0; i < n_stocks_; ++i) {
      Quantity total = sink_holdings_[static_cast<std::size_t>(i)];
      for (const auto& a : agents_) {
        total += a.holdings[static_cast<std::size_t>(i)];
        min_holding = std::min(min_holding, a.holdings[static_cast<std::size_t>(i)]);
      }
      if (total != expected_shares_[static_cast<std::size_t>(i)]) record_.shares_conserved = false;
    }
    record_.min_stock_holding = std::min(record_.min_stock_holding, min_holding);
    if (min_holding < 0) record_.stock_holdings_nonnegative = false;
  }

  // ---- logging -----------------------------------------------------------

  std::span<const Ticks> stock_ticks_span() const {
    return std::span<const Ticks>(last_ticks_.data(), static_cast<std::size_t>(n_stocks_));
  }

  void write_common_values() {
    if (!sinks_ || !sinks_->common_values.is_open()) return;
    for (Step t = 0; t < cfg_.total_steps(); ++t)
      for (int i = 0; i < n_stocks_; ++i)
        sinks_->common_values.writef("%lld,%d,%.6f\n", static_cast<long long>(t),
                                     cfg_.stocks[static_cast<std::size_t>(i)].id,
                                     path_.value(static_cast<std::size_t>(i), t));
  }

  void log_trade(const Trade& tr) {
    digest_.mix(static_cast<std::uint64_t>(tr.step));
    digest_.mix(static_cast<std::uint64_t>(tr.instrument));
    digest_.mix(static_cast<std::uint64_t>(tr.price));
    digest_.mix(static_cast<std::uint64_t>(tr.quantity));
    digest_.mix(static_cast<std::uint64_t>(tr.buyer));
    digest_.mix(static_cast<std::uint64_t>(tr.seller));
    if (sinks_ && sinks_->trades.is_open()) {
      const InstrumentSpec& ins = instruments_[static_cast<std::size_t>(tr.instrument)];
      sinks_->trades.writef("%lld,%s,%.4f,%lld,%d,%d,%s\n", static_cast<long long>(tr.step),
                            ins.label.c_str(), ticks_to_price(tr.price, ins),
                            static_cast<long long>(tr.quantity), tr.buyer, tr.seller,
                            tr.aggressor == Side::Buy ? "buy" : "sell");
    }
  }

  void log_quotes(Step t) {
    for (int i = 0; i <= n_stocks_; ++i) {
      const InstrumentSpec& ins = instruments_[static_cast<std::size_t>(i)];
      QuoteSnapshot snap = books_[static_cast<std::size_t>(i)].snapshot(last_ticks_[i], t);
      digest_.mix(static_cast<std::uint64_t>(t));
      digest_.mix(snap.has_bid ? static_cast<std::uint64_t>(snap.best_bid) : 0xffffffffull);
      digest_.mix(snap.has_ask ? static_cast<std::uint64_t>(snap.best_ask) : 0xffffffffull);
      digest_.mix(static_cast<std::uint64_t>(snap.bid5));
      digest_.mix(static_cast<std::uint64_t>(snap.ask5));
      if (i == fut_) {
        if (snap.has_bid && snap.has_ask) {
          record_.futures_spread.push_back(
              static_cast<double>(snap.best_ask - snap.best_bid) * ins.tick_size);
        } else {
          ++record_.futures_spread_skipped;
        }
      }
      if (sinks_ && sinks_->quotes.is_open()) {
        char bb[32] = "", ba[32] = "";
        if (snap.has_bid) std::snprintf(bb, sizeof bb, "%.4f", ticks_to_price(snap.best_bid, ins));
        if (snap.has_ask) std::snprintf(ba, sizeof ba, "%.4f", ticks_to_price(snap.best_ask, ins));
        sinks_->quotes.writef("%lld,%s,%s,%s,%.4f,%.4f,%.4f\n", static_cast<long long>(t),
                              ins.label.c_str(), bb, ba, ticks_to_price(snap.bid5, ins),
                              ticks_to_price(snap.ask5, ins), snap.midpoint * ins.tick_size);
      }
    }
  }

  void log_basis(Step t, double fut_price, double index) {
    digest_.mix_double(fut_price);
    digest_.mix_double(index);
    if (sinks_ && sinks_->basis.is_open())
      sinks_->basis.writef("%lld,%.6f,%.6f,%.6f\n", static_cast<long long>(t), fut_price, index,
                           fut_price - index);
  }

  void log_wealth(int day) {
    for (const auto& a : agents_) {
      Cents stock_value = 0;
      for (int i = 0; i < n_stocks_; ++i)
        stock_value += a.holdings[static_cast<std::size_t>(i)] * last_ticks_[i];
      const Cents equity = account_equity(a.margin, last_ticks_[fut_], fc_);
      const Cents total = a.cash + stock_value + equity;
      digest_.mix(static_cast<std::uint64_t>(a.id));
      digest_.mix(static_cast<std::uint64_t>(total));
      if (sinks_ && sinks_->wealth.is_open()) {
        sinks_->wealth.writef("%d,%d,%s,%.2f,%.2f,%.2f,%.2f\n", day + 1, a.id,
                              trader_type_label(a, a.trader.instrument == fut_),
                              static_cast<double>(a.cash) / 100.0,
                              static_cast<double>(stock_value) / 100.0,
                              static_cast<double>(equity) / 100.0,
                              static_cast<double>(total) / 100.0);
      }
    }
  }

  void log_settlement(int day, Ticks settle, long forced) {
    digest_.mix(static_cast<std::uint64_t>(settle));
    digest_.mix(static_cast<std::uint64_t>(forced));
    if (sinks_ && sinks_->settlement.is_open())
      sinks_->settlement.writef(
          "%d,%.1f,%ld\n", day + 1,
          ticks_to_price(settle, instruments_[static_cast<std::size_t>(fut_)]), forced);
  }

  void log_arbitrage(Step t, const char* action, double premium, Quantity contracts,
                     Cents basket_cost, Cents realized) {
    digest_.mix(static_cast<std::uint64_t>(t));
    digest_.mix(static_cast<std::uint64_t>(contracts));
    if (sinks_ && sinks_->arbitrage.is_open())
      sinks_->arbitrage.writef("%lld,%s,%.4f,%lld,%.2f,%.2f\n", static_cast<long long>(t), action,
                               premium, static_cast<long long>(contracts),
                               static_cast<double>(basket_cost) / 100.0,
                               static_cast<double>(realized) / 100.0);
  }

  // ---- members -----------------------------------------------------------

  SimConfig cfg_;
  RunSinks* sinks_;
  std::vector<InstrumentSpec> instruments_;
  int n_stocks_;
  std::int32_t fut_;
  FuturesCents fc_;
  double m0_;
  CommonValuePath path_;
  std::vector<OrderBook> books_;
  std::vector<double> shares_100m_;
  std::vector<Quantity> stock_lots_;
  std::vector<Ticks> last_ticks_;
  std::vector<std::vector<double>> history_;
  std::vector<AgentRecord> agents_;
  std::vector<AgentId> arb_ids_;
  std::vector<AgentId> flagged_ids_;
  std::vector<std::vector<AgentId>> arrival_buckets_;
  Rng shuffle_rng_;
  OrderId next_order_id_ = 1;
  int listed_day_ = 1;
  Ticks prev_settle_ = 0;
  double index_view_ = kIndexBase;
  double vf_view_ = 0.0;
  std::vector<Cents> step_price_sum_;
  std::vector<long> step_trade_count_;
  std::vector<double> lr_var_;  // EWMA of squared period log returns,
  std::vector<long> lr_n_;      // one per instrument (slow risk gauge)
  std::vector<AgentId> due_;
  std::vector<Trade> trades_buf_;
  std::vector<double> step_prices_;
  long forced_today_ = 0;

  Cents sink_cash_ = 0;
  std::vector<Quantity> sink_holdings_;
  MarginAccount sink_margin_;
  std::vector<Quantity> expected_shares_;

  Digest digest_;
  RunRecord record_;
};

}  // namespace

RunRecord run(const SimConfig& config, RunSinks* sinks) {
  World world(config, sinks);
  return world.run_all();
}

}  // namespace xmkt
