#include "emg/engine.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace emg {

MarketState MarketState::flat(int memory, double price) {
  if (memory < 1 || memory > kMaxMemory) throw ConfigError("m", "must be in [1, " + std::to_string(kMaxMemory) + "]");
  MarketState market;
  market.price = price;
  market.memory = memory;
  market.prediction_table.assign(std::size_t{1} << memory, Movement::down);
  return market;
}

std::vector<Movement> MarketState::history_window() const {
  std::vector<Movement> window(static_cast<std::size_t>(memory));
  for (int k = 0; k < memory; ++k) {
    // bit (memory - 1 - k) holds the k-th oldest movement
    window[static_cast<std::size_t>(k)] = ((history >> (memory - 1 - k)) & 1u) ? Movement::up : Movement::down;
  }
  return window;
}

void MarketState::set_history(std::span<const Movement> oldest_first) {
  if (oldest_first.size() != static_cast<std::size_t>(memory)) {
    throw std::invalid_argument("set_history: window length must equal memory");
  }
  history = 0;
  for (Movement mv : oldest_first) history = ((history << 1) | static_cast<std::uint32_t>(mv)) & mask();
}

Movement predict(const MarketState& market) { return market.prediction_table[market.history]; }

int aggregate_demand(std::span<const Action> actions) noexcept {
  return std::accumulate(actions.begin(), actions.end(), 0,
                         [](int acc, Action a) { return acc + static_cast<int>(a); });
}

double transaction_price(double price_now, double price_next, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::domain_error("transaction_price: beta must be in [0, 1]");
  // rounding can leave the interval by an ulp; clamp back
  const double p = (1.0 - beta) * price_now + beta * price_next;
  return std::clamp(p, std::min(price_now, price_next), std::max(price_now, price_next));
}

Transaction settle_round_trip(Agent& agent, std::size_t agent_id, double p_sell, std::int64_t t_sell, double R) {
  if (!agent.holds_stock) {
    throw std::logic_error("settle_round_trip: agent " + std::to_string(agent_id) + " holds no stock");
  }
  Transaction tx;
  tx.agent_id = agent_id;
  tx.p_buy = agent.entry_price;
  tx.p_sell = p_sell;
  tx.t_buy = agent.entry_step;
  tx.t_sell = t_sell;
  tx.profit = p_sell - agent.entry_price;

  if (tx.profit >= 0.0) {
    agent.d += tx.profit;
    ++agent.wins;
  } else {
    agent.d += R * tx.profit;
  }
  ++agent.trades;
  agent.holds_stock = false;
  return tx;
}

void update_history_and_table(MarketState& market, Movement realized) noexcept {
  market.prediction_table[market.history] = realized;
  market.history = ((market.history << 1) | static_cast<std::uint32_t>(realized)) & market.mask();
}

Simulation::Simulation(RunConfig config, std::vector<Agent> agents, MarketState market)
    : config_(std::move(config)), agents_(std::move(agents)), market_(std::move(market)) {
  config_.validate();
  if (agents_.size() != static_cast<std::size_t>(config_.N)) {
    throw std::invalid_argument("Simulation: agent count does not match N");
  }
  if (market_.memory != config_.m || market_.prediction_table.size() != market_.state_count()) {
    throw std::invalid_argument("Simulation: market memory does not match m");
  }
  actions_.assign(agents_.size(), Action::hold);
  record_.settled.reserve(agents_.size());
}

std::vector<double> Simulation::strategies() const {
  std::vector<double> out;
  out.reserve(agents_.size());
  for (const Agent& agent : agents_) out.push_back(agent.g);
  return out;
}

void Simulation::reset_trade_counters() noexcept {
  for (Agent& agent : agents_) {
    agent.wins = 0;
    agent.trades = 0;
  }
}

Run init_run(const RunConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Simulation sim = initialize(config, rng);
  return Run{std::move(sim), rng};
}

}  // namespace emg
