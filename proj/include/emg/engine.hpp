#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "emg/config.hpp"
#include "emg/random.hpp"

namespace emg {

enum class Movement : std::uint8_t { down = 0, up = 1 };

// Numeric values sum directly to the excess demand.
enum class Action : std::int8_t { sell = -1, hold = 0, buy = 1 };

struct Agent {
  double g = 0.5;                 // probability of following the prediction
  double d = 0.0;                 // R-weighted round-trip profit since g was adopted
  bool holds_stock = false;
  double entry_price = 0.0;       // transaction price of the open buy; valid only while holds_stock
  std::int64_t entry_step = -1;
  std::uint64_t wins = 0;
  std::uint64_t trades = 0;
};

/// One completed buy -> sell round trip.
struct Transaction {
  std::size_t agent_id = 0;
  double p_buy = 0.0;
  double p_sell = 0.0;
  std::int64_t t_buy = 0;
  std::int64_t t_sell = 0;
  double profit = 0.0;            // p_sell - p_buy

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Price, the last `memory` movements, and the shared prediction table.
/// The history is packed into an integer: most recent movement in bit 0, up = 1.
/// That integer is also the state index used by the prediction table.
struct MarketState {
  double price = 0.0;
  std::int64_t t = 0;
  int memory = 1;
  std::uint32_t history = 0;
  std::vector<Movement> prediction_table;

  /// History all down, table all down. Mostly useful for scripted scenarios.
  static MarketState flat(int memory, double price);

  std::uint32_t state_count() const noexcept { return 1u << memory; }
  std::uint32_t mask() const noexcept { return state_count() - 1u; }

  /// Oldest first.
  std::vector<Movement> history_window() const;
  void set_history(std::span<const Movement> oldest_first);
};

struct StepRecord {
  std::int64_t t = 0;
  std::uint32_t state = 0;        // history index the prediction was made from
  Movement prediction = Movement::down;
  int excess_demand = 0;
  double price_before = 0.0;
  double price_after = 0.0;
  double p_tr = 0.0;
  Movement realized = Movement::down;
  bool tie = false;               // A == 0, realized movement came from a coin
  int mutations = 0;
  std::vector<Transaction> settled;

  double price_change() const noexcept { return price_after - price_before; }
};

Movement predict(const MarketState& market);

/// Position-constrained choice given the uniform draw `u`.
/// Prediction down: holder sells with prob g, flat agent buys with prob 1-g.
/// Prediction up: flat agent buys with prob g, holder sells with prob 1-g.
inline Action decide(const Agent& agent, Movement prediction, double u) noexcept {
  if (prediction == Movement::down) {
    if (agent.holds_stock) return u < agent.g ? Action::sell : Action::hold;
    return u < 1.0 - agent.g ? Action::buy : Action::hold;
  }
  if (!agent.holds_stock) return u < agent.g ? Action::buy : Action::hold;
  return u < 1.0 - agent.g ? Action::sell : Action::hold;
}

template <UniformSource S>
Action decide(const Agent& agent, Movement prediction, S& source) {
  return decide(agent, prediction, static_cast<double>(source.uniform()));
}

int aggregate_demand(std::span<const Action> actions) noexcept;

inline double update_price(double price, int excess_demand) noexcept {
  if (excess_demand > 0) return price + std::sqrt(static_cast<double>(excess_demand));
  if (excess_demand < 0) return price - std::sqrt(static_cast<double>(-excess_demand));
  return price;
}

/// (1 - beta) * P(t) + beta * P(t+1). Throws std::domain_error for beta outside [0, 1].
double transaction_price(double price_now, double price_next, double beta);

/// Closes the agent's position at `p_sell` and books the profit into the score:
/// gains at face value, losses multiplied by R. Ties count as wins.
/// Throws std::logic_error if the agent holds nothing.
Transaction settle_round_trip(Agent& agent, std::size_t agent_id, double p_sell, std::int64_t t_sell, double R);

/// g + epsilon * (2u - 1) reflected back into [0, 1]; valid for epsilon <= 1.
inline double mutated_strategy(double g, double epsilon, double u) noexcept {
  double next = g + epsilon * (2.0 * u - 1.0);
  if (next < 0.0) next = -next;
  if (next > 1.0) next = 2.0 - next;
  return next;
}

/// Draws a new strategy and resets the score when d < D. Consumes a draw only
/// when mutating. The open position is kept.
template <UniformSource S>
bool maybe_mutate(Agent& agent, double D, double epsilon, S& source) {
  if (!(agent.d < D)) return false;
  agent.g = mutated_strategy(agent.g, epsilon, static_cast<double>(source.uniform()));
  agent.d = 0.0;
  return true;
}

/// Stores `realized` as the outcome that followed the current history, then
/// shifts it into the window.
void update_history_and_table(MarketState& market, Movement realized) noexcept;

/// State of one run. Single-threaded; distinct instances are independent.
class Simulation {
public:
  Simulation(RunConfig config, std::vector<Agent> agents, MarketState market);

  const RunConfig& config() const noexcept { return config_; }
  const std::vector<Agent>& agents() const noexcept { return agents_; }
  std::vector<Agent>& agents() noexcept { return agents_; }
  const MarketState& market() const noexcept { return market_; }
  MarketState& market() noexcept { return market_; }

  /// Actions taken in the most recent step, by agent index.
  std::span<const Action> last_actions() const noexcept { return actions_; }

  std::vector<double> strategies() const;
  void reset_trade_counters() noexcept;

  /// One full timestep: predict, every agent decides in index order (one draw
  /// each), then execute().
  template <UniformSource S>
  const StepRecord& step(S& source) {
    const Movement prediction = predict(market_);
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      actions_[i] = decide(agents_[i], prediction, static_cast<double>(source.uniform()));
    }
    return execute_actions(prediction, source);
  }

  /// Runs the rest of the step with externally chosen actions. Rejects a sell
  /// from a flat agent or a buy from a holder.
  template <UniformSource S>
  const StepRecord& execute(std::span<const Action> actions, S& source) {
    if (actions.size() != agents_.size()) throw std::invalid_argument("execute: one action per agent required");
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if ((actions[i] == Action::sell && !agents_[i].holds_stock) ||
          (actions[i] == Action::buy && agents_[i].holds_stock)) {
        throw std::logic_error("execute: action inconsistent with agent " + std::to_string(i) + "'s position");
      }
      actions_[i] = actions[i];
    }
    return execute_actions(predict(market_), source);
  }

private:
  template <UniformSource S>
  const StepRecord& execute_actions(Movement prediction, S& source);

  RunConfig config_;
  std::vector<Agent> agents_;
  MarketState market_;
  std::vector<Action> actions_;
  StepRecord record_;
};

template <UniformSource S>
const StepRecord& Simulation::execute_actions(Movement prediction, S& source) {
  StepRecord& rec = record_;
  rec.t = market_.t;
  rec.state = market_.history;
  rec.prediction = prediction;
  rec.settled.clear();
  rec.mutations = 0;

  const int demand = aggregate_demand(actions_);
  const double price = market_.price;
  const double next_price = update_price(price, demand);
  const double p_tr = transaction_price(price, next_price, config_.beta);

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    Agent& agent = agents_[i];
    if (actions_[i] == Action::buy) {
      agent.holds_stock = true;
      agent.entry_price = p_tr;
      agent.entry_step = market_.t;
    } else if (actions_[i] == Action::sell) {
      rec.settled.push_back(settle_round_trip(agent, i, p_tr, market_.t, config_.R));
      if (maybe_mutate(agent, config_.D, config_.epsilon, source)) ++rec.mutations;
    }
  }

  Movement realized;
  if (demand > 0) {
    realized = Movement::up;
  } else if (demand < 0) {
    realized = Movement::down;
  } else {
    realized = static_cast<double>(source.uniform()) < 0.5 ? Movement::up : Movement::down;
  }
  update_history_and_table(market_, realized);
  market_.price = next_price;
  ++market_.t;

  rec.excess_demand = demand;
  rec.price_before = price;
  rec.price_after = next_price;
  rec.p_tr = p_tr;
  rec.realized = realized;
  rec.tie = demand == 0;
  return rec;
}

/// Draw order from `source`: N strategies (agent order), m history movements
/// (oldest first), 2^m table entries (state order), then, only when
/// random_initial_holdings is set, one holding coin per agent.
template <UniformSource S>
Simulation initialize(const RunConfig& config, S& source) {
  config.validate();
  std::vector<Agent> agents(static_cast<std::size_t>(config.N));
  for (Agent& agent : agents) agent.g = static_cast<double>(source.uniform());

  MarketState market = MarketState::flat(config.m, config.initial_price);
  std::vector<Movement> window(static_cast<std::size_t>(config.m));
  for (Movement& mv : window) mv = source.uniform() < 0.5 ? Movement::up : Movement::down;
  market.set_history(window);
  for (Movement& entry : market.prediction_table) entry = source.uniform() < 0.5 ? Movement::up : Movement::down;

  if (config.random_initial_holdings) {
    for (Agent& agent : agents) {
      if (source.uniform() < 0.5) {
        agent.holds_stock = true;
        agent.entry_price = config.initial_price;
        agent.entry_step = -1;
      }
    }
  }
  return Simulation(config, std::move(agents), std::move(market));
}

/// A fresh run and the random stream that drives it, seeded from config.seed.
struct Run {
  Simulation sim;
  Rng rng;
};

Run init_run(const RunConfig& config);

}  // namespace emg
