#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"

#include "emg/engine.hpp"
#include "emg/theory.hpp"
#include "hand_trace.hpp"
#include "scripted_source.hpp"

using namespace emg;
using emg::testing::ConstantSource;
using emg::testing::ScriptedSource;

namespace {

std::string key_of(const std::vector<Movement>& window) {
  std::string k;
  for (Movement mv : window) k += mv == Movement::up ? 'U' : 'D';
  return k;
}

Movement from_char(char c) { return c == 'U' ? Movement::up : Movement::down; }

}  // namespace

TEST_SUITE("core-engine") {

TEST_CASE("init_run builds a flat population of N agents") {
  RunConfig c;
  c.seed = 42;
  Run run = init_run(c);
  REQUIRE(run.sim.agents().size() == 101);
  for (const Agent& a : run.sim.agents()) {
    CHECK(a.d == 0.0);
    CHECK_FALSE(a.holds_stock);
    CHECK(a.g >= 0.0);
    CHECK(a.g < 1.0);
  }
  CHECK(run.sim.market().history_window().size() == 3);
  CHECK(run.sim.market().prediction_table.size() == 8);
  CHECK(run.sim.market().price == 0.0);
}

TEST_CASE("init_run is a pure function of the seed") {
  RunConfig c;
  c.seed = 7;
  Run a = init_run(c);
  Run b = init_run(c);
  CHECK(a.sim.strategies() == b.sim.strategies());
  CHECK(a.sim.market().history == b.sim.market().history);
  CHECK(a.sim.market().prediction_table == b.sim.market().prediction_table);

  c.seed = 8;
  Run other = init_run(c);
  CHECK(other.sim.strategies() != a.sim.strategies());
}

TEST_CASE("initial strategies are uniform on [0,1]") {
  RunConfig c;
  c.N = 100000;
  c.seed = 2024;
  Run run = init_run(c);
  const std::vector<double> g = run.sim.strategies();
  // two-pass sample statistics, independent of the observables module
  double mean = 0.0;
  for (double x : g) mean += x;
  mean /= static_cast<double>(g.size());
  double var = 0.0;
  for (double x : g) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(g.size()));
  CHECK(std::abs(sd - 1.0 / std::sqrt(12.0)) <= 0.01);
}

TEST_CASE("random_initial_holdings starts roughly half the agents long") {
  RunConfig c;
  c.N = 10000;
  c.random_initial_holdings = true;
  c.initial_price = 5.0;
  Run run = init_run(c);
  int holders = 0;
  for (const Agent& a : run.sim.agents()) {
    if (a.holds_stock) {
      ++holders;
      CHECK(a.entry_price == 5.0);
    }
  }
  CHECK(holders > 4800);
  CHECK(holders < 5200);
}

TEST_CASE("invalid configuration names the field") {
  auto field_of = [](RunConfig c) -> std::string {
    try {
      c.validate();
    } catch (const ConfigError& e) {
      return e.key();
    }
    return "";
  };
  RunConfig c;
  CHECK(field_of(c).empty());
  c.beta = 1.5;
  CHECK(field_of(c) == "beta");
  c = RunConfig{};
  c.R = 0.5;
  CHECK(field_of(c) == "R");
  c = RunConfig{};
  c.D = 0.0;
  CHECK(field_of(c) == "D");
  c = RunConfig{};
  c.epsilon = 0.0;
  CHECK(field_of(c) == "epsilon");
  c = RunConfig{};
  c.N = 0;
  CHECK(field_of(c) == "N");
  c = RunConfig{};
  c.m = 0;
  CHECK(field_of(c) == "m");
  CHECK_THROWS_AS(init_run(c), ConfigError);
}

TEST_CASE("predict reads the table at the current history") {
  MarketState market = MarketState::flat(3, 0.0);
  const std::vector<Movement> uuu{Movement::up, Movement::up, Movement::up};
  market.set_history(uuu);
  market.prediction_table.assign(8, Movement::up);
  market.prediction_table[market.history] = Movement::down;
  CHECK(predict(market) == Movement::down);

  MarketState one = MarketState::flat(1, 0.0);
  one.prediction_table = {Movement::down, Movement::up};
  const Movement up[] = {Movement::up};
  one.set_history(up);
  CHECK(predict(one) == Movement::up);
}

TEST_CASE("history window round-trips through the packed index") {
  MarketState market = MarketState::flat(4, 0.0);
  const std::vector<Movement> w{Movement::up, Movement::down, Movement::down, Movement::up};
  market.set_history(w);
  CHECK(market.history_window() == w);
  CHECK_THROWS_AS(market.set_history(std::vector<Movement>{Movement::up}), std::invalid_argument);
}

TEST_CASE("update_history_and_table records the outcome that followed each history") {
  SUBCASE("up-up-up then down") {
    MarketState market = MarketState::flat(3, 0.0);
    market.set_history(std::vector<Movement>{Movement::up, Movement::up, Movement::up});
    const std::uint32_t before = market.history;
    update_history_and_table(market, Movement::down);
    CHECK(market.prediction_table[before] == Movement::down);
    CHECK(key_of(market.history_window()) == "UUD");
  }
  SUBCASE("m = 1 fixed point") {
    MarketState market = MarketState::flat(1, 0.0);
    market.set_history(std::vector<Movement>{Movement::up});
    for (int i = 0; i < 5; ++i) update_history_and_table(market, Movement::up);
    CHECK(key_of(market.history_window()) == "U");
    CHECK(market.prediction_table[1] == Movement::up);
  }
  SUBCASE("scripted sequences match a hand-maintained map") {
    for (const std::string script : {"UDDUDUUUU", "UDDUDUUUDDDUDUUDUDDU"}) {
      MarketState market = MarketState::flat(3, 0.0);
      market.set_history(std::vector<Movement>{Movement::down, Movement::down, Movement::down});
      std::string window = "DDD";
      std::map<std::string, char> table;  // unseen histories keep the initial 'D'
      for (char c : script) {
        table[window] = c;
        window = window.substr(1) + c;
        update_history_and_table(market, from_char(c));
      }
      CHECK(key_of(market.history_window()) == window);
      for (std::uint32_t s = 0; s < 8; ++s) {
        std::string k;
        for (int b = 2; b >= 0; --b) k += ((s >> b) & 1u) ? 'U' : 'D';
        const char expect = table.count(k) ? table[k] : 'D';
        CHECK(market.prediction_table[s] == from_char(expect));
      }
      // UUU was last followed by U in the first script, the prediction for UUU is U
      if (script == "UDDUDUUUU") {
        market.set_history(std::vector<Movement>{Movement::up, Movement::up, Movement::up});
        CHECK(predict(market) == Movement::up);
      }
    }
  }
}

TEST_CASE("decide follows the position-constrained rule") {
  Agent holder;
  holder.holds_stock = true;
  Agent flat;

  holder.g = 1.0;
  flat.g = 1.0;
  for (double u : {0.0, 0.3, 0.999999}) {
    CHECK(decide(holder, Movement::down, u) == Action::sell);
    CHECK(decide(flat, Movement::down, u) == Action::hold);
    CHECK(decide(flat, Movement::up, u) == Action::buy);
    CHECK(decide(holder, Movement::up, u) == Action::hold);
  }
  holder.g = 0.0;
  flat.g = 0.0;
  for (double u : {0.0, 0.5, 0.999999}) {
    CHECK(decide(holder, Movement::down, u) == Action::hold);
    CHECK(decide(flat, Movement::down, u) == Action::buy);
    CHECK(decide(flat, Movement::up, u) == Action::hold);
    CHECK(decide(holder, Movement::up, u) == Action::sell);
  }
  // a holder never buys and a flat agent never sells
  for (double g : {0.0, 0.3, 0.7, 1.0}) {
    for (double u : {0.0, 0.25, 0.5, 0.75, 0.99}) {
      holder.g = flat.g = g;
      for (Movement p : {Movement::up, Movement::down}) {
        CHECK(decide(holder, p, u) != Action::buy);
        CHECK(decide(flat, p, u) != Action::sell);
      }
    }
  }
}

TEST_CASE("decide buys with empirical frequency g") {
  Agent flat;
  flat.g = 0.7;
  Rng rng(99);
  int buys = 0;
  constexpr int kTrials = 100000;
  for (int i = 0; i < kTrials; ++i) buys += decide(flat, Movement::up, rng) == Action::buy;
  CHECK(std::abs(buys / static_cast<double>(kTrials) - 0.7) <= 0.01);
}

TEST_CASE("aggregate_demand sums actions") {
  const std::vector<Action> mixed{Action::buy, Action::buy, Action::sell, Action::hold};
  CHECK(aggregate_demand(mixed) == 1);
  CHECK(aggregate_demand(std::vector<Action>(5, Action::hold)) == 0);
  CHECK(aggregate_demand(std::vector<Action>(101, Action::buy)) == 101);
  CHECK(aggregate_demand(std::vector<Action>(101, Action::sell)) == -101);
}

TEST_CASE("update_price moves by the signed square root of demand") {
  CHECK(update_price(100.0, 9) == 103.0);
  CHECK(update_price(100.0, 0) == 100.0);
  CHECK(update_price(100.0, -16) == 96.0);
}

TEST_CASE("transaction_price interpolates between P(t) and P(t+1)") {
  CHECK(transaction_price(100.0, 104.0, 0.0) == 100.0);
  CHECK(transaction_price(100.0, 104.0, 1.0) == 104.0);
  CHECK(transaction_price(100.0, 104.0, 0.5) == 102.0);
  CHECK_THROWS_AS(transaction_price(100.0, 104.0, 1.5), std::domain_error);
  CHECK_THROWS_AS(transaction_price(100.0, 104.0, -0.1), std::domain_error);
}

TEST_CASE("settle_round_trip books gains at face value and losses times R") {
  auto holder = [](double entry) {
    Agent a;
    a.holds_stock = true;
    a.entry_price = entry;
    a.entry_step = 3;
    return a;
  };
  SUBCASE("gain") {
    Agent a = holder(100.0);
    const Transaction tx = settle_round_trip(a, 4, 103.0, 9, 2.0);
    CHECK(a.d == 3.0);
    CHECK(a.wins == 1);
    CHECK(a.trades == 1);
    CHECK_FALSE(a.holds_stock);
    CHECK(tx == Transaction{4, 100.0, 103.0, 3, 9, 3.0});
  }
  SUBCASE("loss") {
    Agent a = holder(100.0);
    settle_round_trip(a, 0, 98.0, 9, 2.0);
    CHECK(a.d == -4.0);
    CHECK(a.wins == 0);
    CHECK(a.trades == 1);
  }
  SUBCASE("symmetric sensitivity") {
    Agent a = holder(10.0);
    settle_round_trip(a, 0, 13.0, 1, 1.0);
    a.holds_stock = true;
    a.entry_price = 13.0;
    settle_round_trip(a, 0, 11.0, 2, 1.0);
    CHECK(a.d == 1.0);
  }
  SUBCASE("break-even counts as a win") {
    Agent a = holder(5.0);
    settle_round_trip(a, 0, 5.0, 1, 3.0);
    CHECK(a.wins == 1);
    CHECK(a.d == 0.0);
  }
  SUBCASE("no position") {
    Agent a;
    CHECK_THROWS_AS(settle_round_trip(a, 0, 1.0, 1, 1.0), std::logic_error);
  }
}

TEST_CASE("maybe_mutate fires only below the threshold") {
  Agent a;
  a.g = 0.5;
  a.d = -3.0;
  ScriptedSource none{};
  CHECK_FALSE(maybe_mutate(a, -4.0, 0.125, none));
  CHECK(none.consumed() == 0);
  a.d = -4.0;
  CHECK_FALSE(maybe_mutate(a, -4.0, 0.125, none));

  a.d = -5.0;
  a.holds_stock = true;
  a.entry_price = 12.0;
  Rng rng(5);
  CHECK(maybe_mutate(a, -4.0, 0.125, rng));
  CHECK(a.d == 0.0);
  CHECK(a.g >= 0.375);
  CHECK(a.g <= 0.625);
  CHECK(a.holds_stock);
  CHECK(a.entry_price == 12.0);

  ScriptedSource lo{0.0};
  a.g = 0.5;
  a.d = -5.0;
  maybe_mutate(a, -4.0, 0.125, lo);
  CHECK(a.g == 0.375);
}

TEST_CASE("mutation near a boundary reflects into [0,1]") {
  CHECK(mutated_strategy(0.05, 0.125, 0.0) == doctest::Approx(0.075));
  CHECK(mutated_strategy(0.95, 0.125, 1.0) == doctest::Approx(0.925));
  CHECK(mutated_strategy(0.0, 1.0, 0.0) == 1.0);
  CHECK(mutated_strategy(1.0, 1.0, 1.0) == 0.0);

  // histogram of 10^6 draws against the reflected-uniform density:
  // 2 / (2 eps) on [0, eps - g], 1 / (2 eps) on (eps - g, g + eps]
  const double g = 0.05;
  const double eps = 0.125;
  constexpr int kDraws = 1000000;
  constexpr double kWidth = 0.0125;
  constexpr int kBins = 14;  // covers [0, 0.175]
  std::vector<int> counts(kBins + 1, 0);
  Rng rng(123);
  for (int i = 0; i < kDraws; ++i) {
    const double x = mutated_strategy(g, eps, rng.uniform());
    REQUIRE(x >= 0.0);
    REQUIRE(x <= g + eps);
    ++counts[static_cast<std::size_t>(std::min(kBins, static_cast<int>(x / kWidth)))];
  }
  CHECK(counts[kBins] == 0);
  auto density = [&](double x) { return x < eps - g ? 1.0 / eps : 1.0 / (2.0 * eps); };
  for (int b = 0; b < kBins; ++b) {
    const double mid = (b + 0.5) * kWidth;
    const double p = density(mid) * kWidth;  // no bin straddles the 0.075 kink
    const double expected = p * kDraws;
    const double sd = std::sqrt(kDraws * p * (1.0 - p));
    CHECK(std::abs(counts[static_cast<std::size_t>(b)] - expected) <= 5.0 * sd);
  }
}

TEST_CASE("step with every agent holding leaves the price alone") {
  RunConfig c;
  c.N = 4;
  c.m = 2;
  std::vector<Agent> agents(4);
  for (Agent& a : agents) a.g = 1.0;  // flat + prediction down -> buy with prob 0
  MarketState market = MarketState::flat(2, 50.0);
  Simulation sim(c, agents, market);
  ScriptedSource draws{0.1, 0.2, 0.3, 0.4, 0.9};  // last one is the tie coin
  const StepRecord& rec = sim.step(draws);
  CHECK(rec.excess_demand == 0);
  CHECK(rec.price_after == 50.0);
  CHECK(rec.settled.empty());
  CHECK(rec.tie);
  CHECK(rec.realized == Movement::down);
  CHECK(draws.remaining() == 0);
  CHECK(sim.market().t == 1);
}

TEST_CASE("same seed gives the same record stream") {
  RunConfig c;
  c.N = 31;
  c.beta = 0.3;
  c.R = 2.0;
  c.seed = 77;
  Run a = init_run(c);
  Run b = init_run(c);
  for (int t = 0; t < 5000; ++t) {
    const StepRecord ra = a.sim.step(a.rng);
    const StepRecord& rb = b.sim.step(b.rng);
    REQUIRE(ra.excess_demand == rb.excess_demand);
    REQUIRE(ra.price_after == rb.price_after);
    REQUIRE(ra.p_tr == rb.p_tr);
    REQUIRE(ra.realized == rb.realized);
    REQUIRE(ra.settled == rb.settled);
  }
  CHECK(a.sim.strategies() == b.sim.strategies());
}

TEST_CASE("hand-traced N=3, m=1 trajectory") {
  Simulation sim = emg::testing::hand_trace_simulation();
  ScriptedSource draws(emg::testing::hand_trace_draws());
  const auto expected = emg::testing::hand_trace_expected_steps();
  std::vector<Transaction> log;
  for (const auto& want : expected) {
    const StepRecord& rec = sim.step(draws);
    CHECK(rec.excess_demand == want.A);
    CHECK(rec.price_after == want.price_after);
    CHECK(rec.p_tr == want.p_tr);
    CHECK(rec.realized == want.realized);
    log.insert(log.end(), rec.settled.begin(), rec.settled.end());
  }
  CHECK(draws.remaining() == 0);
  CHECK(log == emg::testing::hand_trace_expected_transactions());

  const auto& ag = sim.agents();
  CHECK(ag[0].g == 0.9);
  CHECK(ag[1].g == 0.2);
  CHECK(ag[2].g == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(ag[0].d == 0.0);
  CHECK(ag[1].d == std::sqrt(2.0) / 2);
  CHECK(ag[2].d == 0.0);
  CHECK(ag[0].wins == 1);
  CHECK(ag[0].trades == 1);
  CHECK(ag[1].wins == 2);
  CHECK(ag[1].trades == 2);
  CHECK(ag[2].wins == 1);
  CHECK(ag[2].trades == 2);
  CHECK(sim.market().prediction_table == std::vector<Movement>{Movement::up, Movement::down});
  CHECK(sim.market().history_window() == std::vector<Movement>{Movement::down});
}

TEST_CASE("execute rejects actions that contradict positions") {
  RunConfig c;
  c.N = 2;
  c.m = 1;
  Simulation sim(c, std::vector<Agent>(2), MarketState::flat(1, 0.0));
  ConstantSource coin{0.3};
  const std::vector<Action> bad{Action::sell, Action::hold};
  CHECK_THROWS_AS(sim.execute(bad, coin), std::logic_error);
  const std::vector<Action> short_list{Action::buy};
  CHECK_THROWS_AS(sim.execute(short_list, coin), std::invalid_argument);
}

TEST_CASE("forced all-buy then all-sell round trip earns sqrt(N)(1 - 2 beta)") {
  for (double beta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    CAPTURE(beta);
    RunConfig c;
    c.beta = beta;
    Simulation sim(c, std::vector<Agent>(101), MarketState::flat(3, 0.0));
    ConstantSource unused{0.5};
    sim.execute(std::vector<Action>(101, Action::buy), unused);
    const StepRecord& rec = sim.execute(std::vector<Action>(101, Action::sell), unused);
    REQUIRE(rec.settled.size() == 101);
    const double expect = theory::majority_roundtrip_profit(101, beta);
    for (const Transaction& tx : rec.settled) {
      CHECK(tx.profit == doctest::Approx(expect).epsilon(1e-14));
    }
    if (beta == 0.5) CHECK(rec.settled.front().profit == 0.0);
    if (beta < 0.5) CHECK(rec.settled.front().profit > 0.0);
    if (beta > 0.5) CHECK(rec.settled.front().profit < 0.0);
  }
}

}  // TEST_SUITE
