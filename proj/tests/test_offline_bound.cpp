#include <doctest.h>

#include <random>

#include "vscsim/errors.hpp"
#include "vscsim/offline_bound.hpp"

using namespace vscsim;
using M = OperativeMode;

namespace {

const PowerModelParams P{};

SimParams sim_for(int n) {
  SimParams s;
  s.n_cells = n;
  return s;
}

DPConfig exact() {
  DPConfig dp;
  dp.battery_levels = 0;
  dp.engine = DpEngine::LabelCorrecting;
  return dp;
}

// Small random instances with batteries that actually bind.
TraceSet random_instance(std::mt19937_64& rng, int n, int k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TraceSet ts;
  ts.harvest.resize(n, k);
  ts.vsc_load.resize(n, k);
  ts.mbs_load.resize(k);
  for (int t = 0; t < k; ++t) {
    for (int i = 0; i < n; ++i) {
      ts.harvest(i, t) = u(rng) < 0.5 ? 0.0 : 200.0 * u(rng);
      ts.vsc_load(i, t) = 50.0 * u(rng);
    }
    ts.mbs_load(t) = 120.0 * u(rng);
  }
  return ts;
}

SimParams tight_sim(int n, std::mt19937_64& rng) {
  auto sim = sim_for(n);
  sim.initial_battery_frac = 0.2 + 0.15 * std::uniform_real_distribution<double>(0, 1)(rng);
  return sim;
}

double replay_cost(const std::vector<std::vector<M>>& actions, const TraceSet& ts,
                   const SimParams& sim) {
  return replay_actions(actions, ts, sim, P).totals.total_cost;
}

}  // namespace

TEST_CASE("single slot equals the best of all 27 joint actions") {
  std::mt19937_64 rng(1);
  const auto sim = sim_for(3);
  for (int rep = 0; rep < 10; ++rep) {
    const auto ts = random_instance(rng, 3, 1);
    double best = 1e300;
    const auto s0 = initial_state(ts, sim);
    for (int a = 0; a < 27; ++a) {
      std::vector<M> joint{mode_from_index(a / 9), mode_from_index((a / 3) % 3), mode_from_index(a % 3)};
      best = std::min(best, step(s0, joint, sim, P, ts).outcome.cost);
    }
    const auto res = solve_offline(ts, sim, P, exact());
    CHECK(res.total_cost == best);
    CHECK(res.cumulative_reward_bound == doctest::Approx(1.0 - best));
    CHECK(replay_cost(res.actions, ts, sim) == doctest::Approx(res.total_cost).epsilon(1e-12));
  }
}

TEST_CASE("exact label correcting matches brute force") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 8; ++rep) {
    const auto sim = tight_sim(1, rng);
    const auto ts = random_instance(rng, 1, 8);
    const auto bf = brute_force(ts, sim, P);
    CHECK(bf.sequences == 6561);
    for (auto q : {QueueDiscipline::Fifo, QueueDiscipline::Lifo}) {
      auto dp = exact();
      dp.queue = q;
      const auto res = solve_offline(ts, sim, P, dp);
      CHECK(res.total_cost == bf.total_cost);
      CHECK(replay_cost(res.actions, ts, sim) == doctest::Approx(bf.total_cost).epsilon(1e-12));
    }
  }
}

TEST_CASE("binned bound stays within one bin of brute force") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 8; ++rep) {
    const auto sim = tight_sim(1, rng);
    const auto ts = random_instance(rng, 1, 8);
    const auto bf = brute_force(ts, sim, P);
    DPConfig dp;
    dp.battery_levels = 5;
    const auto res = solve_offline(ts, sim, P, dp);
    CHECK(std::abs(res.total_cost - bf.total_cost) <= 8 * binning_tolerance(sim, P, dp) + 1e-12);
  }
}

TEST_CASE("zero traffic and zero harvest: nothing beats switching off") {
  const auto sim = sim_for(2);
  TraceSet ts;
  ts.harvest = Eigen::MatrixXd::Zero(2, 6);
  ts.vsc_load = Eigen::MatrixXd::Zero(2, 6);
  ts.mbs_load = Eigen::VectorXd::Zero(6);
  const std::vector<std::vector<M>> all_off(6, std::vector<M>{M::Off, M::Off});
  for (auto dp : {exact(), DPConfig{}}) {
    const auto res = solve_offline(ts, sim, P, dp);
    CHECK(res.total_cost == doctest::Approx(replay_cost(all_off, ts, sim)).epsilon(1e-12));
    for (const auto& joint : res.actions) {
      for (auto m : joint) CHECK(m == M::Off);
    }
  }
}

TEST_CASE("stage sweep agrees with label correcting on the same grid") {
  std::mt19937_64 rng(4);
  for (int n : {1, 2, 3}) {
    const auto sim = tight_sim(n, rng);
    const auto ts = random_instance(rng, n, 10);
    DPConfig lc;
    lc.battery_levels = 11;
    lc.engine = DpEngine::LabelCorrecting;
    DPConfig lifo = lc;
    lifo.queue = QueueDiscipline::Lifo;
    DPConfig sweep = lc;
    sweep.engine = DpEngine::StageSweep;
    const auto a = solve_offline(ts, sim, P, lc);
    const auto b = solve_offline(ts, sim, P, lifo);
    const auto c = solve_offline(ts, sim, P, sweep);
    CHECK(a.total_cost == b.total_cost);
    CHECK(std::abs(a.total_cost - c.total_cost) <= 1e-9);
    CHECK(c.engine == DpEngine::StageSweep);
    CHECK(c.actions.size() == 10);
    sweep.want_path = false;
    const auto d = solve_offline(ts, sim, P, sweep);
    CHECK(d.actions.empty());
    CHECK(d.total_cost == c.total_cost);
  }
}

TEST_CASE("finer battery grids do not raise the bound beyond one coarse bin") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    auto s = tight_sim(1, rng);
    const auto ts = random_instance(rng, 1, 24);
    DPConfig coarse, fine;
    coarse.battery_levels = 11;
    fine.battery_levels = 41;
    const double c = solve_offline(ts, s, P, coarse).total_cost;
    const double f = solve_offline(ts, s, P, fine).total_cost;
    CHECK(f <= c + binning_tolerance(s, P, coarse));
  }
}

TEST_CASE("two-slot hand check: MacPhy affordable only in the second slot") {
  auto sim = sim_for(1);
  sim.initial_battery_frac = 0.205;  // 410 Wh: any active mode would cross 400 Wh
  TraceSet ts;
  ts.harvest.resize(1, 2);
  ts.harvest << 0.0, 200.0;
  ts.vsc_load = Eigen::MatrixXd::Constant(1, 2, 37.5);
  ts.mbs_load = Eigen::VectorXd::Constant(2, 100.0);

  const double e_max = (9.18 + 1100 + (630 + 215) / 8.0 + (440 + 60) / 8.0) * 1.1;
  const double macro_full = (9.18 + 1100 + (630 + 215) / 8.0) * 1.1;
  const double forced_off = 0.5 * macro_full / e_max + 0.5 * (25.0 / 137.5);
  const double macro_own = (9.18 + 1100 + (630 + 215 * (100.0 / 112.5)) / 8.0) * 1.1;
  const double phyrf = macro_own + 1.1 * (440 + 60) / 8.0;
  const double slot2[3] = {forced_off, 0.5 * phyrf / e_max, 0.5 * macro_own / e_max};

  const auto bf = brute_force(ts, sim, P);
  CHECK(bf.sequences == 9);
  REQUIRE(bf.actions.size() == 2);
  CHECK(bf.actions[1][0] == M::MacPhy);
  CHECK(bf.total_cost == doctest::Approx(forced_off + slot2[2]).epsilon(1e-12));
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const std::vector<std::vector<M>> seq{{mode_from_index(a)}, {mode_from_index(b)}};
      CHECK(replay_cost(seq, ts, sim) == doctest::Approx(forced_off + slot2[b]).epsilon(1e-12));
    }
  }
  CHECK(solve_offline(ts, sim, P, exact()).total_cost == bf.total_cost);
}

TEST_CASE("brute force edge cases and capability limits") {
  std::mt19937_64 rng(6);
  const auto ts = random_instance(rng, 1, 4);
  const auto zero = brute_force(ts, sim_for(1), P, 0);
  CHECK(zero.actions.empty());
  CHECK(zero.total_cost == 0.0);
  CHECK_THROWS_AS(brute_force(random_instance(rng, 2, 12), sim_for(2), P), CapabilityError);
  CHECK_THROWS_AS(brute_force(ts, sim_for(1), P, 4, 10), CapabilityError);

  const auto four = random_instance(rng, 4, 3);
  CHECK_THROWS_AS(solve_offline(four, sim_for(4), P, DPConfig{}), CapabilityError);
  DPConfig wide;
  wide.max_cells = 4;
  wide.battery_levels = 3;
  CHECK_NOTHROW(solve_offline(four, sim_for(4), P, wide));

  DPConfig bad;
  bad.battery_levels = 1;
  CHECK_THROWS(bad.validate());
  DPConfig sweep_exact = exact();
  sweep_exact.engine = DpEngine::StageSweep;
  CHECK_THROWS(solve_offline(ts, sim_for(1), P, sweep_exact));
}

TEST_CASE("bin width and tolerance") {
  const auto sim = sim_for(3);
  DPConfig dp;
  dp.battery_levels = 101;
  CHECK(bin_width_wh(sim, dp) == doctest::Approx(20.0));
  CHECK(binning_tolerance(sim, P, dp) ==
        doctest::Approx(0.5 * 20.0 / derived_e_max(sim, P)).epsilon(1e-12));
  CHECK(bin_width_wh(sim, exact()) == 0.0);
}
