#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "vscsim/agents.hpp"
#include "vscsim/errors.hpp"
#include "vscsim/membership.hpp"
#include "vscsim/policy_io.hpp"

using namespace vscsim;
using M = OperativeMode;

namespace {

std::array<int, kModeCount> draw_counts(std::span<const double> row, double eps, int n, Rng& rng) {
  std::array<int, kModeCount> c{};
  for (int k = 0; k < n; ++k) ++c[static_cast<std::size_t>(epsilon_greedy(row, eps, rng))];
  return c;
}

void check_uniform(const std::array<int, kModeCount>& c, int n) {
  const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  for (int v : c) CHECK(std::abs(v - n / 3.0) <= 3 * sigma);
}

}  // namespace

TEST_CASE("quantize examples") {
  CHECK(quantize({0, 0, 0, 0}, true) == 0);
  CHECK(quantize({1, 1, 1, 1}, true) == 624);
  CHECK(quantize({0.5, 0.0, 0.999, 0.2}, true) == 271);
  CHECK(quantize({0.5, 0.0, 0.999, 0.2}, false) == 2 * 25 + 0 + 4);
  CHECK(state_count(true) == 625);
  CHECK(state_count(false) == 125);
  CHECK_THROWS_AS(quantize_value(1.01), InvalidArgument);
  CHECK_THROWS_AS(quantize_value(-0.01), InvalidArgument);
}

TEST_CASE("crisp indicator sets agree with the quantiser") {
  const auto spec = MembershipSpec::crisp_bins(1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs{0.0, 0.2, 0.4, 0.6, 0.8, 1.0, std::nextafter(0.6, 0.0)};
  for (int k = 0; k < 10000; ++k) xs.push_back(u(rng));
  for (double x : xs) {
    const auto rules = active_rules(std::span<const double>(&x, 1), spec);
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].rule == quantize_value(x));
    CHECK(rules[0].weight == 1.0);
  }
}

TEST_CASE("observe clips into the unit interval") {
  SimParams sim;
  NetworkState s;
  s.battery = Eigen::VectorXd::Constant(3, 2500.0);
  s.harvest = Eigen::VectorXd::Constant(3, 100.0);
  s.vsc_load = Eigen::VectorXd::Constant(3, 75.0);
  s.mbs_utilization = 0.4;
  const auto o = observe(s, 1, sim);
  CHECK(o.b == 1.0);
  CHECK(o.l == 1.0);
  CHECK(o.h == doctest::Approx(100.0 / sim.harvest_scale_wh));
  CHECK(o.rho == 0.4);
  CHECK(observation_inputs(o, true).size() == 4);
  CHECK(observation_inputs(o, false).size() == 3);
}

TEST_CASE("epsilon-greedy selection") {
  Rng rng(11);
  const std::array<double, 3> row{0.1, 0.9, 0.2};
  for (int k = 0; k < 100; ++k) CHECK(epsilon_greedy(row, 0.0, rng) == 1);
  check_uniform(draw_counts(row, 1.0, 10000, rng), 10000);
  const std::array<double, 3> flat{0.3, 0.3, 0.3};
  check_uniform(draw_counts(flat, 0.0, 10000, rng), 10000);
  const std::array<double, 3> pair{0.5, 0.1, 0.5};
  const auto c = draw_counts(pair, 0.0, 10000, rng);
  CHECK(c[1] == 0);
  CHECK(std::abs(c[0] - 5000) <= 150);
}

TEST_CASE("ql_update examples") {
  auto table = QTable::zeros(true, 0.1, 0.9);
  ql_update(table, 7, M::MacPhy, 1.0, 8);
  CHECK(table.q(7, 2) == doctest::Approx(0.1));
  CHECK(table.q.cwiseAbs().sum() == doctest::Approx(0.1));

  auto frozen = QTable::zeros(false, 0.0, 0.9);
  frozen.q.setConstant(0.4);
  const QValues before = frozen.q;
  ql_update(frozen, 3, M::Off, 5.0, 4);
  CHECK(frozen.q == before);

  auto fixed = QTable::zeros(true, 0.5, 0.9);
  fixed.q.setConstant(2.0);
  const QValues still = fixed.q;
  ql_update(fixed, 10, M::PhyRf, 2.0 * (1 - 0.9), 11);
  CHECK((fixed.q - still).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("firing strengths") {
  const auto spec = MembershipSpec::standard(4);
  const std::vector<double> core{0.5, 0.5, 0.5, 0.5};
  const auto w = firing_strengths(core, spec);
  CHECK(w.sum() == doctest::Approx(1.0));
  CHECK(w.maxCoeff() == 1.0);
  CHECK(w(2 * 125 + 2 * 25 + 2 * 5 + 2) == 1.0);

  const std::vector<double> mid{0.625, 0.5, 0.25, 1.0};
  const auto rules = active_rules(mid, spec);
  REQUIRE(rules.size() == 2);
  CHECK(rules[0].weight == doctest::Approx(0.5));
  CHECK(rules[1].weight == doctest::Approx(0.5));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    const std::vector<double> x{u(rng), u(rng), u(rng), u(rng)};
    CHECK(std::abs(firing_strengths(x, spec).sum() - 1.0) <= 1e-9);
    for (int d = 0; d < 4; ++d) {
      double s = 0;
      for (const auto& mf : spec.dims[static_cast<std::size_t>(d)]) s += mf.degree(x[d]);
      CHECK(std::abs(s - 1.0) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(active_rules(std::vector<double>{0.5, 0.5}, spec), InvalidArgument);
}

TEST_CASE("fql_select examples") {
  auto rb = FuzzyRuleBase::zeros(true, 0.1, 0.9);
  Rng rng(1);

  rb.q.row(10) << 0.0, 0.2, 0.7;
  const FiringSet single{{10, 1.0}};
  const auto& s = fql_select(rb, single, 0.0, rng);
  CHECK(s.action == M::MacPhy);
  CHECK(s.q_value == doctest::Approx(0.7));

  rb.q.row(20) << 0.9, 0.0, 0.0;
  rb.q.row(21) << 0.0, 0.0, 0.9;
  const FiringSet split{{20, 0.5}, {21, 0.5}};
  CHECK(fql_select(rb, split, 0.0, rng).action == M::PhyRf);

  rb.q.row(20) << 0.0, 0.9, 0.0;
  const auto& half = fql_select(rb, split, 0.0, rng);
  CHECK(half.crisp_action == doctest::Approx(1.5));
  CHECK(half.action == M::MacPhy);

  CHECK_THROWS_AS(fql_select(rb, FiringSet{}, 0.0, rng), InvalidArgument);
}

TEST_CASE("defuzzified action is a convex combination") {
  auto rb = FuzzyRuleBase::zeros(true, 0.1, 0.9);
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int r = 0; r < rb.n_rules(); ++r) rb.q.row(r) << u(gen), u(gen), u(gen);
  Rng rng(2);
  for (int k = 0; k < 2000; ++k) {
    const std::vector<double> x{u(gen), u(gen), u(gen), u(gen)};
    const auto& sel = fql_select(rb, active_rules(x, rb.spec), 0.3, rng);
    int lo = 2, hi = 0;
    for (int a : sel.rule_actions) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    CHECK(sel.crisp_action >= lo - 1e-12);
    CHECK(sel.crisp_action <= hi + 1e-12);
  }
}

TEST_CASE("fql_update examples") {
  Rng rng(4);
  auto rb = FuzzyRuleBase::zeros(true, 0.1, 0.9);
  const FiringSet single{{33, 1.0}};
  fql_select(rb, single, 0.0, rng);
  const int a = static_cast<int>(rb.pending->rule_actions[0]);
  fql_update(rb, 1.0, FiringSet{{34, 1.0}});
  CHECK(rb.q(33, a) == doctest::Approx(0.1));
  CHECK(rb.q.cwiseAbs().sum() == doctest::Approx(0.1));
  CHECK(!rb.pending);
  CHECK_THROWS_AS(fql_update(rb, 1.0, single), ProtocolError);

  // Zero TD error leaves everything untouched.
  auto flat = FuzzyRuleBase::zeros(true, 0.5, 0.9);
  flat.q.setConstant(1.0);
  const QValues before = flat.q;
  const FiringSet two{{1, 0.25}, {2, 0.75}};
  fql_select(flat, two, 0.0, rng);
  fql_update(flat, 1.0 - 0.9, two);
  CHECK((flat.q - before).cwiseAbs().maxCoeff() < 1e-15);

  // Split credit: each firing rule moves by its normalised weight.
  auto rb2 = FuzzyRuleBase::zeros(true, 0.1, 0.9);
  fql_select(rb2, two, 0.0, rng);
  const auto acts = rb2.pending->rule_actions;
  fql_update(rb2, 1.0, FiringSet{{50, 1.0}});
  CHECK(rb2.q(1, acts[0]) == doctest::Approx(0.025));
  CHECK(rb2.q(2, acts[1]) == doctest::Approx(0.075));
}

TEST_CASE("crisp fuzzy agent follows the tabular agent") {
  SimParams sim;
  const auto spec = MembershipSpec::crisp_bins(4);
  FuzzyQLearningAgent fuzzy(FuzzyRuleBase::zeros(true, 0.2, 0.9, spec), 99, 0.3);
  QLearningAgent tab(QTable::zeros(true, 0.2, 0.9), 99, 0.3);
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto obs = [&] { return AgentObservation{u(gen), u(gen), u(gen), u(gen)}; };
  AgentObservation o = obs();
  for (int t = 0; t < 5000; ++t) {
    REQUIRE(fuzzy.select(o) == tab.select(o));
    const double r = u(gen);
    o = obs();
    fuzzy.learn(r, o);
    tab.learn(r, o);
  }
  CHECK((fuzzy.rules().q - tab.table().q).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("exploration schedule") {
  ExplorationSchedule s;
  CHECK(epsilon_at(s, 0) == doctest::Approx(0.9));
  CHECK(epsilon_at(s, 2) == doctest::Approx(0.225));
  CHECK(epsilon_at(s, 10) == doctest::Approx(0.03));
  CHECK_THROWS(epsilon_at(s, -1));
}

TEST_CASE("greedy boundary is strict") {
  SimParams sim;
  CHECK(greedy_action({0, 1.0, 0, 0}, sim) == M::PhyRf);
  CHECK(greedy_action({0, 0.0, 0, 0}, sim) == M::Off);
  CHECK(greedy_action({0, sim.battery_threshold_frac, 0, 0}, sim) == M::Off);
}

TEST_CASE("algorithm names") {
  for (auto a : {Algorithm::FQL, Algorithm::QL, Algorithm::UFQL, Algorithm::UQL, Algorithm::Greedy,
                 Algorithm::StaticMacPhy, Algorithm::AllOff}) {
    CHECK(algorithm_from_name(algorithm_name(a)) == a);
  }
  CHECK_THROWS(algorithm_from_name("SARSA"));
  CHECK(is_coordinated(Algorithm::FQL));
  CHECK(!is_coordinated(Algorithm::UQL));
  CHECK(is_fuzzy(Algorithm::UFQL));
  CHECK(!is_learning(Algorithm::Greedy));
}

TEST_CASE("policy text round trip is bit exact") {
  SimParams sim;
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto algo : {Algorithm::FQL, Algorithm::QL, Algorithm::UFQL, Algorithm::UQL}) {
    auto agent = make_agent(algo, {0.1, 0.9, 0.5, FqlVariant::Standard}, 3, sim);
    AgentObservation o{u(gen), u(gen), u(gen), u(gen)};
    for (int t = 0; t < 3000; ++t) {
      agent->select(o);
      o = {u(gen), u(gen), u(gen), u(gen)};
      agent->learn(u(gen) / 3.0, o);
    }
    const auto table = policy_of(*agent);
    const auto text = policy_to_text(table);
    const auto back = policy_from_text(text);
    CHECK(policy_algorithm(back) == algo);
    CHECK(policy_to_text(back) == text);
    std::visit([&](const auto& orig) {
      using T = std::decay_t<decltype(orig)>;
      const auto& copy = std::get<T>(back);
      CHECK(copy.q == orig.q);
      CHECK(copy.alpha == orig.alpha);
      CHECK(copy.coordinated == orig.coordinated);
    }, table);
  }
  CHECK_THROWS_AS(policy_of(GreedyAgent(sim)), CapabilityError);
  CHECK_THROWS_AS(policy_from_text("vscsim-policy 2\n"), ParseError);
  CHECK_THROWS_AS(policy_from_text("vscsim-policy 1\nkind QL\ncoordinated 1\nalpha 0.1\n"),
                  ParseError);
}

TEST_CASE("tabular learning converges on a two-state toy problem") {
  // next state = action, rewards R(s,a), unused third action pinned low.
  const double R[2][2] = {{0.0, 1.0}, {2.0, 0.5}};
  const double gamma = 0.5;
  QTable t{QValues::Zero(2, 3), 0.0, gamma, false};
  t.q.col(2).setConstant(-1e9);
  Eigen::Matrix2d visits = Eigen::Matrix2d::Zero();
  Rng rng(21);
  int s = 0;
  for (int k = 0; k < 1'000'000; ++k) {
    const int a = uniform_index(rng, 2);
    visits(s, a) += 1;
    ql_update(t, s, mode_from_index(a), R[s][a], a, 1.0 / visits(s, a));
    s = a;
  }
  // Optimal cycle 0 -> 1 -> 0: V0 = 1 + g V1, V1 = 2 + g V0.
  const double v0 = (1 + gamma * 2) / (1 - gamma * gamma), v1 = 2 + gamma * v0;
  CHECK(std::abs(t.q(0, 1) - v0) < 5e-3);
  CHECK(std::abs(t.q(1, 0) - v1) < 5e-3);
  CHECK(std::abs(t.q(0, 0) - gamma * v0) < 5e-3);
  CHECK(std::abs(t.q(1, 1) - (0.5 + gamma * v1)) < 5e-3);
}
