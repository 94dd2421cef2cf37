#include "vscsim/agents.hpp"

#include <algorithm>
#include <cmath>

#include "vscsim/errors.hpp"

namespace vscsim {

AgentObservation observe(const NetworkState& state, int cell, const SimParams& sim) {
  auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return {unit(state.harvest(cell) / sim.harvest_scale_wh),
          unit(state.battery(cell) / sim.battery_capacity_wh),
          unit(state.vsc_load(cell) / sim.vsc_capacity_mbps), unit(state.mbs_utilization)};
}

std::vector<double> observation_inputs(const AgentObservation& obs, bool coordinated) {
  if (coordinated) return {obs.h, obs.b, obs.l, obs.rho};
  return {obs.h, obs.b, obs.l};
}

int quantize_value(double v, int levels) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("observation component outside [0,1]");
  return std::min(static_cast<int>(std::floor(v * levels)), levels - 1);
}

int quantize(const AgentObservation& obs, bool coordinated, int levels) {
  int index = 0;
  for (double v : observation_inputs(obs, coordinated)) index = index * levels + quantize_value(v, levels);
  return index;
}

int state_count(bool coordinated) {
  return coordinated ? kQuantLevels * kQuantLevels * kQuantLevels * kQuantLevels
                     : kQuantLevels * kQuantLevels * kQuantLevels;
}

QTable QTable::zeros(bool coordinated, double alpha, double gamma) {
  return {QValues::Zero(state_count(coordinated), kModeCount), alpha, gamma, coordinated};
}

int epsilon_greedy(std::span<const double> row, double eps, Rng& rng) {
  const int n = static_cast<int>(row.size());
  if (uniform01(rng) < eps) return uniform_index(rng, n);
  const double best = *std::max_element(row.begin(), row.end());
  int ties[kModeCount];
  int n_ties = 0;
  for (int a = 0; a < n; ++a) {
    if (row[static_cast<std::size_t>(a)] == best) ties[n_ties++] = a;
  }
  return n_ties == 1 ? ties[0] : ties[uniform_index(rng, n_ties)];
}

namespace {
std::span<const double> row_of(const QValues& q, int r) {
  return {q.data() + static_cast<std::ptrdiff_t>(r) * kModeCount, kModeCount};
}
}  // namespace

OperativeMode ql_select(const QTable& table, int state, double eps, Rng& rng) {
  if (state < 0 || state >= table.n_states()) throw InvalidArgument("state index out of range");
  return mode_from_index(epsilon_greedy(row_of(table.q, state), eps, rng));
}

void ql_update(QTable& table, int state, OperativeMode action, double reward, int next_state,
               double alpha) {
  if (state < 0 || state >= table.n_states() || next_state < 0 ||
      next_state >= table.n_states()) {
    throw InvalidArgument("state index out of range");
  }
  const double best_next = table.q.row(next_state).maxCoeff();
  double& cell = table.q(state, to_index(action));
  cell += alpha * (reward + table.gamma * best_next - cell);
}

void ql_update(QTable& table, int state, OperativeMode action, double reward, int next_state) {
  ql_update(table, state, action, reward, next_state, table.alpha);
}

std::string_view variant_name(FqlVariant v) {
  return v == FqlVariant::LabelWeighted ? "label-weighted" : "standard";
}

FqlVariant variant_from_name(std::string_view name) {
  if (name == "standard") return FqlVariant::Standard;
  if (name == "label-weighted") return FqlVariant::LabelWeighted;
  throw InvalidArgument("unknown FQL variant: " + std::string(name));
}

FuzzyRuleBase FuzzyRuleBase::zeros(bool coordinated, double alpha, double gamma,
                                   std::optional<MembershipSpec> spec) {
  const int inputs = coordinated ? 4 : 3;
  FuzzyRuleBase rb;
  rb.spec = spec ? std::move(*spec) : MembershipSpec::standard(inputs);
  if (rb.spec.n_inputs() != inputs) {
    throw InvalidArgument("membership spec width does not match the coordination flag");
  }
  rb.q = QValues::Zero(rb.spec.n_rules(), kModeCount);
  rb.alpha = alpha;
  rb.gamma = gamma;
  rb.coordinated = coordinated;
  return rb;
}

const FuzzySelection& fql_select(FuzzyRuleBase& rb, const FiringSet& firing, double eps,
                                 Rng& rng) {
  if (firing.empty()) throw InvalidArgument("no rule fires for this observation");
  FuzzySelection sel;
  sel.rules = firing;
  sel.rule_actions.reserve(firing.size());
  double weight_sum = 0.0;
  double action_sum = 0.0;
  double q_sum = 0.0;
  for (const auto& rw : firing) {
    const int a = epsilon_greedy(row_of(rb.q, rw.rule), eps, rng);
    sel.rule_actions.push_back(a);
    weight_sum += rw.weight;
    action_sum += rw.weight * a;
    const double q = rb.q(rw.rule, a);
    q_sum += rb.variant == FqlVariant::LabelWeighted ? rw.weight * a * q : rw.weight * q;
  }
  sel.crisp_action = action_sum / weight_sum;
  sel.q_value = q_sum / weight_sum;
  const double rounded = std::clamp(std::round(sel.crisp_action), 0.0, double(kModeCount - 1));
  sel.action = mode_from_index(static_cast<int>(rounded));
  rb.pending = std::move(sel);
  return *rb.pending;
}

double fql_state_value(const FuzzyRuleBase& rb, const FiringSet& firing) {
  if (firing.empty()) throw InvalidArgument("no rule fires for this observation");
  double weight_sum = 0.0;
  double value = 0.0;
  for (const auto& rw : firing) {
    Eigen::Index best = 0;
    const double q_best = rb.q.row(rw.rule).maxCoeff(&best);
    weight_sum += rw.weight;
    value += rb.variant == FqlVariant::LabelWeighted ? rw.weight * static_cast<double>(best) * q_best
                                                 : rw.weight * q_best;
  }
  return value / weight_sum;
}

void fql_update(FuzzyRuleBase& rb, double reward, const FiringSet& next_firing) {
  if (!rb.pending) throw ProtocolError("fql_update called without a preceding fql_select");
  const FuzzySelection& sel = *rb.pending;
  const double delta = reward + rb.gamma * fql_state_value(rb, next_firing) - sel.q_value;
  double weight_sum = 0.0;
  for (const auto& rw : sel.rules) weight_sum += rw.weight;
  for (std::size_t k = 0; k < sel.rules.size(); ++k) {
    const auto& rw = sel.rules[k];
    rb.q(rw.rule, sel.rule_actions[k]) += rb.alpha * delta * (rw.weight / weight_sum);
  }
  rb.pending.reset();
}

void ExplorationSchedule::validate() const {
  if (!(floor >= 0 && floor <= initial && initial <= 1)) {
    throw InvalidArgument("exploration schedule needs 0 <= floor <= initial <= 1");
  }
  if (!(discount > 0 && discount <= 1)) throw InvalidArgument("exploration discount must lie in (0,1]");
}

double epsilon_at(const ExplorationSchedule& schedule, int epoch) {
  if (epoch < 0) throw InvalidArgument("epoch must be non-negative");
  return std::max(schedule.floor, schedule.initial * std::pow(schedule.discount, epoch));
}

OperativeMode greedy_action(const AgentObservation& obs, const SimParams& sim) {
  return obs.b > sim.battery_threshold_frac ? OperativeMode::PhyRf : OperativeMode::Off;
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::FQL: return "FQL";
    case Algorithm::QL: return "QL";
    case Algorithm::UFQL: return "U-FQL";
    case Algorithm::UQL: return "U-QL";
    case Algorithm::Greedy: return "G-PHY-RF";
    case Algorithm::StaticMacPhy: return "Static-MacPhy";
    case Algorithm::AllOff: return "AllOff";
  }
  return "?";
}

Algorithm algorithm_from_name(std::string_view name) {
  if (name == "FQL") return Algorithm::FQL;
  if (name == "QL") return Algorithm::QL;
  if (name == "U-FQL") return Algorithm::UFQL;
  if (name == "U-QL") return Algorithm::UQL;
  if (name == "G-PHY-RF" || name == "Greedy") return Algorithm::Greedy;
  if (name == "Static-MacPhy") return Algorithm::StaticMacPhy;
  if (name == "AllOff") return Algorithm::AllOff;
  throw InvalidArgument("unknown algorithm: " + std::string(name));
}

bool is_learning(Algorithm a) {
  return a == Algorithm::FQL || a == Algorithm::QL || a == Algorithm::UFQL || a == Algorithm::UQL;
}
bool is_fuzzy(Algorithm a) { return a == Algorithm::FQL || a == Algorithm::UFQL; }
bool is_coordinated(Algorithm a) { return a == Algorithm::FQL || a == Algorithm::QL; }

QLearningAgent::QLearningAgent(QTable table, std::uint64_t seed, double eps)
    : table_(std::move(table)), rng_(seed), eps_(eps) {}

Algorithm QLearningAgent::algorithm() const {
  return table_.coordinated ? Algorithm::QL : Algorithm::UQL;
}

OperativeMode QLearningAgent::select(const AgentObservation& obs) {
  last_state_ = quantize(obs, table_.coordinated);
  last_action_ = ql_select(table_, last_state_, eps_, rng_);
  return last_action_;
}

void QLearningAgent::learn(double reward, const AgentObservation& next) {
  if (last_state_ < 0) throw ProtocolError("learn called without a preceding select");
  ql_update(table_, last_state_, last_action_, reward, quantize(next, table_.coordinated));
  last_state_ = -1;
}

FuzzyQLearningAgent::FuzzyQLearningAgent(FuzzyRuleBase rules, std::uint64_t seed, double eps)
    : rules_(std::move(rules)), rng_(seed), eps_(eps) {}

Algorithm FuzzyQLearningAgent::algorithm() const {
  return rules_.coordinated ? Algorithm::FQL : Algorithm::UFQL;
}

OperativeMode FuzzyQLearningAgent::select(const AgentObservation& obs) {
  auto firing = active_rules(observation_inputs(obs, rules_.coordinated), rules_.spec);
  return fql_select(rules_, firing, eps_, rng_).action;
}

void FuzzyQLearningAgent::learn(double reward, const AgentObservation& next) {
  fql_update(rules_, reward, active_rules(observation_inputs(next, rules_.coordinated), rules_.spec));
}

std::unique_ptr<Agent> make_agent(Algorithm algorithm, const AgentParams& params,
                                  std::uint64_t seed, const SimParams& sim) {
  switch (algorithm) {
    case Algorithm::FQL:
    case Algorithm::UFQL: {
      auto rb = FuzzyRuleBase::zeros(is_coordinated(algorithm), params.alpha, params.gamma);
      rb.variant = params.variant;
      return std::make_unique<FuzzyQLearningAgent>(std::move(rb), seed, params.epsilon);
    }
    case Algorithm::QL:
    case Algorithm::UQL:
      return std::make_unique<QLearningAgent>(
          QTable::zeros(is_coordinated(algorithm), params.alpha, params.gamma), seed,
          params.epsilon);
    case Algorithm::Greedy:
      return std::make_unique<GreedyAgent>(sim);
    case Algorithm::StaticMacPhy:
      return std::make_unique<StaticAgent>(OperativeMode::MacPhy);
    case Algorithm::AllOff:
      return std::make_unique<StaticAgent>(OperativeMode::Off);
  }
  throw InvalidArgument("unknown algorithm");
}

}  // namespace vscsim
