#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vscsim/membership.hpp"
#include "vscsim/power.hpp"
#include "vscsim/rng.hpp"
#include "vscsim/simulator.hpp"

namespace vscsim {

inline constexpr int kQuantLevels = 5;

/// Normalised per-cell view of the network. Coordinated agents also see the
/// broadcast macro utilisation `rho`; un-coordinated agents ignore it.
struct AgentObservation {
  double h = 0.0;    // harvest / harvest scale
  double b = 0.0;    // battery / capacity
  double l = 0.0;    // own offered load / cell capacity
  double rho = 0.0;  // macro utilisation after the previous slot
};

/// Builds cell `cell`'s observation with every component clipped into [0,1].
AgentObservation observe(const NetworkState& state, int cell, const SimParams& sim);

/// Inputs in (h, b, l[, rho]) order; the first input is most significant in
/// rule and state indices.
std::vector<double> observation_inputs(const AgentObservation& obs, bool coordinated);

int quantize_value(double v, int levels = kQuantLevels);
int quantize(const AgentObservation& obs, bool coordinated, int levels = kQuantLevels);
int state_count(bool coordinated);

using QValues = Eigen::Matrix<double, Eigen::Dynamic, kModeCount, Eigen::RowMajor>;

struct QTable {
  QValues q;
  double alpha = 0.1;
  double gamma = 0.9;
  bool coordinated = true;

  static QTable zeros(bool coordinated, double alpha, double gamma);
  int n_states() const { return static_cast<int>(q.rows()); }
};

/// With probability eps a uniform action, otherwise the argmax with ties
/// broken uniformly. Always consumes one draw, plus one more on exploration
/// or on a tie.
int epsilon_greedy(std::span<const double> row, double eps, Rng& rng);

OperativeMode ql_select(const QTable& table, int state, double eps, Rng& rng);
void ql_update(QTable& table, int state, OperativeMode action, double reward, int next_state);
/// Same update with an explicit step size (visit-count schedules).
void ql_update(QTable& table, int state, OperativeMode action, double reward, int next_state,
               double alpha);

/// Standard: weights times q-values. LabelWeighted multiplies each term by the
/// numeric action label as well; kept for comparison runs only.
enum class FqlVariant { Standard, LabelWeighted };

std::string_view variant_name(FqlVariant v);
FqlVariant variant_from_name(std::string_view name);

struct FuzzySelection {
  FiringSet rules;
  std::vector<int> rule_actions;  // chosen action per firing rule
  double crisp_action = 0.0;      // weighted mean before rounding
  OperativeMode action = OperativeMode::Off;
  double q_value = 0.0;
};

struct FuzzyRuleBase {
  MembershipSpec spec;
  QValues q;
  double alpha = 0.1;
  double gamma = 0.9;
  bool coordinated = true;
  FqlVariant variant = FqlVariant::Standard;
  /// Selection awaiting its learning update.
  std::optional<FuzzySelection> pending;

  static FuzzyRuleBase zeros(bool coordinated, double alpha, double gamma,
                             std::optional<MembershipSpec> spec = std::nullopt);
  int n_rules() const { return static_cast<int>(q.rows()); }
};

const FuzzySelection& fql_select(FuzzyRuleBase& rb, const FiringSet& firing, double eps, Rng& rng);
/// Weighted value of the best consequents at the given firing.
double fql_state_value(const FuzzyRuleBase& rb, const FiringSet& firing);
void fql_update(FuzzyRuleBase& rb, double reward, const FiringSet& next_firing);

struct ExplorationSchedule {
  double initial = 0.9;
  double discount = 0.5;
  double floor = 0.03;
  void validate() const;
  bool operator==(const ExplorationSchedule&) const = default;
};

double epsilon_at(const ExplorationSchedule& schedule, int epoch);

/// PHY-RF while the battery is strictly above the threshold, else Off.
OperativeMode greedy_action(const AgentObservation& obs, const SimParams& sim);

enum class Algorithm { FQL, QL, UFQL, UQL, Greedy, StaticMacPhy, AllOff };

std::string_view algorithm_name(Algorithm a);
Algorithm algorithm_from_name(std::string_view name);
bool is_learning(Algorithm a);
bool is_fuzzy(Algorithm a);
bool is_coordinated(Algorithm a);

class Agent {
 public:
  virtual ~Agent() = default;
  virtual Algorithm algorithm() const = 0;
  virtual OperativeMode select(const AgentObservation& obs) = 0;
  /// Learning update for the last selection; no-op for fixed policies.
  virtual void learn(double /*reward*/, const AgentObservation& /*next*/) {}
  virtual void set_epsilon(double /*eps*/) {}
  virtual double epsilon() const { return 0.0; }
};

class QLearningAgent final : public Agent {
 public:
  QLearningAgent(QTable table, std::uint64_t seed, double eps = 0.0);
  Algorithm algorithm() const override;
  OperativeMode select(const AgentObservation& obs) override;
  void learn(double reward, const AgentObservation& next) override;
  void set_epsilon(double eps) override { eps_ = eps; }
  double epsilon() const override { return eps_; }

  const QTable& table() const { return table_; }
  QTable& table() { return table_; }

 private:
  QTable table_;
  Rng rng_;
  double eps_;
  int last_state_ = -1;
  OperativeMode last_action_ = OperativeMode::Off;
};

class FuzzyQLearningAgent final : public Agent {
 public:
  FuzzyQLearningAgent(FuzzyRuleBase rules, std::uint64_t seed, double eps = 0.0);
  Algorithm algorithm() const override;
  OperativeMode select(const AgentObservation& obs) override;
  void learn(double reward, const AgentObservation& next) override;
  void set_epsilon(double eps) override { eps_ = eps; }
  double epsilon() const override { return eps_; }

  const FuzzyRuleBase& rules() const { return rules_; }
  FuzzyRuleBase& rules() { return rules_; }

 private:
  FuzzyRuleBase rules_;
  Rng rng_;
  double eps_;
};

class GreedyAgent final : public Agent {
 public:
  explicit GreedyAgent(const SimParams& sim) : sim_(sim) {}
  Algorithm algorithm() const override { return Algorithm::Greedy; }
  OperativeMode select(const AgentObservation& obs) override { return greedy_action(obs, sim_); }

 private:
  SimParams sim_;
};

class StaticAgent final : public Agent {
 public:
  explicit StaticAgent(OperativeMode mode) : mode_(mode) {}
  Algorithm algorithm() const override {
    return mode_ == OperativeMode::Off ? Algorithm::AllOff : Algorithm::StaticMacPhy;
  }
  OperativeMode select(const AgentObservation&) override { return mode_; }

 private:
  OperativeMode mode_;
};

struct AgentParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.0;
  FqlVariant variant = FqlVariant::Standard;
};

/// Zero-initialised agent of the given algorithm with its own RNG stream.
std::unique_ptr<Agent> make_agent(Algorithm algorithm, const AgentParams& params,
                                  std::uint64_t seed, const SimParams& sim);

}  // namespace vscsim
