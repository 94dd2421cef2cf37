#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vscsim/power.hpp"
#include "vscsim/traces.hpp"

namespace vscsim {

struct SimParams {
  int n_cells = 3;
  double battery_capacity_wh = 2000.0;
  double battery_threshold_frac = 0.20;
  double initial_battery_frac = 1.0;
  double slot_hours = 1.0;
  double vsc_capacity_mbps = 37.5;
  double mbs_capacity_mbps = 112.5;
  double w_energy = 0.5;
  double w_drop = 0.5;
  /// Grid-energy normaliser (Wh). Non-positive means "derive": macro site at
  /// full load with every cell offloaded at full load, times the slot length.
  double e_max_wh = 0.0;
  /// Harvest normaliser for agent observations (Wh per slot).
  double harvest_scale_wh = 4.48 * 186.0;

  double threshold_wh() const { return battery_threshold_frac * battery_capacity_wh; }
  void validate() const;
  bool operator==(const SimParams&) const = default;
};

/// Largest per-slot grid energy for the configured cell count.
double derived_e_max(const SimParams& sim, const PowerModelParams& power);
double effective_e_max(const SimParams& sim, const PowerModelParams& power);

struct NetworkState {
  int t = 0;
  Eigen::VectorXd battery;   // Wh
  Eigen::VectorXd harvest;   // Wh harvested in slot t
  Eigen::VectorXd vsc_load;  // Mb/s offered in slot t
  double mbs_own_load = 0.0;
  /// Macro utilisation after routing of the previous slot (broadcast signal).
  double mbs_utilization = 0.0;
};

NetworkState initial_state(const TraceSet& traces, const SimParams& sim);

enum class BatteryClip : std::uint8_t { None = 0, Capacity = 1, Floor = 2 };

struct SlotOutcome {
  int t = 0;
  std::vector<OperativeMode> requested;
  std::vector<OperativeMode> applied;
  std::vector<std::uint8_t> forced_off;
  double grid_energy_wh = 0.0;
  double drop_rate = 0.0;
  double cost = 0.0;
  double reward = 0.0;
  double mbs_utilization = 0.0;
  double offered_mbps = 0.0;
  double dropped_mbps = 0.0;
  Eigen::VectorXd consumed_wh;
  Eigen::VectorXd next_battery;
  std::vector<BatteryClip> clip;
};

struct EpisodeTotals {
  double grid_energy_kwh = 0.0;
  double mean_drop_rate = 0.0;
  double cumulative_reward = 0.0;
  double total_cost = 0.0;
  long long forced_off_count = 0;
  bool operator==(const EpisodeTotals&) const = default;
};

struct EpisodeLog {
  int n_cells = 0;
  double slot_hours = 1.0;
  std::vector<SlotOutcome> slots;
  EpisodeTotals totals;

  int horizon() const { return static_cast<int>(slots.size()); }
  /// Aggregates of the per-slot records, recomputed from scratch.
  EpisodeTotals recompute_totals() const;
};

// --- slot pipeline -------------------------------------------------------

struct BatteryCheck {
  std::vector<OperativeMode> applied;
  std::vector<std::uint8_t> forced_off;
};

/// True when running `mode` this slot keeps the battery at or above the
/// threshold (energy-neutral within the slot: harvest credited first).
bool mode_feasible(OperativeMode mode, double battery_wh, double harvest_wh, double load_mbps,
                   const SimParams& sim, const PowerModelParams& power);

BatteryCheck enforce_battery(const NetworkState& state, std::span<const OperativeMode> requested,
                             const SimParams& sim, const PowerModelParams& power);

struct Routing {
  Eigen::VectorXd served;  // per-cell Mb/s served by the cell itself
  double mbs_offered = 0.0;
  double mbs_served = 0.0;
  double offered_total = 0.0;
  double dropped_total = 0.0;
  double drop_rate = 0.0;
};

Routing route_and_drop(std::span<const double> vsc_load, double mbs_own_load,
                       std::span<const OperativeMode> applied, const SimParams& sim);
Routing route_and_drop(const NetworkState& state, std::span<const OperativeMode> applied,
                       const SimParams& sim);

struct SlotCost {
  double cost = 0.0;
  double reward = 0.0;
};

SlotCost slot_cost(double grid_energy_wh, double drop_rate, const SimParams& sim,
                   double e_max_wh);

/// Everything about a slot that depends only on the applied joint action and
/// the exogenous inputs (not on batteries).
struct AppliedSlot {
  Routing routing;
  double grid_energy_wh = 0.0;
  SlotCost cost;
  double mbs_utilization = 0.0;
};

AppliedSlot evaluate_applied(std::span<const double> vsc_load, double mbs_own_load,
                             std::span<const OperativeMode> applied, const SimParams& sim,
                             const PowerModelParams& power, double e_max_wh);

/// Battery draw of one cell for the slot (Wh) given its served load.
double cell_consumption_wh(OperativeMode applied, double served_mbps, const SimParams& sim,
                           const PowerModelParams& power);

struct BatteryUpdate {
  double next_wh = 0.0;
  BatteryClip clip = BatteryClip::None;
};

/// min(B + H - consumption, capacity), floored at 0.
BatteryUpdate next_battery(double battery_wh, double harvest_wh, double consumed_wh,
                           const SimParams& sim);

struct StepResult {
  NetworkState next;
  SlotOutcome outcome;
  /// True after the last slot of the trace; `next` then wraps to slot 0's
  /// exogenous inputs so learners can still bootstrap.
  bool end_of_episode = false;
};

StepResult step(const NetworkState& state, std::span<const OperativeMode> requested,
                const SimParams& sim, const PowerModelParams& power, const TraceSet& traces);

// --- episodes -----------------------------------------------------------

class Agent;  // agents.hpp

struct EpisodeOptions {
  bool learning = true;
  /// Called with the slot index before the agents select (e.g. to adjust
  /// exploration during a deployment run).
  std::function<void(int)> before_slot;
};

/// Runs the full trace horizon. Every agent observes its own cell, all agents
/// act simultaneously, then all receive the shared reward.
EpisodeLog run_episode(std::span<Agent* const> agents, const TraceSet& traces,
                       const SimParams& sim, const PowerModelParams& power,
                       const EpisodeOptions& options = {});

/// Replays a fixed joint action sequence (e.g. an off-line optimum).
EpisodeLog replay_actions(const std::vector<std::vector<OperativeMode>>& actions,
                          const TraceSet& traces, const SimParams& sim,
                          const PowerModelParams& power);

void export_episode_csv(const std::filesystem::path& path, const EpisodeLog& log);
EpisodeLog load_episode_csv(const std::filesystem::path& path);

}  // namespace vscsim
