#pragma once

#include <cstdint>
#include <vector>

#include "vscsim/power.hpp"
#include "vscsim/simulator.hpp"
#include "vscsim/traces.hpp"

namespace vscsim {

enum class QueueDiscipline { Fifo, Lifo };

/// LabelCorrecting: generic OPEN-list search over hashed (t, batteries) nodes.
/// StageSweep: dense backward recursion over the binned battery grid; needs
/// battery_levels >= 2. Auto picks StageSweep whenever batteries are binned.
enum class DpEngine { Auto, LabelCorrecting, StageSweep };

struct DPConfig {
  /// Grid points per cell over [0, capacity]; 0 disables binning (exact
  /// battery values, label-correcting only).
  int battery_levels = 21;
  int max_cells = 3;
  QueueDiscipline queue = QueueDiscipline::Fifo;
  DpEngine engine = DpEngine::Auto;
  /// Recover the optimal action sequence (costs one extra sweep plus
  /// checkpoint memory on the stage-sweep engine).
  bool want_path = true;

  void validate() const;
  bool operator==(const DPConfig&) const = default;
};

struct OfflineResult {
  /// Applied joint actions per slot; empty when the path was not requested.
  std::vector<std::vector<OperativeMode>> actions;
  double total_cost = 0.0;
  /// Horizon minus total cost.
  double cumulative_reward_bound = 0.0;
  long long expansions = 0;
  DpEngine engine = DpEngine::Auto;
};

OfflineResult solve_offline(const TraceSet& traces, const SimParams& sim,
                            const PowerModelParams& power, const DPConfig& dp);

/// Battery grid spacing in Wh (0 when binning is disabled).
double bin_width_wh(const SimParams& sim, const DPConfig& dp);
/// One bin of battery energy expressed in normalised cost units.
double binning_tolerance(const SimParams& sim, const PowerModelParams& power,
                         const DPConfig& dp);

struct BruteForceResult {
  std::vector<std::vector<OperativeMode>> actions;  // requested joint actions
  double total_cost = 0.0;
  long long sequences = 0;
};

inline constexpr long long kDefaultEnumerationCap = 10'000'000;

/// Exhaustive minimum over all requested action sequences of the first
/// `horizon` slots (-1: whole trace), run through the simulator's step.
BruteForceResult brute_force(const TraceSet& traces, const SimParams& sim,
                             const PowerModelParams& power, int horizon = -1,
                             long long cap = kDefaultEnumerationCap);

}  // namespace vscsim
