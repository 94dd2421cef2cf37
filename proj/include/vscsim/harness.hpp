#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vscsim/agents.hpp"
#include "vscsim/config.hpp"
#include "vscsim/metrics.hpp"
#include "vscsim/offline_bound.hpp"
#include "vscsim/simulator.hpp"

namespace vscsim {

using AgentSet = std::vector<std::unique_ptr<Agent>>;

/// Training-year traces: loaded from `paths.traces` when set, otherwise
/// generated from the "traces.train" sub-seed (epoch > 0 with resampling
/// enabled uses "traces.train.<epoch>").
TraceSet training_traces(const ExperimentConfig& config, int epoch = 0);
/// Fresh-seed traces for validation ("traces.validation" sub-seed).
TraceSet validation_traces(const ExperimentConfig& config);

/// Zero-initialised agents; agent i draws from sub-seed "<stream>.<i>".
AgentSet make_agents(const ExperimentConfig& config, const std::string& stream, double epsilon);

/// Copies of the learnable state (or fresh fixed policies) on new RNG streams.
AgentSet clone_agents(const AgentSet& agents, const ExperimentConfig& config,
                      const std::string& stream, double epsilon);

std::vector<Agent*> raw(const AgentSet& agents);

struct TrainResult {
  AgentSet agents;
  /// Cumulative reward of each training epoch.
  std::vector<double> reward_series;
  double alpha = 0.0;
  double epsilon0 = 0.0;
};

/// Runs `epochs` learning episodes with per-epoch exploration decay. Saves
/// policies after every epoch when `paths.policies` is set.
TrainResult train(const ExperimentConfig& config, const TraceSet& traces);

/// Greedy run of the given agents' copies: no exploration, no learning.
EpisodeLog evaluate(const ExperimentConfig& config, const AgentSet& agents,
                    const TraceSet& traces);

/// Copies of pre-trained agents with fixed validation exploration and
/// learning enabled.
EpisodeLog validate(const ExperimentConfig& config, const AgentSet& agents,
                    const TraceSet& traces);

/// Zero-initialised agents learning on the job: exploration starts at the
/// schedule's initial value and halves every `runtime_decay_period_slots`
/// down to `runtime_epsilon_floor`.
EpisodeLog runtime(const ExperimentConfig& config, const TraceSet& traces);
double runtime_epsilon(const AgentConfig& agent, int t);

struct SweepEntry {
  double alpha = 0.0;
  double epsilon0 = 0.0;
  double evaluation_reward = 0.0;
};

struct SweepResult {
  TrainResult best;
  EpisodeLog best_evaluation;
  std::vector<SweepEntry> entries;
};

/// Trains one agent set per (alpha, initial epsilon) pair of the configured
/// grids and keeps the pair with the highest greedy-evaluation reward.
SweepResult sweep(const ExperimentConfig& config, const TraceSet& traces);

struct BoundResult {
  OfflineResult solution;
  /// The optimal applied actions replayed through the bin-free simulator
  /// (empty when no path was requested).
  std::optional<EpisodeLog> replay;
};

BoundResult bound(const ExperimentConfig& config, const TraceSet& traces);

/// Policy files are named "<algorithm>_cell<i>.policy".
std::filesystem::path policy_path(const std::filesystem::path& dir, Algorithm algorithm, int cell);
void save_agents(const std::filesystem::path& dir, const AgentSet& agents);
/// Loads pre-trained agents for learning algorithms; fixed policies need no
/// files. IoError when a policy file is missing.
AgentSet load_agents(const std::filesystem::path& dir, const ExperimentConfig& config,
                     const std::string& stream, double epsilon);

}  // namespace vscsim
