#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vscsim/agents.hpp"
#include "vscsim/offline_bound.hpp"
#include "vscsim/power.hpp"
#include "vscsim/simulator.hpp"
#include "vscsim/traces.hpp"

namespace vscsim {

inline constexpr int kConfigSchemaVersion = 1;

enum class Protocol { Train, Evaluate, Validate, Runtime, Bound };

std::string_view protocol_name(Protocol p);
Protocol protocol_from_name(std::string_view name);

struct AgentConfig {
  Algorithm algorithm = Algorithm::FQL;
  double alpha = 0.1;
  double gamma = 0.9;
  ExplorationSchedule exploration;
  FqlVariant variant = FqlVariant::Standard;
  /// Fixed exploration during validation runs.
  double validation_epsilon = 0.05;
  /// Floor for the run-time protocol's decaying exploration.
  double runtime_epsilon_floor = 0.05;
  /// Slots between exploration halvings in the run-time protocol.
  int runtime_decay_period_slots = 730;
  /// Sweep grids; empty means "use alpha / exploration.initial only".
  std::vector<double> alpha_grid;
  std::vector<double> epsilon_grid;

  bool operator==(const AgentConfig&) const = default;
};

struct PathsConfig {
  std::string traces;    // CSV to load instead of generating; empty = generate
  std::string policies;  // directory of policy files
  std::string output = "out";
  bool operator==(const PathsConfig&) const = default;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 1;
  int horizon = 8760;
  SolarConfig solar;
  TrafficConfig traffic;
  PowerModelParams power;
  SimParams sim;
  AgentConfig agent;
  Protocol protocol = Protocol::Train;
  int epochs = 30;
  /// Draw a new training year every epoch instead of repeating one.
  bool resample_traces_per_epoch = false;
  DPConfig dp;
  PathsConfig paths;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// JSON text with a top-level "schema_version". Missing keys keep defaults;
/// unknown keys are rejected.
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(std::string_view text);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& config);

}  // namespace vscsim
