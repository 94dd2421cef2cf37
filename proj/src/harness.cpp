#include "vscsim/harness.hpp"

#include <cmath>

#include "vscsim/errors.hpp"
#include "vscsim/policy_io.hpp"
#include "vscsim/rng.hpp"

namespace vscsim {

namespace {

AgentParams agent_params(const ExperimentConfig& config, double epsilon) {
  return {config.agent.alpha, config.agent.gamma, epsilon, config.agent.variant};
}

std::uint64_t agent_seed(const ExperimentConfig& config, const std::string& stream, int i) {
  return derive_seed(config.seed, stream + "." + std::to_string(i));
}

TraceSet generated(const ExperimentConfig& config, const std::string& name) {
  return generate_traces(config.solar, config.traffic, derive_seed(config.seed, name),
                         config.horizon, config.sim.n_cells);
}

}  // namespace

TraceSet training_traces(const ExperimentConfig& config, int epoch) {
  if (epoch > 0 && config.resample_traces_per_epoch) {
    return generated(config, "traces.train." + std::to_string(epoch));
  }
  if (!config.paths.traces.empty()) {
    auto traces = load_traces_csv(config.paths.traces);
    if (traces.n_cells() != config.sim.n_cells) {
      throw ConfigError("trace file has " + std::to_string(traces.n_cells()) +
                        " cells, config asks for " + std::to_string(config.sim.n_cells));
    }
    return traces;
  }
  return generated(config, "traces.train");
}

TraceSet validation_traces(const ExperimentConfig& config) {
  return generated(config, "traces.validation");
}

AgentSet make_agents(const ExperimentConfig& config, const std::string& stream, double epsilon) {
  AgentSet agents;
  for (int i = 0; i < config.sim.n_cells; ++i) {
    agents.push_back(make_agent(config.agent.algorithm, agent_params(config, epsilon),
                                agent_seed(config, stream, i), config.sim));
  }
  return agents;
}

AgentSet clone_agents(const AgentSet& agents, const ExperimentConfig& config,
                      const std::string& stream, double epsilon) {
  AgentSet out;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto seed = agent_seed(config, stream, static_cast<int>(i));
    const Algorithm algo = agents[i]->algorithm();
    if (is_learning(algo)) {
      out.push_back(agent_from_policy(policy_of(*agents[i]), seed, epsilon));
    } else {
      out.push_back(make_agent(algo, agent_params(config, epsilon), seed, config.sim));
    }
  }
  return out;
}

std::vector<Agent*> raw(const AgentSet& agents) {
  std::vector<Agent*> out;
  for (const auto& a : agents) out.push_back(a.get());
  return out;
}

TrainResult train(const ExperimentConfig& config, const TraceSet& traces) {
  config.validate();
  TrainResult res;
  res.alpha = config.agent.alpha;
  res.epsilon0 = config.agent.exploration.initial;
  res.agents = make_agents(config, "agent", epsilon_at(config.agent.exploration, 0));
  const auto agents = raw(res.agents);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double eps = epsilon_at(config.agent.exploration, epoch);
    for (auto* a : agents) a->set_epsilon(eps);
    std::optional<TraceSet> fresh;
    if (epoch > 0 && config.resample_traces_per_epoch) fresh = training_traces(config, epoch);
    const auto log = run_episode(agents, fresh ? *fresh : traces, config.sim, config.power);
    res.reward_series.push_back(log.totals.cumulative_reward);
    if (!config.paths.policies.empty() && is_learning(config.agent.algorithm)) {
      save_agents(config.paths.policies, res.agents);
    }
  }
  return res;
}

EpisodeLog evaluate(const ExperimentConfig& config, const AgentSet& agents,
                    const TraceSet& traces) {
  auto copies = clone_agents(agents, config, "evaluate.agent", 0.0);
  EpisodeOptions options;
  options.learning = false;
  return run_episode(raw(copies), traces, config.sim, config.power, options);
}

EpisodeLog validate(const ExperimentConfig& config, const AgentSet& agents,
                    const TraceSet& traces) {
  auto copies = clone_agents(agents, config, "validate.agent", config.agent.validation_epsilon);
  return run_episode(raw(copies), traces, config.sim, config.power);
}

double runtime_epsilon(const AgentConfig& agent, int t) {
  const int halvings = t / agent.runtime_decay_period_slots;
  return std::max(agent.runtime_epsilon_floor,
                  agent.exploration.initial * std::pow(agent.exploration.discount, halvings));
}

EpisodeLog runtime(const ExperimentConfig& config, const TraceSet& traces) {
  config.validate();
  auto agents = make_agents(config, "agent", runtime_epsilon(config.agent, 0));
  const auto ptrs = raw(agents);
  EpisodeOptions options;
  options.before_slot = [&](int t) {
    const double eps = runtime_epsilon(config.agent, t);
    for (auto* a : ptrs) a->set_epsilon(eps);
  };
  return run_episode(ptrs, traces, config.sim, config.power, options);
}

SweepResult sweep(const ExperimentConfig& config, const TraceSet& traces) {
  const bool learning = is_learning(config.agent.algorithm);
  std::vector<double> alphas = config.agent.alpha_grid;
  std::vector<double> epsilons = config.agent.epsilon_grid;
  if (alphas.empty() || !learning) alphas = {config.agent.alpha};
  if (epsilons.empty() || !learning) epsilons = {config.agent.exploration.initial};

  SweepResult out;
  bool have_best = false;
  for (double alpha : alphas) {
    for (double eps0 : epsilons) {
      ExperimentConfig c = config;
      c.agent.alpha = alpha;
      c.agent.exploration.initial = eps0;
      c.paths.policies.clear();
      auto trained = train(c, traces);
      auto log = evaluate(c, trained.agents, traces);
      out.entries.push_back({alpha, eps0, log.totals.cumulative_reward});
      if (!have_best || log.totals.cumulative_reward > out.best_evaluation.totals.cumulative_reward) {
        have_best = true;
        out.best = std::move(trained);
        out.best_evaluation = std::move(log);
      }
    }
  }
  if (!config.paths.policies.empty() && learning) save_agents(config.paths.policies, out.best.agents);
  return out;
}

BoundResult bound(const ExperimentConfig& config, const TraceSet& traces) {
  BoundResult res;
  res.solution = solve_offline(traces, config.sim, config.power, config.dp);
  if (!res.solution.actions.empty()) {
    res.replay = replay_actions(res.solution.actions, traces, config.sim, config.power);
  }
  return res;
}

std::filesystem::path policy_path(const std::filesystem::path& dir, Algorithm algorithm,
                                  int cell) {
  return dir / (std::string(algorithm_name(algorithm)) + "_cell" + std::to_string(cell) + ".policy");
}

void save_agents(const std::filesystem::path& dir, const AgentSet& agents) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    save_policy(policy_path(dir, agents[i]->algorithm(), static_cast<int>(i)),
                policy_of(*agents[i]));
  }
}

AgentSet load_agents(const std::filesystem::path& dir, const ExperimentConfig& config,
                     const std::string& stream, double epsilon) {
  const Algorithm algo = config.agent.algorithm;
  if (!is_learning(algo)) return make_agents(config, stream, epsilon);
  AgentSet agents;
  for (int i = 0; i < config.sim.n_cells; ++i) {
    const auto path = policy_path(dir, algo, i);
    if (!std::filesystem::exists(path)) {
      throw IoError("missing policy file " + path.string() + " (train first)");
    }
    auto table = load_policy(path);
    if (policy_algorithm(table) != algo) {
      throw ConfigError(path.string() + " holds a " +
                        std::string(algorithm_name(policy_algorithm(table))) + " policy");
    }
    agents.push_back(agent_from_policy(std::move(table), agent_seed(config, stream, i), epsilon));
  }
  return agents;
}

}  // namespace vscsim
