#include "vscsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vscsim/agents.hpp"
#include "vscsim/errors.hpp"
#include "vscsim/text_io.hpp"

namespace vscsim {

void SimParams::validate() const {
  if (n_cells < 1) throw InvalidArgument("n_cells must be at least 1");
  if (!(battery_capacity_wh > 0)) throw InvalidArgument("battery capacity must be positive");
  if (!(battery_threshold_frac > 0 && battery_threshold_frac < 1)) {
    throw InvalidArgument("battery threshold fraction must lie in (0,1)");
  }
  if (!(initial_battery_frac >= 0 && initial_battery_frac <= 1)) {
    throw InvalidArgument("initial battery fraction must lie in [0,1]");
  }
  if (!(slot_hours > 0)) throw InvalidArgument("slot_hours must be positive");
  if (!(vsc_capacity_mbps > 0) || !(mbs_capacity_mbps > 0)) {
    throw InvalidArgument("serving capacities must be positive");
  }
  if (!(w_energy >= 0) || !(w_drop >= 0) || std::abs(w_energy + w_drop - 1.0) > 1e-12) {
    throw InvalidArgument("cost weights must be non-negative and sum to 1");
  }
  if (!(harvest_scale_wh > 0)) throw InvalidArgument("harvest scale must be positive");
}

double derived_e_max(const SimParams& sim, const PowerModelParams& power) {
  std::vector<OffloadedCell> all(static_cast<std::size_t>(sim.n_cells),
                                 OffloadedCell{1.0, OperativeMode::PhyRf});
  return mbs_site_power(1.0, std::span<const OffloadedCell>(all), power) * sim.slot_hours;
}

double effective_e_max(const SimParams& sim, const PowerModelParams& power) {
  return sim.e_max_wh > 0 ? sim.e_max_wh : derived_e_max(sim, power);
}

namespace {

void check_traces(const TraceSet& traces, const SimParams& sim) {
  if (traces.n_cells() != sim.n_cells) {
    throw ConfigError("trace cell count " + std::to_string(traces.n_cells()) +
                      " differs from configured n_cells " + std::to_string(sim.n_cells));
  }
  if (traces.horizon() < 1) throw ConfigError("trace horizon must be at least one slot");
  if (traces.slot_hours != sim.slot_hours) {
    throw ConfigError("trace slot duration differs from the simulator's");
  }
}

void load_exogenous(NetworkState& s, const TraceSet& traces, int column) {
  s.harvest = traces.harvest.col(column);
  s.vsc_load = traces.vsc_load.col(column);
  s.mbs_own_load = traces.mbs_load(column);
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

NetworkState initial_state(const TraceSet& traces, const SimParams& sim) {
  sim.validate();
  check_traces(traces, sim);
  NetworkState s;
  s.t = 0;
  s.battery = Eigen::VectorXd::Constant(sim.n_cells, sim.initial_battery_frac * sim.battery_capacity_wh);
  load_exogenous(s, traces, 0);
  s.mbs_utilization = std::min(s.mbs_own_load / sim.mbs_capacity_mbps, 1.0);
  return s;
}

bool mode_feasible(OperativeMode mode, double battery_wh, double harvest_wh, double load_mbps,
                   const SimParams& sim, const PowerModelParams& power) {
  if (mode == OperativeMode::Off) return true;
  const double served = std::min(load_mbps, sim.vsc_capacity_mbps);
  const double drawn = cell_consumption_wh(mode, served, sim, power);
  return battery_wh + harvest_wh - drawn >= sim.threshold_wh();
}

BatteryCheck enforce_battery(const NetworkState& state, std::span<const OperativeMode> requested,
                             const SimParams& sim, const PowerModelParams& power) {
  const auto n = requested.size();
  BatteryCheck out{std::vector<OperativeMode>(requested.begin(), requested.end()),
                   std::vector<std::uint8_t>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    const int k = static_cast<int>(i);
    if (!mode_feasible(requested[i], state.battery(k), state.harvest(k), state.vsc_load(k), sim,
                       power)) {
      out.applied[i] = OperativeMode::Off;
      out.forced_off[i] = 1;
    }
  }
  return out;
}

Routing route_and_drop(std::span<const double> vsc_load, double mbs_own_load,
                       std::span<const OperativeMode> applied, const SimParams& sim) {
  const auto n = vsc_load.size();
  Routing r;
  r.served = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  r.mbs_offered = mbs_own_load;
  r.offered_total = mbs_own_load;
  for (std::size_t i = 0; i < n; ++i) {
    const double demand = vsc_load[i];
    r.offered_total += demand;
    if (applied[i] == OperativeMode::Off) {
      r.mbs_offered += demand;
    } else {
      const double served = std::min(demand, sim.vsc_capacity_mbps);
      r.served(static_cast<Eigen::Index>(i)) = served;
      r.dropped_total += demand - served;
    }
  }
  r.mbs_served = std::min(r.mbs_offered, sim.mbs_capacity_mbps);
  r.dropped_total += r.mbs_offered - r.mbs_served;
  r.drop_rate = r.offered_total > 0 ? std::clamp(r.dropped_total / r.offered_total, 0.0, 1.0) : 0.0;
  return r;
}

Routing route_and_drop(const NetworkState& state, std::span<const OperativeMode> applied,
                       const SimParams& sim) {
  return route_and_drop(as_span(state.vsc_load), state.mbs_own_load, applied, sim);
}

SlotCost slot_cost(double grid_energy_wh, double drop_rate, const SimParams& sim,
                   double e_max_wh) {
  if (!(grid_energy_wh >= 0)) throw InvalidArgument("grid energy must be non-negative");
  if (!(drop_rate >= 0 && drop_rate <= 1)) throw InvalidArgument("drop rate must lie in [0,1]");
  if (!(e_max_wh > 0)) throw InvalidArgument("energy normaliser must be positive");
  const double f =
      sim.w_energy * std::min(grid_energy_wh / e_max_wh, 1.0) + sim.w_drop * drop_rate;
  return {f, 1.0 - f};
}

AppliedSlot evaluate_applied(std::span<const double> vsc_load, double mbs_own_load,
                             std::span<const OperativeMode> applied, const SimParams& sim,
                             const PowerModelParams& power, double e_max_wh) {
  AppliedSlot out;
  out.routing = route_and_drop(vsc_load, mbs_own_load, applied, sim);
  std::vector<OffloadedCell> offloaded;
  offloaded.reserve(applied.size());
  for (std::size_t i = 0; i < applied.size(); ++i) {
    if (applied[i] == OperativeMode::PhyRf) {
      offloaded.push_back(
          {out.routing.served(static_cast<Eigen::Index>(i)) / sim.vsc_capacity_mbps, applied[i]});
    }
  }
  out.mbs_utilization = out.routing.mbs_served / sim.mbs_capacity_mbps;
  const double watts =
      mbs_site_power(out.mbs_utilization, std::span<const OffloadedCell>(offloaded), power);
  out.grid_energy_wh = watts * sim.slot_hours;
  out.cost = slot_cost(out.grid_energy_wh, out.routing.drop_rate, sim, e_max_wh);
  return out;
}

double cell_consumption_wh(OperativeMode applied, double served_mbps, const SimParams& sim,
                           const PowerModelParams& power) {
  return vsc_power(applied, served_mbps / sim.vsc_capacity_mbps, power) * sim.slot_hours;
}

BatteryUpdate next_battery(double battery_wh, double harvest_wh, double consumed_wh,
                           const SimParams& sim) {
  const double raw = battery_wh + harvest_wh - consumed_wh;
  if (raw > sim.battery_capacity_wh) return {sim.battery_capacity_wh, BatteryClip::Capacity};
  if (raw < 0) return {0.0, BatteryClip::Floor};
  return {raw, BatteryClip::None};
}

StepResult step(const NetworkState& state, std::span<const OperativeMode> requested,
                const SimParams& sim, const PowerModelParams& power, const TraceSet& traces) {
  const int n = sim.n_cells;
  if (static_cast<int>(requested.size()) != n) {
    throw ConfigError("joint action has " + std::to_string(requested.size()) +
                      " entries for " + std::to_string(n) + " cells");
  }
  if (state.t < 0 || state.t >= traces.horizon()) {
    throw InvalidArgument("slot index outside the trace horizon");
  }

  auto check = enforce_battery(state, requested, sim, power);
  const auto applied = check.applied;
  auto slot = evaluate_applied(as_span(state.vsc_load), state.mbs_own_load, applied, sim, power,
                               effective_e_max(sim, power));

  StepResult res;
  auto& o = res.outcome;
  o.t = state.t;
  o.requested.assign(requested.begin(), requested.end());
  o.applied = applied;
  o.forced_off = std::move(check.forced_off);
  o.grid_energy_wh = slot.grid_energy_wh;
  o.drop_rate = slot.routing.drop_rate;
  o.cost = slot.cost.cost;
  o.reward = slot.cost.reward;
  o.mbs_utilization = slot.mbs_utilization;
  o.offered_mbps = slot.routing.offered_total;
  o.dropped_mbps = slot.routing.dropped_total;
  o.consumed_wh.resize(n);
  o.next_battery.resize(n);
  o.clip.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    o.consumed_wh(i) = cell_consumption_wh(applied[static_cast<std::size_t>(i)],
                                           slot.routing.served(i), sim, power);
    auto upd = next_battery(state.battery(i), state.harvest(i), o.consumed_wh(i), sim);
    o.next_battery(i) = upd.next_wh;
    o.clip[static_cast<std::size_t>(i)] = upd.clip;
  }

  res.next.t = state.t + 1;
  res.next.battery = o.next_battery;
  res.next.mbs_utilization = slot.mbs_utilization;
  res.end_of_episode = res.next.t >= traces.horizon();
  load_exogenous(res.next, traces, res.end_of_episode ? 0 : res.next.t);
  return res;
}

EpisodeTotals EpisodeLog::recompute_totals() const {
  EpisodeTotals t;
  double energy_wh = 0.0;
  double drop_sum = 0.0;
  for (const auto& s : slots) {
    energy_wh += s.grid_energy_wh;
    drop_sum += s.drop_rate;
    t.cumulative_reward += s.reward;
    t.total_cost += s.cost;
    for (auto f : s.forced_off) t.forced_off_count += f;
  }
  t.grid_energy_kwh = energy_wh / 1000.0;
  t.mean_drop_rate = slots.empty() ? 0.0 : drop_sum / static_cast<double>(slots.size());
  return t;
}

EpisodeLog run_episode(std::span<Agent* const> agents, const TraceSet& traces,
                       const SimParams& sim, const PowerModelParams& power,
                       const EpisodeOptions& options) {
  if (static_cast<int>(agents.size()) != sim.n_cells) {
    throw ConfigError("agent count " + std::to_string(agents.size()) +
                      " differs from n_cells " + std::to_string(sim.n_cells));
  }
  power.validate();
  EpisodeLog log;
  log.n_cells = sim.n_cells;
  log.slot_hours = sim.slot_hours;
  log.slots.reserve(static_cast<std::size_t>(traces.horizon()));

  NetworkState state = initial_state(traces, sim);
  std::vector<OperativeMode> requested(agents.size());
  for (int t = 0; t < traces.horizon(); ++t) {
    if (options.before_slot) options.before_slot(t);
    for (std::size_t i = 0; i < agents.size(); ++i) {
      requested[i] = agents[i]->select(observe(state, static_cast<int>(i), sim));
    }
    auto res = step(state, requested, sim, power, traces);
    if (options.learning) {
      for (std::size_t i = 0; i < agents.size(); ++i) {
        agents[i]->learn(res.outcome.reward, observe(res.next, static_cast<int>(i), sim));
      }
    }
    log.slots.push_back(std::move(res.outcome));
    state = std::move(res.next);
  }
  log.totals = log.recompute_totals();
  return log;
}

EpisodeLog replay_actions(const std::vector<std::vector<OperativeMode>>& actions,
                          const TraceSet& traces, const SimParams& sim,
                          const PowerModelParams& power) {
  if (static_cast<int>(actions.size()) != traces.horizon()) {
    throw ConfigError("action sequence length differs from the trace horizon");
  }
  EpisodeLog log;
  log.n_cells = sim.n_cells;
  log.slot_hours = sim.slot_hours;
  NetworkState state = initial_state(traces, sim);
  for (const auto& joint : actions) {
    auto res = step(state, joint, sim, power, traces);
    log.slots.push_back(std::move(res.outcome));
    state = std::move(res.next);
  }
  log.totals = log.recompute_totals();
  return log;
}

void export_episode_csv(const std::filesystem::path& path, const EpisodeLog& log) {
  const int n = log.n_cells;
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",a_" + std::to_string(i);
  out += ",forced_off,E_m_wh,D,r";
  for (int i = 1; i <= n; ++i) out += ",B_" + std::to_string(i);
  out += "\n";
  for (const auto& s : log.slots) {
    out += std::to_string(s.t);
    for (auto a : s.applied) out += "," + std::to_string(to_index(a));
    out += ",";
    for (auto f : s.forced_off) out += f ? '1' : '0';
    out += "," + format_double(s.grid_energy_wh) + "," + format_double(s.drop_rate) + "," +
           format_double(s.reward);
    for (int i = 0; i < n; ++i) out += "," + format_double(s.next_battery(i));
    out += "\n";
  }
  write_text_file_atomic(path, out);
}

EpisodeLog load_episode_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty episode file");
  auto head = split(trim(line), ',');
  if (head.size() < 6 || head[0] != "t") throw ParseError(path.string() + ": bad episode header");
  const int n = static_cast<int>((head.size() - 5) / 2);
  if (static_cast<int>(head.size()) != 2 * n + 5) {
    throw ParseError(path.string() + ": bad episode header width");
  }
  EpisodeLog log;
  log.n_cells = n;
  int row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto f = split(trim(line), ',');
    if (static_cast<int>(f.size()) != 2 * n + 5) {
      throw ParseError(path.string() + ": ragged row " + std::to_string(row + 2));
    }
    SlotOutcome s;
    long long t = 0;
    if (!parse_int(f[0], t)) throw ParseError(path.string() + ": bad slot index");
    s.t = static_cast<int>(t);
    for (int i = 0; i < n; ++i) {
      long long a = 0;
      if (!parse_int(f[1 + i], a)) throw ParseError(path.string() + ": bad action");
      s.applied.push_back(mode_from_index(static_cast<int>(a)));
    }
    auto bits = f[1 + n];
    if (static_cast<int>(bits.size()) != n) throw ParseError(path.string() + ": bad forced_off");
    for (char c : bits) s.forced_off.push_back(c == '1' ? 1 : 0);
    if (!parse_double(f[2 + n], s.grid_energy_wh) || !parse_double(f[3 + n], s.drop_rate) ||
        !parse_double(f[4 + n], s.reward)) {
      throw ParseError(path.string() + ": bad metric on row " + std::to_string(row + 2));
    }
    s.cost = 1.0 - s.reward;
    s.next_battery.resize(n);
    for (int i = 0; i < n; ++i) {
      if (!parse_double(f[5 + n + i], s.next_battery(i))) {
        throw ParseError(path.string() + ": bad battery on row " + std::to_string(row + 2));
      }
    }
    s.requested = s.applied;
    log.slots.push_back(std::move(s));
    ++row;
  }
  log.totals = log.recompute_totals();
  return log;
}

}  // namespace vscsim
