#include "vscsim/offline_bound.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>

#include "vscsim/errors.hpp"

namespace vscsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int ipow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void decode_joint(int joint, int n, std::vector<OperativeMode>& out) {
  out.resize(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = mode_from_index(joint % kModeCount);
    joint /= kModeCount;
  }
}

/// Battery-independent data of one slot.
struct Stage {
  std::vector<double> cost;         // per applied joint action
  std::vector<double> consumed_wh;  // [cell * 3 + mode]
  std::vector<double> harvest_wh;
  std::vector<double> load_mbps;
};

Stage make_stage(const TraceSet& traces, int t, const SimParams& sim,
                 const PowerModelParams& power, double e_max) {
  const int n = sim.n_cells;
  Stage s;
  s.harvest_wh.resize(static_cast<std::size_t>(n));
  s.load_mbps.resize(static_cast<std::size_t>(n));
  s.consumed_wh.resize(static_cast<std::size_t>(n * kModeCount));
  for (int i = 0; i < n; ++i) {
    s.harvest_wh[static_cast<std::size_t>(i)] = traces.harvest(i, t);
    s.load_mbps[static_cast<std::size_t>(i)] = traces.vsc_load(i, t);
    const double served = std::min(traces.vsc_load(i, t), sim.vsc_capacity_mbps);
    for (auto m : kAllModes) {
      s.consumed_wh[static_cast<std::size_t>(i * kModeCount + to_index(m))] =
          cell_consumption_wh(m, m == OperativeMode::Off ? 0.0 : served, sim, power);
    }
  }
  const int joints = ipow(kModeCount, n);
  s.cost.resize(static_cast<std::size_t>(joints));
  const Eigen::VectorXd load = traces.vsc_load.col(t);
  std::span<const double> load_span(load.data(), static_cast<std::size_t>(n));
  std::vector<OperativeMode> applied;
  for (int a = 0; a < joints; ++a) {
    decode_joint(a, n, applied);
    s.cost[static_cast<std::size_t>(a)] =
        evaluate_applied(load_span, traces.mbs_load(t), applied, sim, power, e_max).cost.cost;
  }
  return s;
}

struct Grid {
  int levels = 0;  // 0: exact
  double width = 0.0;

  int bin(double wh) const {
    return std::clamp(static_cast<int>(std::lround(wh / width)), 0, levels - 1);
  }
  double snap(double wh) const { return levels == 0 ? wh : bin(wh) * width; }
};

// ---------------------------------------------------------------------------
// Generic label-correcting search.

struct Label {
  int t = 0;
  std::vector<double> battery;
  double d = kInf;
  int parent = -1;
  int action = -1;
  bool in_open = false;
};

std::string node_key(int t, const std::vector<double>& b) {
  std::string key(sizeof(int) + b.size() * sizeof(double), '\0');
  std::memcpy(key.data(), &t, sizeof(int));
  std::memcpy(key.data() + sizeof(int), b.data(), b.size() * sizeof(double));
  return key;
}

OfflineResult label_correcting(const TraceSet& traces, const SimParams& sim,
                               const PowerModelParams& power, const DPConfig& dp,
                               const Grid& grid, double e_max) {
  const int n = sim.n_cells;
  const int horizon = traces.horizon();
  std::vector<Stage> stages;
  stages.reserve(static_cast<std::size_t>(horizon));
  for (int t = 0; t < horizon; ++t) stages.push_back(make_stage(traces, t, sim, power, e_max));

  std::vector<Label> labels;
  std::unordered_map<std::string, int> index;
  std::deque<int> open;

  Label root;
  root.battery.assign(static_cast<std::size_t>(n),
                      grid.snap(sim.initial_battery_frac * sim.battery_capacity_wh));
  root.d = 0.0;
  root.in_open = true;
  labels.push_back(root);
  index.emplace(node_key(0, root.battery), 0);
  open.push_back(0);

  double upper = kInf;
  int best_parent = -1;
  int best_action = -1;
  long long expansions = 0;

  std::vector<std::vector<int>> feasible(static_cast<std::size_t>(n));
  std::vector<int> choice(static_cast<std::size_t>(n));
  std::vector<double> next(static_cast<std::size_t>(n));

  while (!open.empty()) {
    int id;
    if (dp.queue == QueueDiscipline::Fifo) {
      id = open.front();
      open.pop_front();
    } else {
      id = open.back();
      open.pop_back();
    }
    labels[static_cast<std::size_t>(id)].in_open = false;
    ++expansions;
    const int t = labels[static_cast<std::size_t>(id)].t;
    const double d = labels[static_cast<std::size_t>(id)].d;
    const std::vector<double> battery = labels[static_cast<std::size_t>(id)].battery;
    const Stage& st = stages[static_cast<std::size_t>(t)];

    for (int i = 0; i < n; ++i) {
      auto& f = feasible[static_cast<std::size_t>(i)];
      f.clear();
      for (auto m : kAllModes) {
        if (mode_feasible(m, battery[static_cast<std::size_t>(i)],
                          st.harvest_wh[static_cast<std::size_t>(i)],
                          st.load_mbps[static_cast<std::size_t>(i)], sim, power)) {
          f.push_back(to_index(m));
        }
      }
    }

    // Odometer over the per-cell feasible modes.
    std::fill(choice.begin(), choice.end(), 0);
    while (true) {
      int joint = 0;
      for (int i = 0; i < n; ++i) {
        joint = joint * kModeCount +
                feasible[static_cast<std::size_t>(i)][static_cast<std::size_t>(choice[static_cast<std::size_t>(i)])];
      }
      const double cand = d + st.cost[static_cast<std::size_t>(joint)];
      if (cand < upper) {
        if (t + 1 == horizon) {
          upper = cand;
          best_parent = id;
          best_action = joint;
        } else {
          int rest = joint;
          for (int i = n - 1; i >= 0; --i) {
            const int m = rest % kModeCount;
            rest /= kModeCount;
            const auto k = static_cast<std::size_t>(i);
            next[k] = grid.snap(
                next_battery(battery[k], st.harvest_wh[k],
                             st.consumed_wh[k * kModeCount + static_cast<std::size_t>(m)], sim)
                    .next_wh);
          }
          auto key = node_key(t + 1, next);
          auto it = index.find(key);
          int child;
          if (it == index.end()) {
            child = static_cast<int>(labels.size());
            Label l;
            l.t = t + 1;
            l.battery = next;
            labels.push_back(std::move(l));
            index.emplace(std::move(key), child);
          } else {
            child = it->second;
          }
          Label& c = labels[static_cast<std::size_t>(child)];
          if (cand < c.d) {
            c.d = cand;
            c.parent = id;
            c.action = joint;
            if (!c.in_open) {
              c.in_open = true;
              open.push_back(child);
            }
          }
        }
      }
      int i = n - 1;
      while (i >= 0) {
        auto k = static_cast<std::size_t>(i);
        if (++choice[k] < static_cast<int>(feasible[k].size())) break;
        choice[k] = 0;
        --i;
      }
      if (i < 0) break;
    }
  }

  OfflineResult res;
  res.engine = DpEngine::LabelCorrecting;
  res.total_cost = upper;
  res.cumulative_reward_bound = horizon - upper;
  res.expansions = expansions;
  if (dp.want_path) {
    res.actions.resize(static_cast<std::size_t>(horizon));
    int t = horizon - 1;
    int node = best_parent;
    int action = best_action;
    while (t >= 0) {
      decode_joint(action, n, res.actions[static_cast<std::size_t>(t)]);
      action = labels[static_cast<std::size_t>(node)].action;
      node = labels[static_cast<std::size_t>(node)].parent;
      --t;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Dense backward sweep over the binned grid.
//
// Value arrays are indexed row-major over per-cell local bins (cell 0 most
// significant). Only bins >= `lo` are stored: batteries that start at or above
// the threshold never drop below it, and Off never lowers a battery.

class StageSweep {
 public:
  StageSweep(const TraceSet& traces, const SimParams& sim, const PowerModelParams& power,
             const Grid& grid, double e_max)
      : traces_(traces), sim_(sim), power_(power), grid_(grid), e_max_(e_max), n_(sim.n_cells) {
    const int b0 = grid.bin(sim.initial_battery_frac * sim.battery_capacity_wh);
    lo_ = std::min(b0, grid.bin(sim.threshold_wh()));
    width_ = grid.levels - lo_;
    size_ = 1;
    for (int i = 0; i < n_; ++i) size_ *= static_cast<std::size_t>(width_);
    start_ = 0;
    for (int i = 0; i < n_; ++i) start_ = start_ * static_cast<std::size_t>(width_) + (b0 - lo_);
    buffers_.assign(static_cast<std::size_t>(std::max(n_ - 1, 0)), std::vector<double>(size_));
    map_.resize(static_cast<std::size_t>(n_ * kModeCount * width_));
  }

  std::size_t size() const { return size_; }
  std::size_t start() const { return start_; }

  /// Fills the per-stage transition table: local next bin or -1 if infeasible.
  void prepare(int t) {
    stage_ = make_stage(traces_, t, sim_, power_, e_max_);
    for (int i = 0; i < n_; ++i) {
      const auto ci = static_cast<std::size_t>(i);
      for (auto m : kAllModes) {
        const auto mi = static_cast<std::size_t>(to_index(m));
        const double drawn = stage_.consumed_wh[ci * kModeCount + mi];
        for (int b = 0; b < width_; ++b) {
          const double wh = (lo_ + b) * grid_.width;
          int& slot = map_[(ci * kModeCount + mi) * static_cast<std::size_t>(width_) +
                           static_cast<std::size_t>(b)];
          if (!mode_feasible(m, wh, stage_.harvest_wh[ci], stage_.load_mbps[ci], sim_, power_)) {
            slot = -1;
            continue;
          }
          const double nxt = next_battery(wh, stage_.harvest_wh[ci], drawn, sim_).next_wh;
          slot = std::max(grid_.bin(nxt) - lo_, 0);
        }
      }
    }
  }

  /// V = min over feasible joint actions of cost + Vnext[transition].
  void backward(const double* vnext, double* v) {
    std::fill(v, v + size_, kInf);
    remap(n_ - 1, vnext, 0, 1, v);
  }

  /// Optimal joint action at local state `state`, given V of the next stage.
  int best_action(std::size_t state, const double* vnext, std::size_t& next_state) const {
    std::vector<int> bins(static_cast<std::size_t>(n_));
    std::size_t rest = state;
    for (int i = n_ - 1; i >= 0; --i) {
      bins[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::size_t>(width_));
      rest /= static_cast<std::size_t>(width_);
    }
    const int joints = static_cast<int>(stage_.cost.size());
    double best = kInf;
    int best_joint = 0;
    for (int a = 0; a < joints; ++a) {
      std::size_t idx = 0;
      bool ok = true;
      int rem = a;
      std::size_t stride = 1;
      for (int i = n_ - 1; i >= 0; --i) {
        const int m = rem % kModeCount;
        rem /= kModeCount;
        const int nb = map_at(i, m, bins[static_cast<std::size_t>(i)]);
        if (nb < 0) {
          ok = false;
          break;
        }
        idx += static_cast<std::size_t>(nb) * stride;
        stride *= static_cast<std::size_t>(width_);
      }
      if (!ok) continue;
      const double cand = stage_.cost[static_cast<std::size_t>(a)] + vnext[idx];
      if (cand < best) {
        best = cand;
        best_joint = a;
        next_state = idx;
      }
    }
    return best_joint;
  }

 private:
  int map_at(int cell, int mode, int bin) const {
    return map_[(static_cast<std::size_t>(cell) * kModeCount + static_cast<std::size_t>(mode)) *
                    static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(bin)];
  }

  /// Remaps axis `axis` of `src` under every mode of that cell, recursing
  /// toward axis 0 where the result is folded into `v`. `suffix` is the joint
  /// action index contributed by cells after `axis`, `scale` its place value.
  void remap(int axis, const double* src, int suffix, int scale, double* v) {
    const auto w = static_cast<std::size_t>(width_);
    std::size_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= w;
    for (int i = axis + 1; i < n_; ++i) inner *= w;
    for (int m = 0; m < kModeCount; ++m) {
      const int joint = suffix + m * scale;
      if (axis == 0) {
        const double c = stage_.cost[static_cast<std::size_t>(joint)];
        for (std::size_t b = 0; b < w; ++b) {
          const int nb = map_at(0, m, static_cast<int>(b));
          if (nb < 0) continue;
          const double* s = src + static_cast<std::size_t>(nb) * inner;
          double* out = v + b * inner;
          for (std::size_t k = 0; k < inner; ++k) out[k] = std::min(out[k], c + s[k]);
        }
        continue;
      }
      double* dst = buffers_[static_cast<std::size_t>(axis - 1)].data();
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t b = 0; b < w; ++b) {
          const int nb = map_at(axis, m, static_cast<int>(b));
          double* out = dst + (o * w + b) * inner;
          if (nb < 0) {
            std::fill(out, out + inner, kInf);
          } else {
            const double* s = src + (o * w + static_cast<std::size_t>(nb)) * inner;
            std::copy(s, s + inner, out);
          }
        }
      }
      remap(axis - 1, dst, joint, scale * kModeCount, v);
    }
  }

  const TraceSet& traces_;
  const SimParams& sim_;
  const PowerModelParams& power_;
  Grid grid_;
  double e_max_;
  int n_;
  int lo_ = 0;
  int width_ = 0;
  std::size_t size_ = 0;
  std::size_t start_ = 0;
  Stage stage_;
  std::vector<int> map_;
  std::vector<std::vector<double>> buffers_;
};

OfflineResult stage_sweep(const TraceSet& traces, const SimParams& sim,
                          const PowerModelParams& power, const DPConfig& dp, const Grid& grid,
                          double e_max) {
  const int horizon = traces.horizon();
  const int n = sim.n_cells;
  StageSweep sweep(traces, sim, power, grid, e_max);
  const std::size_t size = sweep.size();

  OfflineResult res;
  res.engine = DpEngine::StageSweep;
  res.expansions = static_cast<long long>(size) * horizon;

  if (!dp.want_path) {
    std::vector<double> vnext(size, 0.0), v(size);
    for (int t = horizon - 1; t >= 0; --t) {
      sweep.prepare(t);
      sweep.backward(vnext.data(), v.data());
      vnext.swap(v);
    }
    res.total_cost = vnext[sweep.start()];
    res.cumulative_reward_bound = horizon - res.total_cost;
    return res;
  }

  // Keep V at every `stride`-th stage, then recompute each segment while
  // walking the path forward.
  const int stride = std::max(1, static_cast<int>(std::ceil(std::sqrt(double(horizon)))));
  std::vector<std::vector<double>> checkpoints(static_cast<std::size_t>(horizon / stride + 1));
  auto checkpoint_of = [&](int t) -> std::vector<double>* {
    if (t == horizon || t % stride != 0) return nullptr;
    return &checkpoints[static_cast<std::size_t>(t / stride)];
  };
  std::vector<double> terminal(size, 0.0);
  {
    std::vector<double> vnext(size, 0.0), v(size);
    for (int t = horizon - 1; t >= 0; --t) {
      sweep.prepare(t);
      sweep.backward(vnext.data(), v.data());
      vnext.swap(v);
      if (auto* cp = checkpoint_of(t)) *cp = vnext;
    }
    res.total_cost = vnext[sweep.start()];
  }
  res.cumulative_reward_bound = horizon - res.total_cost;

  res.actions.resize(static_cast<std::size_t>(horizon));
  std::vector<std::vector<double>> segment;
  std::size_t state = sweep.start();
  for (int s = 0; s < horizon; s += stride) {
    const int e = std::min(s + stride, horizon);
    // segment[k] holds V at stage s + 1 + k.
    segment.resize(static_cast<std::size_t>(e - s));
    segment.back() = e == horizon ? terminal : checkpoints[static_cast<std::size_t>(e / stride)];
    for (int t = e - 1; t > s; --t) {
      sweep.prepare(t);
      auto& out = segment[static_cast<std::size_t>(t - s - 1)];
      out.resize(size);
      sweep.backward(segment[static_cast<std::size_t>(t - s)].data(), out.data());
    }
    for (int t = s; t < e; ++t) {
      sweep.prepare(t);
      std::size_t next_state = 0;
      const int joint =
          sweep.best_action(state, segment[static_cast<std::size_t>(t - s)].data(), next_state);
      decode_joint(joint, n, res.actions[static_cast<std::size_t>(t)]);
      state = next_state;
    }
  }
  return res;
}

}  // namespace

void DPConfig::validate() const {
  if (battery_levels != 0 && battery_levels < 2) {
    throw InvalidArgument("battery_levels must be 0 (exact) or at least 2");
  }
  if (max_cells < 1) throw InvalidArgument("max_cells must be at least 1");
  if (engine == DpEngine::StageSweep && battery_levels == 0) {
    throw InvalidArgument("the stage-sweep engine needs binned batteries");
  }
}

double bin_width_wh(const SimParams& sim, const DPConfig& dp) {
  return dp.battery_levels == 0 ? 0.0 : sim.battery_capacity_wh / (dp.battery_levels - 1);
}

double binning_tolerance(const SimParams& sim, const PowerModelParams& power,
                         const DPConfig& dp) {
  return sim.w_energy * bin_width_wh(sim, dp) / effective_e_max(sim, power);
}

OfflineResult solve_offline(const TraceSet& traces, const SimParams& sim,
                            const PowerModelParams& power, const DPConfig& dp) {
  dp.validate();
  sim.validate();
  power.validate();
  if (sim.n_cells > dp.max_cells) {
    throw CapabilityError("off-line bound refuses " + std::to_string(sim.n_cells) +
                          " cells (max_cells = " + std::to_string(dp.max_cells) + ")");
  }
  initial_state(traces, sim);  // shape checks
  traces.validate();
  const double e_max = effective_e_max(sim, power);
  Grid grid{dp.battery_levels, bin_width_wh(sim, dp)};
  const bool sweep = dp.engine == DpEngine::StageSweep ||
                     (dp.engine == DpEngine::Auto && dp.battery_levels > 0);
  return sweep ? stage_sweep(traces, sim, power, dp, grid, e_max)
               : label_correcting(traces, sim, power, dp, grid, e_max);
}

BruteForceResult brute_force(const TraceSet& traces, const SimParams& sim,
                             const PowerModelParams& power, int horizon, long long cap) {
  if (horizon < 0) horizon = traces.horizon();
  if (horizon > traces.horizon()) throw InvalidArgument("horizon exceeds the trace length");
  BruteForceResult best;
  if (horizon == 0) return best;

  const int joints = ipow(kModeCount, sim.n_cells);
  long long total = 1;
  for (int t = 0; t < horizon; ++t) {
    if (total > cap / joints) {
      throw CapabilityError("brute force would enumerate more than " + std::to_string(cap) +
                            " sequences");
    }
    total *= joints;
  }

  best.total_cost = kInf;
  std::vector<std::vector<OperativeMode>> path(static_cast<std::size_t>(horizon));
  std::vector<OperativeMode> joint;

  auto dfs = [&](auto&& self, const NetworkState& state, double cost) -> void {
    const int t = state.t;
    if (t == horizon) {
      ++best.sequences;
      if (cost < best.total_cost) {
        best.total_cost = cost;
        best.actions = path;
      }
      return;
    }
    for (int a = 0; a < joints; ++a) {
      decode_joint(a, sim.n_cells, joint);
      auto res = step(state, joint, sim, power, traces);
      path[static_cast<std::size_t>(t)] = joint;
      self(self, res.next, cost + res.outcome.cost);
    }
  };
  dfs(dfs, initial_state(traces, sim), 0.0);
  return best;
}

}  // namespace vscsim
