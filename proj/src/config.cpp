#include "vscsim/config.hpp"

#include <json.hpp>
#include <set>

#include "vscsim/errors.hpp"
#include "vscsim/text_io.hpp"

namespace vscsim {

using nlohmann::json;

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Train: return "train";
    case Protocol::Evaluate: return "evaluate";
    case Protocol::Validate: return "validate";
    case Protocol::Runtime: return "runtime";
    case Protocol::Bound: return "bound";
  }
  return "?";
}

Protocol protocol_from_name(std::string_view name) {
  for (auto p : {Protocol::Train, Protocol::Evaluate, Protocol::Validate, Protocol::Runtime,
                 Protocol::Bound}) {
    if (protocol_name(p) == name) return p;
  }
  throw ConfigError("unknown protocol: " + std::string(name));
}

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion) {
    throw ConfigError("unsupported config schema_version " + std::to_string(schema_version));
  }
  if (horizon < 1) throw ConfigError("horizon must be at least one slot");
  if (protocol == Protocol::Train && epochs < 1) throw ConfigError("train needs epochs >= 1");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  try {
    solar.validate();
    traffic.validate();
    power.validate();
    sim.validate();
    agent.exploration.validate();
    dp.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (solar.slot_hours != sim.slot_hours || traffic.slot_hours != sim.slot_hours) {
    throw ConfigError("solar, traffic and simulator slot durations differ");
  }
  if (!(agent.alpha >= 0 && agent.alpha <= 1)) throw ConfigError("alpha must lie in [0,1]");
  if (!(agent.gamma >= 0 && agent.gamma < 1)) throw ConfigError("gamma must lie in [0,1)");
  for (double a : agent.alpha_grid) {
    if (!(a >= 0 && a <= 1)) throw ConfigError("alpha_grid entries must lie in [0,1]");
  }
  for (double e : agent.epsilon_grid) {
    if (!(e >= agent.exploration.floor && e <= 1)) {
      throw ConfigError("epsilon_grid entries must lie in [floor,1]");
    }
  }
  for (double e : {agent.validation_epsilon, agent.runtime_epsilon_floor}) {
    if (!(e >= 0 && e <= 1)) throw ConfigError("exploration rates must lie in [0,1]");
  }
  if (agent.runtime_decay_period_slots < 1) {
    throw ConfigError("runtime_decay_period_slots must be positive");
  }
}

namespace {

/// Reads an object's members and rejects any it did not ask for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError("unknown key '" + name_ + "." + it.key() + "'");
      }
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError("'" + name_ + "." + key + "' has the wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const std::string& name() const { return name_; }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

template <typename F>
void with_section(Section& parent, const char* key, F&& f) {
  if (const json* c = parent.child(key)) {
    Section s(*c, parent.name() + "." + key);
    f(s);
    s.finish();
  }
}

json shape_to_json(const WeeklyShape& shape) {
  json rows = json::array();
  for (int h = 0; h < 24; ++h) {
    json row = json::array();
    for (int d = 0; d < 7; ++d) row.push_back(shape(h, d));
    rows.push_back(row);
  }
  return rows;
}

WeeklyShape shape_from_json(const json& j) {
  WeeklyShape shape;
  if (!j.is_array() || j.size() != 24) throw ConfigError("weekly_shape must have 24 rows");
  for (int h = 0; h < 24; ++h) {
    const auto& row = j[static_cast<std::size_t>(h)];
    if (!row.is_array() || row.size() != 7) throw ConfigError("weekly_shape rows need 7 values");
    for (int d = 0; d < 7; ++d) {
      if (!row[static_cast<std::size_t>(d)].is_number()) {
        throw ConfigError("weekly_shape entries must be numbers");
      }
      shape(h, d) = row[static_cast<std::size_t>(d)].get<double>();
    }
  }
  return shape;
}

template <typename E, typename ToName, typename FromName>
void get_enum(Section& s, const char* key, E& out, ToName to_name, FromName from_name) {
  std::string name(to_name(out));
  s.get(key, name);
  try {
    out = from_name(name);
  } catch (const Error& e) {
    throw ConfigError(s.name() + "." + key + ": " + e.what());
  }
}

std::string_view queue_name(QueueDiscipline q) { return q == QueueDiscipline::Lifo ? "lifo" : "fifo"; }
QueueDiscipline queue_from_name(std::string_view n) {
  if (n == "fifo") return QueueDiscipline::Fifo;
  if (n == "lifo") return QueueDiscipline::Lifo;
  throw ConfigError("unknown queue discipline: " + std::string(n));
}

std::string_view engine_name(DpEngine e) {
  switch (e) {
    case DpEngine::Auto: return "auto";
    case DpEngine::LabelCorrecting: return "label-correcting";
    case DpEngine::StageSweep: return "stage-sweep";
  }
  return "?";
}
DpEngine engine_from_name(std::string_view n) {
  for (auto e : {DpEngine::Auto, DpEngine::LabelCorrecting, DpEngine::StageSweep}) {
    if (engine_name(e) == n) return e;
  }
  throw ConfigError("unknown DP engine: " + std::string(n));
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["seed"] = c.seed;
  j["horizon"] = c.horizon;
  j["protocol"] = std::string(protocol_name(c.protocol));
  j["epochs"] = c.epochs;
  j["resample_traces_per_epoch"] = c.resample_traces_per_epoch;

  j["solar"] = {{"panel_area_m2", c.solar.panel_area_m2},
                {"peak_density_w_m2", c.solar.peak_density_w_m2},
                {"clear_sky_index", c.solar.clear_sky_index},
                {"season_amplitude", c.solar.season_amplitude},
                {"daily_variability_sd", c.solar.daily_variability_sd},
                {"hourly_jitter_sd", c.solar.hourly_jitter_sd},
                {"slot_hours", c.solar.slot_hours},
                {"mean_day_length_h", c.solar.mean_day_length_h},
                {"day_length_amplitude_h", c.solar.day_length_amplitude_h},
                {"solar_noon_h", c.solar.solar_noon_h},
                {"summer_solstice_day", c.solar.summer_solstice_day}};

  json traffic = {{"profile", std::string(profile_name(c.traffic.profile))},
                  {"users_per_vsc", c.traffic.users_per_vsc},
                  {"heavy_ratio", c.traffic.heavy_ratio},
                  {"heavy_rate_mb_per_h", c.traffic.heavy_rate_mb_per_h},
                  {"ordinary_rate_mb_per_h", c.traffic.ordinary_rate_mb_per_h},
                  {"activity_factor", c.traffic.activity_factor},
                  {"noise_sd", c.traffic.noise_sd},
                  {"mbs_peak_mbps", c.traffic.mbs_peak_mbps},
                  {"slot_hours", c.traffic.slot_hours}};
  if (c.traffic.custom_shape) traffic["weekly_shape"] = shape_to_json(*c.traffic.custom_shape);
  j["traffic"] = traffic;

  const auto& p = c.power;
  j["power"] = {{"gops_per_watt", p.gops_per_watt},
                {"vsc_bb_static_gops", p.vsc_bb_static_gops},
                {"vsc_bb_load_gops", p.vsc_bb_load_gops},
                {"mbs_bb_static_gops", p.mbs_bb_static_gops},
                {"mbs_bb_load_gops", p.mbs_bb_load_gops},
                {"vsc_rf_w", p.vsc_rf_w},
                {"vsc_pa_w", p.vsc_pa_w},
                {"mbs_rf_w", p.mbs_rf_w},
                {"mbs_pa_w", p.mbs_pa_w},
                {"vsc_overhead_frac", p.vsc_overhead_frac},
                {"mbs_overhead_frac", p.mbs_overhead_frac}};

  const auto& s = c.sim;
  j["sim"] = {{"n_cells", s.n_cells},
              {"battery_capacity_wh", s.battery_capacity_wh},
              {"battery_threshold_frac", s.battery_threshold_frac},
              {"initial_battery_frac", s.initial_battery_frac},
              {"slot_hours", s.slot_hours},
              {"vsc_capacity_mbps", s.vsc_capacity_mbps},
              {"mbs_capacity_mbps", s.mbs_capacity_mbps},
              {"w_energy", s.w_energy},
              {"w_drop", s.w_drop},
              {"e_max_wh", s.e_max_wh},
              {"harvest_scale_wh", s.harvest_scale_wh}};

  const auto& a = c.agent;
  j["agent"] = {{"algorithm", std::string(algorithm_name(a.algorithm))},
                {"alpha", a.alpha},
                {"gamma", a.gamma},
                {"exploration",
                 {{"initial", a.exploration.initial},
                  {"discount", a.exploration.discount},
                  {"floor", a.exploration.floor}}},
                {"fql_variant", std::string(variant_name(a.variant))},
                {"validation_epsilon", a.validation_epsilon},
                {"runtime_epsilon_floor", a.runtime_epsilon_floor},
                {"runtime_decay_period_slots", a.runtime_decay_period_slots},
                {"alpha_grid", a.alpha_grid},
                {"epsilon_grid", a.epsilon_grid}};

  j["dp"] = {{"battery_levels", c.dp.battery_levels},
             {"max_cells", c.dp.max_cells},
             {"queue", std::string(queue_name(c.dp.queue))},
             {"engine", std::string(engine_name(c.dp.engine))},
             {"want_path", c.dp.want_path}};

  j["paths"] = {{"traces", c.paths.traces},
                {"policies", c.paths.policies},
                {"output", c.paths.output}};
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  {
    Section root(j, "config");
    if (!root.child("schema_version")) throw ConfigError("config lacks schema_version");
    root.get("schema_version", c.schema_version);
    if (c.schema_version != kConfigSchemaVersion) {
      throw ConfigError("unsupported config schema_version " + std::to_string(c.schema_version));
    }
    root.get("seed", c.seed);
    root.get("horizon", c.horizon);
    get_enum(root, "protocol", c.protocol, protocol_name, protocol_from_name);
    root.get("epochs", c.epochs);
    root.get("resample_traces_per_epoch", c.resample_traces_per_epoch);

    with_section(root, "solar", [&](Section& s) {
      s.get("panel_area_m2", c.solar.panel_area_m2);
      s.get("peak_density_w_m2", c.solar.peak_density_w_m2);
      s.get("clear_sky_index", c.solar.clear_sky_index);
      s.get("season_amplitude", c.solar.season_amplitude);
      s.get("daily_variability_sd", c.solar.daily_variability_sd);
      s.get("hourly_jitter_sd", c.solar.hourly_jitter_sd);
      s.get("slot_hours", c.solar.slot_hours);
      s.get("mean_day_length_h", c.solar.mean_day_length_h);
      s.get("day_length_amplitude_h", c.solar.day_length_amplitude_h);
      s.get("solar_noon_h", c.solar.solar_noon_h);
      s.get("summer_solstice_day", c.solar.summer_solstice_day);
    });

    with_section(root, "traffic", [&](Section& s) {
      get_enum(s, "profile", c.traffic.profile, profile_name, profile_from_name);
      s.get("users_per_vsc", c.traffic.users_per_vsc);
      s.get("heavy_ratio", c.traffic.heavy_ratio);
      s.get("heavy_rate_mb_per_h", c.traffic.heavy_rate_mb_per_h);
      s.get("ordinary_rate_mb_per_h", c.traffic.ordinary_rate_mb_per_h);
      s.get("activity_factor", c.traffic.activity_factor);
      s.get("noise_sd", c.traffic.noise_sd);
      s.get("mbs_peak_mbps", c.traffic.mbs_peak_mbps);
      s.get("slot_hours", c.traffic.slot_hours);
      if (const json* shape = s.child("weekly_shape")) c.traffic.custom_shape = shape_from_json(*shape);
    });

    with_section(root, "power", [&](Section& s) {
      auto& p = c.power;
      s.get("gops_per_watt", p.gops_per_watt);
      s.get("vsc_bb_static_gops", p.vsc_bb_static_gops);
      s.get("vsc_bb_load_gops", p.vsc_bb_load_gops);
      s.get("mbs_bb_static_gops", p.mbs_bb_static_gops);
      s.get("mbs_bb_load_gops", p.mbs_bb_load_gops);
      s.get("vsc_rf_w", p.vsc_rf_w);
      s.get("vsc_pa_w", p.vsc_pa_w);
      s.get("mbs_rf_w", p.mbs_rf_w);
      s.get("mbs_pa_w", p.mbs_pa_w);
      s.get("vsc_overhead_frac", p.vsc_overhead_frac);
      s.get("mbs_overhead_frac", p.mbs_overhead_frac);
    });

    with_section(root, "sim", [&](Section& s) {
      auto& p = c.sim;
      s.get("n_cells", p.n_cells);
      s.get("battery_capacity_wh", p.battery_capacity_wh);
      s.get("battery_threshold_frac", p.battery_threshold_frac);
      s.get("initial_battery_frac", p.initial_battery_frac);
      s.get("slot_hours", p.slot_hours);
      s.get("vsc_capacity_mbps", p.vsc_capacity_mbps);
      s.get("mbs_capacity_mbps", p.mbs_capacity_mbps);
      s.get("w_energy", p.w_energy);
      s.get("w_drop", p.w_drop);
      s.get("e_max_wh", p.e_max_wh);
      s.get("harvest_scale_wh", p.harvest_scale_wh);
    });

    with_section(root, "agent", [&](Section& s) {
      auto& a = c.agent;
      get_enum(s, "algorithm", a.algorithm, algorithm_name, algorithm_from_name);
      s.get("alpha", a.alpha);
      s.get("gamma", a.gamma);
      with_section(s, "exploration", [&](Section& e) {
        e.get("initial", a.exploration.initial);
        e.get("discount", a.exploration.discount);
        e.get("floor", a.exploration.floor);
      });
      get_enum(s, "fql_variant", a.variant, variant_name, variant_from_name);
      s.get("validation_epsilon", a.validation_epsilon);
      s.get("runtime_epsilon_floor", a.runtime_epsilon_floor);
      s.get("runtime_decay_period_slots", a.runtime_decay_period_slots);
      s.get("alpha_grid", a.alpha_grid);
      s.get("epsilon_grid", a.epsilon_grid);
    });

    with_section(root, "dp", [&](Section& s) {
      s.get("battery_levels", c.dp.battery_levels);
      s.get("max_cells", c.dp.max_cells);
      get_enum(s, "queue", c.dp.queue, queue_name, queue_from_name);
      get_enum(s, "engine", c.dp.engine, engine_name, engine_from_name);
      s.get("want_path", c.dp.want_path);
    });

    with_section(root, "paths", [&](Section& s) {
      s.get("traces", c.paths.traces);
      s.get("policies", c.paths.policies);
      s.get("output", c.paths.output);
    });
    root.finish();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_text_file(path));
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& config) {
  write_text_file_atomic(path, config_to_json(config));
}

}  // namespace vscsim
