#include "vscsim/traces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "vscsim/errors.hpp"
#include "vscsim/rng.hpp"
#include "vscsim/text_io.hpp"

namespace vscsim {

std::string_view profile_name(ProfileKind k) {
  return k == ProfileKind::Office ? "office" : "residential";
}

ProfileKind profile_from_name(std::string_view name) {
  if (name == "residential" || name == "Residential") return ProfileKind::Residential;
  if (name == "office" || name == "Office") return ProfileKind::Office;
  throw InvalidArgument("unknown traffic profile: " + std::string(name));
}

void validate_weekly_shape(const WeeklyShape& shape) {
  if (!((shape.array() >= 0.0).all() && (shape.array() <= 1.0).all())) {
    throw InvalidArgument("weekly shape multipliers must lie in [0,1]");
  }
  if (shape.maxCoeff() != 1.0) throw InvalidArgument("weekly shape maximum must be exactly 1");
}

WeeklyShape load_weekly_shape_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  WeeklyShape shape;
  std::string line;
  int row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto fields = split(body, ',');
    if (fields.size() != 8) {
      throw ParseError(path.string() + ": expected 8 fields on shape row " + std::to_string(row));
    }
    if (row >= 24) throw ParseError(path.string() + ": more than 24 hour rows");
    for (int d = 0; d < 7; ++d) {
      if (!parse_double(fields[d + 1], shape(row, d))) {
        throw ParseError(path.string() + ": bad number on shape row " + std::to_string(row));
      }
    }
    ++row;
  }
  if (row != 24) throw ParseError(path.string() + ": expected 24 hour rows");
  validate_weekly_shape(shape);
  return shape;
}

SlotCalendar slot_calendar(int t, double slot_hours) {
  const double hours = t * slot_hours;
  const int day = static_cast<int>(std::floor(hours / 24.0));
  const int hour = static_cast<int>(std::floor(hours - 24.0 * day));
  return {hour, day, day % 7, day % 365};
}

void SolarConfig::validate() const {
  if (!(panel_area_m2 > 0)) throw InvalidArgument("panel_area must be positive");
  if (!(peak_density_w_m2 > 0)) throw InvalidArgument("panel peak density must be positive");
  if (!(daily_variability_sd >= 0) || !(hourly_jitter_sd >= 0)) {
    throw InvalidArgument("solar variability must be non-negative");
  }
  if (!(season_amplitude >= 0 && season_amplitude <= 1)) {
    throw InvalidArgument("season amplitude must lie in [0,1]");
  }
  if (!(clear_sky_index >= 0 && clear_sky_index <= 1)) {
    throw InvalidArgument("clear-sky index must lie in [0,1]");
  }
  if (!(slot_hours > 0)) throw InvalidArgument("slot_hours must be positive");
  if (!(mean_day_length_h - day_length_amplitude_h >= 0) ||
      !(mean_day_length_h + day_length_amplitude_h <= 24)) {
    throw InvalidArgument("day length must stay within [0,24] hours");
  }
}

double TrafficConfig::nominal_peak_mbps() const {
  const double heavy = users_per_vsc * heavy_ratio;
  const double ordinary = users_per_vsc * (1.0 - heavy_ratio);
  const double mb_per_hour = heavy * heavy_rate_mb_per_h + ordinary * ordinary_rate_mb_per_h;
  return mb_per_hour * 8.0 / 3600.0;
}

const WeeklyShape& TrafficConfig::shape() const {
  return custom_shape ? *custom_shape : builtin_weekly_shape(profile);
}

void TrafficConfig::validate() const {
  if (users_per_vsc < 0) throw InvalidArgument("users_per_vsc must be non-negative");
  if (!(heavy_ratio >= 0 && heavy_ratio <= 1)) throw InvalidArgument("heavy_ratio must lie in [0,1]");
  if (!(heavy_rate_mb_per_h >= 0) || !(ordinary_rate_mb_per_h >= 0)) {
    throw InvalidArgument("user rates must be non-negative");
  }
  if (!(activity_factor >= 0)) throw InvalidArgument("activity_factor must be non-negative");
  if (!(noise_sd >= 0)) throw InvalidArgument("traffic noise_sd must be non-negative");
  if (!(mbs_peak_mbps >= 0)) throw InvalidArgument("mbs_peak_mbps must be non-negative");
  if (!(slot_hours > 0)) throw InvalidArgument("slot_hours must be positive");
  validate_weekly_shape(shape());
}

bool TrafficConfig::operator==(const TrafficConfig& o) const {
  return profile == o.profile && users_per_vsc == o.users_per_vsc &&
         heavy_ratio == o.heavy_ratio && heavy_rate_mb_per_h == o.heavy_rate_mb_per_h &&
         ordinary_rate_mb_per_h == o.ordinary_rate_mb_per_h &&
         activity_factor == o.activity_factor && noise_sd == o.noise_sd &&
         mbs_peak_mbps == o.mbs_peak_mbps && slot_hours == o.slot_hours &&
         custom_shape.has_value() == o.custom_shape.has_value() &&
         (!custom_shape || *custom_shape == *o.custom_shape);
}

void TraceSet::validate() const {
  if (vsc_load.rows() != harvest.rows() || vsc_load.cols() != harvest.cols()) {
    throw ValidationError("harvest and vsc_load dimensions differ");
  }
  if (mbs_load.size() != harvest.cols()) {
    throw ValidationError("mbs_load length differs from the horizon");
  }
  if (!(slot_hours > 0)) throw ValidationError("slot_hours must be positive");
  if (!(harvest.array() >= 0).all() || !(vsc_load.array() >= 0).all() ||
      !(mbs_load.array() >= 0).all()) {
    throw ValidationError("trace entries must be non-negative");
  }
}

bool TraceSet::operator==(const TraceSet& o) const {
  return harvest.rows() == o.harvest.rows() && harvest.cols() == o.harvest.cols() &&
         harvest == o.harvest && vsc_load == o.vsc_load && mbs_load.size() == o.mbs_load.size() &&
         mbs_load == o.mbs_load && slot_hours == o.slot_hours && seed == o.seed;
}

namespace {

void require_dims(int horizon, int n_cells) {
  if (horizon <= 0) throw InvalidArgument("horizon must be positive");
  if (n_cells <= 0) throw InvalidArgument("n_cells must be positive");
}

double lognormal_unit_mean(double sigma, double z) {
  return std::exp(sigma * z - 0.5 * sigma * sigma);
}

}  // namespace

Eigen::MatrixXd generate_solar_trace(const SolarConfig& config, std::uint64_t seed, int horizon,
                                     int n_cells) {
  require_dims(horizon, n_cells);
  config.validate();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double cap = config.slot_cap_wh();
  const double two_pi = 2.0 * std::numbers::pi;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_cells, horizon);

  int current_day = -1;
  double weather = 1.0;
  for (int t = 0; t < horizon; ++t) {
    const auto cal = slot_calendar(t, config.slot_hours);
    if (cal.day_index != current_day) {
      current_day = cal.day_index;
      weather = lognormal_unit_mean(config.daily_variability_sd, normal(rng));
    }
    const double season_phase =
        std::cos(two_pi * (cal.day_of_year - config.summer_solstice_day) / 365.0);
    const double day_length =
        config.mean_day_length_h + config.day_length_amplitude_h * season_phase;
    const double sunrise = config.solar_noon_h - 0.5 * day_length;
    const double sunset = config.solar_noon_h + 0.5 * day_length;
    const double seasonal = 1.0 - config.season_amplitude * 0.5 * (1.0 - season_phase);
    const double midpoint = (t * config.slot_hours - 24.0 * cal.day_index) + 0.5 * config.slot_hours;
    const bool daylight = midpoint > sunrise && midpoint < sunset;
    const double bell =
        daylight ? std::sin(std::numbers::pi * (midpoint - sunrise) / day_length) : 0.0;

    for (int i = 0; i < n_cells; ++i) {
      // Always draw so the stream stays aligned regardless of daylight.
      const double jitter = lognormal_unit_mean(config.hourly_jitter_sd, normal(rng));
      if (!daylight) continue;
      const double v = cap * config.clear_sky_index * seasonal * bell * weather * jitter;
      out(i, t) = std::clamp(v, 0.0, cap);
    }
  }
  return out;
}

namespace {

Eigen::MatrixXd shaped_demand(const TrafficConfig& config, Rng& rng, int horizon, int rows,
                              double peak) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& shape = config.shape();
  Eigen::MatrixXd out(rows, horizon);
  for (int t = 0; t < horizon; ++t) {
    const auto cal = slot_calendar(t, config.slot_hours);
    const double base = peak * shape(cal.hour_of_day, cal.day_of_week);
    for (int i = 0; i < rows; ++i) {
      const double noise = config.noise_sd * normal(rng);
      out(i, t) = base * std::max(0.0, 1.0 + noise);
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd generate_traffic_trace(const TrafficConfig& config, std::uint64_t seed,
                                       int horizon, int n_cells) {
  require_dims(horizon, n_cells);
  config.validate();
  Rng rng(seed);
  return shaped_demand(config, rng, horizon, n_cells, config.peak_demand_mbps());
}

Eigen::VectorXd generate_mbs_trace(const TrafficConfig& config, std::uint64_t seed, int horizon) {
  require_dims(horizon, 1);
  config.validate();
  Rng rng(seed);
  return shaped_demand(config, rng, horizon, 1, config.mbs_peak_mbps).row(0).transpose();
}

TraceSet generate_traces(const SolarConfig& solar, const TrafficConfig& traffic,
                         std::uint64_t seed, int horizon, int n_cells) {
  TraceSet ts;
  ts.harvest = generate_solar_trace(solar, derive_seed(seed, "traces.solar"), horizon, n_cells);
  ts.vsc_load =
      generate_traffic_trace(traffic, derive_seed(seed, "traces.traffic"), horizon, n_cells);
  ts.mbs_load = generate_mbs_trace(traffic, derive_seed(seed, "traces.mbs"), horizon);
  ts.slot_hours = solar.slot_hours;
  ts.seed = seed;
  return ts;
}

void export_traces_csv(const std::filesystem::path& path, const TraceSet& traces) {
  traces.validate();
  const int n = traces.n_cells();
  std::string out = "slots," + std::to_string(traces.horizon()) + ",cells," + std::to_string(n) +
                    ",slot_hours," + format_double(traces.slot_hours) + ",seed," +
                    std::to_string(traces.seed) + "\n";
  for (int t = 0; t < traces.horizon(); ++t) {
    out += std::to_string(t);
    for (int i = 0; i < n; ++i) out += "," + format_double(traces.harvest(i, t));
    for (int i = 0; i < n; ++i) out += "," + format_double(traces.vsc_load(i, t));
    out += "," + format_double(traces.mbs_load(t)) + "\n";
  }
  write_text_file_atomic(path, out);
}

TraceSet load_traces_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("trace file not found: " + path.string());
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty trace file");

  auto head = split(trim(line), ',');
  if ((head.size() != 6 && head.size() != 8) || trim(head[0]) != "slots" ||
      trim(head[2]) != "cells" || trim(head[4]) != "slot_hours" ||
      (head.size() == 8 && trim(head[6]) != "seed")) {
    throw ParseError(path.string() + ": header must be slots,<K>,cells,<N>,slot_hours,<h>");
  }
  long long k = 0, n = 0;
  TraceSet ts;
  if (!parse_int(head[1], k) || !parse_int(head[3], n) || !parse_double(head[5], ts.slot_hours)) {
    throw ParseError(path.string() + ": malformed header values");
  }
  if (head.size() == 8) {
    long long s = 0;
    if (!parse_int(head[7], s) || s < 0) throw ParseError(path.string() + ": malformed seed");
    ts.seed = static_cast<std::uint64_t>(s);
  }
  if (k <= 0 || n <= 0) throw ValidationError(path.string() + ": slots and cells must be positive");
  if (!(ts.slot_hours > 0)) throw ValidationError(path.string() + ": slot_hours must be positive");

  ts.harvest.resize(n, k);
  ts.vsc_load.resize(n, k);
  ts.mbs_load.resize(k);
  const std::size_t width = static_cast<std::size_t>(2 * n + 2);
  long long row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (row >= k) throw ParseError(path.string() + ": more rows than declared slots");
    auto f = split(trim(line), ',');
    const long long file_row = row + 2;
    if (f.size() != width) {
      throw ParseError(path.string() + ": row " + std::to_string(file_row) + " has " +
                       std::to_string(f.size()) + " fields, expected " + std::to_string(width));
    }
    std::vector<double> vals(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (!parse_double(f[c], vals[c])) {
        throw ParseError(path.string() + ": row " + std::to_string(file_row) + " column " +
                         std::to_string(c + 1) + " is not a number");
      }
      if (c > 0 && vals[c] < 0) {
        throw ValidationError(path.string() + ": negative value at row " +
                              std::to_string(file_row) + " column " + std::to_string(c + 1));
      }
    }
    if (vals[0] != static_cast<double>(row)) {
      throw ParseError(path.string() + ": row " + std::to_string(file_row) +
                       " has slot index " + format_double(vals[0]) + ", expected " +
                       std::to_string(row));
    }
    for (long long i = 0; i < n; ++i) {
      ts.harvest(i, row) = vals[1 + i];
      ts.vsc_load(i, row) = vals[1 + n + i];
    }
    ts.mbs_load(row) = vals[width - 1];
    ++row;
  }
  if (row != k) {
    throw ParseError(path.string() + ": declared " + std::to_string(k) + " slots, found " +
                     std::to_string(row));
  }
  ts.validate();
  return ts;
}

}  // namespace vscsim
