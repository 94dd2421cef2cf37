#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace vscsim {

enum class ProfileKind { Residential, Office };

std::string_view profile_name(ProfileKind k);
ProfileKind profile_from_name(std::string_view name);

/// Normalized weekly demand multipliers: rows are hours 0..23, columns are
/// days Monday..Sunday. Every entry lies in [0,1] and the maximum is 1.
using WeeklyShape = Eigen::Matrix<double, 24, 7>;

/// Built-in shapes. The same numbers ship as data/profiles/<name>.csv.
const WeeklyShape& builtin_weekly_shape(ProfileKind kind);

WeeklyShape load_weekly_shape_csv(const std::filesystem::path& path);
void validate_weekly_shape(const WeeklyShape& shape);

/// Slot-to-calendar mapping. Slot 0 starts Monday, January 1st, 00:00.
struct SlotCalendar {
  int hour_of_day;
  int day_index;    // days since the start of the trace
  int day_of_week;  // 0 = Monday
  int day_of_year;  // 0..364
};
SlotCalendar slot_calendar(int t, double slot_hours);

struct SolarConfig {
  double panel_area_m2 = 4.48;
  double peak_density_w_m2 = 186.0;
  /// Fraction of nameplate output reached at a cloudless summer noon.
  double clear_sky_index = 0.75;
  /// Seasonal modulation depth: the winter-solstice peak is (1 - amplitude)
  /// of the summer one.
  double season_amplitude = 0.4;
  /// Sigma of the per-day multiplicative lognormal cloudiness factor.
  double daily_variability_sd = 0.3;
  /// Sigma of the per-slot, per-cell lognormal jitter.
  double hourly_jitter_sd = 0.1;
  double slot_hours = 1.0;
  // Daylight window: day length oscillates around the mean, longest at the
  // summer solstice, centred on solar noon.
  double mean_day_length_h = 12.0;
  double day_length_amplitude_h = 2.2;
  double solar_noon_h = 12.0;
  int summer_solstice_day = 171;

  double slot_cap_wh() const { return panel_area_m2 * peak_density_w_m2 * slot_hours; }
  void validate() const;
  bool operator==(const SolarConfig&) const = default;
};

struct TrafficConfig {
  ProfileKind profile = ProfileKind::Residential;
  int users_per_vsc = 90;
  double heavy_ratio = 0.5;
  double heavy_rate_mb_per_h = 900.0;
  double ordinary_rate_mb_per_h = 112.5;
  /// Fraction of the nominal (everyone active) demand offered at the busiest
  /// hour. Keeps the peak inside a small cell's serving capacity.
  double activity_factor = 0.3;
  double noise_sd = 0.1;
  /// Peak demand of macro users served directly by the macro BS.
  double mbs_peak_mbps = 30.0;
  double slot_hours = 1.0;
  std::optional<WeeklyShape> custom_shape;

  /// Demand of all users of one cell, all active, in Mb/s.
  double nominal_peak_mbps() const;
  double peak_demand_mbps() const { return activity_factor * nominal_peak_mbps(); }
  const WeeklyShape& shape() const;
  void validate() const;
  bool operator==(const TrafficConfig& o) const;
};

/// Exogenous environment over a horizon of K slots for N small cells.
struct TraceSet {
  Eigen::MatrixXd harvest;   // N x K, Wh harvested per slot
  Eigen::MatrixXd vsc_load;  // N x K, Mb/s offered to each small cell
  Eigen::VectorXd mbs_load;  // K, Mb/s offered directly to the macro BS
  double slot_hours = 1.0;
  std::uint64_t seed = 0;

  int horizon() const { return static_cast<int>(harvest.cols()); }
  int n_cells() const { return static_cast<int>(harvest.rows()); }
  void validate() const;
  bool operator==(const TraceSet& o) const;
};

Eigen::MatrixXd generate_solar_trace(const SolarConfig& config, std::uint64_t seed, int horizon,
                                     int n_cells);
Eigen::MatrixXd generate_traffic_trace(const TrafficConfig& config, std::uint64_t seed,
                                       int horizon, int n_cells);
Eigen::VectorXd generate_mbs_trace(const TrafficConfig& config, std::uint64_t seed, int horizon);

/// All three generators with sub-seeds derived from one master seed.
TraceSet generate_traces(const SolarConfig& solar, const TrafficConfig& traffic,
                         std::uint64_t seed, int horizon, int n_cells);

/// CSV layout: header `slots,<K>,cells,<N>,slot_hours,<h>` (optionally
/// followed by `,seed,<s>`), then one row per slot:
/// `t,H_1..H_N,L_1..L_N,rho0`.
void export_traces_csv(const std::filesystem::path& path, const TraceSet& traces);
TraceSet load_traces_csv(const std::filesystem::path& path);

}  // namespace vscsim
