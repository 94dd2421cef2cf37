#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vscsim/simulator.hpp"

namespace vscsim {

/// Per-hour share (percent) of each applied mode over all cells and all days
/// of a season. Rows are hours, columns Off / PHY-RF / MAC-PHY.
using HourModeRates = Eigen::Matrix<double, 24, kModeCount>;

struct SeasonHistogram {
  HourModeRates winter = HourModeRates::Zero();  // December, January, February
  HourModeRates summer = HourModeRates::Zero();  // June, July, August
  int winter_days = 0;
  int summer_days = 0;
};

enum class Season { Winter, Summer, Other };
Season season_of_day(int day_of_year);

SeasonHistogram selection_histogram(const EpisodeLog& log);

struct MetricsSummary {
  std::string algorithm;
  int n_cells = 0;
  int horizon = 0;
  double grid_energy_kwh = 0.0;
  /// Grid energy scaled to 8760 hours.
  double grid_energy_kwh_per_year = 0.0;
  double mean_drop_rate_pct = 0.0;
  double cumulative_reward = 0.0;
  long long forced_off_count = 0;
  std::optional<double> bound_reward;
  /// cumulative_reward / bound_reward.
  std::optional<double> normalized_cumulative_reward;
  std::optional<double> selected_alpha;
  std::optional<double> selected_epsilon;

  bool operator==(const MetricsSummary&) const = default;
};

MetricsSummary summarize(const EpisodeLog& log, std::string algorithm,
                         std::optional<double> bound_reward = std::nullopt);

std::string summary_to_json(const MetricsSummary& s);
MetricsSummary summary_from_json(std::string_view text);
MetricsSummary load_summary(const std::filesystem::path& path);

/// Writes the episode CSV and summary JSON, then reloads the CSV and checks
/// that the summary is recomputable from it (ValidationError otherwise).
void export_run(const std::filesystem::path& dir, const std::string& stem, const EpisodeLog& log,
                const MetricsSummary& summary);

std::string histogram_csv(const SeasonHistogram& h);
std::string series_csv(const std::string& column, const std::vector<double>& values);

/// Comparison table, one row per summary. Off-line rows (if any) come first.
std::string comparison_table_csv(const std::vector<MetricsSummary>& rows);

/// First epoch (1-based) whose value reaches `fraction` of the final value;
/// 0 for an empty series.
int epochs_to_fraction(const std::vector<double>& series, double fraction);

/// Sum of rewards per day of the episode.
std::vector<double> daily_reward_series(const EpisodeLog& log);

}  // namespace vscsim
