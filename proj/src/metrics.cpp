#include "vscsim/metrics.hpp"

#include <json.hpp>
#include <sstream>

#include "vscsim/errors.hpp"
#include "vscsim/text_io.hpp"

namespace vscsim {

using nlohmann::json;

Season season_of_day(int day_of_year) {
  // Non-leap calendar: Mar 1 = day 59, Jun 1 = 151, Sep 1 = 243, Dec 1 = 334.
  if (day_of_year < 59 || day_of_year >= 334) return Season::Winter;
  if (day_of_year >= 151 && day_of_year < 243) return Season::Summer;
  return Season::Other;
}

SeasonHistogram selection_histogram(const EpisodeLog& log) {
  SeasonHistogram h;
  Eigen::Matrix<double, 24, 1> winter_n = Eigen::Matrix<double, 24, 1>::Zero();
  Eigen::Matrix<double, 24, 1> summer_n = Eigen::Matrix<double, 24, 1>::Zero();
  int last_winter_day = -1, last_summer_day = -1;
  for (const auto& s : log.slots) {
    const auto cal = slot_calendar(s.t, log.slot_hours);
    const Season season = season_of_day(cal.day_of_year);
    if (season == Season::Other) continue;
    auto& rates = season == Season::Winter ? h.winter : h.summer;
    auto& count = season == Season::Winter ? winter_n : summer_n;
    int& last_day = season == Season::Winter ? last_winter_day : last_summer_day;
    if (cal.day_index != last_day) {
      last_day = cal.day_index;
      ++(season == Season::Winter ? h.winter_days : h.summer_days);
    }
    for (auto a : s.applied) {
      rates(cal.hour_of_day, to_index(a)) += 1.0;
      count(cal.hour_of_day) += 1.0;
    }
  }
  for (int hour = 0; hour < 24; ++hour) {
    if (winter_n(hour) > 0) h.winter.row(hour) *= 100.0 / winter_n(hour);
    if (summer_n(hour) > 0) h.summer.row(hour) *= 100.0 / summer_n(hour);
  }
  return h;
}

MetricsSummary summarize(const EpisodeLog& log, std::string algorithm,
                         std::optional<double> bound_reward) {
  const auto totals = log.recompute_totals();
  MetricsSummary s;
  s.algorithm = std::move(algorithm);
  s.n_cells = log.n_cells;
  s.horizon = log.horizon();
  s.grid_energy_kwh = totals.grid_energy_kwh;
  const double hours = log.horizon() * log.slot_hours;
  s.grid_energy_kwh_per_year = hours > 0 ? totals.grid_energy_kwh * 8760.0 / hours : 0.0;
  s.mean_drop_rate_pct = 100.0 * totals.mean_drop_rate;
  s.cumulative_reward = totals.cumulative_reward;
  s.forced_off_count = totals.forced_off_count;
  if (bound_reward && *bound_reward > 0) {
    s.bound_reward = bound_reward;
    s.normalized_cumulative_reward = s.cumulative_reward / *bound_reward;
  }
  return s;
}

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

}  // namespace

std::string summary_to_json(const MetricsSummary& s) {
  json j;
  j["algorithm"] = s.algorithm;
  j["n_cells"] = s.n_cells;
  j["horizon"] = s.horizon;
  j["grid_energy_kwh"] = s.grid_energy_kwh;
  j["grid_energy_kwh_per_year"] = s.grid_energy_kwh_per_year;
  j["mean_drop_rate_pct"] = s.mean_drop_rate_pct;
  j["cumulative_reward"] = s.cumulative_reward;
  j["forced_off_count"] = s.forced_off_count;
  put_optional(j, "bound_reward", s.bound_reward);
  put_optional(j, "normalized_cumulative_reward", s.normalized_cumulative_reward);
  put_optional(j, "selected_alpha", s.selected_alpha);
  put_optional(j, "selected_epsilon", s.selected_epsilon);
  return j.dump(2) + "\n";
}

MetricsSummary summary_from_json(std::string_view text) {
  try {
    const json j = json::parse(text.begin(), text.end());
    MetricsSummary s;
    s.algorithm = j.at("algorithm").get<std::string>();
    s.n_cells = j.at("n_cells").get<int>();
    s.horizon = j.at("horizon").get<int>();
    s.grid_energy_kwh = j.at("grid_energy_kwh").get<double>();
    s.grid_energy_kwh_per_year = j.at("grid_energy_kwh_per_year").get<double>();
    s.mean_drop_rate_pct = j.at("mean_drop_rate_pct").get<double>();
    s.cumulative_reward = j.at("cumulative_reward").get<double>();
    s.forced_off_count = j.at("forced_off_count").get<long long>();
    s.bound_reward = get_optional<double>(j, "bound_reward");
    s.normalized_cumulative_reward = get_optional<double>(j, "normalized_cumulative_reward");
    s.selected_alpha = get_optional<double>(j, "selected_alpha");
    s.selected_epsilon = get_optional<double>(j, "selected_epsilon");
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad summary JSON: ") + e.what());
  }
}

MetricsSummary load_summary(const std::filesystem::path& path) {
  return summary_from_json(read_text_file(path));
}

void export_run(const std::filesystem::path& dir, const std::string& stem, const EpisodeLog& log,
                const MetricsSummary& summary) {
  std::filesystem::create_directories(dir);
  const auto csv = dir / (stem + "_episode.csv");
  export_episode_csv(csv, log);
  auto reloaded = load_episode_csv(csv);
  reloaded.slot_hours = log.slot_hours;
  const auto check = summarize(reloaded, summary.algorithm, summary.bound_reward);
  if (check.grid_energy_kwh != summary.grid_energy_kwh ||
      check.mean_drop_rate_pct != summary.mean_drop_rate_pct ||
      check.cumulative_reward != summary.cumulative_reward ||
      check.forced_off_count != summary.forced_off_count || check.horizon != summary.horizon) {
    throw ValidationError("summary for '" + stem + "' is not recomputable from its episode log");
  }
  write_text_file_atomic(dir / (stem + "_summary.json"), summary_to_json(summary));
  write_text_file_atomic(dir / (stem + "_histogram.csv"), histogram_csv(selection_histogram(log)));
}

std::string histogram_csv(const SeasonHistogram& h) {
  std::ostringstream out;
  out << "season,hour,off_pct,phy_rf_pct,mac_phy_pct\n";
  auto rows = [&](const char* name, const HourModeRates& r) {
    for (int hour = 0; hour < 24; ++hour) {
      out << name << ',' << hour;
      for (int m = 0; m < kModeCount; ++m) out << ',' << format_double(r(hour, m));
      out << '\n';
    }
  };
  rows("winter", h.winter);
  rows("summer", h.summer);
  return out.str();
}

std::string series_csv(const std::string& column, const std::vector<double>& values) {
  std::string out = "index," + column + "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_double(values[i]) + "\n";
  }
  return out;
}

std::string comparison_table_csv(const std::vector<MetricsSummary>& rows) {
  std::vector<const MetricsSummary*> ordered;
  for (const auto& r : rows) {
    if (r.algorithm == "Off-line") ordered.push_back(&r);
  }
  for (const auto& r : rows) {
    if (r.algorithm != "Off-line") ordered.push_back(&r);
  }
  std::string out =
      "algorithm,n_cells,grid_energy_kwh_per_year,mean_drop_rate_pct,cumulative_reward,"
      "normalized_cumulative_reward,forced_off_count\n";
  for (const auto* r : ordered) {
    out += r->algorithm + "," + std::to_string(r->n_cells) + "," +
           format_double(r->grid_energy_kwh_per_year) + "," + format_double(r->mean_drop_rate_pct) +
           "," + format_double(r->cumulative_reward) + "," +
           (r->normalized_cumulative_reward ? format_double(*r->normalized_cumulative_reward) : "") +
           "," + std::to_string(r->forced_off_count) + "\n";
  }
  return out;
}

int epochs_to_fraction(const std::vector<double>& series, double fraction) {
  if (series.empty()) return 0;
  const double target = fraction * series.back();
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i] >= target) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(series.size());
}

std::vector<double> daily_reward_series(const EpisodeLog& log) {
  std::vector<double> days;
  for (const auto& s : log.slots) {
    const auto d = static_cast<std::size_t>(slot_calendar(s.t, log.slot_hours).day_index);
    if (days.size() <= d) days.resize(d + 1, 0.0);
    days[d] += s.reward;
  }
  return days;
}

}  // namespace vscsim
