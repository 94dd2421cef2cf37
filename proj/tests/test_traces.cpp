#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "vscsim/errors.hpp"
#include "vscsim/traces.hpp"

using namespace vscsim;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "vscsim_test_traces";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("solar trace respects the panel cap, the night and determinism") {
  SolarConfig cfg;
  CHECK(cfg.slot_cap_wh() == doctest::Approx(833.28));
  const int cells = 12, horizon = 8760;  // 105120 samples
  const auto h = generate_solar_trace(cfg, 42, horizon, cells);
  CHECK(h.minCoeff() >= 0.0);
  CHECK(h.maxCoeff() <= 833.28 + 1e-9);
  for (int t = 0; t < horizon; t += 24) CHECK(h.col(t).isZero());  // midnight
  for (int t = 0; t < horizon; ++t) {
    const int hour = t % 24;
    if (hour < 4 || hour > 20) CHECK(h.col(t).isZero());
  }
  CHECK(h.maxCoeff() > 0.5 * 833.28);
  CHECK(h == generate_solar_trace(cfg, 42, horizon, cells));
  CHECK(h != generate_solar_trace(cfg, 43, horizon, cells));
}

TEST_CASE("summer harvests more than winter") {
  SolarConfig cfg;
  const auto h = generate_solar_trace(cfg, 5, 8760, 1);
  const double january = h.block(0, 0, 1, 31 * 24).sum();
  const double july = h.block(0, 181 * 24, 1, 31 * 24).sum();
  CHECK(july > january);
}

TEST_CASE("generators reject empty dimensions") {
  CHECK_THROWS_AS(generate_solar_trace(SolarConfig{}, 1, 0, 3), InvalidArgument);
  CHECK_THROWS_AS(generate_solar_trace(SolarConfig{}, 1, 10, 0), InvalidArgument);
  CHECK_THROWS_AS(generate_traffic_trace(TrafficConfig{}, 1, -1, 3), InvalidArgument);
  CHECK_THROWS_AS(generate_mbs_trace(TrafficConfig{}, 1, 0), InvalidArgument);
}

TEST_CASE("nominal per-cell demand") {
  TrafficConfig cfg;
  CHECK(cfg.nominal_peak_mbps() == doctest::Approx(101.25).epsilon(1e-12));
  cfg.activity_factor = 1.0;
  CHECK(cfg.peak_demand_mbps() == doctest::Approx(101.25).epsilon(1e-12));
}

TEST_CASE("noiseless traffic is peak times shape") {
  TrafficConfig cfg;
  cfg.noise_sd = 0.0;
  WeeklyShape shape = WeeklyShape::Constant(0.2);
  shape.row(4).setConstant(0.5);
  shape.row(20).setConstant(1.0);
  cfg.custom_shape = shape;
  const auto l = generate_traffic_trace(cfg, 9, 48, 2);
  CHECK(l(0, 4) == 0.5 * cfg.peak_demand_mbps());
  CHECK(l(1, 28) == 0.5 * cfg.peak_demand_mbps());
  CHECK(l(0, 20) == cfg.peak_demand_mbps());
  const auto m = generate_mbs_trace(cfg, 9, 48);
  CHECK(m(20) == cfg.mbs_peak_mbps);
  CHECK(m(4) == 0.5 * cfg.mbs_peak_mbps);

  cfg.custom_shape.reset();
  const auto& builtin = builtin_weekly_shape(cfg.profile);
  const auto week = generate_traffic_trace(cfg, 3, 24 * 7, 1);
  for (int t = 0; t < 24 * 7; ++t) {
    CHECK(week(0, t) == cfg.peak_demand_mbps() * builtin(t % 24, t / 24));
  }
}

TEST_CASE("traffic traces are non-negative and deterministic") {
  TrafficConfig cfg;
  cfg.noise_sd = 0.5;
  const auto a = generate_traffic_trace(cfg, 11, 2000, 4);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a == generate_traffic_trace(cfg, 11, 2000, 4));
  const auto m = generate_mbs_trace(cfg, 11, 2000);
  CHECK(m == generate_mbs_trace(cfg, 11, 2000));
  cfg.mbs_peak_mbps = 0.0;
  CHECK(generate_mbs_trace(cfg, 11, 500).isZero());
}

TEST_CASE("residential weekdays peak at 11 pm") {
  const auto& shape = builtin_weekly_shape(ProfileKind::Residential);
  Eigen::VectorXd weekday_mean = shape.leftCols(5).rowwise().mean();
  Eigen::Index hour = 0;
  weekday_mean.maxCoeff(&hour);
  CHECK(hour == 23);
  CHECK(shape.maxCoeff() == 1.0);
  CHECK(shape.minCoeff() >= 0.0);
  CHECK(builtin_weekly_shape(ProfileKind::Office) != shape);
}

TEST_CASE("shipped profile CSVs match the built-in shapes") {
  for (auto kind : {ProfileKind::Residential, ProfileKind::Office}) {
    const fs::path csv = fs::path(VSCSIM_DATA_DIR) / "profiles" /
                         (std::string(profile_name(kind)) + ".csv");
    CAPTURE(csv.string());
    CHECK(load_weekly_shape_csv(csv) == builtin_weekly_shape(kind));
  }
}

TEST_CASE("slot calendar") {
  const auto c = slot_calendar(24 * 8 + 5, 1.0);
  CHECK(c.hour_of_day == 5);
  CHECK(c.day_index == 8);
  CHECK(c.day_of_week == 1);
  CHECK(c.day_of_year == 8);
  CHECK(slot_calendar(8760 + 3, 1.0).day_of_year == 0);
}

TEST_CASE("trace CSV loading") {
  SUBCASE("well-formed two-cell file") {
    const auto p = temp_file("ok.csv");
    write(p, "slots,3,cells,2,slot_hours,1\n"
             "0,0,1,2,3,4\n"
             "1,10,11,12,13,14\n"
             "2,0,0,0,0,0\n");
    const auto ts = load_traces_csv(p);
    CHECK(ts.horizon() == 3);
    CHECK(ts.n_cells() == 2);
    CHECK(ts.harvest(1, 1) == 11.0);
    CHECK(ts.vsc_load(0, 1) == 12.0);
    CHECK(ts.mbs_load(1) == 14.0);
  }
  SUBCASE("negative value names its row and column") {
    const auto p = temp_file("neg.csv");
    write(p, "slots,2,cells,1,slot_hours,1\n0,5,1,1\n1,-3,1,1\n");
    try {
      load_traces_csv(p);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 3") != std::string::npos);
      CHECK(msg.find("column 2") != std::string::npos);
    }
  }
  SUBCASE("ragged row") {
    const auto p = temp_file("ragged.csv");
    write(p, "slots,2,cells,1,slot_hours,1\n0,5,1,1\n1,5,1\n");
    CHECK_THROWS_AS(load_traces_csv(p), ParseError);
  }
  SUBCASE("missing rows and bad header") {
    const auto p = temp_file("short.csv");
    write(p, "slots,3,cells,1,slot_hours,1\n0,5,1,1\n");
    CHECK_THROWS_AS(load_traces_csv(p), ParseError);
    write(p, "rows,3,cells,1,slot_hours,1\n");
    CHECK_THROWS_AS(load_traces_csv(p), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_traces_csv(temp_file("absent.csv")), IoError);
  }
}

TEST_CASE("trace export round trip is exact") {
  const auto ts = generate_traces(SolarConfig{}, TrafficConfig{}, 77, 500, 3);
  const auto p = temp_file("roundtrip.csv");
  export_traces_csv(p, ts);
  CHECK(load_traces_csv(p) == ts);
}
