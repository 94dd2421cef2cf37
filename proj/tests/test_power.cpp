#include <doctest.h>

#include <random>
#include <vector>

#include "vscsim/power.hpp"

using namespace vscsim;

namespace {
const PowerModelParams P{};
constexpr double kTol = 1e-9;
}  // namespace

TEST_CASE("gops_to_watts divides by the GOPS-per-watt factor") {
  CHECK(gops_to_watts(440.0, P) == doctest::Approx(55.0).epsilon(kTol));
  CHECK(gops_to_watts(0.0, P) == 0.0);
  CHECK(gops_to_watts(630.0, P) == doctest::Approx(78.75).epsilon(kTol));
  CHECK_THROWS_AS(gops_to_watts(-1.0, P), InvalidArgument);
}

TEST_CASE("vsc_power per mode") {
  CHECK(std::abs(vsc_power(OperativeMode::MacPhy, 0.0, P) - 129.0) < kTol);
  CHECK(std::abs(vsc_power(OperativeMode::MacPhy, 1.0, P) - 136.5) < kTol);
  for (double lf : {0.0, 0.3, 1.0}) CHECK(std::abs(vsc_power(OperativeMode::PhyRf, lf, P) - 74.0) < kTol);
  CHECK(vsc_power(OperativeMode::Off, 1.0, P) == 0.0);
  CHECK_THROWS_AS(vsc_power(OperativeMode::MacPhy, 1.5, P), InvalidArgument);
  CHECK_THROWS_AS(vsc_power(OperativeMode::PhyRf, -0.1, P), InvalidArgument);
}

TEST_CASE("vsc_power works in single precision") {
  CHECK(vsc_power(OperativeMode::MacPhy, 0.0f, P) == doctest::Approx(129.0f));
}

TEST_CASE("mbs_site_power examples") {
  const std::vector<OffloadedCell> none;
  CHECK(std::abs(mbs_site_power(0.0, std::span<const OffloadedCell>(none), P) - 1306.723) < kTol);

  const std::vector<OffloadedCell> one{{0.0, OperativeMode::PhyRf}};
  CHECK(std::abs(mbs_site_power(0.0, std::span<const OffloadedCell>(one), P) - 1367.223) < kTol);

  const std::vector<OffloadedCell> local{{0.7, OperativeMode::MacPhy}, {1.0, OperativeMode::Off}};
  CHECK(mbs_site_power(0.4, std::span<const OffloadedCell>(local), P) ==
        mbs_site_power(0.4, std::span<const OffloadedCell>(none), P));

  const std::vector<OffloadedCell> bad{{1.2, OperativeMode::PhyRf}};
  CHECK_THROWS_AS(mbs_site_power(0.0, std::span<const OffloadedCell>(bad), P), InvalidArgument);
  CHECK_THROWS_AS(mbs_site_power(-0.5, std::span<const OffloadedCell>(none), P), InvalidArgument);
}

TEST_CASE("power is monotone in load, offload and mode") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    for (auto m : kAllModes) CHECK(vsc_power(m, a, P) <= vsc_power(m, b, P));
    CHECK(vsc_power(OperativeMode::Off, a, P) <= vsc_power(OperativeMode::PhyRf, a, P));
    CHECK(vsc_power(OperativeMode::PhyRf, a, P) <= vsc_power(OperativeMode::MacPhy, a, P));

    std::vector<OffloadedCell> cells{{u(rng), OperativeMode::PhyRf}, {u(rng), OperativeMode::MacPhy}};
    const double base = mbs_site_power(a, std::span<const OffloadedCell>(cells), P);
    CHECK(base <= mbs_site_power(b, std::span<const OffloadedCell>(cells), P));

    auto more = cells;
    more.push_back({u(rng), OperativeMode::PhyRf});
    CHECK(mbs_site_power(a, std::span<const OffloadedCell>(more), P) > base);
    more.back().mode = OperativeMode::Off;
    CHECK(mbs_site_power(a, std::span<const OffloadedCell>(more), P) == base);

    auto busier = cells;
    busier[0].load_fraction = std::min(1.0, busier[0].load_fraction + 0.1);
    CHECK(mbs_site_power(a, std::span<const OffloadedCell>(busier), P) >= base);
  }
}

TEST_CASE("mode index round trip") {
  for (auto m : kAllModes) CHECK(mode_from_index(to_index(m)) == m);
  CHECK_THROWS(mode_from_index(3));
  CHECK(mode_name(OperativeMode::PhyRf).size() > 0);
}
