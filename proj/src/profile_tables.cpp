#include "vscsim/traces.hpp"

#include <array>

namespace vscsim {

namespace {

// Mirrors data/profiles/*.csv; tests/test_traces.cpp checks they stay in sync.
constexpr std::array<double, 24> kResidentialWeekday{
    0.62, 0.45, 0.32, 0.24, 0.20, 0.20, 0.26, 0.38, 0.48, 0.52, 0.55, 0.58, 0.62, 0.62, 0.60, 0.60, 0.64, 0.70, 0.76, 0.82, 0.88, 0.93, 0.97, 1.00};
constexpr std::array<double, 24> kResidentialWeekend{
    0.70, 0.55, 0.40, 0.30, 0.24, 0.21, 0.22, 0.28, 0.38, 0.50, 0.60, 0.66, 0.70, 0.72, 0.72, 0.72, 0.74, 0.76, 0.80, 0.84, 0.88, 0.92, 0.95, 0.96};
constexpr std::array<double, 24> kOfficeWeekday{
    0.12, 0.09, 0.08, 0.07, 0.07, 0.09, 0.16, 0.35, 0.62, 0.85, 0.97, 1.00, 0.88, 0.86, 0.96, 0.98, 0.92, 0.75, 0.50, 0.34, 0.26, 0.21, 0.17, 0.14};
constexpr std::array<double, 24> kOfficeWeekend{
    0.10, 0.08, 0.07, 0.06, 0.06, 0.06, 0.08, 0.12, 0.18, 0.24, 0.29, 0.32, 0.32, 0.31, 0.30, 0.29, 0.27, 0.24, 0.20, 0.17, 0.15, 0.14, 0.13, 0.11};

WeeklyShape make_shape(const std::array<double, 24>& weekday,
                        const std::array<double, 24>& weekend) {
  WeeklyShape s;
  for (int h = 0; h < 24; ++h) {
    for (int d = 0; d < 7; ++d) s(h, d) = d < 5 ? weekday[h] : weekend[h];
  }
  return s;
}

}  // namespace

const WeeklyShape& builtin_weekly_shape(ProfileKind kind) {
  static const WeeklyShape residential = make_shape(kResidentialWeekday, kResidentialWeekend);
  static const WeeklyShape office = make_shape(kOfficeWeekday, kOfficeWeekend);
  return kind == ProfileKind::Office ? office : residential;
}

}  // namespace vscsim
