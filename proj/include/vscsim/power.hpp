#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "vscsim/errors.hpp"

namespace vscsim {

/// Per-slot operative mode of a small cell. Integer codes are the action
/// encoding used by the learners and in every exported file.
enum class OperativeMode : std::uint8_t { Off = 0, PhyRf = 1, MacPhy = 2 };

inline constexpr int kModeCount = 3;
inline constexpr std::array<OperativeMode, kModeCount> kAllModes{
    OperativeMode::Off, OperativeMode::PhyRf, OperativeMode::MacPhy};

constexpr int to_index(OperativeMode m) { return static_cast<int>(m); }
OperativeMode mode_from_index(int i);
std::string_view mode_name(OperativeMode m);

/// LTE power model constants (GOPS-based baseband plus RF/PA/overhead).
///
/// Baseband figures are aggregated into a static part (CPU, OFDM, filtering)
/// and a load-dependent part (frequency-domain processing, FEC) that scales
/// linearly with the served load fraction.
struct PowerModelParams {
  double gops_per_watt = 8.0;

  double vsc_bb_static_gops = 440.0;
  double vsc_bb_load_gops = 60.0;
  double mbs_bb_static_gops = 630.0;
  double mbs_bb_load_gops = 215.0;

  double vsc_rf_w = 2.6;
  double vsc_pa_w = 71.4;
  double mbs_rf_w = 9.18;
  double mbs_pa_w = 1100.0;

  double vsc_overhead_frac = 0.0;
  double mbs_overhead_frac = 0.10;

  void validate() const;
  bool operator==(const PowerModelParams&) const = default;
};

namespace detail {
template <typename Scalar>
void require_fraction(Scalar f, const char* what) {
  if (!(f >= Scalar(0) && f <= Scalar(1))) {
    throw InvalidArgument(std::string(what) + " must lie in [0,1], got " +
                          std::to_string(static_cast<double>(f)));
  }
}
}  // namespace detail

template <typename Scalar>
Scalar gops_to_watts(Scalar gops, const PowerModelParams& p) {
  if (!(gops >= Scalar(0))) throw InvalidArgument("gops must be non-negative");
  return gops / static_cast<Scalar>(p.gops_per_watt);
}

/// Baseband draw of one small cell at the given load, wherever it executes.
template <typename Scalar>
Scalar vsc_baseband_power(Scalar load_fraction, const PowerModelParams& p) {
  detail::require_fraction(load_fraction, "vsc load fraction");
  return gops_to_watts(static_cast<Scalar>(p.vsc_bb_static_gops) +
                           static_cast<Scalar>(p.vsc_bb_load_gops) * load_fraction,
                       p);
}

/// Power drawn at the small-cell site (from its battery).
template <typename Scalar>
Scalar vsc_power(OperativeMode mode, Scalar load_fraction, const PowerModelParams& p) {
  detail::require_fraction(load_fraction, "vsc load fraction");
  Scalar watts(0);
  switch (mode) {
    case OperativeMode::Off:
      return Scalar(0);
    case OperativeMode::PhyRf:
      watts = static_cast<Scalar>(p.vsc_rf_w + p.vsc_pa_w);
      break;
    case OperativeMode::MacPhy:
      watts = static_cast<Scalar>(p.vsc_rf_w + p.vsc_pa_w) +
              vsc_baseband_power(load_fraction, p);
      break;
  }
  return watts * (Scalar(1) + static_cast<Scalar>(p.vsc_overhead_frac));
}

struct OffloadedCell {
  double load_fraction = 0.0;
  OperativeMode mode = OperativeMode::Off;
};

/// Grid power of the macro site: the macro BS itself plus the baseband of
/// every small cell running in PHY-RF split, all scaled by site overhead.
template <typename Scalar>
Scalar mbs_site_power(Scalar mbs_load_fraction, std::span<const OffloadedCell> cells,
                      const PowerModelParams& p) {
  detail::require_fraction(mbs_load_fraction, "mbs load fraction");
  Scalar total = static_cast<Scalar>(p.mbs_rf_w + p.mbs_pa_w) +
                 gops_to_watts(static_cast<Scalar>(p.mbs_bb_static_gops) +
                                   static_cast<Scalar>(p.mbs_bb_load_gops) * mbs_load_fraction,
                               p);
  for (const auto& c : cells) {
    detail::require_fraction(c.load_fraction, "offloaded load fraction");
    if (c.mode == OperativeMode::PhyRf) {
      total += vsc_baseband_power(static_cast<Scalar>(c.load_fraction), p);
    }
  }
  return total * (Scalar(1) + static_cast<Scalar>(p.mbs_overhead_frac));
}

}  // namespace vscsim
