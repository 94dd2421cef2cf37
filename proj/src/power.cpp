#include "vscsim/power.hpp"

namespace vscsim {

OperativeMode mode_from_index(int i) {
  if (i < 0 || i >= kModeCount) {
    throw InvalidArgument("operative mode index out of range: " + std::to_string(i));
  }
  return static_cast<OperativeMode>(i);
}

std::string_view mode_name(OperativeMode m) {
  switch (m) {
    case OperativeMode::Off: return "Off";
    case OperativeMode::PhyRf: return "PhyRf";
    case OperativeMode::MacPhy: return "MacPhy";
  }
  return "?";
}

void PowerModelParams::validate() const {
  if (!(gops_per_watt > 0)) throw InvalidArgument("gops_per_watt must be positive");
  const double all[] = {vsc_bb_static_gops, vsc_bb_load_gops, mbs_bb_static_gops,
                        mbs_bb_load_gops,   vsc_rf_w,         vsc_pa_w,
                        mbs_rf_w,           mbs_pa_w,         vsc_overhead_frac,
                        mbs_overhead_frac};
  for (double v : all) {
    if (!(v >= 0)) throw InvalidArgument("power model constants must be non-negative");
  }
}

}  // namespace vscsim
