#include "vscsim/membership.hpp"

#include "vscsim/errors.hpp"

namespace vscsim {

std::string_view fuzzy_label(int set) {
  static constexpr std::string_view labels[kFuzzySets] = {"Very Low", "Low", "Medium", "High",
                                                          "Very High"};
  return set >= 0 && set < kFuzzySets ? labels[set] : "?";
}

int MembershipSpec::n_rules() const {
  int r = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) r *= kFuzzySets;
  return r;
}

MembershipSpec MembershipSpec::standard(int n_inputs) {
  using MF = MembershipFunction;
  const std::array<MF, kFuzzySets> sets{
      MF::trapezoid(0.0, 0.0, 0.0, 0.25), MF::triangle(0.0, 0.25, 0.5),
      MF::triangle(0.25, 0.5, 0.75),      MF::triangle(0.5, 0.75, 1.0),
      MF::trapezoid(0.75, 1.0, 1.0, 1.0)};
  return MembershipSpec{std::vector(static_cast<std::size_t>(n_inputs), sets)};
}

MembershipSpec MembershipSpec::crisp_bins(int n_inputs) {
  using MF = MembershipFunction;
  const std::array<MF, kFuzzySets> sets{MF::interval(0.0, 0.2), MF::interval(0.2, 0.4),
                                        MF::interval(0.4, 0.6), MF::interval(0.6, 0.8),
                                        MF::interval(0.8, 1.0)};
  return MembershipSpec{std::vector(static_cast<std::size_t>(n_inputs), sets)};
}

FiringSet active_rules(std::span<const double> inputs, const MembershipSpec& spec) {
  if (static_cast<int>(inputs.size()) != spec.n_inputs()) {
    throw InvalidArgument("observation width differs from the membership spec");
  }
  FiringSet rules{{0, 1.0}};
  FiringSet next;
  for (std::size_t dim = 0; dim < inputs.size(); ++dim) {
    const double x = inputs[dim];
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("fuzzy input outside [0,1]");
    next.clear();
    for (const auto& partial : rules) {
      for (int s = 0; s < kFuzzySets; ++s) {
        const double mu = spec.dims[dim][static_cast<std::size_t>(s)].degree(x);
        if (mu > 0.0) next.push_back({partial.rule * kFuzzySets + s, partial.weight * mu});
      }
    }
    rules.swap(next);
  }
  return rules;
}

Eigen::VectorXd firing_strengths(std::span<const double> inputs, const MembershipSpec& spec) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(spec.n_rules());
  for (const auto& rw : active_rules(inputs, spec)) w(rw.rule) = rw.weight;
  return w;
}

}  // namespace vscsim
