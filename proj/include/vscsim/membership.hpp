#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace vscsim {

inline constexpr int kFuzzySets = 5;

/// Linguistic labels of the five fuzzy sets on every input.
std::string_view fuzzy_label(int set);

/// One membership function over [0,1].
///
/// Trapezoid (a,b,c,d): rises on [a,b], equals 1 on [b,c], falls on [c,d].
/// A triangle is a trapezoid with b == c. Interval is the crisp indicator of
/// [a,b), closed on the right when b >= 1.
struct MembershipFunction {
  enum class Shape { Trapezoid, Interval };
  Shape shape = Shape::Trapezoid;
  double a = 0, b = 0, c = 0, d = 0;

  static MembershipFunction trapezoid(double a, double b, double c, double d) {
    return {Shape::Trapezoid, a, b, c, d};
  }
  static MembershipFunction triangle(double a, double peak, double c) {
    return {Shape::Trapezoid, a, peak, peak, c};
  }
  static MembershipFunction interval(double lo, double hi) {
    return {Shape::Interval, lo, hi, hi, hi};
  }

  template <typename Scalar>
  Scalar degree(Scalar x) const {
    if (shape == Shape::Interval) {
      const bool inside = x >= Scalar(a) && (x < Scalar(b) || (b >= 1.0 && x <= Scalar(b)));
      return inside ? Scalar(1) : Scalar(0);
    }
    if (x < Scalar(a) || x > Scalar(d)) return Scalar(0);
    if (x >= Scalar(b) && x <= Scalar(c)) return Scalar(1);
    if (x < Scalar(b)) return (x - Scalar(a)) / Scalar(b - a);
    return (Scalar(d) - x) / Scalar(d - c);
  }

  bool operator==(const MembershipFunction&) const = default;
};

/// Five fuzzy sets per input dimension.
struct MembershipSpec {
  std::vector<std::array<MembershipFunction, kFuzzySets>> dims;

  int n_inputs() const { return static_cast<int>(dims.size()); }
  int n_rules() const;

  /// Shoulder trapezoids at both ends, symmetric triangles with cores at
  /// 0.25/0.5/0.75; neighbouring supports meet at the adjacent cores.
  static MembershipSpec standard(int n_inputs);
  /// Crisp indicators of the five uniform quantisation bins.
  static MembershipSpec crisp_bins(int n_inputs);

  bool operator==(const MembershipSpec&) const = default;
};

struct RuleWeight {
  int rule = 0;
  double weight = 0.0;
};

/// Rules with non-zero firing strength, product t-norm over inputs. Rule
/// index is row-major over the per-input set indices (first input most
/// significant), matching the tabular state index.
using FiringSet = std::vector<RuleWeight>;

FiringSet active_rules(std::span<const double> inputs, const MembershipSpec& spec);

/// Dense length-R firing strength vector.
Eigen::VectorXd firing_strengths(std::span<const double> inputs, const MembershipSpec& spec);

}  // namespace vscsim
