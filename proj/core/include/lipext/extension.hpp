#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lipext/metric.hpp"
#include "lipext/schedule.hpp"

namespace lipext {

/// S_k(x) = Lip(g, C ∩ B_{eps_k}(x)) over the stored window, open balls.
struct SlopeMap {
  Index anchor = 0;
  int k_min = 0;
  std::vector<double> values;  // values[k - k_min]
  double saturation = 0.0;     // Lip(g, C), the limit for large k

  int k_max() const noexcept { return k_min + static_cast<int>(values.size()) - 1; }
  double at(int k) const;
};

SlopeMap approx_slopes(const MetricInstance& instance, Index x, const ScaleSchedule& schedule);

/// Convex increasing piecewise-linear penalization t -> pen_x(t) with pen(0) = 0.
///
/// slopes[j] applies on (breakpoints[j], breakpoints[j+1]); base_slope on
/// (0, breakpoints[0]]; tail_slope beyond the last breakpoint. cumulative[j] is
/// pen at breakpoints[j]. With no breakpoints the profile is base_slope * t.
struct PenalizationProfile {
  Index anchor = 0;
  std::vector<double> breakpoints;
  std::vector<double> slopes;
  double base_slope = 0.0;
  double tail_slope = 0.0;
  std::vector<double> cumulative;

  /// pen(t) = slope * t, the McShane cone.
  static PenalizationProfile linear(Index anchor, double slope);

  /// Upper bound on how far the constant base slope overestimates the exact
  /// profile near 0.
  double tail_bound() const noexcept {
    return breakpoints.empty() ? 0.0 : base_slope * breakpoints.front();
  }
};

/// The interval (eps_{k-2}, eps_{k-1}) gets slope S_k + 3 L r_{k-1}. The
/// infinitely many intervals below eps_{k_min} are replaced by the first
/// stored slope, which overestimates pen by at most tail_bound().
PenalizationProfile build_penalization(const SlopeMap& slopes, const ScaleSchedule& schedule,
                                       double L);

/// Exact piecewise-linear evaluation; t must be >= 0.
double eval_pen(const PenalizationProfile& profile, double t);

/// min over C of g(x) + L' d(x, y). Requires L' >= Lip(g, C).
double mcshane_upper(const MetricInstance& instance, double L_prime, Index y);
/// max over C of g(x) - L' d(x, y). Requires L' >= Lip(g, C).
double mcshane_lower(const MetricInstance& instance, double L_prime, Index y);

/// Schedule plus one penalization profile per anchor. Holds a reference to the
/// instance, which must outlive the model.
class ExtensionModel {
 public:
  /// Builds profiles for every anchor. A constant g (Lip(g, C) = 0) needs no
  /// schedule and yields the constant extension.
  ExtensionModel(const MetricInstance& instance, std::optional<ScaleSchedule> schedule);

  /// Uses caller-supplied profiles, one per subset position.
  ExtensionModel(const MetricInstance& instance, std::optional<ScaleSchedule> schedule,
                 std::vector<PenalizationProfile> profiles);

  const MetricInstance& instance() const noexcept { return *instance_; }
  const std::optional<ScaleSchedule>& schedule() const noexcept { return schedule_; }
  bool is_constant() const noexcept { return constant_; }
  std::span<const PenalizationProfile> profiles() const noexcept { return profiles_; }
  std::span<const SlopeMap> slope_maps() const noexcept { return slope_maps_; }

  /// phi_x(y) = g(x) + pen_x(d(x, y)) for the anchor at subset position `pos`.
  double phi(std::size_t pos, Index y) const;

  /// Smallest stored k with d(y, xbar) < eps_{k-2}, if any.
  std::optional<int> localization_index(Index y, Index xbar) const;

  /// Anchor of C closest to y (lowest index on ties).
  Index nearest_anchor(Index y) const;

 private:
  const MetricInstance* instance_;
  std::optional<ScaleSchedule> schedule_;
  std::vector<SlopeMap> slope_maps_;
  std::vector<PenalizationProfile> profiles_;
  bool constant_ = false;
};

struct Localization {
  int k = 0;
  Index xbar = 0;
};

struct ExtensionEntry {
  Index index = 0;
  double value = 0.0;
  Index argmin_anchor = 0;
  std::optional<Localization> localization;  // nullopt: full scan only
};

struct ExtensionField {
  std::vector<ExtensionEntry> entries;
  double epsilon = 0.0;
  std::string schedule_id;
  bool constant = false;
  std::optional<double> bound;
  bool cutoff = false;
  std::optional<double> cutoff_scale;  // M used by the cutoff

  std::vector<Index> indices() const;
  std::vector<double> values() const;
};

/// f(y) = min over x in C of phi_x(y) at every query, by full scan. Each entry
/// also records the ball (k, xbar) that reproduces the value locally.
/// `threads` > 1 splits the queries across workers; output is identical.
ExtensionField extend(const ExtensionModel& model, std::span<const Index> queries,
                      unsigned threads = 1);

struct LocalizedValue {
  double value = 0.0;
  Index argmin_anchor = 0;
  std::optional<Localization> localization;  // nullopt: fell back to the full scan
};

/// min over x in C ∩ B_{eps_k}(xbar) of phi_x(y) for the smallest k with
/// d(y, xbar) < eps_{k-2}. Equals extend()'s value bit for bit.
LocalizedValue extend_localized(const ExtensionModel& model, Index y, Index xbar);

/// Clamps values to [-bound, bound]; bound must be >= max |g|.
ExtensionField truncate_bounded(ExtensionField field, const MetricInstance& instance,
                                double bound);

/// Multiplies by chi = clamp(2 - eps/(2M) d(., C), 0, 1) with M = sup |f|.
/// The field should come from a schedule built with epsilon / 2.
ExtensionField cutoff_support(ExtensionField field, const MetricInstance& instance,
                              double epsilon);

}  // namespace lipext
