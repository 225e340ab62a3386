#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lipext/metric.hpp"

namespace lipext {

/// A finite window [k_min, k_max] of the doubly infinite scale sequence eps_k.
///
/// Ratios follow r_k = r_star * 2^min(k - k_ref, 0): constant above the
/// reference index and halving at every step below it, so r_k -> 0 as
/// k -> -inf while never exceeding r_star = eps/(3(L + eps)). Values are
/// generated downward, eps_{k-1} = r_k * eps_k, so the reconstruction identity
/// holds bit for bit. The reference index is always 0.
struct ScaleSchedule {
  int k_min = 0;
  int k_max = 0;
  int k_ref = 0;
  std::vector<double> eps;     // eps[k - k_min]
  std::vector<double> ratios;  // ratios[k - k_min]; entry 0 (k = k_min) is unused
  double r_star = 0.0;
  double L_eff = 0.0;
  double eps_eff = 0.0;
  double anchor = 0.0;

  bool contains(int k) const noexcept { return k >= k_min && k <= k_max; }
  /// eps_k for k in [k_min, k_max].
  double epsilon(int k) const;
  /// r_k = eps_{k-1} / eps_k for k in (k_min, k_max].
  double ratio(int k) const;
  /// Short reproducibility tag.
  std::string id() const;
};

/// The designed ratio r_star * 2^min(k - k_ref, 0). Exact in binary64.
double design_ratio(double r_star, int k, int k_ref = 0) noexcept;

/// Builds the shortest window with eps_{k_min} <= span_low and
/// eps_{k_max} >= span_high around eps_{k_ref} ~= anchor.
/// Throws TrivialInstance when L == 0 and InvalidArgument on bad parameters.
ScaleSchedule build_schedule(double L, double epsilon, double anchor, double span_low,
                             double span_high);

/// Same construction over an explicit index window (k_min < 0 < k_max).
ScaleSchedule build_schedule_range(double L, double epsilon, double anchor, int k_min, int k_max);

struct Locality {
  int k = 0;
  double r = 0.0;  // eps_{k-2}
};

/// Largest stored k with eps_{k+3} < r_bar and 3 L eps_k / eps_{k+1} < xi,
/// paired with r = eps_{k-2}. Throws ScheduleExhausted (with the index the
/// window must reach) when no stored k qualifies.
Locality locality_radius(const ScaleSchedule& schedule, double r_bar, double xi, double L);

struct LocalityRequest {
  double r_bar = 0.0;
  double xi = 0.0;
};

struct ScheduleRequest {
  double epsilon = 0.0;
  std::optional<double> anchor;           // defaults to the diameter of X
  std::vector<LocalityRequest> locality;  // every entry must be resolvable
  int max_depth = 64;                     // lowest allowed k is -max_depth
};

/// Chooses the window for an instance:
///  - eps_{k_max-2} >= 2 diam, so every point localizes and the tail is exact;
///  - k_min sits 6 indices below the index needed by min(min distance, r_bar)/64
///    and every requested locality radius;
///  - the base-window overestimate eps_{k_min} (L + eps) is below 1e-12 L diam.
ScaleSchedule plan_schedule(const MetricInstance& instance, const ScheduleRequest& request);

}  // namespace lipext
