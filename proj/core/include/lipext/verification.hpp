#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lipext/extension.hpp"
#include "lipext/metric.hpp"
#include "lipext/schedule.hpp"

namespace lipext {

enum class CheckStatus { pass, fail, precondition_violated };

const char* to_string(CheckStatus status) noexcept;

/// Worst case seen by a check: the points involved, the measured quantity and
/// the largest (or smallest) value it was allowed to take.
struct Witness {
  std::vector<Index> points;
  std::optional<int> scale_index;
  double measured = 0.0;
  double allowed = 0.0;
};

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::optional<Witness> witness;  // always set unless the check was vacuous
  double tolerance = 0.0;
  std::string coverage = "exhaustive";
  std::string note;

  bool passed() const noexcept { return status == CheckStatus::pass; }
};

struct VerificationReport {
  std::vector<CheckResult> checks;  // ordered by name
  std::optional<ScaleSchedule> schedule;
  double epsilon = 0.0;
  double lipschitz = 0.0;

  bool all_passed() const noexcept;
};

inline constexpr double kInequalityTolerance = 1e-9;
inline constexpr double kIdentityTolerance = 1e-12;
inline constexpr std::size_t kExhaustivePairLimit = 500000;

/// max(1, max |g|, L diam): the unit that relative tolerances multiply.
double value_scale(const MetricInstance& instance);

struct PairScan {
  std::size_t max_pairs = kExhaustivePairLimit;
  std::uint64_t seed = 0;
};

/// max over C of |f - g| <= 1e-12 (1 + max |g|).
CheckResult check_restriction(const ExtensionField& field, const MetricInstance& instance);

/// Every pair ratio |f(a) - f(b)| / d(a, b) <= budget + 1e-9. Above
/// scan.max_pairs pairs a seeded uniform sample is used and labeled as such.
CheckResult check_global_lipschitz(const ExtensionField& field, const MetricInstance& instance,
                                   double budget, const PairScan& scan = {});

/// For x != y in C with eps_{k-1} <= d(x, y) < eps_k:
/// phi_x(y) >= g(y) + eps_{k-2} L - 1e-9 scale.
CheckResult check_cone_separation(const ExtensionModel& model);

/// Lip(f, B_r(xbar)) <= Lip(g, C ∩ B_{r_bar}(xbar)) + xi + 1e-9 with r from
/// locality_radius. `field` should hold f on every point of X.
/// Propagates ScheduleExhausted when the window is too shallow.
CheckResult check_locality_preservation(const ExtensionModel& model, const ExtensionField& field,
                                        Index xbar, double r_bar, double xi);

/// If every member of `family` (each aligned with A) is L-Lipschitz on A, so is
/// their pointwise minimum. A member that is not is a precondition violation.
CheckResult check_inf_family(const MetricInstance& instance,
                             std::span<const std::vector<double>> family,
                             std::span<const Index> domain, double L,
                             const PairScan& scan = {});

/// mcshane_lower_budget <= f <= mcshane_upper_budget, slack 1e-12 scale.
CheckResult check_envelope_sandwich(const ExtensionField& field, const MetricInstance& instance,
                                    double budget);

/// Convexity, slope range [0, budget], pen(0) = 0, exact prefix sums and the
/// base-window overestimate below 1e-12 L diam.
CheckResult check_profiles(const ExtensionModel& model, double budget);

/// extend_localized reproduces every entry bit for bit, and anchors outside
/// B_{eps_k}(xbar) clear f(y) by eps_{k-1} L / 3 - 1e-9 scale.
CheckResult check_localization(const ExtensionModel& model, const ExtensionField& field);

/// Ratio bound, monotone ratios, doubling decay, 3 eps_{k-2} <= eps_{k-1},
/// exact reconstruction and the slope cap, over the whole stored window.
CheckResult check_schedule_laws(const ScaleSchedule& schedule);

struct ComparisonRow {
  Index center = 0;
  RadiusProfile mcshane;
  RadiusProfile extension;
  std::optional<Locality> scheduled;
  double extension_at_scheduled = 0.0;  // Lip(f, B_r(center)) at the scheduled r
  double mcshane_at_scheduled = 0.0;
  double scheduled_bound = 0.0;  // Lip(g, C ∩ B_{r_bar}(center)) + xi
};

struct McShaneComparison {
  std::vector<ComparisonRow> rows;
  double r_bar = 0.0;
  double xi = 0.0;
};

/// Radius profiles of the L-Lipschitz McShane upper extension and of the
/// model's extension at the same centers, plus the scheduled-radius bound.
/// `field` must hold f on every point of X.
McShaneComparison mcshane_comparison(const ExtensionModel& model, const ExtensionField& field,
                                     std::span<const Index> centers,
                                     std::span<const double> radii, double r_bar, double xi);

struct BatteryOptions {
  double epsilon = 0.0;
  double xi = 0.0;
  double r_bar = 0.0;
  std::optional<double> anchor;
  PairScan scan;
  unsigned threads = 1;
  /// Applied to the field before any check runs. Test hook only.
  std::function<void(ExtensionField&)> tamper;
};

/// Builds the schedule and extension for `instance` and runs every check.
VerificationReport run_battery(const MetricInstance& instance, const BatteryOptions& options);

}  // namespace lipext
