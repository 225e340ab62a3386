#pragma once

#include <span>
#include <vector>

#include "lipext/extension.hpp"
#include "lipext/metric.hpp"
#include "lipext/verification.hpp"

namespace lipext {

/// Point masses concentrated on C and an exponent p >= 1.
struct MeasureData {
  std::vector<double> masses;  // one per point of X, zero off C
  double p = 1.0;
};

/// Throws InvalidArgument unless masses are nonnegative, vanish off C, have
/// positive total, and p >= 1.
void validate_measure(const MetricInstance& instance, const MeasureData& measure);

/// Indices carrying positive mass, ascending.
std::vector<Index> support(const MeasureData& measure);

/// sum_i m_i Lip(values, D ∩ B_r(x_i))^p at one radius, with the per-point terms.
struct EnergyReport {
  double radius = 0.0;
  double total = 0.0;
  std::vector<Index> support;
  std::vector<double> contributions;  // aligned with support
};

/// `values` is aligned with `domain`, which must contain the support.
EnergyReport energy(const MetricInstance& instance, std::span<const double> values,
                    std::span<const Index> domain, const MeasureData& measure, double r);

struct MonotonicityResult {
  CheckResult check;
  std::vector<EnergyReport> on_x;  // E_X(h, r) per radius
  std::vector<EnergyReport> on_c;  // E_C(h|C, r) per radius
};

/// E_C(h|C, r) <= E_X(h, r) at every radius; `h` gives a value for every point of X.
MonotonicityResult check_restriction_monotonicity(const MetricInstance& instance,
                                                  std::span<const double> h,
                                                  const MeasureData& measure,
                                                  std::span<const double> radii);

struct ExtensionEnergyRow {
  double r_bar = 0.0;
  double r = 0.0;          // scheduled radius
  EnergyReport on_x;       // E_X(f, r)
  double bound = 0.0;      // sum_i m_i (Lip(g, C ∩ B_{r_bar}(x_i)) + xi)^p
  EnergyReport on_c_rbar;  // E_C(g, r_bar), for comparison
};

struct ExtensionEnergyResult {
  CheckResult check;
  std::vector<ExtensionEnergyRow> rows;
};

/// Per support point and r_bar: Lip(f, B_r(x)) <= Lip(g, C ∩ B_{r_bar}(x)) + xi
/// at the scheduled r, aggregated into E_X(f, r) <= sum m_i (... + xi)^p.
/// `field` must hold f on every point of X. Only the fixed-scale integrand is
/// compared; the relaxed functional itself is not computed.
ExtensionEnergyResult check_extension_energy(const ExtensionModel& model,
                                             const ExtensionField& field,
                                             const MeasureData& measure,
                                             std::span<const double> radii_bar, double xi);

}  // namespace lipext
