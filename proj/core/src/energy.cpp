#include "lipext/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lipext {

void validate_measure(const MetricInstance& instance, const MeasureData& measure) {
  if (!(measure.p >= 1.0) || !std::isfinite(measure.p))
    throw InvalidArgument("exponent p must be finite and >= 1");
  if (measure.masses.size() != instance.size())
    throw InvalidArgument("masses must have one entry per point");
  double total = 0.0;
  for (Index i = 0; i < measure.masses.size(); ++i) {
    const double m = measure.masses[i];
    if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidArgument("masses must be finite and >= 0");
    if (m != 0.0 && !instance.in_subset(i)) {
      std::ostringstream os;
      os << "mass at point " << i << " lies outside C";
      throw InvalidArgument(os.str());
    }
    total += m;
  }
  if (!(total > 0.0)) throw InvalidArgument("measure has empty support");
}

std::vector<Index> support(const MeasureData& measure) {
  std::vector<Index> out;
  for (Index i = 0; i < measure.masses.size(); ++i)
    if (measure.masses[i] > 0.0) out.push_back(i);
  return out;
}

namespace {

double lip_in_ball(const MetricInstance& inst, std::span<const double> values,
                   std::span<const Index> domain, Index center, double r) {
  std::vector<Index> members;
  std::vector<double> vals;
  for (std::size_t a = 0; a < domain.size(); ++a)
    if (inst.distance(center, domain[a]) < r) {
      members.push_back(domain[a]);
      vals.push_back(values[a]);
    }
  return lip_constant(inst, vals, members);
}

}  // namespace

EnergyReport energy(const MetricInstance& instance, std::span<const double> values,
                    std::span<const Index> domain, const MeasureData& measure, double r) {
  validate_measure(instance, measure);
  if (!(r > 0.0)) throw InvalidArgument("energy radius must be positive");
  if (values.size() != domain.size()) throw InvalidArgument("values and domain differ in length");
  EnergyReport out;
  out.radius = r;
  out.support = support(measure);
  for (Index x : out.support) {
    if (std::find(domain.begin(), domain.end(), x) == domain.end())
      throw InvalidArgument("energy domain must contain the support of the measure");
    const double lip = lip_in_ball(instance, values, domain, x, r);
    out.contributions.push_back(measure.masses[x] * std::pow(lip, measure.p));
  }
  for (double c : out.contributions) out.total += c;
  return out;
}

MonotonicityResult check_restriction_monotonicity(const MetricInstance& instance,
                                                  std::span<const double> h,
                                                  const MeasureData& measure,
                                                  std::span<const double> radii) {
  if (h.size() != instance.size()) throw InvalidArgument("h must give a value at every point");
  const auto all = instance.all_indices();
  const auto subset = instance.subset();
  std::vector<double> restricted;
  for (Index c : subset) restricted.push_back(h[c]);

  MonotonicityResult out;
  out.check.name = "restriction_monotonicity";
  out.check.tolerance = 0.0;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (double r : radii) {
    out.on_x.push_back(energy(instance, h, all, measure, r));
    out.on_c.push_back(energy(instance, restricted, subset, measure, r));
    const double ex = out.on_x.back().total;
    const double ec = out.on_c.back().total;
    if (ex - ec < worst_slack) {
      worst_slack = ex - ec;
      out.check.witness = Witness{{}, std::nullopt, ec, ex};
      std::ostringstream os;
      os.precision(17);
      os << "r=" << r;
      out.check.note = os.str();
    }
  }
  // Scale by scale each ball term on C is a sup over a subset of the X ball,
  // so the comparison is exact: no tolerance.
  if (worst_slack < 0.0) out.check.status = CheckStatus::fail;
  return out;
}

ExtensionEnergyResult check_extension_energy(const ExtensionModel& model,
                                             const ExtensionField& field,
                                             const MeasureData& measure,
                                             std::span<const double> radii_bar, double xi) {
  const auto& inst = model.instance();
  validate_measure(inst, measure);
  if (!(xi > 0.0)) throw InvalidArgument("xi must be positive");
  std::vector<double> f(inst.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& e : field.entries) f[e.index] = e.value;
  for (double v : f)
    if (std::isnan(v)) throw InvalidArgument("extension energy needs f on every point of X");

  const auto all = inst.all_indices();
  const auto subset = inst.subset();
  const std::vector<double> g(inst.values().begin(), inst.values().end());
  const auto supp = support(measure);

  ExtensionEnergyResult out;
  out.check.name = "extension_energy";
  out.check.tolerance = kInequalityTolerance;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (double r_bar : radii_bar) {
    if (!(r_bar > 0.0)) throw InvalidArgument("r_bar must be positive");
    ExtensionEnergyRow row;
    row.r_bar = r_bar;
    row.r = model.is_constant() ? r_bar
                                : locality_radius(*model.schedule(), r_bar, xi, inst.lipschitz()).r;
    row.on_x = energy(inst, f, all, measure, row.r);
    row.on_c_rbar = energy(inst, g, subset, measure, r_bar);
    for (std::size_t i = 0; i < supp.size(); ++i) {
      const Index x = supp[i];
      const double lhs = lip_in_ball(inst, f, all, x, row.r);
      const double rhs = lip_in_ball(inst, g, subset, x, r_bar) + xi;
      row.bound += measure.masses[x] * std::pow(rhs, measure.p);
      const double slack = rhs + kInequalityTolerance - lhs;
      if (slack < worst_slack) {
        worst_slack = slack;
        out.check.witness = Witness{{x}, std::nullopt, lhs, rhs + kInequalityTolerance};
        std::ostringstream os;
        os.precision(17);
        os << "pointwise: r_bar=" << r_bar << " r=" << row.r;
        out.check.note = os.str();
      }
    }
    const double tol = kInequalityTolerance * std::max(1.0, row.bound);
    if (row.on_x.total > row.bound + tol && worst_slack >= 0.0) {
      worst_slack = -1.0;
      out.check.witness = Witness{{}, std::nullopt, row.on_x.total, row.bound + tol};
      out.check.note = "aggregate energy bound";
    }
    out.rows.push_back(std::move(row));
  }
  if (worst_slack < 0.0) out.check.status = CheckStatus::fail;
  return out;
}

}  // namespace lipext
