#include "lipext/verification.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace lipext {

const char* to_string(CheckStatus status) noexcept {
  switch (status) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::precondition_violated:
      return "precondition_violated";
  }
  return "fail";
}

bool VerificationReport::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

double value_scale(const MetricInstance& instance) {
  return std::max({1.0, instance.max_abs_value(), instance.lipschitz() * instance.diameter()});
}

namespace {

// Tracks the smallest slack (allowed - measured) seen so far.
struct Worst {
  double slack = std::numeric_limits<double>::infinity();
  Witness witness;
  bool seen = false;

  void offer(double measured, double allowed, std::vector<Index> points,
             std::optional<int> k = std::nullopt) {
    const double s = allowed - measured;
    if (!seen || s < slack) {
      slack = s;
      witness = Witness{std::move(points), k, measured, allowed};
      seen = true;
    }
  }
};

CheckResult finish(std::string name, const Worst& worst, double tol) {
  CheckResult r;
  r.name = std::move(name);
  r.tolerance = tol;
  if (worst.seen) {
    r.witness = worst.witness;
    r.status = worst.slack >= 0.0 ? CheckStatus::pass : CheckStatus::fail;
  }
  return r;
}

// Calls fn(a, b) for pairs a < b of [0, m): all of them, or a seeded sample.
template <class Fn>
std::string for_pairs(std::size_t m, const PairScan& scan, Fn&& fn) {
  const std::size_t total = m < 2 ? 0 : m * (m - 1) / 2;
  if (total <= scan.max_pairs) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b) fn(a, b);
    return "exhaustive";
  }
  std::mt19937_64 rng(scan.seed);
  std::uniform_int_distribution<std::size_t> first(0, m - 1);
  std::uniform_int_distribution<std::size_t> second(0, m - 2);
  for (std::size_t s = 0; s < scan.max_pairs; ++s) {
    const std::size_t a = first(rng);
    std::size_t b = second(rng);
    if (b >= a) ++b;
    fn(std::min(a, b), std::max(a, b));
  }
  std::ostringstream os;
  os << "sampled " << scan.max_pairs << " of " << total << " pairs (seed " << scan.seed << ")";
  return os.str();
}

std::vector<double> subset_values_in_ball(const MetricInstance& inst, Index center, double r,
                                          std::vector<Index>& members) {
  members.clear();
  std::vector<double> vals;
  const auto subset = inst.subset();
  for (std::size_t p = 0; p < subset.size(); ++p)
    if (inst.distance(center, subset[p]) < r) {
      members.push_back(subset[p]);
      vals.push_back(inst.values()[p]);
    }
  return vals;
}

// Lip over the field entries lying in the open ball, with the worst pair.
std::pair<double, std::vector<Index>> field_lip_in_ball(const MetricInstance& inst,
                                                        const ExtensionField& field, Index center,
                                                        double r) {
  std::vector<const ExtensionEntry*> in;
  for (const auto& e : field.entries)
    if (inst.distance(center, e.index) < r) in.push_back(&e);
  double best = 0.0;
  std::vector<Index> pair;
  for (std::size_t a = 0; a < in.size(); ++a)
    for (std::size_t b = a + 1; b < in.size(); ++b) {
      const double q = std::abs(in[a]->value - in[b]->value) / inst.distance(in[a]->index, in[b]->index);
      if (q > best || pair.empty()) best = std::max(best, q), pair = {in[a]->index, in[b]->index};
    }
  if (pair.empty() && !in.empty()) pair = {in.front()->index};
  return {best, pair};
}

}  // namespace

CheckResult check_restriction(const ExtensionField& field, const MetricInstance& instance) {
  const double tol = kIdentityTolerance * (1.0 + instance.max_abs_value());
  Worst worst;
  for (const auto& e : field.entries) {
    const auto pos = instance.subset_position(e.index);
    if (!pos) continue;
    worst.offer(std::abs(e.value - instance.values()[*pos]), tol, {e.index});
  }
  auto r = finish("restriction", worst, tol);
  if (!worst.seen) r.note = "no evaluated point lies in C";
  return r;
}

CheckResult check_global_lipschitz(const ExtensionField& field, const MetricInstance& instance,
                                   double budget, const PairScan& scan) {
  const double allowed = budget + kInequalityTolerance;
  Worst worst;
  const auto& es = field.entries;
  const auto coverage = for_pairs(es.size(), scan, [&](std::size_t a, std::size_t b) {
    if (es[a].index == es[b].index) return;
    const double q =
        std::abs(es[a].value - es[b].value) / instance.distance(es[a].index, es[b].index);
    worst.offer(q, allowed, {es[a].index, es[b].index});
  });
  auto r = finish("global_lipschitz", worst, kInequalityTolerance);
  r.coverage = coverage;
  return r;
}

CheckResult check_cone_separation(const ExtensionModel& model) {
  const auto& inst = model.instance();
  const double tol = kInequalityTolerance * value_scale(inst);
  CheckResult vacuous{"cone_separation", CheckStatus::pass, std::nullopt, tol, "exhaustive",
                      "constant extension"};
  if (model.is_constant() || !model.schedule()) return vacuous;

  const auto& s = *model.schedule();
  const double L = inst.lipschitz();
  const auto subset = inst.subset();
  const auto g = inst.values();
  Worst worst;
  bool bracket_missing = false;
  Witness missing;
  for (std::size_t px = 0; px < subset.size(); ++px)
    for (std::size_t py = 0; py < subset.size(); ++py) {
      if (px == py) continue;
      const double d = inst.distance(subset[px], subset[py]);
      // k with eps_{k-1} <= d < eps_k
      const auto it = std::upper_bound(s.eps.begin(), s.eps.end(), d);
      const int k = s.k_min + static_cast<int>(it - s.eps.begin());
      if (it == s.eps.end() || k - 2 < s.k_min) {
        bracket_missing = true;
        missing = Witness{{subset[px], subset[py]}, k, d, 0.0};
        continue;
      }
      const double bound = g[py] + s.epsilon(k - 2) * L - tol;
      // measured >= allowed is the passing direction; negate into the slack convention
      worst.offer(-model.phi(px, subset[py]), -bound, {subset[px], subset[py]}, k);
    }
  auto r = finish("cone_separation", worst, tol);
  if (r.witness) r.witness->measured = -r.witness->measured, r.witness->allowed = -r.witness->allowed;
  if (bracket_missing) {
    r.status = CheckStatus::precondition_violated;
    r.witness = missing;
    r.note = "a pair distance is not bracketed by the stored window";
  }
  return r;
}

CheckResult check_locality_preservation(const ExtensionModel& model, const ExtensionField& field,
                                        Index xbar, double r_bar, double xi) {
  const auto& inst = model.instance();
  if (!inst.in_subset(xbar)) throw InvalidArgument("locality check: xbar must belong to C");
  if (!(r_bar > 0.0) || !(xi > 0.0)) throw InvalidArgument("r_bar and xi must be positive");

  std::optional<int> k;
  double r = r_bar;
  if (!model.is_constant()) {
    if (!model.schedule()) throw InvalidArgument("locality check needs a schedule");
    const auto loc = locality_radius(*model.schedule(), r_bar, xi, inst.lipschitz());
    k = loc.k;
    r = loc.r;
  }
  const auto [lhs, pair] = field_lip_in_ball(inst, field, xbar, r);
  std::vector<Index> members;
  const auto gv = subset_values_in_ball(inst, xbar, r_bar, members);
  const double rhs = lip_constant(inst, gv, members);

  CheckResult out;
  out.name = "locality_preservation";
  out.tolerance = kInequalityTolerance;
  const double allowed = rhs + xi + kInequalityTolerance;
  out.witness = Witness{pair.empty() ? std::vector<Index>{xbar} : pair, k, lhs, allowed};
  out.status = lhs <= allowed ? CheckStatus::pass : CheckStatus::fail;
  std::ostringstream os;
  os.precision(17);
  os << "xbar=" << xbar << " r_bar=" << r_bar << " xi=" << xi << " r=" << r;
  out.note = os.str();
  return out;
}

CheckResult check_inf_family(const MetricInstance& instance,
                             std::span<const std::vector<double>> family,
                             std::span<const Index> domain, double L, const PairScan& scan) {
  const double allowed = L + kInequalityTolerance;
  CheckResult out;
  out.name = "inf_family";
  out.tolerance = kInequalityTolerance;
  if (family.empty()) {
    out.note = "empty family";
    return out;
  }
  for (std::size_t m = 0; m < family.size(); ++m) {
    if (family[m].size() != domain.size())
      throw InvalidArgument("family member not aligned with the domain");
    Worst member;
    for_pairs(domain.size(), scan, [&](std::size_t a, std::size_t b) {
      const double q = std::abs(family[m][a] - family[m][b]) / instance.distance(domain[a], domain[b]);
      member.offer(q, allowed, {domain[a], domain[b]});
    });
    if (member.seen && member.slack < 0.0) {
      out.status = CheckStatus::precondition_violated;
      out.witness = member.witness;
      std::ostringstream os;
      os << "family member " << m << " is not L-Lipschitz";
      out.note = os.str();
      return out;
    }
  }
  std::vector<double> minimum(domain.size(), std::numeric_limits<double>::infinity());
  for (const auto& f : family)
    for (std::size_t i = 0; i < domain.size(); ++i) minimum[i] = std::min(minimum[i], f[i]);
  Worst worst;
  out.coverage = for_pairs(domain.size(), scan, [&](std::size_t a, std::size_t b) {
    const double q = std::abs(minimum[a] - minimum[b]) / instance.distance(domain[a], domain[b]);
    worst.offer(q, allowed, {domain[a], domain[b]});
  });
  auto r = finish("inf_family", worst, kInequalityTolerance);
  r.coverage = out.coverage;
  return r;
}

CheckResult check_envelope_sandwich(const ExtensionField& field, const MetricInstance& instance,
                                    double budget) {
  const double tol = kIdentityTolerance * value_scale(instance);
  Worst above;  // f <= upper + tol
  Worst below;  // f >= lower - tol, tracked as -f <= -(lower - tol)
  for (const auto& e : field.entries) {
    above.offer(e.value, mcshane_upper(instance, budget, e.index) + tol, {e.index});
    below.offer(-e.value, -(mcshane_lower(instance, budget, e.index) - tol), {e.index});
  }
  if (below.seen) below.witness.measured *= -1.0, below.witness.allowed *= -1.0;
  const bool lower_side = below.slack < above.slack;
  auto r = finish("envelope_sandwich", lower_side ? below : above, tol);
  r.note = lower_side ? "tightest side: f >= lower - tol" : "tightest side: f <= upper + tol";
  return r;
}

CheckResult check_profiles(const ExtensionModel& model, double budget) {
  CheckResult out;
  out.name = "profile_legality";
  out.tolerance = 0.0;
  if (model.profiles().empty()) {
    out.note = "constant extension";
    return out;
  }
  const auto& inst = model.instance();
  const double tail_limit = kIdentityTolerance * inst.lipschitz() *
                            (inst.diameter() > 0.0 ? inst.diameter() : 1.0);
  auto fail = [&](const PenalizationProfile& p, std::optional<int> j, double measured,
                  double allowed, const char* what) {
    out.status = CheckStatus::fail;
    out.witness = Witness{{p.anchor}, j, measured, allowed};
    out.note = what;
    return out;
  };
  double worst_slope = 0.0;
  Index worst_anchor = model.profiles().front().anchor;
  for (const auto& p : model.profiles()) {
    if (eval_pen(p, 0.0) != 0.0) return fail(p, std::nullopt, eval_pen(p, 0.0), 0.0, "pen(0) != 0");
    if (p.breakpoints.empty()) {
      if (p.base_slope < 0.0 || p.base_slope > budget)
        return fail(p, std::nullopt, p.base_slope, budget, "slope outside [0, L + eps]");
      continue;
    }
    std::vector<double> all{p.base_slope};
    all.insert(all.end(), p.slopes.begin(), p.slopes.end());
    all.push_back(p.tail_slope);
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (all[j] < 0.0 || all[j] > budget)
        return fail(p, static_cast<int>(j), all[j], budget, "slope outside [0, L + eps]");
      if (j > 0 && all[j] < all[j - 1])
        return fail(p, static_cast<int>(j), all[j], all[j - 1], "slopes decrease (not convex)");
      if (all[j] > worst_slope) worst_slope = all[j], worst_anchor = p.anchor;
    }
    if (p.cumulative.size() != p.breakpoints.size() || p.slopes.size() + 1 != p.breakpoints.size())
      return fail(p, std::nullopt, 0.0, 0.0, "profile arrays have inconsistent sizes");
    if (p.cumulative[0] != p.base_slope * p.breakpoints[0])
      return fail(p, 0, p.cumulative[0], p.base_slope * p.breakpoints[0], "cumulative[0] mismatch");
    for (std::size_t j = 0; j + 1 < p.breakpoints.size(); ++j) {
      const double expect = p.cumulative[j] + p.slopes[j] * (p.breakpoints[j + 1] - p.breakpoints[j]);
      if (p.cumulative[j + 1] != expect)
        return fail(p, static_cast<int>(j + 1), p.cumulative[j + 1], expect, "prefix sum mismatch");
      if (eval_pen(p, p.breakpoints[j + 1]) != p.cumulative[j + 1])
        return fail(p, static_cast<int>(j + 1), eval_pen(p, p.breakpoints[j + 1]),
                    p.cumulative[j + 1], "discontinuous at breakpoint");
    }
    if (inst.lipschitz() > 0.0 && p.tail_bound() >= tail_limit)
      return fail(p, std::nullopt, p.tail_bound(), tail_limit, "base-window overestimate too large");
  }
  out.witness = Witness{{worst_anchor}, std::nullopt, worst_slope, budget};
  return out;
}

CheckResult check_localization(const ExtensionModel& model, const ExtensionField& field) {
  const auto& inst = model.instance();
  const double tol = kInequalityTolerance * value_scale(inst);
  CheckResult out;
  out.name = "localization";
  out.tolerance = tol;
  if (model.is_constant()) {
    out.note = "constant extension";
    return out;
  }
  const auto& s = *model.schedule();
  const double L = inst.lipschitz();
  const auto subset = inst.subset();
  Worst margin;
  std::size_t localized = 0;
  for (const auto& e : field.entries) {
    const Index xbar = model.nearest_anchor(e.index);
    const auto lv = extend_localized(model, e.index, xbar);
    if (lv.value != e.value || lv.argmin_anchor != e.argmin_anchor) {
      out.status = CheckStatus::fail;
      out.witness = Witness{{e.index, xbar}, lv.localization ? std::optional<int>(lv.localization->k)
                                                             : std::nullopt,
                            lv.value, e.value};
      out.note = "localized infimum differs from the full scan";
      return out;
    }
    if (!lv.localization) continue;
    ++localized;
    const int k = lv.localization->k;
    const double radius = s.epsilon(k);
    const double need = s.epsilon(k - 1) * L / 3.0;
    for (std::size_t p = 0; p < subset.size(); ++p) {
      if (inst.distance(subset[p], xbar) < radius) continue;
      // phi_x(y) >= f(y) + eps_{k-1} L / 3 - tol
      margin.offer(-(model.phi(p, e.index) - e.value), -(need - tol), {e.index, xbar, subset[p]}, k);
    }
  }
  if (margin.seen) {
    out.witness = margin.witness;
    out.witness->measured = -out.witness->measured;
    out.witness->allowed = -out.witness->allowed;
    if (margin.slack < 0.0) {
      out.status = CheckStatus::fail;
      out.note = "exclusion margin eps_{k-1} L / 3 violated";
      return out;
    }
  }
  std::ostringstream os;
  os << localized << " of " << field.entries.size() << " entries localized";
  out.note = os.str();
  return out;
}

CheckResult check_schedule_laws(const ScaleSchedule& s) {
  CheckResult out;
  out.name = "schedule_laws";
  out.tolerance = 0.0;
  auto fail = [&](int k, double measured, double allowed, const char* what) {
    out.status = CheckStatus::fail;
    out.witness = Witness{{}, k, measured, allowed};
    out.note = what;
    return out;
  };
  if (!(s.k_min < s.k_ref && s.k_ref < s.k_max)) return fail(s.k_ref, 0, 0, "k_ref not interior");
  const double bound = s.eps_eff / (3.0 * (s.L_eff + s.eps_eff));
  if (s.r_star != bound) return fail(s.k_ref, s.r_star, bound, "r_star formula");
  for (int k = s.k_min + 1; k <= s.k_max; ++k) {
    const double r = s.ratio(k);
    if (!(s.epsilon(k) > s.epsilon(k - 1))) return fail(k, s.epsilon(k - 1), s.epsilon(k), "eps not increasing");
    if (r > s.r_star) return fail(k, r, s.r_star, "ratio above r_star");
    if (s.epsilon(k - 1) != r * s.epsilon(k)) return fail(k, s.epsilon(k - 1), r * s.epsilon(k), "reconstruction");
    // 3 L r_star = L eps/(L + eps) <= eps holds exactly; allow rounding in the product.
    if (s.L_eff + 3.0 * s.L_eff * r > (s.L_eff + s.eps_eff) * (1.0 + 4 * DBL_EPSILON))
      return fail(k, s.L_eff + 3.0 * s.L_eff * r, s.L_eff + s.eps_eff, "slope cap");
    if (k - 1 > s.k_min) {
      const double prev = s.ratio(k - 1);
      if (prev > r) return fail(k, prev, r, "ratios decrease");
      const double expect = k <= s.k_ref ? 0.5 : 1.0;
      if (prev / r != expect) return fail(k, prev / r, expect, "doubling decay");
    }
    if (k - 2 >= s.k_min && 3.0 * s.epsilon(k - 2) > s.epsilon(k - 1))
      return fail(k, 3.0 * s.epsilon(k - 2), s.epsilon(k - 1), "3 eps_{k-2} > eps_{k-1}");
  }
  const double decay = std::ldexp(s.r_star, -(s.k_ref - s.k_min - 1));
  if (s.ratio(s.k_min + 1) > decay) return fail(s.k_min + 1, s.ratio(s.k_min + 1), decay, "decay toward -inf");
  out.witness = Witness{{}, s.k_max, s.ratio(s.k_max), s.r_star};
  return out;
}

McShaneComparison mcshane_comparison(const ExtensionModel& model, const ExtensionField& field,
                                     std::span<const Index> centers,
                                     std::span<const double> radii, double r_bar, double xi) {
  const auto& inst = model.instance();
  const auto all = inst.all_indices();
  std::vector<double> f(inst.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& e : field.entries) f[e.index] = e.value;
  for (double v : f)
    if (std::isnan(v)) throw InvalidArgument("mcshane_comparison needs f on every point of X");
  std::vector<double> upper(inst.size());
  for (Index y = 0; y < inst.size(); ++y) upper[y] = mcshane_upper(inst, inst.lipschitz(), y);

  McShaneComparison out;
  out.r_bar = r_bar;
  out.xi = xi;
  std::optional<Locality> loc;
  if (!model.is_constant() && model.schedule())
    loc = locality_radius(*model.schedule(), r_bar, xi, inst.lipschitz());
  for (Index c : centers) {
    ComparisonRow row;
    row.center = c;
    row.mcshane = lipa_profile(inst, upper, all, c, radii);
    row.extension = lipa_profile(inst, f, all, c, radii);
    row.scheduled = loc;
    const double r = loc ? loc->r : r_bar;
    const std::vector<double> one{r};
    row.extension_at_scheduled = lipa_profile(inst, f, all, c, one).constants[0];
    row.mcshane_at_scheduled = lipa_profile(inst, upper, all, c, one).constants[0];
    std::vector<Index> members;
    const auto gv = subset_values_in_ball(inst, c, r_bar, members);
    row.scheduled_bound = lip_constant(inst, gv, members) + xi;
    out.rows.push_back(std::move(row));
  }
  return out;
}

VerificationReport run_battery(const MetricInstance& instance, const BatteryOptions& options) {
  if (!(options.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(options.xi > 0.0)) throw InvalidArgument("xi must be positive");
  if (!(options.r_bar > 0.0)) throw InvalidArgument("r_bar must be positive");

  VerificationReport report;
  report.epsilon = options.epsilon;
  report.lipschitz = instance.lipschitz();
  std::optional<ScaleSchedule> schedule;
  if (instance.lipschitz() > 0.0) {
    ScheduleRequest req;
    req.epsilon = options.epsilon;
    req.anchor = options.anchor;
    req.locality.push_back({options.r_bar, options.xi});
    schedule = plan_schedule(instance, req);
  }
  report.schedule = schedule;
  const ExtensionModel model(instance, schedule);
  const auto all = instance.all_indices();
  ExtensionField field = extend(model, all, options.threads);
  if (options.tamper) options.tamper(field);

  const double budget = instance.lipschitz() + options.epsilon;
  auto& checks = report.checks;
  checks.push_back(check_restriction(field, instance));
  checks.push_back(check_global_lipschitz(field, instance, budget, options.scan));
  checks.push_back(check_envelope_sandwich(field, instance, budget));
  checks.push_back(check_profiles(model, budget));
  checks.push_back(check_cone_separation(model));
  checks.push_back(check_localization(model, field));
  if (schedule) checks.push_back(check_schedule_laws(*schedule));

  // Locality at every anchor; keep the tightest one.
  std::optional<CheckResult> locality;
  for (Index xbar : instance.subset()) {
    auto c = check_locality_preservation(model, field, xbar, options.r_bar, options.xi);
    const auto slack = [](const CheckResult& r) {
      return r.witness ? r.witness->allowed - r.witness->measured : 0.0;
    };
    if (!locality || (locality->passed() && (!c.passed() || slack(c) < slack(*locality))))
      locality = std::move(c);
  }
  checks.push_back(*locality);

  if (!model.is_constant()) {
    std::vector<std::vector<double>> family;
    for (std::size_t p = 0; p < instance.subset().size(); ++p) {
      std::vector<double> phi(instance.size());
      for (Index y = 0; y < instance.size(); ++y) phi[y] = model.phi(p, y);
      family.push_back(std::move(phi));
    }
    checks.push_back(check_inf_family(instance, family, all, budget, options.scan));
  }

  std::stable_sort(checks.begin(), checks.end(),
                   [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
  return report;
}

}  // namespace lipext
