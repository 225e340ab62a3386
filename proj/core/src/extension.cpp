#include "lipext/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace lipext {

double SlopeMap::at(int k) const {
  if (k < k_min || k > k_max()) throw InvalidArgument("slope index outside stored window");
  return values[static_cast<std::size_t>(k - k_min)];
}

SlopeMap approx_slopes(const MetricInstance& instance, Index x, const ScaleSchedule& schedule) {
  const auto pos = instance.subset_position(x);
  if (!pos) throw InvalidArgument("approx_slopes: anchor must belong to C");
  const auto subset = instance.subset();
  const auto g = instance.values();

  std::vector<std::size_t> order(subset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> dx(subset.size());
  for (std::size_t p = 0; p < subset.size(); ++p) dx[p] = instance.distance(x, subset[p]);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dx[a] < dx[b]; });

  SlopeMap out;
  out.anchor = x;
  out.k_min = schedule.k_min;
  out.values.reserve(static_cast<std::size_t>(schedule.k_max - schedule.k_min + 1));

  double current = 0.0;
  std::size_t taken = 0;
  auto absorb = [&](std::size_t a) {
    for (std::size_t t = 0; t < taken; ++t) {
      const std::size_t b = order[t];
      current = std::max(current, std::abs(g[a] - g[b]) / instance.distance(subset[a], subset[b]));
    }
    ++taken;
  };
  for (int k = schedule.k_min; k <= schedule.k_max; ++k) {
    const double r = schedule.epsilon(k);
    while (taken < order.size() && dx[order[taken]] < r) absorb(order[taken]);
    out.values.push_back(current);
  }
  while (taken < order.size()) absorb(order[taken]);
  out.saturation = current;
  return out;
}

PenalizationProfile PenalizationProfile::linear(Index anchor, double slope) {
  PenalizationProfile p;
  p.anchor = anchor;
  p.base_slope = slope;
  p.tail_slope = slope;
  return p;
}

PenalizationProfile build_penalization(const SlopeMap& slopes, const ScaleSchedule& schedule,
                                       double L) {
  if (slopes.k_min != schedule.k_min || slopes.k_max() != schedule.k_max)
    throw InvalidArgument("slope map does not cover the schedule window");
  if (schedule.k_max - schedule.k_min < 2)
    throw InvalidArgument("schedule window too narrow for a penalization profile");

  PenalizationProfile p;
  p.anchor = slopes.anchor;
  // Breakpoints eps_{k_min} .. eps_{k_max-1}; interval j is (eps_{k-2}, eps_{k-1}), k = k_min+j+2.
  for (int k = schedule.k_min; k <= schedule.k_max - 1; ++k)
    p.breakpoints.push_back(schedule.epsilon(k));
  for (int k = schedule.k_min + 2; k <= schedule.k_max; ++k)
    p.slopes.push_back(slopes.at(k) + 3.0 * L * schedule.ratio(k - 1));
  p.base_slope = p.slopes.front();
  p.tail_slope = slopes.saturation + 3.0 * L * schedule.r_star;

  p.cumulative.resize(p.breakpoints.size());
  p.cumulative[0] = p.base_slope * p.breakpoints[0];
  for (std::size_t j = 0; j + 1 < p.breakpoints.size(); ++j)
    p.cumulative[j + 1] = p.cumulative[j] + p.slopes[j] * (p.breakpoints[j + 1] - p.breakpoints[j]);
  return p;
}

double eval_pen(const PenalizationProfile& profile, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("eval_pen: t must be nonnegative");
  const auto& b = profile.breakpoints;
  if (b.empty()) return profile.base_slope * t;
  const auto it = std::lower_bound(b.begin(), b.end(), t);
  if (it == b.begin()) return profile.base_slope * t;
  if (it == b.end()) return profile.cumulative.back() + profile.tail_slope * (t - b.back());
  const auto j = static_cast<std::size_t>(it - b.begin()) - 1;
  return profile.cumulative[j] + profile.slopes[j] * (t - b[j]);
}

namespace {

void require_extending_constant(const MetricInstance& instance, double L_prime) {
  if (!(L_prime >= instance.subset_lipschitz()))
    throw InvalidArgument("McShane constant below Lip(g, C): the envelope would not extend g");
}

}  // namespace

double mcshane_upper(const MetricInstance& instance, double L_prime, Index y) {
  require_extending_constant(instance, L_prime);
  const auto subset = instance.subset();
  const auto g = instance.values();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < subset.size(); ++p)
    best = std::min(best, g[p] + L_prime * instance.distance(subset[p], y));
  return best;
}

double mcshane_lower(const MetricInstance& instance, double L_prime, Index y) {
  require_extending_constant(instance, L_prime);
  const auto subset = instance.subset();
  const auto g = instance.values();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < subset.size(); ++p)
    best = std::max(best, g[p] - L_prime * instance.distance(subset[p], y));
  return best;
}

ExtensionModel::ExtensionModel(const MetricInstance& instance,
                               std::optional<ScaleSchedule> schedule)
    : instance_(&instance), schedule_(std::move(schedule)) {
  constant_ = instance.subset_lipschitz() == 0.0;
  if (constant_) return;
  if (!schedule_) throw InvalidArgument("a non-constant g needs a scale schedule");
  const double span = instance.diameter();
  if (!(schedule_->epsilon(schedule_->k_max) > span))
    throw InvalidArgument("schedule does not span the instance (eps_k_max <= diameter)");
  const double L = instance.lipschitz();
  for (Index x : instance.subset()) {
    slope_maps_.push_back(approx_slopes(instance, x, *schedule_));
    profiles_.push_back(build_penalization(slope_maps_.back(), *schedule_, L));
  }
}

ExtensionModel::ExtensionModel(const MetricInstance& instance,
                               std::optional<ScaleSchedule> schedule,
                               std::vector<PenalizationProfile> profiles)
    : instance_(&instance), schedule_(std::move(schedule)), profiles_(std::move(profiles)) {
  if (profiles_.size() != instance.subset().size())
    throw InvalidArgument("need exactly one profile per subset point");
  for (std::size_t p = 0; p < profiles_.size(); ++p)
    if (profiles_[p].anchor != instance.subset()[p])
      throw InvalidArgument("profile anchors must follow the subset order");
}

double ExtensionModel::phi(std::size_t pos, Index y) const {
  if (pos >= profiles_.size()) throw InvalidArgument("phi: no profile at this subset position");
  const Index x = instance_->subset()[pos];
  return instance_->values()[pos] + eval_pen(profiles_[pos], instance_->distance(x, y));
}

std::optional<int> ExtensionModel::localization_index(Index y, Index xbar) const {
  if (!schedule_) return std::nullopt;
  const double d = instance_->distance(y, xbar);
  for (int k = schedule_->k_min + 2; k <= schedule_->k_max; ++k)
    if (d < schedule_->epsilon(k - 2)) return k;
  return std::nullopt;
}

Index ExtensionModel::nearest_anchor(Index y) const {
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index x : instance_->subset()) {
    const double d = instance_->distance(x, y);
    if (d < best_d || (d == best_d && x < best)) best = x, best_d = d;
  }
  return best;
}

std::vector<Index> ExtensionField::indices() const {
  std::vector<Index> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.index);
  return out;
}

std::vector<double> ExtensionField::values() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.value);
  return out;
}

namespace {

// Minimum of phi over the given subset positions; ties go to the lowest point index.
template <class Positions>
std::pair<double, Index> infimum(const ExtensionModel& model, Index y, const Positions& positions) {
  const auto subset = model.instance().subset();
  double best = std::numeric_limits<double>::infinity();
  Index arg = std::numeric_limits<Index>::max();
  for (std::size_t pos : positions) {
    const double v = model.phi(pos, y);
    if (v < best || (v == best && subset[pos] < arg)) best = v, arg = subset[pos];
  }
  return {best, arg};
}

struct AllPositions {
  std::size_t n;
  struct It {
    std::size_t i;
    std::size_t operator*() const { return i; }
    It& operator++() { return ++i, *this; }
    bool operator!=(const It& o) const { return i != o.i; }
  };
  It begin() const { return {0}; }
  It end() const { return {n}; }
};

ExtensionEntry constant_entry(const ExtensionModel& model, Index y) {
  const auto& inst = model.instance();
  return {y, inst.values()[0], inst.in_subset(y) ? y : model.nearest_anchor(y), std::nullopt};
}

ExtensionEntry evaluate(const ExtensionModel& model, Index y) {
  if (model.is_constant()) return constant_entry(model, y);
  const auto [value, arg] = infimum(model, y, AllPositions{model.instance().subset().size()});
  ExtensionEntry e{y, value, arg, std::nullopt};
  const Index xbar = model.nearest_anchor(y);
  if (auto k = model.localization_index(y, xbar)) e.localization = Localization{*k, xbar};
  return e;
}

}  // namespace

ExtensionField extend(const ExtensionModel& model, std::span<const Index> queries,
                      unsigned threads) {
  const auto& inst = model.instance();
  for (Index y : queries)
    if (y >= inst.size()) throw InvalidArgument("query index out of range");

  ExtensionField field;
  field.entries.resize(queries.size());
  field.constant = model.is_constant();
  if (model.schedule()) {
    field.epsilon = model.schedule()->eps_eff;
    field.schedule_id = model.schedule()->id();
  }

  const std::size_t n = queries.size();
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  auto run = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) field.entries[i] = evaluate(model, queries[i]);
  };
  if (workers == 1) {
    run(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return field;
}

LocalizedValue extend_localized(const ExtensionModel& model, Index y, Index xbar) {
  const auto& inst = model.instance();
  if (y >= inst.size()) throw InvalidArgument("query index out of range");
  if (!inst.in_subset(xbar)) throw InvalidArgument("extend_localized: xbar must belong to C");
  if (model.is_constant()) {
    const auto e = constant_entry(model, y);
    return {e.value, e.argmin_anchor, std::nullopt};
  }
  const auto k = model.localization_index(y, xbar);
  if (!k) {
    const auto [value, arg] = infimum(model, y, AllPositions{inst.subset().size()});
    return {value, arg, std::nullopt};
  }
  const double radius = model.schedule()->epsilon(*k);
  std::vector<std::size_t> positions;
  const auto subset = inst.subset();
  for (std::size_t p = 0; p < subset.size(); ++p)
    if (inst.distance(subset[p], xbar) < radius) positions.push_back(p);
  const auto [value, arg] = infimum(model, y, positions);
  return {value, arg, Localization{*k, xbar}};
}

ExtensionField truncate_bounded(ExtensionField field, const MetricInstance& instance,
                                double bound) {
  if (!(bound > 0.0)) throw InvalidArgument("bound must be positive");
  if (bound < instance.max_abs_value())
    throw InvalidArgument("bound below sup |g|: truncation would change the restriction to C");
  for (auto& e : field.entries) e.value = std::clamp(e.value, -bound, bound);
  field.bound = bound;
  return field;
}

ExtensionField cutoff_support(ExtensionField field, const MetricInstance& instance,
                              double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  double M = instance.max_abs_value();
  for (const auto& e : field.entries) M = std::max(M, std::abs(e.value));
  field.cutoff = true;
  field.cutoff_scale = M;
  if (M == 0.0) return field;
  const double slope = epsilon / (2.0 * M);
  for (auto& e : field.entries) {
    const double chi = std::clamp(2.0 - slope * instance.distance_to_subset(e.index), 0.0, 1.0);
    e.value *= chi;
  }
  return field;
}

}  // namespace lipext
