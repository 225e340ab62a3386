#include "lipext/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lipext {
namespace {

constexpr std::size_t kNotInSubset = std::numeric_limits<std::size_t>::max();
// Euclidean instances up to this size get a dense distance cache.
constexpr std::size_t kDenseCacheLimit = 2048;

std::string describe(const char* what, std::initializer_list<std::size_t> idx) {
  std::ostringstream os;
  os << what << " at (";
  bool first = true;
  for (auto i : idx) {
    os << (first ? "" : ",") << i;
    first = false;
  }
  os << ")";
  return os.str();
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

}  // namespace

double MetricInstance::distance(Index i, Index j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  if (!dense_.empty()) return dense_[i * n_ + j];
  if (const auto* m = std::get_if<DistanceMatrix>(&geometry_)) return m->d[i][j];
  const auto& pts = std::get<EuclideanPoints>(geometry_).coords;
  return euclidean(pts[i], pts[j]);
}

std::optional<std::size_t> MetricInstance::subset_position(Index i) const {
  if (i >= n_ || position_[i] == kNotInSubset) return std::nullopt;
  return position_[i];
}

double MetricInstance::max_abs_value() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double MetricInstance::distance_to_subset(Index i) const {
  double best = std::numeric_limits<double>::infinity();
  for (Index c : subset_) best = std::min(best, distance(i, c));
  return best;
}

std::vector<Index> MetricInstance::all_indices() const {
  std::vector<Index> out(n_);
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

std::vector<Index> MetricInstance::complement_indices() const {
  std::vector<Index> out;
  for (Index i = 0; i < n_; ++i)
    if (position_[i] == kNotInSubset) out.push_back(i);
  return out;
}

namespace {

void validate_euclidean(const EuclideanPoints& pts) {
  const auto& c = pts.coords;
  if (c.empty()) throw InvalidInstance("points", "point set is empty");
  const std::size_t dim = c.front().size();
  if (dim == 0) throw InvalidInstance("points", "coordinates have dimension 0", {0});
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].size() != dim)
      throw InvalidInstance("points", describe("inconsistent coordinate dimension", {i}), {i});
    for (double x : c[i])
      if (!std::isfinite(x))
        throw InvalidInstance("points", describe("non-finite coordinate", {i}), {i});
  }
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (!(euclidean(c[i], c[j]) > 0.0))
        throw InvalidInstance("points", describe("coincident points", {i, j}), {i, j});
}

void validate_matrix(const DistanceMatrix& m) {
  const auto& d = m.d;
  const std::size_t n = d.size();
  if (n == 0) throw InvalidInstance("points", "distance matrix is empty");
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i].size() != n)
      throw InvalidInstance("points", describe("distance matrix row has wrong length", {i}), {i});
    for (std::size_t j = 0; j < n; ++j) {
      const double v = d[i][j];
      if (!std::isfinite(v))
        throw InvalidInstance("points", describe("non-finite distance", {i, j}), {i, j});
      if (v < 0.0) throw InvalidInstance("points", describe("negative distance", {i, j}), {i, j});
      scale = std::max(scale, v);
    }
  }
  const double tol = kMetricTolerance * scale;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i][i] != 0.0)
      throw InvalidInstance("points", describe("nonzero diagonal entry", {i, i}), {i, i});
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(d[i][j] - d[j][i]) > tol)
        throw InvalidInstance("points", describe("asymmetric distance matrix", {i, j}), {i, j});
      if (!(d[i][j] > 0.0))
        throw InvalidInstance("points", describe("zero distance between distinct points", {i, j}),
                              {i, j});
    }
  }
  // Upper triangle is authoritative; see MetricInstance::distance.
  auto dist = [&](std::size_t a, std::size_t b) {
    return a == b ? 0.0 : (a < b ? d[a][b] : d[b][a]);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = i + 1; k < n; ++k)
        if (dist(i, k) > dist(i, j) + dist(j, k) + tol)
          throw InvalidInstance("points", describe("triangle inequality violated", {i, j, k}),
                                {i, j, k});
}

}  // namespace

MetricInstance validate_instance(RawInstance raw) {
  MetricInstance inst;
  if (const auto* e = std::get_if<EuclideanPoints>(&raw.geometry)) {
    validate_euclidean(*e);
    inst.n_ = e->coords.size();
  } else {
    const auto& m = std::get<DistanceMatrix>(raw.geometry);
    validate_matrix(m);
    inst.n_ = m.d.size();
  }
  inst.geometry_ = std::move(raw.geometry);
  const std::size_t n = inst.n_;

  if (raw.subset.empty()) throw InvalidInstance("subset", "subset is empty");
  inst.position_.assign(n, kNotInSubset);
  for (std::size_t p = 0; p < raw.subset.size(); ++p) {
    const Index i = raw.subset[p];
    if (i >= n) throw InvalidInstance("subset", describe("subset index out of range", {p}), {i});
    if (inst.position_[i] != kNotInSubset)
      throw InvalidInstance("subset", describe("duplicate subset index", {p}), {i});
    inst.position_[i] = p;
  }
  if (raw.values.size() != raw.subset.size()) {
    std::ostringstream os;
    os << "values has " << raw.values.size() << " entries but subset has " << raw.subset.size();
    throw InvalidInstance("values", os.str());
  }
  for (std::size_t p = 0; p < raw.values.size(); ++p)
    if (!std::isfinite(raw.values[p]))
      throw InvalidInstance("values", describe("non-finite value", {p}), {raw.subset[p]});
  if (!raw.labels.empty() && raw.labels.size() != n)
    throw InvalidInstance("labels", "labels must have one entry per point");

  inst.subset_ = std::move(raw.subset);
  inst.values_ = std::move(raw.values);
  inst.labels_ = std::move(raw.labels);

  double diam = 0.0;
  double min_pos = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double dij = inst.distance(i, j);
      diam = std::max(diam, dij);
      min_pos = std::min(min_pos, dij);
    }
  inst.diameter_ = diam;
  if (std::holds_alternative<EuclideanPoints>(inst.geometry_) && n <= kDenseCacheLimit) {
    std::vector<double> dense(n * n, 0.0);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) dense[i * n + j] = dense[j * n + i] = inst.distance(i, j);
    inst.dense_ = std::move(dense);
  }
  inst.min_positive_distance_ = std::isfinite(min_pos) ? min_pos : 0.0;

  inst.subset_lipschitz_ = lip_constant(inst, inst.values_, inst.subset_);
  if (raw.lipschitz) {
    const double L = *raw.lipschitz;
    if (!std::isfinite(L) || L < 0.0)
      throw InvalidInstance("lipschitz", "lipschitz must be a finite nonnegative number");
    if (L < inst.subset_lipschitz_) {
      std::ostringstream os;
      os.precision(17);
      os << "lipschitz " << L << " is below Lip(g, C) = " << inst.subset_lipschitz_;
      throw InvalidInstance("lipschitz", os.str());
    }
    inst.lipschitz_ = L;
  } else {
    inst.lipschitz_ = inst.subset_lipschitz_;
  }
  return inst;
}

namespace {

inline double pair_ratio(const MetricInstance& inst, double va, double vb, Index a, Index b) {
  return std::abs(va - vb) / inst.distance(a, b);
}

void check_domain(const MetricInstance& inst, std::span<const double> values,
                  std::span<const Index> domain) {
  if (values.size() != domain.size())
    throw InvalidArgument("values and domain have different lengths");
  for (Index i : domain)
    if (i >= inst.size()) throw InvalidArgument("domain index out of range");
}

}  // namespace

double lip_constant(const MetricInstance& instance, std::span<const double> values,
                    std::span<const Index> domain) {
  check_domain(instance, values, domain);
  double best = 0.0;
  for (std::size_t a = 0; a < domain.size(); ++a)
    for (std::size_t b = a + 1; b < domain.size(); ++b)
      best = std::max(best, pair_ratio(instance, values[a], values[b], domain[a], domain[b]));
  return best;
}

std::vector<Index> ball_members(const MetricInstance& instance, Index center, double r,
                                std::span<const Index> within) {
  if (center >= instance.size()) throw InvalidArgument("ball center out of range");
  if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
  std::vector<Index> out;
  for (Index i : within)
    if (instance.distance(center, i) < r) out.push_back(i);
  return out;
}

RadiusProfile lipa_profile(const MetricInstance& instance, std::span<const double> values,
                           std::span<const Index> domain, Index x,
                           std::span<const double> radii) {
  check_domain(instance, values, domain);
  if (std::find(domain.begin(), domain.end(), x) == domain.end())
    throw InvalidArgument("profile center must belong to the domain");
  for (std::size_t j = 0; j < radii.size(); ++j) {
    if (!(radii[j] > 0.0)) throw InvalidArgument("profile radii must be positive");
    if (j > 0 && !(radii[j] > radii[j - 1]))
      throw InvalidArgument("profile radii must be strictly increasing");
  }

  // Open balls around x are prefixes of the domain sorted by distance to x.
  std::vector<std::size_t> order(domain.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> dx(domain.size());
  for (std::size_t a = 0; a < domain.size(); ++a) dx[a] = instance.distance(x, domain[a]);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dx[a] < dx[b]; });

  RadiusProfile out;
  out.radii.assign(radii.begin(), radii.end());
  out.constants.reserve(radii.size());
  double current = 0.0;
  std::size_t taken = 0;
  for (double r : radii) {
    while (taken < order.size() && dx[order[taken]] < r) {
      const std::size_t a = order[taken];
      for (std::size_t t = 0; t < taken; ++t) {
        const std::size_t b = order[t];
        current = std::max(current, pair_ratio(instance, values[a], values[b], domain[a], domain[b]));
      }
      ++taken;
    }
    out.constants.push_back(current);
  }
  return out;
}

}  // namespace lipext
