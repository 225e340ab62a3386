#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lipext/errors.hpp"

namespace lipext {

using Index = std::size_t;

/// Points in R^dim; distances are induced by the Euclidean norm.
struct EuclideanPoints {
  std::vector<std::vector<double>> coords;
};

/// Explicit n x n distance matrix.
struct DistanceMatrix {
  std::vector<std::vector<double>> d;
};

using Geometry = std::variant<EuclideanPoints, DistanceMatrix>;

/// Unvalidated input, as parsed from a file or assembled by a caller.
struct RawInstance {
  Geometry geometry;
  std::vector<Index> subset;
  std::vector<double> values;
  std::optional<double> lipschitz;
  std::vector<std::string> labels;
};

/// A finite metric space X with a nonempty subset C, samples of g on C and a
/// Lipschitz bound L >= Lip(g, C). Immutable once validated.
class MetricInstance {
 public:
  std::size_t size() const noexcept { return n_; }
  double distance(Index i, Index j) const;

  std::span<const Index> subset() const noexcept { return subset_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Geometry& geometry() const noexcept { return geometry_; }

  /// The L used by every construction (user-supplied or computed).
  double lipschitz() const noexcept { return lipschitz_; }
  /// Lip(g, C) as computed from the samples.
  double subset_lipschitz() const noexcept { return subset_lipschitz_; }

  /// Position of `i` in the subset list, if i is in C.
  std::optional<std::size_t> subset_position(Index i) const;
  bool in_subset(Index i) const { return subset_position(i).has_value(); }

  double diameter() const noexcept { return diameter_; }
  double min_positive_distance() const noexcept { return min_positive_distance_; }
  /// Largest |g(x)| over C.
  double max_abs_value() const noexcept;
  /// d(i, C).
  double distance_to_subset(Index i) const;

  std::vector<Index> all_indices() const;
  std::vector<Index> complement_indices() const;

  friend MetricInstance validate_instance(RawInstance raw);

 private:
  MetricInstance() = default;

  Geometry geometry_;
  std::size_t n_ = 0;
  std::vector<Index> subset_;
  std::vector<double> values_;
  std::vector<double> dense_;  // row-major distance cache, Euclidean only
  std::vector<std::size_t> position_;  // n_ entries, npos off the subset
  std::vector<std::string> labels_;
  double lipschitz_ = 0.0;
  double subset_lipschitz_ = 0.0;
  double diameter_ = 0.0;
  double min_positive_distance_ = 0.0;
};

/// Relative tolerance for metric-axiom checks on distance matrices.
inline constexpr double kMetricTolerance = 1e-9;

/// Checks every metric-space and sample invariant and attaches L.
/// Throws InvalidInstance naming the offending field and indices.
MetricInstance validate_instance(RawInstance raw);

/// sup over distinct pairs of A of |v(a) - v(b)| / d(a, b); 0 when |A| <= 1.
/// `values[i]` is the value at point `domain[i]`.
double lip_constant(const MetricInstance& instance, std::span<const double> values,
                    std::span<const Index> domain);

/// Members of `within` in the open ball of radius r around `center`, in the
/// order they appear in `within`.
std::vector<Index> ball_members(const MetricInstance& instance, Index center, double r,
                                std::span<const Index> within);

/// Lip over D intersected with open balls of increasing radius around x.
struct RadiusProfile {
  std::vector<double> radii;
  std::vector<double> constants;
};

/// Finite-scale surrogate of the asymptotic Lipschitz constant at x.
/// `values` is aligned with `domain`, and x must belong to `domain`.
RadiusProfile lipa_profile(const MetricInstance& instance, std::span<const double> values,
                           std::span<const Index> domain, Index x,
                           std::span<const double> radii);

}  // namespace lipext
