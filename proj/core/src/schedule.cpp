#include "lipext/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lipext {
namespace {

// Scales below this are treated as exhausting binary64.
constexpr double kEpsFloor = 1e-280;
constexpr int kExtraDepth = 6;
constexpr double kTailRelTol = 1e-12;

double effective_epsilon(double L, double epsilon) { return std::min(epsilon, L); }

void check_params(double L, double epsilon, double anchor) {
  if (!std::isfinite(L) || L < 0.0) throw InvalidArgument("L must be finite and nonnegative");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidArgument("epsilon must be positive and finite");
  if (!(anchor > 0.0) || !std::isfinite(anchor))
    throw InvalidArgument("anchor must be positive and finite");
  if (L == 0.0) throw TrivialInstance("L = 0: the constant extension applies");
}

}  // namespace

double design_ratio(double r_star, int k, int k_ref) noexcept {
  return std::ldexp(r_star, std::min(k - k_ref, 0));
}

double ScaleSchedule::epsilon(int k) const {
  if (!contains(k)) {
    std::ostringstream os;
    os << "scale index " << k << " outside stored window [" << k_min << ", " << k_max << "]";
    throw ScheduleExhausted(os.str(), std::min(k, k_min));
  }
  return eps[static_cast<std::size_t>(k - k_min)];
}

double ScaleSchedule::ratio(int k) const {
  if (k <= k_min || k > k_max) {
    std::ostringstream os;
    os << "ratio index " << k << " outside stored window (" << k_min << ", " << k_max << "]";
    throw ScheduleExhausted(os.str(), std::min(k - 1, k_min));
  }
  return ratios[static_cast<std::size_t>(k - k_min)];
}

std::string ScaleSchedule::id() const {
  std::ostringstream os;
  os.precision(17);
  os << "L=" << L_eff << ";eps=" << eps_eff << ";anchor=" << anchor << ";k=[" << k_min << ","
     << k_max << "]";
  return os.str();
}

ScaleSchedule build_schedule_range(double L, double epsilon, double anchor, int k_min,
                                   int k_max) {
  check_params(L, epsilon, anchor);
  if (!(k_min < 0 && k_max > 0)) throw InvalidArgument("window must satisfy k_min < 0 < k_max");

  ScaleSchedule s;
  s.k_min = k_min;
  s.k_max = k_max;
  s.k_ref = 0;
  s.L_eff = L;
  s.eps_eff = effective_epsilon(L, epsilon);
  s.r_star = s.eps_eff / (3.0 * (L + s.eps_eff));
  s.anchor = anchor;

  const auto size = static_cast<std::size_t>(k_max - k_min + 1);
  s.ratios.assign(size, 0.0);
  for (int k = k_min + 1; k <= k_max; ++k)
    s.ratios[static_cast<std::size_t>(k - k_min)] = design_ratio(s.r_star, k);

  // Top value so that walking down lands on the anchor at k = 0 (up to
  // rounding); going down is then exact by construction.
  double top = anchor;
  for (int k = 1; k <= k_max; ++k) top /= s.ratios[static_cast<std::size_t>(k - k_min)];
  if (!std::isfinite(top)) throw InvalidArgument("schedule overflows: anchor or span too large");

  s.eps.assign(size, 0.0);
  s.eps[size - 1] = top;
  for (int k = k_max; k > k_min; --k) {
    const auto i = static_cast<std::size_t>(k - k_min);
    s.eps[i - 1] = s.ratios[i] * s.eps[i];
  }
  if (s.eps.front() < kEpsFloor) {
    std::ostringstream os;
    os << "extend schedule: scale index " << k_min << " underflows binary64";
    throw ScheduleExhausted(os.str(), k_min);
  }
  return s;
}

ScaleSchedule build_schedule(double L, double epsilon, double anchor, double span_low,
                             double span_high) {
  check_params(L, epsilon, anchor);
  if (!(span_low > 0.0) || !(span_high > span_low) || !std::isfinite(span_high))
    throw InvalidArgument("spans must satisfy 0 < span_low < span_high");

  const double eps_eff = effective_epsilon(L, epsilon);
  const double r_star = eps_eff / (3.0 * (L + eps_eff));

  // Size the window on the approximate recursion, then confirm on the stored values.
  int k_max = 1;
  for (double e = anchor / r_star; e < span_high; e /= r_star) ++k_max;
  int k_min = -1;
  for (double e = anchor * r_star; e > span_low; e *= design_ratio(r_star, k_min + 1)) {
    --k_min;
    if (e < kEpsFloor) {
      std::ostringstream os;
      os << "extend schedule: span_low " << span_low << " is below the representable range";
      throw ScheduleExhausted(os.str(), k_min);
    }
  }
  for (;;) {
    ScaleSchedule s = build_schedule_range(L, epsilon, anchor, k_min, k_max);
    bool grown = false;
    if (s.eps.back() < span_high) ++k_max, grown = true;
    if (s.eps.front() > span_low) --k_min, grown = true;
    if (!grown) return s;
  }
}

namespace {

bool locality_ok(double eps_k_plus_3, double ratio_k_plus_1, double r_bar, double xi, double L) {
  return eps_k_plus_3 < r_bar && 3.0 * L * ratio_k_plus_1 < xi;
}

}  // namespace

Locality locality_radius(const ScaleSchedule& schedule, double r_bar, double xi, double L) {
  if (!(r_bar > 0.0)) throw InvalidArgument("r_bar must be positive");
  if (!(xi > 0.0)) throw InvalidArgument("xi must be positive");
  if (!(L >= 0.0)) throw InvalidArgument("L must be nonnegative");

  for (int k = schedule.k_max - 3; k - 2 >= schedule.k_min; --k) {
    if (locality_ok(schedule.epsilon(k + 3), schedule.ratio(k + 1), r_bar, xi, L))
      return {k, schedule.epsilon(k - 2)};
  }

  // Continue the recursion below the window to report the depth required.
  std::vector<double> below{schedule.epsilon(schedule.k_min)};  // below[i] = eps_{k_min - i}
  auto eps_at = [&](int j) {
    if (j >= schedule.k_min) return schedule.epsilon(j);
    const auto i = static_cast<std::size_t>(schedule.k_min - j);
    while (below.size() <= i) {
      const int last = schedule.k_min - static_cast<int>(below.size()) + 1;
      below.push_back(design_ratio(schedule.r_star, last, schedule.k_ref) * below.back());
    }
    return below[i];
  };
  int required = schedule.k_min;
  for (int k = std::min(schedule.k_max - 3, schedule.k_min + 1);; --k) {
    if (eps_at(k - 2) < kEpsFloor ||
        locality_ok(eps_at(k + 3), design_ratio(schedule.r_star, k + 1, schedule.k_ref), r_bar,
                    xi, L)) {
      required = k - 2;
      break;
    }
  }
  std::ostringstream os;
  os << "extend schedule: locality radius for r_bar=" << r_bar << ", xi=" << xi
     << " needs k_min <= " << required << " (stored k_min = " << schedule.k_min << ")";
  throw ScheduleExhausted(os.str(), required);
}

ScaleSchedule plan_schedule(const MetricInstance& instance, const ScheduleRequest& request) {
  const double L = instance.lipschitz();
  const double base = instance.diameter() > 0.0 ? instance.diameter() : 1.0;
  const double anchor = request.anchor.value_or(base);
  check_params(L, request.epsilon, anchor);

  double low = instance.min_positive_distance() > 0.0 ? instance.min_positive_distance() : base;
  for (const auto& q : request.locality) {
    if (!(q.r_bar > 0.0)) throw InvalidArgument("r_bar must be positive");
    if (!(q.xi > 0.0)) throw InvalidArgument("xi must be positive");
    low = std::min(low, q.r_bar);
  }

  ScaleSchedule s = build_schedule(L, request.epsilon, anchor, low / 64.0, 2.0 * base);
  int k_max = s.k_max;
  while (s.epsilon(k_max - 2) < 2.0 * base) {
    ++k_max;
    s = build_schedule_range(L, request.epsilon, anchor, s.k_min, k_max);
  }

  int k_need = s.k_min;
  for (const auto& q : request.locality) {
    try {
      locality_radius(s, q.r_bar, q.xi, L);
    } catch (const ScheduleExhausted& e) {
      k_need = std::min(k_need, e.required_k_min());
    }
  }

  int k_min = k_need - kExtraDepth;
  auto too_deep = [&](int k) {
    if (k < -request.max_depth) {
      std::ostringstream os;
      os << "extend schedule: required depth k_min = " << k << " exceeds the limit "
         << -request.max_depth;
      throw ScheduleExhausted(os.str(), k);
    }
  };
  too_deep(k_min);
  s = build_schedule_range(L, request.epsilon, anchor, k_min, k_max);
  while (s.eps.front() * (L + s.eps_eff) > kTailRelTol * L * base) {
    too_deep(--k_min);
    s = build_schedule_range(L, request.epsilon, anchor, k_min, k_max);
  }
  return s;
}

}  // namespace lipext
