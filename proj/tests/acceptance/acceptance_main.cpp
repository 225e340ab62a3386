// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/json_io.hpp"
#include "lipext/energy.hpp"
#include "lipext/extension.hpp"
#include "lipext/schedule.hpp"
#include "lipext/verification.hpp"
#include "random_instances.hpp"

using namespace lipext;
using lipext::testing::random_cloud;
using lipext::testing::two_point_line;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ExtensionModel model_for(const MetricInstance& inst, double eps,
                         std::vector<LocalityRequest> loc = {}) {
  ScheduleRequest req;
  req.epsilon = eps;
  req.locality = std::move(loc);
  return ExtensionModel(inst, plan_schedule(inst, req));
}

std::vector<MetricInstance> criterion1_instances() {
  std::vector<MetricInstance> out;
  for (std::uint64_t s = 0; s < 50; ++s) out.push_back(random_cloud(1000 + s));
  return out;
}

const std::vector<MetricInstance>& base_instances() {
  static const auto instances = criterion1_instances();
  return instances;
}

Outcome c1_identity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  Outcome o;
  for (const auto& inst : base_instances()) {
    const auto model = model_for(inst, inst.lipschitz());
    const auto all = inst.all_indices();
    const auto field = extend(model, all);
    const double tol = 1e-12 * (1.0 + inst.max_abs_value());
    for (std::size_t i = 0; i < inst.subset().size(); ++i) {
      const double err = std::abs(field.entries[inst.subset()[i]].value - inst.values()[i]);
      worst = std::max(worst, err / tol);
      if (err > tol) o.pass = false;
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 10.0) o.pass = false;
  o.detail = fmt("50 instances, worst |f-g|/tol = %.3g, %.2f s", worst, secs);
  return o;
}

Outcome c2_budget() {
  Outcome o;
  double worst = -1e300;
  std::size_t runs = 0;
  for (const auto& inst : base_instances()) {
    const double L = inst.lipschitz();
    for (double eps : {L, L / 2.0, L / 10.0}) {
      const auto model = model_for(inst, eps);
      const auto all = inst.all_indices();
      const auto field = extend(model, all);
      const auto f = field.values();
      const double lip = lip_constant(inst, f, all);
      worst = std::max(worst, lip - (L + eps));
      if (lip > L + eps + kInequalityTolerance) o.pass = false;
      ++runs;
    }
  }
  o.detail = fmt("%.0f runs, exhaustive pairs, max Lip(f) - (L+eps) = %.3g", double(runs), worst);
  return o;
}

Outcome c3_two_point_line() {
  const auto t0 = Clock::now();
  Outcome o;
  const auto inst = two_point_line(1001);
  const double xi = 0.1, r_bar = 0.5;
  const auto model = model_for(inst, 1.0, {{r_bar, xi}});
  const auto all = inst.all_indices();
  const auto field = extend(model, all);
  const double h = 1.0 / 1000.0;
  const std::vector<double> radii{1.5 * h, 0.01, 0.1, 0.3, 0.5, 0.9};
  const std::vector<Index> centers{0};
  const auto cmp = mcshane_comparison(model, field, centers, radii, r_bar, xi);
  const auto& row = cmp.rows.front();
  double mc_dev = 0.0;
  for (double v : row.mcshane.constants) mc_dev = std::max(mc_dev, std::abs(v - 1.0));
  if (mc_dev > 1e-12) o.pass = false;
  if (!row.scheduled || row.scheduled_bound != xi) o.pass = false;
  if (row.extension_at_scheduled > xi) o.pass = false;
  const double secs = seconds_since(t0);
  if (secs >= 1.0) o.pass = false;
  std::ostringstream d;
  d << "McShane max|Lip-1| = " << mc_dev << " over " << radii.size()
    << " radii; extension Lip at r=" << (row.scheduled ? row.scheduled->r : 0.0) << " is "
    << row.extension_at_scheduled << " <= " << row.scheduled_bound << "; " << secs << " s";
  o.detail = d.str();
  return o;
}

Outcome c4_cone_separation() {
  Outcome o;
  std::size_t pairs = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = random_cloud(2000 + s);
    const auto model = model_for(inst, inst.lipschitz());
    const auto res = check_cone_separation(model);
    if (!res.passed()) {
      o.pass = false;
      o.detail = "seed " + std::to_string(2000 + s) + ": " + to_string(res.status) + " " + res.note;
      return o;
    }
    pairs += inst.subset().size() * (inst.subset().size() - 1);
  }
  o.detail = fmt("20 instances, %.0f ordered pairs in C", double(pairs));
  return o;
}

Outcome c5_localization() {
  Outcome o;
  std::size_t queries = 0;
  for (const auto& inst : base_instances()) {
    const auto model = model_for(inst, inst.lipschitz());
    const auto all = inst.all_indices();
    const auto field = extend(model, all);
    const auto res = check_localization(model, field);
    if (!res.passed()) {
      o.pass = false;
      o.detail = res.note;
      return o;
    }
    queries += all.size();
  }
  o.detail = fmt("%.0f queries bit-identical, exclusion margins hold", double(queries));
  return o;
}

Outcome c6_sandwich() {
  Outcome o;
  std::size_t runs = 0;
  for (const auto& inst : base_instances()) {
    const double L = inst.lipschitz();
    for (double eps : {L, L / 2.0, L / 10.0}) {
      const auto model = model_for(inst, eps);
      const auto all = inst.all_indices();
      const auto res = check_envelope_sandwich(extend(model, all), inst, L + eps);
      if (!res.passed()) {
        o.pass = false;
        o.detail = res.note;
        return o;
      }
      ++runs;
    }
  }
  o.detail = fmt("%.0f runs, every point within the (L+eps) envelopes", double(runs));
  return o;
}

Outcome c7_profiles() {
  Outcome o;
  std::size_t profiles = 0;
  for (const auto& inst : base_instances()) {
    const double L = inst.lipschitz();
    for (double eps : {L, L / 10.0}) {
      const auto model = model_for(inst, eps);
      const auto res = check_profiles(model, L + eps);
      if (!res.passed()) {
        o.pass = false;
        o.detail = res.note;
        return o;
      }
      profiles += model.profiles().size();
    }
  }
  o.detail = fmt("%.0f profiles legal", double(profiles));
  return o;
}

Outcome c8_cutoff() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("lipext_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  // Cluster C in the unit square; a ray of far points runs out to distance 40.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  cli::Json doc;
  cli::Json coords = cli::Json::array();
  std::vector<double> values;
  std::vector<std::size_t> subset;
  for (int i = 0; i < 12; ++i) {
    const double x = unit(rng), y = unit(rng);
    coords.push_back({x, y});
    subset.push_back(coords.size() - 1);
    values.push_back(0.8 * x - 0.5 * y + 0.1 * std::sin(7.0 * x));
  }
  for (int i = 0; i < 20; ++i) coords.push_back({unit(rng), unit(rng)});
  for (int i = 1; i <= 60; ++i) coords.push_back({1.0 + 0.65 * i, 0.3 + 0.01 * unit(rng)});
  doc["points"] = {{"type", "euclidean"}, {"coords", coords}};
  doc["subset"] = subset;
  doc["values"] = values;
  const auto in_path = (dir / "cutoff.json").string();
  const auto out_path = (dir / "cutoff_out.json").string();
  std::ofstream(in_path) << doc.dump();

  const double bound = *std::max_element(values.begin(), values.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  });
  const double B = std::abs(bound);
  const auto loaded = cli::load_instance(in_path);
  const auto& inst = loaded.instance;
  const double L = inst.lipschitz();
  const double eps = L / 2.0;

  std::ostringstream sink_out, sink_err;
  std::ostringstream b, e;
  b.precision(17);
  e.precision(17);
  b << B;
  e << eps;
  const int code = cli::run({"extend", "--input", in_path, "--epsilon", e.str(), "--queries", "all",
                             "--bounded", b.str(), "--cutoff", "--output", out_path},
                            sink_out, sink_err);
  if (code != 0) {
    o.pass = false;
    o.detail = "extend --cutoff exited " + std::to_string(code) + ": " + sink_out.str();
    fs::remove_all(dir);
    return o;
  }
  cli::Json out;
  std::ifstream(out_path) >> out;
  fs::remove_all(dir);

  const double M = out.at("cutoff_scale").get<double>();
  std::vector<double> f(inst.size());
  for (const auto& entry : out.at("entries")) f[entry.at("index").get<std::size_t>()] = entry.at("value").get<double>();

  std::size_t zeroed = 0, far = 0;
  for (Index y = 0; y < inst.size(); ++y) {
    if (inst.distance_to_subset(y) >= 4.0 * M / eps) {
      ++far;
      if (f[y] != 0.0) o.pass = false;
      else ++zeroed;
    }
  }
  if (far == 0) o.pass = false;  // the support claim would be vacuous
  double restr = 0.0;
  for (std::size_t i = 0; i < inst.subset().size(); ++i)
    restr = std::max(restr, std::abs(f[inst.subset()[i]] - inst.values()[i]));
  if (restr > 1e-12 * (1.0 + inst.max_abs_value())) o.pass = false;
  const auto all = inst.all_indices();
  const double lip = lip_constant(inst, f, all);
  const double displayed = eps / (2.0 * M) * M + L + eps / 2.0;
  if (lip > L + eps + kInequalityTolerance || lip > displayed + kInequalityTolerance) o.pass = false;
  std::ostringstream d;
  d << far << " points beyond 4M/eps=" << 4.0 * M / eps << " (" << zeroed << " zero); max|f-g| on C = "
    << restr << "; Lip = " << lip << " <= " << displayed;
  o.detail = d.str();
  return o;
}

Outcome c9_energy() {
  Outcome o;
  std::size_t checks = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = random_cloud(3000 + s, {20, 120, 2, 30, 1, 4});
    std::mt19937_64 rng(9000 + s);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    MeasureData measure;
    measure.masses.assign(inst.size(), 0.0);
    for (Index c : inst.subset()) measure.masses[c] = 0.05 + unit(rng);

    // Random Lipschitz h on X built from the coordinates.
    const auto& pts = std::get<EuclideanPoints>(inst.geometry()).coords;
    const std::size_t dim = pts.front().size();
    std::vector<double> a(dim), w(dim);
    for (auto& x : a) x = 2.0 * unit(rng) - 1.0;
    for (auto& x : w) x = 1.0 + 8.0 * unit(rng);
    std::vector<double> h(inst.size());
    for (Index y = 0; y < inst.size(); ++y)
      for (std::size_t d = 0; d < dim; ++d) h[y] += a[d] * std::cos(w[d] * pts[y][d]);

    std::vector<double> radii;
    for (int i = 0; i < 10; ++i) radii.push_back(inst.diameter() * (0.02 + 0.98 * unit(rng)));
    const std::vector<double> r_bars{0.2 * inst.diameter(), 0.5 * inst.diameter()};
    const double xi = 0.05;
    std::vector<LocalityRequest> loc;
    for (double rb : r_bars) loc.push_back({rb, xi});

    for (double p : {1.0, 2.0}) {
      measure.p = p;
      const auto mono = check_restriction_monotonicity(inst, h, measure, radii);
      if (!mono.check.passed()) {
        o.pass = false;
        o.detail = "monotonicity, seed " + std::to_string(3000 + s) + ": " + mono.check.note;
        return o;
      }
      const auto model = model_for(inst, inst.lipschitz(), loc);
      const auto all = inst.all_indices();
      const auto field = extend(model, all);
      const auto ext = check_extension_energy(model, field, measure, r_bars, xi);
      if (!ext.check.passed()) {
        o.pass = false;
        o.detail = "extension energy, seed " + std::to_string(3000 + s) + ": " + ext.check.note;
        return o;
      }
      checks += radii.size() + r_bars.size();
    }
  }
  o.detail = fmt("20 instances x p in {1,2}: %.0f energy comparisons", double(checks));
  return o;
}

Outcome c10_schedule() {
  Outcome o;
  std::mt19937_64 rng(4242);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
  };
  std::size_t scales = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double L = log_uniform(1e-3, 1e3);
    const double eps = L * log_uniform(1e-3, 1e1);
    const double anchor = log_uniform(1e-2, 1e2);
    const auto s = build_schedule(L, eps, anchor, anchor * 1e-8, anchor * 1e4);
    const auto res = check_schedule_laws(s);
    if (!res.passed()) {
      o.pass = false;
      o.detail = "trial " + std::to_string(trial) + ": " + res.note;
      return o;
    }
    const double cap = eps / (3.0 * (L + eps));
    for (int k = s.k_min + 1; k <= s.k_max; ++k) {
      const double r = s.ratio(k);
      bool ok = r <= cap && s.epsilon(k - 1) == r * s.epsilon(k);
      if (k > s.k_min + 1) ok = ok && s.ratio(k - 1) <= r;
      if (k >= s.k_min + 2) ok = ok && 3.0 * s.epsilon(k - 2) <= s.epsilon(k - 1);
      if (!ok) {
        o.pass = false;
        o.detail = "trial " + std::to_string(trial) + " k=" + std::to_string(k);
        return o;
      }
      ++scales;
    }
  }
  o.detail = fmt("100 (L, eps) pairs, %.0f stored ratios", double(scales));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"extension identity", c1_identity},
      {"global budget", c2_budget},
      {"two-point line locality", c3_two_point_line},
      {"cone separation", c4_cone_separation},
      {"localization equivalence", c5_localization},
      {"envelope sandwich", c6_sandwich},
      {"profile legality", c7_profiles},
      {"cutoff composition", c8_cutoff},
      {"energy integrands", c9_energy},
      {"schedule laws", c10_schedule},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << (i + 1) << " [" << criteria[i].first << "]: "
              << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
