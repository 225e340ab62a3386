#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "json_io.hpp"
#include "lipext/energy.hpp"
#include "lipext/extension.hpp"
#include "lipext/schedule.hpp"
#include "lipext/verification.hpp"

namespace lipext::cli {

unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LIPEXT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

namespace {

std::vector<Index> parse_queries(const std::string& spec, const MetricInstance& inst) {
  if (spec.empty()) return inst.complement_indices();
  if (spec == "all") return inst.all_indices();
  std::vector<Index> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 0 || static_cast<std::size_t>(v) >= inst.size())
      throw InvalidArgument("--queries: bad index \"" + item + "\"");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

std::optional<ScaleSchedule> schedule_for(const MetricInstance& inst, double epsilon,
                                          std::optional<double> anchor,
                                          std::vector<LocalityRequest> locality = {}) {
  if (inst.lipschitz() == 0.0) return std::nullopt;
  ScheduleRequest req;
  req.epsilon = epsilon;
  req.anchor = anchor;
  req.locality = std::move(locality);
  return plan_schedule(inst, req);
}

double default_xi(const MetricInstance& inst) {
  return inst.lipschitz() > 0.0 ? 0.1 * inst.lipschitz() : 0.1;
}

// Lower quartile of the positive distances within C.
double default_rbar(const MetricInstance& inst) {
  const auto c = inst.subset();
  std::vector<double> d;
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = a + 1; b < c.size(); ++b) d.push_back(inst.distance(c[a], c[b]));
  if (d.empty()) return inst.diameter() > 0.0 ? inst.diameter() : 1.0;
  const auto q = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 4);
  std::nth_element(d.begin(), q, d.end());
  return *q;
}

void require_positive(double v, const char* flag) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InvalidArgument(std::string(flag) + " must be positive and finite");
}

Json summary(const char* command, const std::string& output, bool passed) {
  return Json{{"command", command}, {"output", output}, {"passed", passed}};
}

int cmd_validate(const std::string& input, std::ostream& out) {
  const auto loaded = load_instance(input);
  const auto& inst = loaded.instance;
  Json ok;
  ok["valid"] = true;
  ok["points"] = inst.size();
  ok["subset_size"] = inst.subset().size();
  ok["lipschitz"] = inst.lipschitz();
  ok["subset_lipschitz"] = inst.subset_lipschitz();
  ok["diameter"] = inst.diameter();
  out << ok.dump() << '\n';
  return kOk;
}

struct ExtendArgs {
  std::string input, output, queries;
  double epsilon = 0.0;
  std::optional<double> anchor, bounded;
  bool cutoff = false;
};

int cmd_extend(const ExtendArgs& a, std::ostream& out) {
  require_positive(a.epsilon, "--epsilon");
  if (a.anchor) require_positive(*a.anchor, "--anchor");
  const auto loaded = load_instance(a.input);
  const auto& inst = loaded.instance;
  const auto queries = parse_queries(a.queries, inst);

  // With --cutoff the extension is built with half the budget; chi spends the rest.
  const double build_eps = a.cutoff ? a.epsilon / 2.0 : a.epsilon;
  const ExtensionModel model(inst, schedule_for(inst, build_eps, a.anchor));
  ExtensionField field = extend(model, queries, thread_cap());
  if (a.bounded) field = truncate_bounded(std::move(field), inst, *a.bounded);
  if (a.cutoff) field = cutoff_support(std::move(field), inst, a.epsilon);

  Json doc = to_json(field);
  doc["requested_epsilon"] = a.epsilon;
  doc["lipschitz"] = inst.lipschitz();
  doc["budget"] = inst.lipschitz() + a.epsilon;
  doc["schedule"] = model.schedule() ? to_json(*model.schedule()) : Json(nullptr);
  write_json(a.output, doc);
  out << summary("extend", a.output, true).dump() << '\n';
  return kOk;
}

struct VerifyArgs {
  std::string input, output;
  double epsilon = 0.0;
  std::optional<double> xi, rbar, anchor;
  std::uint64_t seed = 0;
  std::size_t max_pairs = kExhaustivePairLimit;
  std::optional<Index> tamper_index;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  require_positive(a.epsilon, "--epsilon");
  const auto loaded = load_instance(a.input);
  const auto& inst = loaded.instance;
  BatteryOptions opt;
  opt.epsilon = a.epsilon;
  opt.xi = a.xi.value_or(default_xi(inst));
  opt.r_bar = a.rbar.value_or(default_rbar(inst));
  require_positive(opt.xi, "--xi");
  require_positive(opt.r_bar, "--rbar");
  opt.anchor = a.anchor;
  opt.scan = PairScan{a.max_pairs, a.seed};
  opt.threads = thread_cap();
  if (a.tamper_index) {
    const Index t = *a.tamper_index;
    if (t >= inst.size()) throw InvalidArgument("--tamper-index out of range");
    opt.tamper = [t](ExtensionField& f) {
      for (auto& e : f.entries)
        if (e.index == t) e.value += 1.0;
    };
  }
  const auto report = run_battery(inst, opt);
  Json doc = to_json(report);
  doc["xi"] = opt.xi;
  doc["r_bar"] = opt.r_bar;
  doc["seed"] = a.seed;
  write_json(a.output, doc);
  out << summary("verify", a.output, report.all_passed()).dump() << '\n';
  return report.all_passed() ? kOk : kCheckFailed;
}

struct EnergyArgs {
  std::string input, output;
  double p = 0.0;
  std::vector<double> radii;
  std::optional<double> xi, epsilon;
};

int cmd_energy(const EnergyArgs& a, std::ostream& out) {
  if (!(a.p >= 1.0) || !std::isfinite(a.p)) throw InvalidArgument("--p must be >= 1");
  if (a.radii.empty()) throw InvalidArgument("--radii must list at least one radius");
  for (double r : a.radii) require_positive(r, "--radii");
  const auto loaded = load_instance(a.input);
  const auto& inst = loaded.instance;

  MeasureData measure;
  measure.p = a.p;
  if (loaded.masses) {
    measure.masses = *loaded.masses;
  } else {
    measure.masses.assign(inst.size(), 0.0);
    for (Index c : inst.subset()) measure.masses[c] = 1.0;
  }
  validate_measure(inst, measure);

  const double xi = a.xi.value_or(default_xi(inst));
  require_positive(xi, "--xi");
  const double epsilon = a.epsilon.value_or(inst.lipschitz() > 0.0 ? inst.lipschitz() : 1.0);
  require_positive(epsilon, "--epsilon");

  std::vector<LocalityRequest> loc;
  for (double r : a.radii) loc.push_back({r, xi});
  const ExtensionModel model(inst, schedule_for(inst, epsilon, std::nullopt, loc));
  const auto all = inst.all_indices();
  const auto field = extend(model, all, thread_cap());
  const auto f = field.values();

  std::vector<double> mcshane(inst.size());
  for (Index y = 0; y < inst.size(); ++y) mcshane[y] = mcshane_upper(inst, inst.lipschitz(), y);

  auto monotonicity_json = [&](const char* name, const std::vector<double>& h) {
    const auto res = check_restriction_monotonicity(inst, h, measure, a.radii);
    Json rows = Json::array();
    for (std::size_t i = 0; i < a.radii.size(); ++i)
      rows.push_back(Json{{"radius", a.radii[i]},
                          {"E_X", to_json(res.on_x[i])},
                          {"E_C", to_json(res.on_c[i])}});
    return std::pair{res.check.passed(),
                     Json{{"function", name}, {"check", to_json(res.check)}, {"reports", rows}}};
  };
  const auto [mono_f_ok, mono_f] = monotonicity_json("extension", f);
  const auto [mono_m_ok, mono_m] = monotonicity_json("mcshane_upper", mcshane);

  const auto ext = check_extension_energy(model, field, measure, a.radii, xi);
  Json ext_rows = Json::array();
  for (const auto& row : ext.rows)
    ext_rows.push_back(Json{{"r_bar", row.r_bar},
                            {"r", row.r},
                            {"E_X", to_json(row.on_x)},
                            {"bound", row.bound},
                            {"E_C_rbar", to_json(row.on_c_rbar)}});

  const bool passed = mono_f_ok && mono_m_ok && ext.check.passed();
  Json doc;
  doc["schema"] = kEnergySchema;
  doc["mode"] = "integrand-level verification";
  doc["p"] = a.p;
  doc["xi"] = xi;
  doc["epsilon"] = epsilon;
  doc["passed"] = passed;
  doc["restriction_monotonicity"] = Json::array({mono_f, mono_m});
  doc["extension_energy"] = Json{{"check", to_json(ext.check)}, {"rows", ext_rows}};
  write_json(a.output, doc);
  out << summary("energy", a.output, passed).dump() << '\n';
  return passed ? kOk : kCheckFailed;
}

struct DemoArgs {
  long n = 1001;
  double epsilon = 1.0;
  double xi = 0.1;
  double rbar = 0.5;
  std::string output;
};

int cmd_demo(const DemoArgs& a, std::ostream& out) {
  if (a.n < 2) throw InvalidArgument("--n must be at least 2");
  require_positive(a.epsilon, "--epsilon");
  require_positive(a.xi, "--xi");
  require_positive(a.rbar, "--rbar");

  const auto n = static_cast<std::size_t>(a.n);
  RawInstance raw;
  EuclideanPoints pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.coords.push_back({static_cast<double>(i) / static_cast<double>(n - 1)});
  raw.geometry = std::move(pts);
  raw.subset = {0, n - 1};
  raw.values = {0.0, 1.0};
  const auto inst = validate_instance(std::move(raw));

  const ExtensionModel model(inst, schedule_for(inst, a.epsilon, std::nullopt, {{a.rbar, a.xi}}));
  const auto field = extend(model, inst.all_indices(), thread_cap());

  // Radii that resolve at least one grid step.
  const double h = 1.0 / static_cast<double>(n - 1);
  std::vector<double> radii{1.5 * h};
  for (double r : {0.1, 0.3, 0.5})
    if (r > h) radii.push_back(r);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  const std::vector<Index> centers{0, n - 1};
  const auto cmp = mcshane_comparison(model, field, centers, radii, a.rbar, a.xi);

  bool passed = true;
  std::ostringstream table;
  table << std::setprecision(6);
  table << "two-point interval instance: n=" << n << " C={0,1} g=id L=" << inst.lipschitz()
        << " epsilon=" << a.epsilon << " xi=" << a.xi << " r_bar=" << a.rbar << "\n";
  for (const auto& row : cmp.rows) {
    table << "center " << row.center << "\n";
    table << "  " << std::setw(14) << "radius" << std::setw(14) << "mcshane" << std::setw(14)
          << "extension" << "\n";
    for (std::size_t j = 0; j < radii.size(); ++j) {
      table << "  " << std::setw(14) << radii[j] << std::setw(14) << row.mcshane.constants[j]
            << std::setw(14) << row.extension.constants[j] << "\n";
      if (std::abs(row.mcshane.constants[j] - 1.0) > 1e-12) passed = false;
    }
    const double r = row.scheduled ? row.scheduled->r : a.rbar;
    table << "  scheduled r=" << r;
    if (row.scheduled) table << " (k=" << row.scheduled->k << ")";
    table << ": extension " << row.extension_at_scheduled << " <= bound " << row.scheduled_bound
          << "\n";
    if (row.extension_at_scheduled > row.scheduled_bound + kInequalityTolerance) passed = false;
  }
  table << (passed ? "PASS" : "FAIL") << "\n";
  out << table.str();

  if (!a.output.empty()) {
    Json rows = Json::array();
    for (const auto& row : cmp.rows)
      rows.push_back(Json{{"center", row.center},
                          {"mcshane", to_json(row.mcshane)},
                          {"extension", to_json(row.extension)},
                          {"scheduled_r", row.scheduled ? Json(row.scheduled->r) : Json(nullptr)},
                          {"scheduled_k", row.scheduled ? Json(row.scheduled->k) : Json(nullptr)},
                          {"extension_at_scheduled", row.extension_at_scheduled},
                          {"mcshane_at_scheduled", row.mcshane_at_scheduled},
                          {"scheduled_bound", row.scheduled_bound}});
    Json doc{{"schema", kDemoSchema}, {"n", n},           {"epsilon", a.epsilon},
             {"xi", a.xi},            {"r_bar", a.rbar}, {"passed", passed},
             {"rows", rows}};
    write_json(a.output, doc);
  }
  return passed ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lipschitz extensions on finite metric spaces"};
  app.require_subcommand(1);

  std::string validate_input;
  auto* validate = app.add_subcommand("validate", "Validate an instance file");
  validate->add_option("--input", validate_input, "Instance JSON")->required();

  ExtendArgs ea;
  auto* ext = app.add_subcommand("extend", "Evaluate the extension at query points");
  ext->add_option("--input", ea.input, "Instance JSON")->required();
  ext->add_option("--epsilon", ea.epsilon, "Lipschitz budget increment")->required();
  ext->add_option("--queries", ea.queries, "Comma-separated indices or 'all' (default: X \\ C)");
  ext->add_option("--anchor", ea.anchor, "Reference scale eps_0 (default: diameter)");
  ext->add_option("--bounded", ea.bounded, "Clamp values to [-B, B]");
  ext->add_flag("--cutoff", ea.cutoff, "Multiply by a cutoff so the result has bounded support");
  ext->add_option("--output", ea.output, "Output JSON")->required();

  VerifyArgs va;
  std::optional<std::size_t> tamper;
  auto* ver = app.add_subcommand("verify", "Run the full check battery");
  ver->add_option("--input", va.input, "Instance JSON")->required();
  ver->add_option("--epsilon", va.epsilon, "Lipschitz budget increment")->required();
  ver->add_option("--xi", va.xi, "Locality slack (default: 0.1 L)");
  ver->add_option("--rbar", va.rbar, "Locality radius (default: lower quartile of C distances)");
  ver->add_option("--anchor", va.anchor, "Reference scale eps_0 (default: diameter)");
  ver->add_option("--seed", va.seed, "Seed for pair subsampling");
  ver->add_option("--max-pairs", va.max_pairs, "Exhaustive pair-scan limit");
  ver->add_option("--output", va.output, "Report JSON")->required();
  ver->add_option("--tamper-index", tamper, "Corrupt f at this index before checking")->group("");

  EnergyArgs na;
  auto* en = app.add_subcommand("energy", "Scale-indexed energy comparisons on X and C");
  en->add_option("--input", na.input, "Instance JSON")->required();
  en->add_option("--p", na.p, "Exponent p >= 1")->required();
  en->add_option("--radii", na.radii, "Comma-separated radii")->required()->delimiter(',');
  en->add_option("--xi", na.xi, "Locality slack (default: 0.1 L)");
  en->add_option("--epsilon", na.epsilon, "Budget increment for the extension (default: L)");
  en->add_option("--output", na.output, "Report JSON")->required();

  DemoArgs da;
  auto* demo = app.add_subcommand("demo-counterexample",
                                  "McShane vs. locality-preserving extension on [0,1], C={0,1}");
  demo->add_option("--n", da.n, "Grid size");
  demo->add_option("--epsilon", da.epsilon, "Lipschitz budget increment");
  demo->add_option("--xi", da.xi, "Locality slack");
  demo->add_option("--rbar", da.rbar, "Locality radius");
  demo->add_option("--output", da.output, "Optional JSON output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    out << Json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << '\n';
    err << app.help();
    return kInputError;
  }

  try {
    if (*validate) return cmd_validate(validate_input, out);
    if (*ext) return cmd_extend(ea, out);
    if (*ver) {
      va.tamper_index = tamper;
      return cmd_verify(va, out);
    }
    if (*en) return cmd_energy(na, out);
    if (*demo) return cmd_demo(da, out);
  } catch (const Error& e) {
    out << error_json(e).dump() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    out << error_json(e).dump() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace lipext::cli
