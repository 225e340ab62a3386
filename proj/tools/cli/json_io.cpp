#include "json_io.hpp"

#include <fstream>
#include <sstream>

namespace lipext::cli {
namespace {

const Json& require(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw InvalidInstance(key, std::string("missing field \"") + key + "\"");
  return doc.at(key);
}

std::vector<std::vector<double>> real_rows(const Json& rows, const char* field) {
  if (!rows.is_array()) throw InvalidInstance(field, std::string(field) + " must be an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& row : rows) {
    if (!row.is_array()) throw InvalidInstance(field, std::string(field) + " rows must be arrays");
    auto& r = out.emplace_back();
    for (const auto& x : row) {
      if (!x.is_number()) throw InvalidInstance(field, std::string(field) + " entries must be numbers");
      r.push_back(x.get<double>());
    }
  }
  return out;
}

std::vector<double> reals(const Json& arr, const char* field) {
  if (!arr.is_array()) throw InvalidInstance(field, std::string(field) + " must be an array");
  std::vector<double> out;
  for (const auto& x : arr) {
    if (!x.is_number()) throw InvalidInstance(field, std::string(field) + " entries must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

LoadedInstance parse_instance(const Json& doc) {
  if (!doc.is_object()) throw InvalidInstance("", "instance document must be a JSON object");
  RawInstance raw;

  const auto& points = require(doc, "points");
  if (!points.is_object() || !points.contains("type") || !points.at("type").is_string())
    throw InvalidInstance("points", "points must be an object with a string \"type\"");
  const auto type = points.at("type").get<std::string>();
  if (type == "euclidean") {
    if (!points.contains("coords")) throw InvalidInstance("points.coords", "missing field \"coords\"");
    raw.geometry = EuclideanPoints{real_rows(points.at("coords"), "points.coords")};
  } else if (type == "matrix") {
    if (!points.contains("d")) throw InvalidInstance("points.d", "missing field \"d\"");
    raw.geometry = DistanceMatrix{real_rows(points.at("d"), "points.d")};
  } else {
    throw InvalidInstance("points.type", "points.type must be \"euclidean\" or \"matrix\"");
  }

  const auto& subset = require(doc, "subset");
  if (!subset.is_array()) throw InvalidInstance("subset", "subset must be an array");
  for (const auto& i : subset) {
    if (!i.is_number_integer() || i.get<long long>() < 0)
      throw InvalidInstance("subset", "subset entries must be nonnegative integers");
    raw.subset.push_back(i.get<Index>());
  }
  raw.values = reals(require(doc, "values"), "values");

  if (doc.contains("lipschitz")) {
    if (!doc.at("lipschitz").is_number()) throw InvalidInstance("lipschitz", "lipschitz must be a number");
    raw.lipschitz = doc.at("lipschitz").get<double>();
  }
  if (doc.contains("labels")) {
    const auto& labels = doc.at("labels");
    if (!labels.is_array()) throw InvalidInstance("labels", "labels must be an array of strings");
    for (const auto& l : labels) {
      if (!l.is_string()) throw InvalidInstance("labels", "labels must be an array of strings");
      raw.labels.push_back(l.get<std::string>());
    }
  }

  std::optional<std::vector<double>> masses;
  if (doc.contains("masses")) masses = reals(doc.at("masses"), "masses");

  LoadedInstance out{validate_instance(std::move(raw)), std::move(masses)};
  if (out.masses) {
    try {
      validate_measure(out.instance, MeasureData{*out.masses, 1.0});
    } catch (const InvalidArgument& e) {
      throw InvalidInstance("masses", e.what());
    }
  }
  return out;
}

LoadedInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("input", "cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInstance("input", std::string("malformed JSON: ") + e.what());
  }
  return parse_instance(doc);
}

Json to_json(const ScaleSchedule& s) {
  Json arr = Json::array();
  for (int k = s.k_min; k <= s.k_max; ++k) {
    Json row;
    row["k"] = k;
    row["eps_k"] = s.epsilon(k);
    row["ratio_k"] = k > s.k_min ? Json(s.ratio(k)) : Json(nullptr);
    arr.push_back(std::move(row));
  }
  Json out;
  out["id"] = s.id();
  out["k_ref"] = s.k_ref;
  out["r_star"] = s.r_star;
  out["L_eff"] = s.L_eff;
  out["eps_eff"] = s.eps_eff;
  out["anchor"] = s.anchor;
  out["scales"] = std::move(arr);
  return out;
}

Json to_json(const ExtensionField& field) {
  Json entries = Json::array();
  for (const auto& e : field.entries) {
    Json row;
    row["index"] = e.index;
    row["value"] = e.value;
    row["argmin_anchor"] = e.argmin_anchor;
    if (e.localization) {
      row["localization"] = Json{{"k", e.localization->k}, {"xbar", e.localization->xbar}};
    } else {
      row["localization"] = "full";
    }
    entries.push_back(std::move(row));
  }
  Json out;
  out["schema"] = kExtensionSchema;
  out["epsilon"] = field.epsilon;
  out["schedule_id"] = field.schedule_id;
  out["mode"] = field.constant ? "constant" : "penalized";
  out["bounded"] = field.bound ? Json(*field.bound) : Json(nullptr);
  out["cutoff"] = field.cutoff;
  out["cutoff_scale"] = field.cutoff_scale ? Json(*field.cutoff_scale) : Json(nullptr);
  out["entries"] = std::move(entries);
  return out;
}

Json to_json(const CheckResult& c) {
  Json out;
  out["name"] = c.name;
  out["status"] = to_string(c.status);
  out["tolerance"] = c.tolerance;
  out["coverage"] = c.coverage;
  if (c.witness) {
    Json w;
    w["points"] = c.witness->points;
    w["k"] = c.witness->scale_index ? Json(*c.witness->scale_index) : Json(nullptr);
    w["measured"] = c.witness->measured;
    w["allowed"] = c.witness->allowed;
    out["witness"] = std::move(w);
  } else {
    out["witness"] = nullptr;
  }
  out["note"] = c.note;
  return out;
}

Json to_json(const VerificationReport& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks) checks.push_back(to_json(c));
  Json out;
  out["schema"] = kVerificationSchema;
  out["passed"] = report.all_passed();
  out["lipschitz"] = report.lipschitz;
  out["epsilon"] = report.epsilon;
  out["checks"] = std::move(checks);
  out["schedule"] = report.schedule ? to_json(*report.schedule) : Json(nullptr);
  return out;
}

Json to_json(const EnergyReport& r) {
  Json out;
  out["radius"] = r.radius;
  out["total"] = r.total;
  out["support"] = r.support;
  out["contributions"] = r.contributions;
  return out;
}

Json to_json(const RadiusProfile& p) {
  return Json{{"radii", p.radii}, {"constants", p.constants}};
}

Json error_json(const std::exception& e) {
  Json err;
  if (const auto* ii = dynamic_cast<const InvalidInstance*>(&e)) {
    err["kind"] = "invalid_instance";
    err["field"] = ii->field();
    err["witness"] = ii->witness();
  } else if (const auto* se = dynamic_cast<const ScheduleExhausted*>(&e)) {
    err["kind"] = "schedule_exhausted";
    err["required_k_min"] = se->required_k_min();
  } else if (dynamic_cast<const TrivialInstance*>(&e)) {
    err["kind"] = "trivial_instance";
  } else if (dynamic_cast<const InvalidArgument*>(&e)) {
    err["kind"] = "invalid_argument";
  } else {
    err["kind"] = "error";
  }
  err["message"] = e.what();
  return Json{{"error", std::move(err)}};
}

void write_json(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace lipext::cli
