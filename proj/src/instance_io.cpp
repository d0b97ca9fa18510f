#include "pop/instance_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pop {

using nlohmann::json;

Rational rational_from_json(const json& value) {
  if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
  if (value.is_number()) return rational_from_double(value.get<double>());
  if (value.is_string()) return parse_rational(value.get<std::string>());
  throw std::invalid_argument("expected a number, got " + value.dump());
}

json rational_to_json(const Rational& value) {
  if (value.denominator() == 1) return value.numerator();
  return to_string(value);
}

namespace {

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw std::invalid_argument(std::string("missing required key '") + key + "'");
  }
  return obj.at(key);
}

std::string id_of(const json& item, const char* what) {
  if (item.is_string()) return item.get<std::string>();
  if (!item.is_object() || !item.contains("id") || !item.at("id").is_string()) {
    throw std::invalid_argument(std::string(what) + " entry needs a string 'id'");
  }
  return item.at("id").get<std::string>();
}

void error(std::vector<Diagnostic>& out, std::string code, std::string message) {
  out.push_back({Severity::error, std::move(code), std::move(message)});
}

/// Reads a criterion -> value map into a dense row; missing entries are
/// reported and filled with zero.
std::vector<Rational> read_performance_row(const Instance& inst, const json& row,
                                           const std::string& element, const std::string& where,
                                           std::vector<Diagnostic>& diags) {
  std::vector<Rational> out(inst.criteria.size(), Rational(0));
  std::vector<bool> seen(inst.criteria.size(), false);
  if (!row.is_object()) throw std::invalid_argument("performances of '" + element + "' must be an object");
  for (const auto& [key, value] : row.items()) {
    auto p = inst.find_criterion(key);
    if (!p) {
      error(diags, "unknown-criterion",
            "element '" + element + "' references unknown criterion '" + key + "'" + where);
      continue;
    }
    out[*p] = rational_from_json(value);
    seen[*p] = true;
  }
  for (std::size_t p = 0; p < seen.size(); ++p) {
    if (!seen[p]) {
      error(diags, "missing-performance",
            "missing performance for (element '" + element + "', criterion '" +
                inst.criteria[p].id + "')" + where);
    }
  }
  return out;
}

std::vector<Rational> read_objective_row(const Instance& inst, const json& row,
                                         const std::string& project, const std::string& where,
                                         std::vector<Diagnostic>& diags) {
  std::vector<Rational> out(inst.objectives.size(), Rational(0));
  std::vector<bool> seen(inst.objectives.size(), false);
  if (!row.is_object()) throw std::invalid_argument("objective values of '" + project + "' must be an object");
  for (const auto& [key, value] : row.items()) {
    auto l = inst.find_objective(key);
    if (!l) {
      error(diags, "unknown-objective",
            "project '" + project + "' references unknown objective '" + key + "'" + where);
      continue;
    }
    out[*l] = rational_from_json(value);
    seen[*l] = true;
  }
  for (std::size_t l = 0; l < seen.size(); ++l) {
    if (!seen[l]) {
      error(diags, "missing-objective-value",
            "missing value of objective '" + inst.objectives[l].id + "' for project '" + project +
                "'" + where);
    }
  }
  return out;
}

/// Per-context rows: plain variant holds the row directly, the other
/// variants hold one row per period / scenario id.
template <typename ReadRow>
std::vector<std::vector<Rational>> read_context_rows(const Instance& inst, const json& node,
                                                     const std::string& owner,
                                                     std::vector<Diagnostic>& diags,
                                                     ReadRow read_row) {
  std::vector<std::vector<Rational>> rows;
  if (inst.variant == Variant::plain) {
    rows.push_back(read_row(node, std::string()));
    return rows;
  }
  if (!node.is_object()) throw std::invalid_argument("per-context values of '" + owner + "' must be an object");
  for (std::size_t t = 0; t < inst.context_count(); ++t) {
    const std::string ctx = inst.context_id(t);
    const std::string where = " in " + std::string(inst.variant == Variant::temporal ? "period" : "scenario") +
                              " '" + ctx + "'";
    if (!node.contains(ctx)) {
      error(diags, "missing-context", "'" + owner + "' has no values" + where);
      rows.push_back(read_row(json::object(), where));
      continue;
    }
    rows.push_back(read_row(node.at(ctx), where));
  }
  for (const auto& [key, value] : node.items()) {
    bool known = false;
    for (std::size_t t = 0; t < inst.context_count(); ++t) known = known || inst.context_id(t) == key;
    if (!known) error(diags, "unknown-context", "'" + owner + "' references unknown context '" + key + "'");
  }
  return rows;
}

}  // namespace

Instance instance_from_json(const json& doc, std::vector<Diagnostic>& diags) {
  if (!doc.is_object()) throw std::invalid_argument("instance document must be a JSON object");
  Instance inst;
  inst.variant = variant_from_string(require(doc, "variant").get<std::string>());
  inst.name = doc.value("name", std::string());
  inst.budget = rational_from_json(require(doc, "budget"));

  for (const auto& c : require(doc, "criteria")) {
    LevelScale scale;
    scale.id = id_of(c, "criterion");
    scale.name = c.value("name", scale.id);
    for (const auto& level : require(c, "levels")) scale.levels.push_back(rational_from_json(level));
    if (scale.levels.empty()) error(diags, "empty-scale", "criterion '" + scale.id + "' has an empty level list");
    if (c.contains("labels")) {
      for (const auto& [code, label] : c.at("labels").items()) {
        scale.labels[std::stoll(code)] = label.get<std::string>();
      }
    }
    inst.criteria.push_back(std::move(scale));
  }
  for (const auto& o : require(doc, "objectives")) {
    ObjectiveDescriptor objective;
    objective.id = id_of(o, "objective");
    objective.name = o.is_object() ? o.value("name", objective.id) : objective.id;
    if (o.is_object() && o.contains("thresholds")) {
      for (const auto& t : o.at("thresholds")) objective.thresholds.push_back(rational_from_json(t));
    }
    inst.objectives.push_back(std::move(objective));
  }
  if (doc.contains("periods")) {
    for (const auto& p : doc.at("periods")) inst.periods.push_back(id_of(p, "period"));
  }
  if (doc.contains("scenarios")) {
    for (const auto& s : doc.at("scenarios")) {
      inst.scenarios.push_back({id_of(s, "scenario"), rational_from_json(require(s, "probability"))});
    }
  }
  if (inst.variant != Variant::temporal && !inst.periods.empty()) {
    error(diags, "unexpected-periods", "periods are only meaningful for the temporal variant");
  }
  if (inst.variant != Variant::stochastic && !inst.scenarios.empty()) {
    error(diags, "unexpected-scenarios", "scenarios are only meaningful for the stochastic variant");
  }

  // Projects first so that element costs can resolve project ids.
  const json& projects = require(doc, "projects");
  for (const auto& pj : projects) {
    Project project;
    project.id = id_of(pj, "project");
    project.name = pj.value("name", project.id);
    inst.projects.push_back(std::move(project));
  }
  for (std::size_t j = 0; j < inst.projects.size(); ++j) {
    const json& pj = projects[j];
    Project& project = inst.projects[j];
    project.objective_values = read_context_rows(
        inst, require(pj, "objective_values"), project.id, diags,
        [&](const json& row, const std::string& where) {
          return read_objective_row(inst, row, project.id, where, diags);
        });
    if (pj.contains("requirements")) {
      for (const auto& r : pj.at("requirements")) {
        const std::string criterion = require(r, "criterion").get<std::string>();
        auto p = inst.find_criterion(criterion);
        if (!p) {
          error(diags, "unknown-criterion",
                "project '" + project.id + "' requires unknown criterion '" + criterion + "'");
          continue;
        }
        const auto level = require(r, "level").get<std::int64_t>();
        if (level < 1 || static_cast<std::size_t>(level) > inst.criteria[*p].levels.size()) {
          error(diags, "bad-requirement",
                "project '" + project.id + "' requires level " + std::to_string(level) +
                    " of criterion '" + criterion + "' which does not exist");
          continue;
        }
        const auto count = require(r, "min_count").get<std::int64_t>();
        // u = 0 is the same as an absent triple: no row is ever emitted for it.
        if (count == 0) continue;
        project.requirements.push_back({*p, static_cast<std::size_t>(level - 1), count});
      }
    }
  }

  for (const auto& ej : require(doc, "elements")) {
    Element element;
    element.id = id_of(ej, "element");
    element.performances = read_context_rows(
        inst, require(ej, "performances"), element.id, diags,
        [&](const json& row, const std::string& where) {
          return read_performance_row(inst, row, element.id, where, diags);
        });
    element.costs.assign(inst.projects.size(), std::nullopt);
    for (const auto& [key, value] : require(ej, "costs").items()) {
      auto j = inst.find_project(key);
      if (!j) {
        error(diags, "unknown-project",
              "element '" + element.id + "' has a cost for unknown project '" + key + "'");
        continue;
      }
      element.costs[*j] = rational_from_json(value);
    }
    inst.elements.push_back(std::move(element));
  }
  return inst;
}

std::vector<Diagnostic> validate_json(const json& doc) {
  std::vector<Diagnostic> diags;
  Instance inst;
  try {
    inst = instance_from_json(doc, diags);
  } catch (const std::exception& e) {
    diags.push_back({Severity::error, "malformed", e.what()});
    return diags;
  }
  if (has_errors(diags)) return diags;
  auto more = validate(inst);
  diags.insert(diags.end(), more.begin(), more.end());
  return diags;
}

Instance load_instance(const json& doc) {
  std::vector<Diagnostic> diags;
  Instance inst;
  try {
    inst = instance_from_json(doc, diags);
  } catch (const std::exception& e) {
    throw ValidationError({{Severity::error, "malformed", e.what()}});
  }
  if (has_errors(diags)) throw ValidationError(std::move(diags));
  require_valid(inst);
  return inst;
}

Instance load_instance_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({{Severity::error, "malformed", e.what()}});
  }
  return load_instance(doc);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

Instance load_instance_file(const std::string& path) { return load_instance_text(read_file(path)); }

namespace {

json performance_row(const Instance& inst, const std::vector<Rational>& row) {
  json out = json::object();
  for (std::size_t p = 0; p < inst.criteria.size(); ++p) out[inst.criteria[p].id] = rational_to_json(row[p]);
  return out;
}

json objective_row(const Instance& inst, const std::vector<Rational>& row) {
  json out = json::object();
  for (std::size_t l = 0; l < inst.objectives.size(); ++l) out[inst.objectives[l].id] = rational_to_json(row[l]);
  return out;
}

template <typename RowFn>
json context_rows(const Instance& inst, const std::vector<std::vector<Rational>>& rows, RowFn fn) {
  if (inst.variant == Variant::plain) return fn(rows.at(0));
  json out = json::object();
  for (std::size_t t = 0; t < rows.size(); ++t) out[inst.context_id(t)] = fn(rows[t]);
  return out;
}

}  // namespace

json to_json(const Instance& inst) {
  json doc;
  doc["variant"] = to_string(inst.variant);
  if (!inst.name.empty()) doc["name"] = inst.name;
  doc["budget"] = rational_to_json(inst.budget);
  doc["criteria"] = json::array();
  for (const auto& c : inst.criteria) {
    json cj{{"id", c.id}, {"name", c.name}, {"levels", json::array()}};
    for (const auto& l : c.levels) cj["levels"].push_back(rational_to_json(l));
    if (!c.labels.empty()) {
      cj["labels"] = json::object();
      for (const auto& [code, label] : c.labels) cj["labels"][std::to_string(code)] = label;
    }
    doc["criteria"].push_back(std::move(cj));
  }
  doc["objectives"] = json::array();
  for (const auto& o : inst.objectives) {
    json oj{{"id", o.id}, {"name", o.name}};
    if (!o.thresholds.empty()) {
      oj["thresholds"] = json::array();
      for (const auto& t : o.thresholds) oj["thresholds"].push_back(rational_to_json(t));
    }
    doc["objectives"].push_back(std::move(oj));
  }
  if (inst.variant == Variant::temporal) doc["periods"] = inst.periods;
  if (inst.variant == Variant::stochastic) {
    doc["scenarios"] = json::array();
    for (const auto& s : inst.scenarios) {
      doc["scenarios"].push_back({{"id", s.id}, {"probability", rational_to_json(s.probability)}});
    }
  }
  doc["projects"] = json::array();
  for (const auto& p : inst.projects) {
    json pj{{"id", p.id}, {"name", p.name}};
    pj["objective_values"] = context_rows(inst, p.objective_values,
                                          [&](const auto& row) { return objective_row(inst, row); });
    pj["requirements"] = json::array();
    for (const auto& r : p.requirements) {
      pj["requirements"].push_back({{"criterion", inst.criteria[r.criterion].id},
                                    {"level", r.level + 1},
                                    {"min_count", r.min_count}});
    }
    doc["projects"].push_back(std::move(pj));
  }
  doc["elements"] = json::array();
  for (const auto& e : inst.elements) {
    json ej{{"id", e.id}};
    ej["performances"] = context_rows(inst, e.performances,
                                      [&](const auto& row) { return performance_row(inst, row); });
    ej["costs"] = json::object();
    for (std::size_t j = 0; j < e.costs.size(); ++j) {
      if (e.costs[j]) ej["costs"][inst.projects[j].id] = rational_to_json(*e.costs[j]);
    }
    doc["elements"].push_back(std::move(ej));
  }
  return doc;
}

json to_json(const Diagnostic& d) {
  return {{"severity", d.severity == Severity::error ? "error" : "warning"},
          {"code", d.code},
          {"message", d.message}};
}

json to_json(const std::vector<Diagnostic>& diagnostics) {
  json out = json::array();
  for (const auto& d : diagnostics) out.push_back(to_json(d));
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 0x100000001b3ull;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string instance_hash(const Instance& instance) {
  return fnv1a_hex(to_json(instance).dump());
}

}  // namespace pop
