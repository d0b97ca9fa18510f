#include "pop/quantity.hpp"

#include <stdexcept>

#include "pop/stochastic.hpp"

namespace pop {

bool QuantityDescriptor::operator==(const QuantityDescriptor& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case QuantityKind::chi:
      return true;
    case QuantityKind::f_plain:
      return objective == other.objective && level == other.level;
    case QuantityKind::f_temporal:
      return objective == other.objective && level == other.level && period == other.period;
    case QuantityKind::f_stochastic:
      return objective == other.objective && level == other.level && phi == other.phi;
  }
  return false;
}

QuantityDescriptor chi_quantity() { return {}; }

std::vector<QuantityDescriptor> default_quantities(const Instance& instance,
                                                   const std::vector<Rational>& phis) {
  std::vector<QuantityDescriptor> out{chi_quantity()};
  std::size_t levels = 0;
  for (const auto& o : instance.objectives) levels = std::max(levels, o.thresholds.size());
  auto add_levels = [&](QuantityDescriptor base) {
    for (std::size_t s = 0; s < levels; ++s) {
      for (std::size_t l = 0; l < instance.objectives.size(); ++l) {
        if (s >= instance.objectives[l].thresholds.size()) continue;
        base.objective = l;
        base.level = s;
        out.push_back(base);
      }
    }
  };
  switch (instance.variant) {
    case Variant::plain:
      add_levels({QuantityKind::f_plain});
      break;
    case Variant::temporal:
      for (std::size_t t = 0; t < instance.periods.size(); ++t) {
        QuantityDescriptor q{QuantityKind::f_temporal};
        q.period = t;
        add_levels(q);
      }
      break;
    case Variant::stochastic:
      for (const auto& phi : phis) {
        QuantityDescriptor q{QuantityKind::f_stochastic};
        q.phi = phi;
        add_levels(q);
      }
      break;
  }
  return out;
}

void check_quantity(const Instance& instance, const QuantityDescriptor& q) {
  if (q.kind == QuantityKind::chi) return;
  const Variant expected = q.kind == QuantityKind::f_plain      ? Variant::plain
                           : q.kind == QuantityKind::f_temporal ? Variant::temporal
                                                                : Variant::stochastic;
  if (instance.variant != expected) {
    throw std::invalid_argument("quantity does not apply to a " + to_string(instance.variant) + " instance");
  }
  if (q.objective >= instance.objectives.size()) throw std::invalid_argument("quantity names an unknown objective");
  if (q.level >= instance.objectives[q.objective].thresholds.size()) {
    throw std::invalid_argument("objective '" + instance.objectives[q.objective].id + "' has no threshold level " +
                                std::to_string(q.level + 1));
  }
  if (q.kind == QuantityKind::f_temporal && q.period >= instance.periods.size()) {
    throw std::invalid_argument("quantity names an unknown period");
  }
  if (q.kind == QuantityKind::f_stochastic && (q.phi <= 0 || q.phi > 1)) {
    throw std::invalid_argument("quantity probability must lie in (0,1]");
  }
}

std::vector<Rational> quantity_coefficients(const Instance& instance, const BinaryLinearProgram& program,
                                            const QuantityDescriptor& q) {
  check_quantity(instance, q);
  std::vector<Rational> row(program.variables.size(), Rational(0));
  if (q.kind == QuantityKind::chi) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (program.variables[k].kind == VariableKind::assignment) row[k] = 1;
    }
    return row;
  }
  const Rational lambda = instance.objectives[q.objective].thresholds[q.level];
  for (std::size_t j = 0; j < instance.projects.size(); ++j) {
    const auto& values = instance.projects[j].objective_values;
    bool counts = false;
    std::size_t period = 0;
    switch (q.kind) {
      case QuantityKind::f_plain:
        counts = values[0][q.objective] >= lambda;
        break;
      case QuantityKind::f_temporal:
        counts = values[q.period][q.objective] >= lambda;
        period = q.period;
        break;
      case QuantityKind::f_stochastic:
        counts = probability_at_least(instance, j, q.objective, lambda) >= q.phi;
        break;
      case QuantityKind::chi:
        break;
    }
    if (counts) row[program.x_index(period, j)] = 1;
  }
  return row;
}

std::int64_t quantity_value(const Instance& instance, const BinaryLinearProgram& program,
                            const QuantityDescriptor& q, const std::vector<std::uint8_t>& bits) {
  const Rational v = dot(quantity_coefficients(instance, program, q), bits);
  return v.numerator();
}

namespace {

std::string phi_text(const Rational& phi) { return to_string(phi); }

std::string percent(const Rational& phi) {
  const Rational p = phi * 100;
  return to_string(p) + "%";
}

std::string objective_name(const Instance& instance, std::size_t l) {
  return instance.objectives[l].name.empty() ? instance.objectives[l].id : instance.objectives[l].name;
}

}  // namespace

std::string symbol(const Instance& instance, const QuantityDescriptor& q) {
  (void)instance;
  const std::string ls = std::to_string(q.objective + 1) + "," + std::to_string(q.level + 1);
  switch (q.kind) {
    case QuantityKind::chi:
      return "chi";
    case QuantityKind::f_plain:
      return "F_{" + ls + "}";
    case QuantityKind::f_temporal:
      return "F_{" + ls + "," + std::to_string(q.period + 1) + "}";
    case QuantityKind::f_stochastic:
      return "F^{" + phi_text(q.phi) + "}_{" + ls + "}";
  }
  return "?";
}

std::string describe(const Instance& instance, const QuantityDescriptor& q) {
  if (q.kind == QuantityKind::chi) return "number of elements allocated to the portfolio";
  check_quantity(instance, q);
  std::string text = "number of selected projects whose contribution to " + objective_name(instance, q.objective) +
                     " is at least " + to_string(instance.objectives[q.objective].thresholds[q.level]);
  if (q.kind == QuantityKind::f_temporal) text += " in period " + instance.periods[q.period];
  if (q.kind == QuantityKind::f_stochastic) text += " with probability at least " + phi_text(q.phi);
  return text;
}

nlohmann::json to_json(const Instance& instance, const QuantityDescriptor& q) {
  static const char* kinds[] = {"chi", "F_plain", "F_temporal", "F_stochastic"};
  nlohmann::json j{{"kind", kinds[static_cast<int>(q.kind)]},
                   {"polarity", q.polarity() == Polarity::gain ? "gain" : "cost"},
                   {"symbol", symbol(instance, q)}};
  if (q.kind != QuantityKind::chi) {
    j["objective"] = instance.objectives.at(q.objective).id;
    j["level"] = q.level + 1;
    j["threshold"] = to_string(instance.objectives[q.objective].thresholds.at(q.level));
  }
  if (q.kind == QuantityKind::f_temporal) j["period"] = instance.periods.at(q.period);
  if (q.kind == QuantityKind::f_stochastic) j["phi"] = to_string(q.phi);
  return j;
}

QuantityDescriptor quantity_from_json(const Instance& instance, const nlohmann::json& j) {
  QuantityDescriptor q;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "chi") return q;
  if (kind == "F_plain") {
    q.kind = QuantityKind::f_plain;
  } else if (kind == "F_temporal") {
    q.kind = QuantityKind::f_temporal;
  } else if (kind == "F_stochastic") {
    q.kind = QuantityKind::f_stochastic;
  } else {
    throw std::invalid_argument("unknown quantity kind '" + kind + "'");
  }
  auto l = instance.find_objective(j.at("objective").get<std::string>());
  if (!l) throw std::invalid_argument("quantity names an unknown objective");
  q.objective = *l;
  const auto level = j.at("level").get<std::int64_t>();
  if (level < 1) throw std::invalid_argument("quantity level is 1-based");
  q.level = static_cast<std::size_t>(level - 1);
  if (q.kind == QuantityKind::f_temporal) {
    const auto period = j.at("period").get<std::string>();
    bool found = false;
    for (std::size_t t = 0; t < instance.periods.size(); ++t) {
      if (instance.periods[t] == period) {
        q.period = t;
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("quantity names an unknown period '" + period + "'");
  }
  if (q.kind == QuantityKind::f_stochastic) q.phi = parse_rational(j.at("phi").get<std::string>());
  check_quantity(instance, q);
  return q;
}

std::vector<Constraint> rule_rows(const Instance& instance, const BinaryLinearProgram& program,
                                  const DecisionRule& rule) {
  std::vector<Constraint> rows;
  for (const auto& c : rule.conditions) {
    rows.push_back({"rule_" + rule.id + "_" + symbol(instance, c.quantity),
                    quantity_coefficients(instance, program, c.quantity), c.comparator(),
                    Rational(c.threshold)});
  }
  return rows;
}

BinaryLinearProgram append_rule_constraints(BinaryLinearProgram program,
                                            const std::vector<DecisionRule>& rules,
                                            const Instance& instance) {
  for (const auto& rule : rules) {
    for (auto& row : rule_rows(instance, program, rule)) program.constraints.push_back(std::move(row));
  }
  return program;
}

std::string render_condition(const Instance& instance, const Condition& c) {
  const auto& q = c.quantity;
  if (q.kind == QuantityKind::chi) {
    return "at most " + std::to_string(c.threshold) + " elements are allocated to all the projects";
  }
  std::string text;
  if (q.kind == QuantityKind::f_stochastic) text += "with a probability of at least " + percent(q.phi) + " ";
  text += "there ";
  text += c.threshold == 1 ? "is at least 1 project" : "are at least " + std::to_string(c.threshold) + " projects";
  text += " with a contribution for objective " + objective_name(instance, q.objective) + " at least equal to " +
          to_string(instance.objectives[q.objective].thresholds[q.level]);
  if (q.kind == QuantityKind::f_temporal) text += " in period " + instance.periods[q.period];
  return text;
}

std::string render_rule(const Instance& instance, const DecisionRule& rule) {
  if (rule.conditions.empty()) return "every portfolio is good";
  std::string text = "if ";
  for (std::size_t k = 0; k < rule.conditions.size(); ++k) {
    if (k) text += " and if ";
    text += render_condition(instance, rule.conditions[k]);
  }
  text += ", then the portfolio is good";
  if (!rule.consistent) text += " (ambiguous: also matches portfolios not classified as good)";
  return text;
}

std::string render_rule_compact(const Instance& instance, const DecisionRule& rule) {
  if (rule.conditions.empty()) return "(always)";
  std::string text;
  for (std::size_t k = 0; k < rule.conditions.size(); ++k) {
    const auto& c = rule.conditions[k];
    if (k) text += " and ";
    text += symbol(instance, c.quantity) + (c.comparator() == Comparator::ge ? " >= " : " <= ") +
            std::to_string(c.threshold);
  }
  return text;
}

nlohmann::json to_json(const Instance& instance, const DecisionRule& rule) {
  nlohmann::json j{{"id", rule.id}, {"consistent", rule.consistent}, {"coverage", rule.coverage}};
  j["conditions"] = nlohmann::json::array();
  for (const auto& c : rule.conditions) {
    j["conditions"].push_back({{"quantity", to_json(instance, c.quantity)},
                               {"comparator", c.comparator() == Comparator::ge ? ">=" : "<="},
                               {"threshold", c.threshold}});
  }
  j["text"] = render_rule(instance, rule);
  j["compact"] = render_rule_compact(instance, rule);
  return j;
}

DecisionRule rule_from_json(const Instance& instance, const nlohmann::json& j) {
  DecisionRule rule;
  rule.id = j.at("id").get<std::string>();
  rule.consistent = j.value("consistent", true);
  if (j.contains("coverage")) rule.coverage = j.at("coverage").get<std::vector<std::string>>();
  for (const auto& c : j.at("conditions")) {
    Condition cond{quantity_from_json(instance, c.at("quantity")), c.at("threshold").get<std::int64_t>()};
    if (c.contains("comparator")) {
      const bool ge = c.at("comparator").get<std::string>() == ">=";
      if (ge != (cond.comparator() == Comparator::ge)) {
        throw std::invalid_argument("condition comparator contradicts the quantity polarity");
      }
    }
    rule.conditions.push_back(std::move(cond));
  }
  return rule;
}

}  // namespace pop
