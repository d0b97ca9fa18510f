#include "pop/drsa.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include <boost/dynamic_bitset.hpp>

namespace pop {

using Bits = boost::dynamic_bitset<>;

std::string to_string(Label label) { return label == Label::good ? "good" : "other"; }

Label label_from_string(const std::string& text) {
  if (text == "good") return Label::good;
  if (text == "other") return Label::other;
  throw std::invalid_argument("unknown label '" + text + "' (expected good or other)");
}

InformationTable build_table(const Instance& instance, const BinaryLinearProgram& program,
                             const std::vector<PortfolioSolution>& portfolios,
                             const std::vector<std::string>& ids,
                             const std::vector<QuantityDescriptor>& schema,
                             const std::map<std::string, Label>& labels) {
  if (ids.size() != portfolios.size()) throw std::invalid_argument("one id per portfolio is required");
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    if (!labels.count(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw std::invalid_argument("unlabelled portfolios: " + list);
  }
  InformationTable table{schema, {}};
  for (std::size_t r = 0; r < portfolios.size(); ++r) {
    TableRow row{ids[r], {}, labels.at(ids[r])};
    for (const auto& q : schema) row.values.push_back(quantity_value(instance, program, q, portfolios[r].bits));
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

bool at_least_as_good(Polarity p, std::int64_t a, std::int64_t b) { return p == Polarity::gain ? a >= b : a <= b; }

/// Thresholds per quantity, loosest first.
std::vector<std::vector<std::int64_t>> attained_values(const InformationTable& table) {
  std::vector<std::vector<std::int64_t>> values(table.schema.size());
  for (std::size_t q = 0; q < table.schema.size(); ++q) {
    for (const auto& row : table.rows) values[q].push_back(row.values.at(q));
    std::sort(values[q].begin(), values[q].end());
    values[q].erase(std::unique(values[q].begin(), values[q].end()), values[q].end());
    if (table.schema[q].polarity() == Polarity::cost) std::reverse(values[q].begin(), values[q].end());
  }
  return values;
}

/// Elementary condition (quantity index, threshold) and the rows it matches.
struct Elementary {
  std::size_t quantity;
  std::int64_t threshold;
  Bits rows;
};

class Inducer {
 public:
  Inducer(const InformationTable& table, const InductionOptions& options) : table_(table), options_(options) {
    const std::size_t n = table.rows.size();
    good_.resize(n);
    other_.resize(n);
    lower_.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      if (table.rows[r].values.size() != table.schema.size()) {
        throw std::invalid_argument("row '" + table.rows[r].id + "' does not match the schema");
      }
      (table.rows[r].label == Label::good ? good_ : other_).set(r);
    }
    for (auto r : lower_approximation(table)) lower_.set(r);
    // every attained value of every quantity, ordered by quantity then
    // loosest first
    const auto attained = attained_values(table);
    for (std::size_t q = 0; q < table.schema.size(); ++q) {
      for (auto t : attained[q]) {
        Bits m(n);
        for (std::size_t r = 0; r < n; ++r) {
          if (at_least_as_good(table.schema[q].polarity(), table.rows[r].values[q], t)) m.set(r);
        }
        elementary_.push_back({q, t, std::move(m)});
      }
    }
  }

  RuleSet run() {
    RuleSet out;
    if (lower_.any()) {
      if (other_.none()) {
        out.rules.push_back(make_rule({}, true));
      } else if (!exhaustive(out)) {
        out.rules.clear();
        out.exhaustive = false;
        greedy(out);
      }
    }
    add_boundary(out);
    for (std::size_t k = 0; k < out.rules.size(); ++k) out.rules[k].id = options_.id_prefix + std::to_string(k + 1);
    return out;
  }

 private:
  using Conj = std::vector<std::size_t>;  // indices into elementary_

  Bits matches(const Conj& c) const {
    Bits m(table_.rows.size());
    m.set();
    for (auto e : c) m &= elementary_[e].rows;
    return m;
  }

  std::vector<Condition> conditions(const Conj& c) const {
    std::vector<Condition> out;
    for (auto e : c) out.push_back({table_.schema[elementary_[e].quantity], elementary_[e].threshold});
    return out;
  }

  DecisionRule make_rule(const Conj& c, bool consistent) const {
    DecisionRule rule;
    rule.conditions = conditions(c);
    rule.consistent = consistent;
    const Bits m = matches(c) & good_;
    for (std::size_t r = 0; r < table_.rows.size(); ++r) {
      if (m.test(r)) rule.coverage.push_back(table_.rows[r].id);
    }
    return rule;
  }

  bool minimal(const Conj& c) const {
    for (std::size_t k = 0; k < c.size(); ++k) {
      Conj dropped = c;
      dropped.erase(dropped.begin() + static_cast<std::ptrdiff_t>(k));
      if (!(matches(dropped) & other_).any()) return false;
    }
    DecisionRule rule;
    rule.conditions = conditions(c);
    return is_minimal(rule, table_);
  }

  /// Breadth-first over conjunctions with increasing quantity indices.
  /// Returns false when the budget is exhausted.
  bool exhaustive(RuleSet& out) {
    std::vector<Conj> frontier{Conj{}};
    std::size_t examined = 0;
    while (!frontier.empty()) {
      std::vector<Conj> next;
      for (const auto& c : frontier) {
        const Bits base = matches(c);
        const std::size_t last_q = c.empty() ? 0 : elementary_[c.back()].quantity + 1;
        for (std::size_t e = 0; e < elementary_.size(); ++e) {
          if (elementary_[e].quantity < last_q) continue;
          const Bits m = base & elementary_[e].rows;
          if (!(m & lower_).any()) continue;
          if (++examined > options_.budget) return false;
          Conj extended = c;
          extended.push_back(e);
          if ((m & other_).any()) {
            next.push_back(std::move(extended));
          } else if (minimal(extended)) {
            out.rules.push_back(make_rule(extended, true));
          }
        }
      }
      frontier = std::move(next);
    }
    return true;
  }

  /// Sequential covering of the lower approximation.
  void greedy(RuleSet& out) {
    Bits uncovered = lower_;
    while (uncovered.any()) {
      Conj c;
      Bits m(table_.rows.size());
      m.set();
      while ((m & other_).any()) {
        std::size_t best = elementary_.size();
        std::size_t best_cov = 0, best_total = 1;
        for (std::size_t e = 0; e < elementary_.size(); ++e) {
          const auto q = elementary_[e].quantity;
          if (std::any_of(c.begin(), c.end(), [&](std::size_t k) { return elementary_[k].quantity == q; })) continue;
          const Bits hit = m & elementary_[e].rows;
          const std::size_t cov = (hit & uncovered).count();
          if (cov == 0) continue;
          const std::size_t total = hit.count();
          // cov/total vs best_cov/best_total, then absolute coverage; the
          // scan order already prefers smaller schema indices
          const auto lhs = cov * best_total, rhs = best_cov * total;
          if (best == elementary_.size() || lhs > rhs || (lhs == rhs && cov > best_cov)) {
            best = e;
            best_cov = cov;
            best_total = total;
          }
        }
        if (best == elementary_.size()) break;
        c.push_back(best);
        m &= elementary_[best].rows;
      }
      if ((m & other_).any()) {
        // fall back to the exact profile of one uncovered row
        const auto r = (m & uncovered).any() ? (m & uncovered).find_first() : uncovered.find_first();
        c.clear();
        for (std::size_t e = 0; e < elementary_.size(); ++e) {
          if (elementary_[e].threshold == table_.rows[r].values[elementary_[e].quantity]) c.push_back(e);
        }
        m = matches(c);
      }
      // drop conditions that are not needed for consistency
      for (std::size_t k = 0; k < c.size();) {
        Conj dropped = c;
        dropped.erase(dropped.begin() + static_cast<std::ptrdiff_t>(k));
        if (!(matches(dropped) & other_).any()) {
          c = std::move(dropped);
        } else {
          ++k;
        }
      }
      std::sort(c.begin(), c.end());
      m = matches(c);
      if (!(m & uncovered).any()) break;
      uncovered &= ~m;
      out.rules.push_back(make_rule(c, true));
    }
  }

  void add_boundary(RuleSet& out) const {
    for (std::size_t r = 0; r < table_.rows.size(); ++r) {
      if (!good_.test(r) || lower_.test(r)) continue;
      const auto& row = table_.rows[r];
      out.boundary.push_back(row.id);
      DecisionRule rule;
      for (std::size_t q = 0; q < table_.schema.size(); ++q) rule.conditions.push_back({table_.schema[q], row.values[q]});
      rule.consistent = false;
      for (const auto& other : table_.rows) {
        if (other.label == Label::good && rule_matches(rule, table_.schema, other.values)) {
          rule.coverage.push_back(other.id);
        }
      }
      out.rules.push_back(std::move(rule));
    }
  }

  const InformationTable& table_;
  InductionOptions options_;
  Bits good_, other_, lower_;
  std::vector<Elementary> elementary_;
};

}  // namespace

bool weakly_dominates(const InformationTable& table, const TableRow& a, const TableRow& b) {
  for (std::size_t q = 0; q < table.schema.size(); ++q) {
    if (!at_least_as_good(table.schema[q].polarity(), a.values[q], b.values[q])) return false;
  }
  return true;
}

std::vector<std::size_t> lower_approximation(const InformationTable& table) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].label != Label::good) continue;
    const bool blocked = std::any_of(table.rows.begin(), table.rows.end(), [&](const TableRow& o) {
      return o.label == Label::other && weakly_dominates(table, o, table.rows[r]);
    });
    if (!blocked) out.push_back(r);
  }
  return out;
}

RuleSet induce_rules(const InformationTable& table, const InductionOptions& options) {
  return Inducer(table, options).run();
}

bool rule_matches(const DecisionRule& rule, const std::vector<QuantityDescriptor>& schema,
                  const std::vector<std::int64_t>& values) {
  if (values.size() != schema.size()) throw std::invalid_argument("quantity vector does not match the schema");
  for (const auto& c : rule.conditions) {
    const auto it = std::find(schema.begin(), schema.end(), c.quantity);
    if (it == schema.end()) throw std::invalid_argument("rule refers to a quantity outside the schema");
    if (!c.holds(values[static_cast<std::size_t>(it - schema.begin())])) return false;
  }
  return true;
}

bool is_consistent(const DecisionRule& rule, const InformationTable& table) {
  return std::none_of(table.rows.begin(), table.rows.end(), [&](const TableRow& row) {
    return row.label == Label::other && rule_matches(rule, table.schema, row.values);
  });
}

bool is_minimal(const DecisionRule& rule, const InformationTable& table) {
  if (!is_consistent(rule, table)) return false;
  const auto attained = attained_values(table);
  for (std::size_t k = 0; k < rule.conditions.size(); ++k) {
    DecisionRule dropped = rule;
    dropped.conditions.erase(dropped.conditions.begin() + static_cast<std::ptrdiff_t>(k));
    if (is_consistent(dropped, table)) return false;
    const auto& c = rule.conditions[k];
    const auto q = static_cast<std::size_t>(std::find(table.schema.begin(), table.schema.end(), c.quantity) -
                                            table.schema.begin());
    // tightest attained value strictly looser than the threshold
    std::optional<std::int64_t> looser;
    for (auto v : attained[q]) {
      if (!c.holds(v)) looser = v;
    }
    if (!looser) continue;
    DecisionRule loosened = rule;
    loosened.conditions[k].threshold = *looser;
    if (is_consistent(loosened, table)) return false;
  }
  return true;
}

nlohmann::json to_json(const Instance& instance, const InformationTable& table) {
  nlohmann::json j{{"schema", nlohmann::json::array()}, {"rows", nlohmann::json::array()}};
  for (const auto& q : table.schema) j["schema"].push_back(to_json(instance, q));
  for (const auto& row : table.rows) {
    j["rows"].push_back({{"id", row.id}, {"values", row.values}, {"label", to_string(row.label)}});
  }
  return j;
}

nlohmann::json to_json(const Instance& instance, const RuleSet& rules) {
  nlohmann::json j{{"rules", nlohmann::json::array()}, {"boundary", rules.boundary}, {"exhaustive", rules.exhaustive}};
  for (const auto& r : rules.rules) j["rules"].push_back(to_json(instance, r));
  return j;
}

}  // namespace pop
