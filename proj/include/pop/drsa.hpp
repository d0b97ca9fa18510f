#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pop/pareto.hpp"
#include "pop/quantity.hpp"

namespace pop {

enum class Label { good, other };

struct TableRow {
  std::string id;
  std::vector<std::int64_t> values;  // one per schema entry
  Label label = Label::other;
};

/// Portfolios described by interpretable quantities and a two-class label.
struct InformationTable {
  std::vector<QuantityDescriptor> schema;
  std::vector<TableRow> rows;
};

/// Throws std::invalid_argument naming every id in `ids` without a label.
InformationTable build_table(const Instance& instance, const BinaryLinearProgram& program,
                             const std::vector<PortfolioSolution>& portfolios,
                             const std::vector<std::string>& ids,
                             const std::vector<QuantityDescriptor>& schema,
                             const std::map<std::string, Label>& labels);

/// Row a is at least as good as row b on every quantity (polarity aware).
bool weakly_dominates(const InformationTable& table, const TableRow& a, const TableRow& b);

/// Good rows not weakly dominated by any other-labelled row.
std::vector<std::size_t> lower_approximation(const InformationTable& table);

struct InductionOptions {
  /// Candidate conjunctions examined before falling back to greedy covering.
  std::size_t budget = 200000;
  std::string id_prefix = "r";
};

struct RuleSet {
  std::vector<DecisionRule> rules;
  std::vector<std::string> boundary;  // good rows no consistent rule can cover
  bool exhaustive = true;
};

/// Minimal "at least good" rules. Exhaustive search over conjunctions whose
/// thresholds are values attained by lower-approximation rows; greedy
/// sequential covering when the budget runs out. Every boundary row gets an
/// inconsistent rule built from its own values.
RuleSet induce_rules(const InformationTable& table, const InductionOptions& options = {});

/// Throws std::invalid_argument when a condition's quantity is not in the schema.
bool rule_matches(const DecisionRule& rule, const std::vector<QuantityDescriptor>& schema,
                  const std::vector<std::int64_t>& values);

bool is_consistent(const DecisionRule& rule, const InformationTable& table);
/// Consistent, no condition can be dropped and no threshold loosened to the
/// next value attained in the table without admitting an other-labelled row.
bool is_minimal(const DecisionRule& rule, const InformationTable& table);

std::string to_string(Label label);
Label label_from_string(const std::string& text);
nlohmann::json to_json(const Instance& instance, const InformationTable& table);
nlohmann::json to_json(const Instance& instance, const RuleSet& rules);

}  // namespace pop
