#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pop/program.hpp"

namespace pop {

enum class QuantityKind { chi, f_plain, f_temporal, f_stochastic };
enum class Polarity { gain, cost };

/// chi counts assigned elements. The F quantities count selected projects
/// whose objective value reaches the threshold lambda = thresholds[level] of
/// `objective`, in one period (temporal) or with probability >= phi
/// (stochastic).
struct QuantityDescriptor {
  QuantityKind kind = QuantityKind::chi;
  std::size_t objective = 0;
  std::size_t level = 0;
  std::size_t period = 0;
  Rational phi{1};

  Polarity polarity() const { return kind == QuantityKind::chi ? Polarity::cost : Polarity::gain; }
  bool operator==(const QuantityDescriptor& other) const;
  bool operator!=(const QuantityDescriptor& other) const { return !(*this == other); }
};

QuantityDescriptor chi_quantity();

/// chi followed by every F quantity the instance defines thresholds for:
/// plain F_{l,s}; temporal F_{l,s,t} per period; stochastic F^phi_{l,s}
/// per requested phi. Order: period or phi, then level, then objective.
std::vector<QuantityDescriptor> default_quantities(const Instance& instance,
                                                   const std::vector<Rational>& phis = {});

/// Throws std::invalid_argument when the descriptor does not fit the instance.
void check_quantity(const Instance& instance, const QuantityDescriptor& quantity);

std::vector<Rational> quantity_coefficients(const Instance& instance, const BinaryLinearProgram& program,
                                            const QuantityDescriptor& quantity);
std::int64_t quantity_value(const Instance& instance, const BinaryLinearProgram& program,
                            const QuantityDescriptor& quantity, const std::vector<std::uint8_t>& bits);

/// "chi", "F_{2,1}", "F_{1,2,2}", "F^{0.4}_{3,1}"
std::string symbol(const Instance& instance, const QuantityDescriptor& quantity);
std::string describe(const Instance& instance, const QuantityDescriptor& quantity);

nlohmann::json to_json(const Instance& instance, const QuantityDescriptor& quantity);
QuantityDescriptor quantity_from_json(const Instance& instance, const nlohmann::json& j);

/// One threshold condition; the comparator follows the polarity
/// (gain: value >= threshold, cost: value <= threshold).
struct Condition {
  QuantityDescriptor quantity;
  std::int64_t threshold = 0;

  Comparator comparator() const {
    return quantity.polarity() == Polarity::gain ? Comparator::ge : Comparator::le;
  }
  bool holds(std::int64_t value) const {
    return comparator() == Comparator::ge ? value >= threshold : value <= threshold;
  }
};

/// "if all conditions hold, then the portfolio is good"
struct DecisionRule {
  std::string id;
  std::vector<Condition> conditions;
  std::vector<std::string> coverage;  // ids of good rows matched
  bool consistent = true;
};

/// One linear row per condition.
std::vector<Constraint> rule_rows(const Instance& instance, const BinaryLinearProgram& program,
                                  const DecisionRule& rule);
BinaryLinearProgram append_rule_constraints(BinaryLinearProgram program,
                                            const std::vector<DecisionRule>& rules,
                                            const Instance& instance);

std::string render_condition(const Instance& instance, const Condition& condition);
/// Natural-language sentence.
std::string render_rule(const Instance& instance, const DecisionRule& rule);
/// Compact form, e.g. "chi <= 7 and F_{2,1} >= 2".
std::string render_rule_compact(const Instance& instance, const DecisionRule& rule);

nlohmann::json to_json(const Instance& instance, const DecisionRule& rule);
DecisionRule rule_from_json(const Instance& instance, const nlohmann::json& j);

}  // namespace pop
