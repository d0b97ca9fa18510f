#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pop/instance.hpp"

namespace pop {

enum class VariableKind { project, assignment };

struct Variable {
  std::string name;
  VariableKind kind = VariableKind::project;
  std::size_t period = 0;
  std::size_t project = 0;
  std::size_t element = 0;  // assignment variables only
};

enum class Comparator { le, ge };

struct Constraint {
  std::string name;
  std::vector<Rational> coefficients;
  Comparator comparator = Comparator::le;
  Rational rhs{0};
};

struct Objective {
  std::string id;
  std::vector<Rational> coefficients;  // always maximized
};

struct BinaryLinearProgram {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<Objective> objectives;
  std::size_t periods = 1;
  std::size_t projects = 0;
  std::size_t elements = 0;

  std::size_t x_index(std::size_t period, std::size_t project) const;
  /// nullopt when the element may not join the project (no cost given)
  std::optional<std::size_t> y_index(std::size_t period, std::size_t element,
                                     std::size_t project) const;
  std::optional<std::size_t> objective_index(const std::string& id) const;
  const Objective& objective(const std::string& id) const;

  std::vector<std::optional<std::size_t>> y_lookup;  // [(period*elements+element)*projects+project]
};

BinaryLinearProgram compile_plain(const Instance& instance, const QualificationTable& qualification);
BinaryLinearProgram compile_temporal(const Instance& instance,
                                     const QualificationTable& qualification);
/// Throws std::invalid_argument when phi is not in the achievable set.
BinaryLinearProgram compile_stochastic(const Instance& instance,
                                       const QualificationTable& qualification_at_phi,
                                       const Rational& phi);
/// Dispatches on the variant; phi is required for stochastic instances.
BinaryLinearProgram compile(const Instance& instance, const std::optional<Rational>& phi = std::nullopt);

/// sum of all project variables >= 1
Constraint nonempty_row(const BinaryLinearProgram& program);
/// Appends nonempty_row.
BinaryLinearProgram require_nonempty(BinaryLinearProgram program);

/// Value of a dense linear expression at a bit vector.
Rational dot(const std::vector<Rational>& coefficients, const std::vector<std::uint8_t>& bits);
bool satisfies(const Constraint& row, const std::vector<std::uint8_t>& bits);
bool satisfies_all(const BinaryLinearProgram& program, const std::vector<std::uint8_t>& bits,
                   const std::vector<Constraint>& extra_rows = {});

/// LP-style plain text (Maximize / Subject To / Binary / End).
std::string emit_lp(const BinaryLinearProgram& program);

}  // namespace pop
