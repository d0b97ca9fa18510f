#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pop/program.hpp"

namespace pop {

struct PortfolioSolution {
  std::vector<std::uint8_t> bits;               // program variable order
  std::vector<std::vector<std::uint8_t>> x;     // [period][project]
  std::vector<std::vector<std::vector<std::uint8_t>>> y;  // [period][element][project]
  std::vector<Rational> outcome;
  std::vector<std::int64_t> quantity_values;    // filled by the session
};

/// a >= b componentwise and a != b; all objectives maximized.
bool dominates(const std::vector<Rational>& a, const std::vector<Rational>& b);

std::vector<Rational> outcome_of(const BinaryLinearProgram& program, const std::vector<std::uint8_t>& bits);
PortfolioSolution decode(const BinaryLinearProgram& program, const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> encode(const BinaryLinearProgram& program, const PortfolioSolution& solution);

struct Front {
  std::vector<PortfolioSolution> solutions;  // outcome descending, then bits descending
  std::size_t outcome_count = 0;
  bool truncated = false;
  std::uint64_t solves = 0;
};

struct FrontOptions {
  /// Maximum number of supporting assignments listed per outcome vector.
  std::size_t cap_per_outcome = 100000;
};

/// Recursive epsilon-constraint sweep over objectives 2..k with lower-bound
/// jumps, augmented lexicographic maximization of objective 1, followed by
/// enumeration of every assignment supporting each non-dominated outcome.
Front epsilon_constraint_front(const BinaryLinearProgram& program, const FrontOptions& options = {});
/// Exhaustive; same size limit as brute_force.
Front brute_force_front(const BinaryLinearProgram& program);

std::string render_front_text(const Instance& instance, const BinaryLinearProgram& program,
                              const Front& front);
std::string front_to_csv(const Instance& instance, const BinaryLinearProgram& program, const Front& front);
nlohmann::json front_to_json(const Instance& instance, const BinaryLinearProgram& program,
                             const Front& front);
nlohmann::json solution_to_json(const Instance& instance, const BinaryLinearProgram& program,
                                const PortfolioSolution& solution);

}  // namespace pop
