#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pop/program.hpp"

namespace pop {

enum class SolveStatus { optimal, infeasible };

struct SolveResult {
  SolveStatus status = SolveStatus::infeasible;
  Rational objective{0};
  std::vector<std::uint8_t> solution;
  std::uint64_t nodes = 0;
};

struct Enumeration {
  std::vector<SolveResult> solutions;
  bool truncated = false;
  std::uint64_t nodes = 0;
};

/// Depth-first branch-and-bound in variable order, 1-branch first, with
/// row-activity propagation. Among all optima it returns the
/// lexicographically greatest bit vector, so results are reproducible and
/// comparable with brute_force bit for bit.
SolveResult solve(const BinaryLinearProgram& program, const std::string& objective_id,
                  const std::vector<Constraint>& extra_rows = {});
SolveResult solve_objective(const BinaryLinearProgram& program, const std::vector<Rational>& objective,
                            const std::vector<Constraint>& extra_rows = {});

/// Every optimal bit vector, lexicographically descending, up to `cap`.
Enumeration enumerate_optima(const BinaryLinearProgram& program, const std::string& objective_id,
                             std::size_t cap, const std::vector<Constraint>& extra_rows = {});
Enumeration enumerate_optima_objective(const BinaryLinearProgram& program,
                                       const std::vector<Rational>& objective, std::size_t cap,
                                       const std::vector<Constraint>& extra_rows = {});
/// Every feasible bit vector, lexicographically descending, up to `cap`.
Enumeration enumerate_feasible(const BinaryLinearProgram& program,
                               const std::vector<Constraint>& extra_rows, std::size_t cap);

/// Excludes exactly the given bit vector.
Constraint no_good_cut(const std::vector<std::uint8_t>& bits);

inline constexpr std::size_t kBruteForceLimit = 32;

/// Exhaustive Gray-code scan; throws std::length_error above kBruteForceLimit
/// variables. Ties resolve to the lexicographically greatest vector.
SolveResult brute_force(const BinaryLinearProgram& program, const std::string& objective_id,
                        const std::vector<Constraint>& extra_rows = {});
SolveResult brute_force_objective(const BinaryLinearProgram& program,
                                  const std::vector<Rational>& objective,
                                  const std::vector<Constraint>& extra_rows = {});

/// Calls `visit` with every feasible vector as a mask whose most significant
/// used bit (1 << (n-1)) is variable 0.
void for_each_feasible(const BinaryLinearProgram& program, const std::vector<Constraint>& extra_rows,
                       const std::function<void(std::uint64_t)>& visit);
std::vector<std::uint8_t> mask_to_bits(std::uint64_t mask, std::size_t variables);

}  // namespace pop
