#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pop/instance.hpp"

namespace pop {

/// Distinct non-empty subset sums of the scenario probabilities, ascending.
std::vector<Rational> phi_set(const std::vector<Scenario>& scenarios);
bool is_admissible_phi(const Instance& instance, const Rational& phi);

/// Sum of probabilities of the states whose value is >= values[state].
Rational alpha(const std::vector<Rational>& probabilities, const std::vector<Rational>& values,
               std::size_t state);
/// Largest value whose guarantee alpha reaches phi.
Rational rho(const std::vector<Rational>& probabilities, const std::vector<Rational>& values,
             const Rational& phi);

Rational alpha(const Instance& instance, std::size_t element, std::size_t criterion,
               std::size_t state);
Rational rho(const Instance& instance, std::size_t element, std::size_t criterion,
             const Rational& phi);

/// Single-context table of v(phi) with rho in place of the performance.
QualificationTable qualification_at_phi(const Instance& instance, const Rational& phi);

/// Probability that c_j^l(sigma) >= threshold.
Rational probability_at_least(const Instance& instance, std::size_t project, std::size_t objective,
                              const Rational& threshold);

/// rows = phi values, columns = elements
std::string render_rho_table(const Instance& instance, std::size_t criterion);
/// rows = elements, column groups = criteria, one column per level
std::string render_qualification(const Instance& instance, const QualificationTable& table,
                                 std::size_t context = 0);

}  // namespace pop
