#include "pop/stochastic.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pop {

std::vector<Rational> phi_set(const std::vector<Scenario>& scenarios) {
  std::set<Rational> sums;
  for (const auto& s : scenarios) {
    std::set<Rational> next = sums;
    next.insert(s.probability);
    for (const auto& partial : sums) next.insert(partial + s.probability);
    sums = std::move(next);
  }
  return {sums.begin(), sums.end()};
}

bool is_admissible_phi(const Instance& instance, const Rational& phi) {
  const auto phis = phi_set(instance.scenarios);
  return std::binary_search(phis.begin(), phis.end(), phi);
}

Rational alpha(const std::vector<Rational>& probabilities, const std::vector<Rational>& values,
               std::size_t state) {
  if (state >= values.size() || probabilities.size() != values.size()) {
    throw std::out_of_range("unknown state " + std::to_string(state));
  }
  Rational total(0);
  for (std::size_t o = 0; o < values.size(); ++o) {
    if (values[o] >= values[state]) total += probabilities[o];
  }
  return total;
}

Rational rho(const std::vector<Rational>& probabilities, const std::vector<Rational>& values,
             const Rational& phi) {
  bool found = false;
  Rational best(0);
  for (std::size_t s = 0; s < values.size(); ++s) {
    if (alpha(probabilities, values, s) >= phi && (!found || values[s] > best)) {
      best = values[s];
      found = true;
    }
  }
  if (!found) throw std::domain_error("no state is guaranteed with probability " + to_string(phi));
  return best;
}

namespace {

std::vector<Rational> probabilities_of(const Instance& instance) {
  std::vector<Rational> out;
  for (const auto& s : instance.scenarios) out.push_back(s.probability);
  return out;
}

std::vector<Rational> values_of(const Instance& instance, std::size_t element, std::size_t criterion) {
  std::vector<Rational> out;
  for (const auto& row : instance.elements.at(element).performances) out.push_back(row.at(criterion));
  return out;
}

}  // namespace

Rational alpha(const Instance& instance, std::size_t element, std::size_t criterion,
               std::size_t state) {
  return alpha(probabilities_of(instance), values_of(instance, element, criterion), state);
}

Rational rho(const Instance& instance, std::size_t element, std::size_t criterion,
             const Rational& phi) {
  return rho(probabilities_of(instance), values_of(instance, element, criterion), phi);
}

QualificationTable qualification_at_phi(const Instance& instance, const Rational& phi) {
  if (instance.variant != Variant::stochastic) {
    throw std::invalid_argument("qualification at phi needs a stochastic instance");
  }
  if (!is_admissible_phi(instance, phi)) {
    throw std::invalid_argument("phi " + to_string(phi) + " is not an achievable probability");
  }
  const auto probabilities = probabilities_of(instance);
  std::vector<std::vector<Rational>> guaranteed(instance.elements.size());
  for (std::size_t i = 0; i < instance.elements.size(); ++i) {
    for (std::size_t p = 0; p < instance.criteria.size(); ++p) {
      guaranteed[i].push_back(rho(probabilities, values_of(instance, i, p), phi));
    }
  }
  return qualification_from_performances(instance, guaranteed);
}

Rational probability_at_least(const Instance& instance, std::size_t project, std::size_t objective,
                              const Rational& threshold) {
  Rational total(0);
  const auto& rows = instance.projects.at(project).objective_values;
  for (std::size_t s = 0; s < instance.scenarios.size(); ++s) {
    if (rows.at(s).at(objective) >= threshold) total += instance.scenarios[s].probability;
  }
  return total;
}

namespace {

std::string pad(const std::string& text, std::size_t width) {
  return text.size() >= width ? text + " " : text + std::string(width - text.size(), ' ');
}

}  // namespace

std::string render_rho_table(const Instance& instance, std::size_t criterion) {
  if (instance.variant != Variant::stochastic) {
    throw std::invalid_argument("rho table needs a stochastic instance");
  }
  if (criterion >= instance.criteria.size()) throw std::out_of_range("unknown criterion");
  const auto phis = phi_set(instance.scenarios);
  std::size_t width = 6;
  for (const auto& e : instance.elements) width = std::max(width, e.id.size() + 2);
  std::ostringstream out;
  out << "rho(" << instance.criteria[criterion].id << ")\n";
  out << pad("phi", 8);
  for (const auto& e : instance.elements) out << pad(e.id, width);
  out << '\n';
  for (const auto& phi : phis) {
    out << pad(to_fixed(phi, 2), 8);
    for (std::size_t i = 0; i < instance.elements.size(); ++i) {
      out << pad(to_string(rho(instance, i, criterion, phi)), width);
    }
    out << '\n';
  }
  return out.str();
}

std::string render_qualification(const Instance& instance, const QualificationTable& table,
                                 std::size_t context) {
  std::size_t label = 6;
  for (const auto& e : instance.elements) label = std::max(label, e.id.size() + 2);
  std::vector<std::vector<std::string>> headers(instance.criteria.size());
  std::size_t cell = 4;
  for (std::size_t p = 0; p < instance.criteria.size(); ++p) {
    for (const auto& level : instance.criteria[p].levels) {
      headers[p].push_back(to_string(level));
      cell = std::max(cell, headers[p].back().size() + 1);
    }
    cell = std::max(cell, instance.criteria[p].id.size() / std::max<std::size_t>(1, headers[p].size()) + 1);
  }
  std::ostringstream out;
  out << pad("", label);
  for (std::size_t p = 0; p < instance.criteria.size(); ++p) {
    out << pad(instance.criteria[p].id, cell * headers[p].size() + 2);
  }
  out << '\n' << pad("v", label);
  for (const auto& group : headers) {
    for (const auto& h : group) out << pad(h, cell);
    out << "  ";
  }
  out << '\n';
  for (std::size_t i = 0; i < instance.elements.size(); ++i) {
    out << pad(instance.elements[i].id, label);
    for (std::size_t p = 0; p < instance.criteria.size(); ++p) {
      for (std::size_t h = 0; h < headers[p].size(); ++h) {
        out << pad(table.at(context, i, p, h) ? "1" : "0", cell);
      }
      out << "  ";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace pop
