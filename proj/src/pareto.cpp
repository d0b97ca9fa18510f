#include "pop/pareto.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pop/instance_io.hpp"
#include "pop/solver.hpp"

namespace pop {

bool dominates(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("outcome vectors differ in length");
  bool strictly = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return false;
    if (a[k] > b[k]) strictly = true;
  }
  return strictly;
}

std::vector<Rational> outcome_of(const BinaryLinearProgram& program, const std::vector<std::uint8_t>& bits) {
  std::vector<Rational> out;
  for (const auto& objective : program.objectives) out.push_back(dot(objective.coefficients, bits));
  return out;
}

PortfolioSolution decode(const BinaryLinearProgram& program, const std::vector<std::uint8_t>& bits) {
  if (bits.size() != program.variables.size()) throw std::invalid_argument("bit vector has wrong width");
  PortfolioSolution s;
  s.bits = bits;
  s.x.assign(program.periods, std::vector<std::uint8_t>(program.projects, 0));
  s.y.assign(program.periods, std::vector<std::vector<std::uint8_t>>(
                                  program.elements, std::vector<std::uint8_t>(program.projects, 0)));
  for (std::size_t k = 0; k < bits.size(); ++k) {
    const auto& v = program.variables[k];
    if (v.kind == VariableKind::project) {
      s.x[v.period][v.project] = bits[k];
    } else {
      s.y[v.period][v.element][v.project] = bits[k];
    }
  }
  s.outcome = outcome_of(program, bits);
  return s;
}

std::vector<std::uint8_t> encode(const BinaryLinearProgram& program, const PortfolioSolution& solution) {
  std::vector<std::uint8_t> bits(program.variables.size(), 0);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    const auto& v = program.variables[k];
    bits[k] = v.kind == VariableKind::project ? solution.x.at(v.period).at(v.project)
                                              : solution.y.at(v.period).at(v.element).at(v.project);
  }
  return bits;
}

namespace {

using Outcome = std::vector<Rational>;

bool lex_greater(const Outcome& a, const Outcome& b) {
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

void sort_solutions(std::vector<PortfolioSolution>& solutions) {
  std::sort(solutions.begin(), solutions.end(), [](const auto& a, const auto& b) {
    if (a.outcome != b.outcome) return lex_greater(a.outcome, b.outcome);
    return a.bits > b.bits;
  });
}

std::vector<Outcome> non_dominated(const std::set<Outcome>& outcomes) {
  std::vector<Outcome> out;
  for (const auto& o : outcomes) {
    bool dominated = false;
    for (const auto& other : outcomes) {
      if (dominates(other, o)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(o);
  }
  return out;
}

Constraint lower_bound_row(const std::string& name, const std::vector<Rational>& coefficients,
                           const Rational& bound) {
  return {name, coefficients, Comparator::ge, bound};
}

class EpsilonSweep {
 public:
  explicit EpsilonSweep(const BinaryLinearProgram& program) : program_(program) {
    const std::size_t k = program.objectives.size();
    const std::size_t n = program.variables.size();
    for (std::size_t d = 0; d < k; ++d) steps_.push_back(rational_gcd(program.objectives[d].coefficients));
    // maximize M*f1 + sum of the others, where one grid step of f1 outweighs
    // any spread of the others
    std::vector<Rational> rest(n, Rational(0));
    for (std::size_t d = 1; d < k; ++d) {
      for (std::size_t j = 0; j < n; ++j) rest[j] += program.objectives[d].coefficients[j];
    }
    Rational spread(0);
    for (const auto& c : rest) spread += c < 0 ? -c : c;
    const Rational unit = steps_[0] == 0 ? Rational(1) : steps_[0];
    const Rational ratio = spread / unit;
    const Rational weight(ratio.numerator() / ratio.denominator() + 1);
    augmented_.resize(n);
    for (std::size_t j = 0; j < n; ++j) augmented_[j] = weight * program.objectives[0].coefficients[j] + rest[j];
  }

  std::set<Outcome> run() {
    std::set<Outcome> found;
    const std::size_t k = program_.objectives.size();
    for (std::size_t d = 1; d < k; ++d) {
      std::vector<Rational> negated;
      for (const auto& c : program_.objectives[d].coefficients) negated.push_back(-c);
      auto low = solve_objective(program_, negated);
      ++solves_;
      if (low.status != SolveStatus::optimal) return found;
      minimum_.push_back(-low.objective);
    }
    std::vector<Constraint> rows;
    sweep(k - 1, rows, found);
    return found;
  }

  std::uint64_t solves() const { return solves_; }

 private:
  /// Points found under the given bounds on objectives d+1..k.
  std::vector<Outcome> sweep(std::size_t d, std::vector<Constraint>& rows, std::set<Outcome>& found) {
    std::vector<Outcome> points;
    if (d == 0) {
      auto r = solve_objective(program_, augmented_, rows);
      ++solves_;
      if (r.status == SolveStatus::optimal) {
        points.push_back(outcome_of(program_, r.solution));
        found.insert(points.back());
      }
      return points;
    }
    Rational bound = minimum_[d - 1];
    while (true) {
      rows.push_back(lower_bound_row("eps_" + program_.objectives[d].id,
                                     program_.objectives[d].coefficients, bound));
      auto inner = sweep(d - 1, rows, found);
      rows.pop_back();
      if (inner.empty()) break;
      Rational lowest = inner.front()[d];
      for (const auto& p : inner) lowest = std::min(lowest, p[d]);
      points.insert(points.end(), inner.begin(), inner.end());
      if (steps_[d] == 0) break;
      bound = lowest + steps_[d];
    }
    return points;
  }

  const BinaryLinearProgram& program_;
  std::vector<Rational> steps_;
  std::vector<Rational> minimum_;
  std::vector<Rational> augmented_;
  std::uint64_t solves_ = 0;
};

}  // namespace

Front epsilon_constraint_front(const BinaryLinearProgram& program, const FrontOptions& options) {
  if (program.objectives.empty()) throw std::invalid_argument("program has no objectives");
  Front front;
  EpsilonSweep sweep(program);
  const auto outcomes = non_dominated(sweep.run());
  front.solves = sweep.solves();
  front.outcome_count = outcomes.size();
  for (const auto& z : outcomes) {
    std::vector<Constraint> rows;
    for (std::size_t d = 0; d < z.size(); ++d) {
      rows.push_back(lower_bound_row("at_least_" + program.objectives[d].id,
                                     program.objectives[d].coefficients, z[d]));
    }
    auto support = enumerate_feasible(program, rows, options.cap_per_outcome);
    ++front.solves;
    front.truncated = front.truncated || support.truncated;
    for (auto& s : support.solutions) front.solutions.push_back(decode(program, s.solution));
  }
  sort_solutions(front.solutions);
  return front;
}

Front brute_force_front(const BinaryLinearProgram& program) {
  if (program.objectives.empty()) throw std::invalid_argument("program has no objectives");
  const std::size_t n = program.variables.size();
  const std::size_t k = program.objectives.size();
  std::vector<std::vector<std::int64_t>> scaled(k);
  for (std::size_t d = 0; d < k; ++d) {
    std::int64_t den = 1;
    for (const auto& c : program.objectives[d].coefficients) den = std::lcm(den, c.denominator());
    for (const auto& c : program.objectives[d].coefficients) {
      scaled[d].push_back(c.numerator() * (den / c.denominator()));
    }
  }
  struct Entry {
    std::vector<std::int64_t> value;
    std::vector<std::uint64_t> masks;
  };
  std::vector<Entry> archive;
  auto weakly_better = [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    for (std::size_t d = 0; d < a.size(); ++d) {
      if (a[d] < b[d]) return false;
    }
    return true;
  };
  std::vector<std::int64_t> value(k);
  for_each_feasible(program, {}, [&](std::uint64_t mask) {
    std::fill(value.begin(), value.end(), 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (!((mask >> (n - 1 - j)) & 1u)) continue;
      for (std::size_t d = 0; d < k; ++d) value[d] += scaled[d][j];
    }
    for (auto& e : archive) {
      if (e.value == value) {
        e.masks.push_back(mask);
        return;
      }
      if (weakly_better(e.value, value)) return;
    }
    archive.erase(std::remove_if(archive.begin(), archive.end(),
                                 [&](const Entry& e) { return weakly_better(value, e.value); }),
                  archive.end());
    archive.push_back({value, {mask}});
  });
  Front front;
  front.outcome_count = archive.size();
  front.solves = 1;
  for (const auto& e : archive) {
    for (auto mask : e.masks) front.solutions.push_back(decode(program, mask_to_bits(mask, n)));
  }
  sort_solutions(front.solutions);
  return front;
}

namespace {

std::string bit_string(const BinaryLinearProgram& program, const std::vector<std::uint8_t>& bits,
                       VariableKind kind) {
  std::string out;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (program.variables[k].kind == kind) out.push_back(bits[k] ? '1' : '0');
  }
  return out;
}

std::string project_label(const Instance& instance, const BinaryLinearProgram& program, std::size_t t,
                          std::size_t j) {
  std::string label = instance.projects[j].id;
  if (program.periods > 1 || instance.variant == Variant::temporal) label += "@" + instance.periods.at(t);
  return label;
}

std::vector<std::string> selected_projects(const Instance& instance, const BinaryLinearProgram& program,
                                           const PortfolioSolution& s) {
  std::vector<std::string> out;
  for (std::size_t t = 0; t < s.x.size(); ++t) {
    for (std::size_t j = 0; j < s.x[t].size(); ++j) {
      if (s.x[t][j]) out.push_back(project_label(instance, program, t, j));
    }
  }
  return out;
}

std::string assignment_text(const Instance& instance, const BinaryLinearProgram& program,
                            const PortfolioSolution& s) {
  std::vector<std::string> parts;
  for (std::size_t t = 0; t < s.y.size(); ++t) {
    for (std::size_t i = 0; i < s.y[t].size(); ++i) {
      for (std::size_t j = 0; j < s.y[t][i].size(); ++j) {
        if (s.y[t][i][j]) parts.push_back(instance.elements[i].id + "->" + project_label(instance, program, t, j));
      }
    }
  }
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? " " : "") + parts[k];
  return out.empty() ? "(none)" : out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? sep : "") + parts[k];
  return out;
}

}  // namespace

std::string render_front_text(const Instance& instance, const BinaryLinearProgram& program,
                              const Front& front) {
  std::ostringstream out;
  if (front.solutions.empty()) {
    out << "infeasible\n";
    return out.str();
  }
  out << front.solutions.size() << " non-dominated portfolios (" << front.outcome_count
      << " outcome vectors)" << (front.truncated ? " [truncated]" : "") << '\n';
  const Outcome* current = nullptr;
  for (const auto& s : front.solutions) {
    if (!current || *current != s.outcome) {
      current = &s.outcome;
      std::vector<std::string> values;
      for (const auto& v : s.outcome) values.push_back(to_string(v));
      out << "outcome (" << join(values, ", ") << ")  projects {"
          << join(selected_projects(instance, program, s), ", ") << "}\n";
    }
    out << "  " << assignment_text(instance, program, s) << '\n';
  }
  return out.str();
}

std::string front_to_csv(const Instance& instance, const BinaryLinearProgram& program, const Front& front) {
  std::ostringstream out;
  out << "solution,projects,assignments,x,y";
  for (const auto& o : program.objectives) out << ',' << o.id;
  out << '\n';
  for (std::size_t k = 0; k < front.solutions.size(); ++k) {
    const auto& s = front.solutions[k];
    out << k + 1 << ',' << join(selected_projects(instance, program, s), ";") << ','
        << assignment_text(instance, program, s) << ',' << bit_string(program, s.bits, VariableKind::project)
        << ',' << bit_string(program, s.bits, VariableKind::assignment);
    for (const auto& v : s.outcome) out << ',' << to_string(v);
    out << '\n';
  }
  return out.str();
}

nlohmann::json solution_to_json(const Instance& instance, const BinaryLinearProgram& program,
                                const PortfolioSolution& s) {
  nlohmann::json j;
  j["x"] = s.x;
  j["y"] = s.y;
  j["projects"] = selected_projects(instance, program, s);
  j["assignments"] = nlohmann::json::array();
  for (std::size_t t = 0; t < s.y.size(); ++t) {
    for (std::size_t i = 0; i < s.y[t].size(); ++i) {
      for (std::size_t p = 0; p < s.y[t][i].size(); ++p) {
        if (!s.y[t][i][p]) continue;
        nlohmann::json a{{"element", instance.elements[i].id}, {"project", instance.projects[p].id}};
        if (instance.variant == Variant::temporal) a["period"] = instance.periods[t];
        j["assignments"].push_back(std::move(a));
      }
    }
  }
  j["outcome"] = nlohmann::json::array();
  for (const auto& v : s.outcome) j["outcome"].push_back(to_string(v));
  return j;
}

nlohmann::json front_to_json(const Instance& instance, const BinaryLinearProgram& program,
                             const Front& front) {
  nlohmann::json j;
  j["count"] = front.solutions.size();
  j["outcome_count"] = front.outcome_count;
  j["truncated"] = front.truncated;
  j["objectives"] = nlohmann::json::array();
  for (const auto& o : program.objectives) j["objectives"].push_back(o.id);
  j["solutions"] = nlohmann::json::array();
  for (const auto& s : front.solutions) j["solutions"].push_back(solution_to_json(instance, program, s));
  return j;
}

}  // namespace pop
