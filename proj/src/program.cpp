#include "pop/program.hpp"

#include <sstream>
#include <stdexcept>

#include "pop/stochastic.hpp"

namespace pop {

std::size_t BinaryLinearProgram::x_index(std::size_t period, std::size_t project) const {
  if (period >= periods || project >= projects) throw std::out_of_range("x index out of range");
  return period * projects + project;
}

std::optional<std::size_t> BinaryLinearProgram::y_index(std::size_t period, std::size_t element,
                                                        std::size_t project) const {
  if (period >= periods || element >= elements || project >= projects) {
    throw std::out_of_range("y index out of range");
  }
  return y_lookup[(period * elements + element) * projects + project];
}

std::optional<std::size_t> BinaryLinearProgram::objective_index(const std::string& id) const {
  for (std::size_t k = 0; k < objectives.size(); ++k) {
    if (objectives[k].id == id) return k;
  }
  return std::nullopt;
}

const Objective& BinaryLinearProgram::objective(const std::string& id) const {
  auto k = objective_index(id);
  if (!k) throw std::out_of_range("unknown objective '" + id + "'");
  return objectives[*k];
}

namespace {

std::string sanitize(const std::string& id) {
  std::string out;
  for (char ch : id) {
    bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
              ch == '_' || ch == '.';
    out.push_back(ok ? ch : '_');
  }
  return out;
}

/// Variables and the four constraint families, shared by all variants.
/// Only the temporal variant has more than one period; its qualification
/// context is the period itself.
struct Builder {
  const Instance& instance;
  const QualificationTable& v;
  std::size_t periods;
  bool temporal;
  BinaryLinearProgram program;

  Builder(const Instance& inst, const QualificationTable& table, std::size_t period_count, bool is_temporal)
      : instance(inst), v(table), periods(period_count), temporal(is_temporal) {
    program.periods = periods;
    program.projects = instance.projects.size();
    program.elements = instance.elements.size();
    declare_variables();
  }

  std::string prefix(std::size_t t) const {
    return temporal ? sanitize(instance.periods[t]) + "_" : std::string();
  }

  void declare_variables() {
    for (std::size_t t = 0; t < periods; ++t) {
      for (std::size_t j = 0; j < program.projects; ++j) {
        program.variables.push_back({"x_" + prefix(t) + sanitize(instance.projects[j].id),
                                     VariableKind::project, t, j, 0});
      }
    }
    program.y_lookup.assign(periods * program.elements * program.projects, std::nullopt);
    for (std::size_t t = 0; t < periods; ++t) {
      for (std::size_t i = 0; i < program.elements; ++i) {
        for (std::size_t j = 0; j < program.projects; ++j) {
          if (!instance.elements[i].costs[j]) continue;
          program.y_lookup[(t * program.elements + i) * program.projects + j] = program.variables.size();
          program.variables.push_back({"y_" + prefix(t) + sanitize(instance.elements[i].id) + "_" +
                                           sanitize(instance.projects[j].id),
                                       VariableKind::assignment, t, j, i});
        }
      }
    }
  }

  std::vector<Rational> zeros() const { return std::vector<Rational>(program.variables.size(), Rational(0)); }

  void emit_rows() {
    const std::size_t n = program.projects;
    const std::size_t m = program.elements;
    // (a) one project per element over the whole horizon
    for (std::size_t i = 0; i < m; ++i) {
      auto row = zeros();
      for (std::size_t t = 0; t < periods; ++t) {
        for (std::size_t j = 0; j < n; ++j) {
          if (auto y = program.y_index(t, i, j)) row[*y] = 1;
        }
      }
      program.constraints.push_back({"assign_" + sanitize(instance.elements[i].id), std::move(row),
                                     Comparator::le, Rational(1)});
    }
    // (b) assignment only to selected projects
    for (std::size_t t = 0; t < periods; ++t) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          auto y = program.y_index(t, i, j);
          if (!y) continue;
          auto row = zeros();
          row[*y] = 1;
          row[program.x_index(t, j)] = -1;
          program.constraints.push_back({"link_" + prefix(t) + sanitize(instance.elements[i].id) + "_" +
                                             sanitize(instance.projects[j].id),
                                         std::move(row), Comparator::le, Rational(0)});
        }
      }
    }
    // (c) minimal qualified staffing
    for (std::size_t t = 0; t < periods; ++t) {
      const std::size_t ctx = temporal ? t : 0;
      for (std::size_t j = 0; j < n; ++j) {
        for (const auto& r : instance.projects[j].requirements) {
          if (r.min_count == 0) continue;
          auto row = zeros();
          for (std::size_t i = 0; i < m; ++i) {
            auto y = program.y_index(t, i, j);
            if (y && v.at(ctx, i, r.criterion, r.level)) row[*y] = 1;
          }
          row[program.x_index(t, j)] = Rational(-r.min_count);
          program.constraints.push_back(
              {"req_" + prefix(t) + sanitize(instance.projects[j].id) + "_" +
                   sanitize(instance.criteria[r.criterion].id) + "_" + std::to_string(r.level + 1),
               std::move(row), Comparator::ge, Rational(0)});
        }
      }
    }
    // (d) budget
    auto row = zeros();
    for (std::size_t t = 0; t < periods; ++t) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (auto y = program.y_index(t, i, j)) row[*y] = *instance.elements[i].costs[j];
        }
      }
    }
    program.constraints.push_back({"budget", std::move(row), Comparator::le, instance.budget});
  }
};

void require_variant(const Instance& instance, Variant variant) {
  if (instance.variant != variant) {
    throw std::invalid_argument("expected a " + to_string(variant) + " instance, got " +
                                to_string(instance.variant));
  }
}

}  // namespace

BinaryLinearProgram compile_plain(const Instance& instance, const QualificationTable& qualification) {
  require_variant(instance, Variant::plain);
  Builder b(instance, qualification, 1, false);
  b.emit_rows();
  for (std::size_t l = 0; l < instance.objectives.size(); ++l) {
    auto row = b.zeros();
    for (std::size_t j = 0; j < instance.projects.size(); ++j) {
      row[b.program.x_index(0, j)] = instance.projects[j].objective_values[0][l];
    }
    b.program.objectives.push_back({instance.objectives[l].id, std::move(row)});
  }
  return std::move(b.program);
}

BinaryLinearProgram compile_temporal(const Instance& instance,
                                     const QualificationTable& qualification) {
  require_variant(instance, Variant::temporal);
  Builder b(instance, qualification, instance.periods.size(), true);
  b.emit_rows();
  for (std::size_t l = 0; l < instance.objectives.size(); ++l) {
    auto row = b.zeros();
    for (std::size_t t = 0; t < instance.periods.size(); ++t) {
      for (std::size_t j = 0; j < instance.projects.size(); ++j) {
        row[b.program.x_index(t, j)] = instance.projects[j].objective_values[t][l];
      }
    }
    b.program.objectives.push_back({instance.objectives[l].id, std::move(row)});
  }
  return std::move(b.program);
}

BinaryLinearProgram compile_stochastic(const Instance& instance,
                                       const QualificationTable& qualification_at_phi,
                                       const Rational& phi) {
  require_variant(instance, Variant::stochastic);
  if (!is_admissible_phi(instance, phi)) {
    throw std::invalid_argument("phi " + to_string(phi) + " is not an achievable probability");
  }
  Builder b(instance, qualification_at_phi, 1, false);
  b.emit_rows();
  for (std::size_t l = 0; l < instance.objectives.size(); ++l) {
    auto row = b.zeros();
    for (std::size_t j = 0; j < instance.projects.size(); ++j) {
      Rational expected(0);
      for (std::size_t s = 0; s < instance.scenarios.size(); ++s) {
        expected += instance.scenarios[s].probability * instance.projects[j].objective_values[s][l];
      }
      row[b.program.x_index(0, j)] = expected;
    }
    b.program.objectives.push_back({instance.objectives[l].id, std::move(row)});
  }
  return std::move(b.program);
}

BinaryLinearProgram compile(const Instance& instance, const std::optional<Rational>& phi) {
  switch (instance.variant) {
    case Variant::plain:
      return compile_plain(instance, derive_qualification(instance));
    case Variant::temporal:
      return compile_temporal(instance, derive_qualification(instance));
    case Variant::stochastic:
      if (!phi) throw std::invalid_argument("a stochastic instance needs a phi value");
      return compile_stochastic(instance, qualification_at_phi(instance, *phi), *phi);
  }
  throw std::logic_error("unknown variant");
}

Constraint nonempty_row(const BinaryLinearProgram& program) {
  Constraint row{"nonempty", std::vector<Rational>(program.variables.size(), Rational(0)),
                 Comparator::ge, Rational(1)};
  for (std::size_t k = 0; k < program.variables.size(); ++k) {
    if (program.variables[k].kind == VariableKind::project) row.coefficients[k] = 1;
  }
  return row;
}

BinaryLinearProgram require_nonempty(BinaryLinearProgram program) {
  program.constraints.push_back(nonempty_row(program));
  return program;
}

Rational dot(const std::vector<Rational>& coefficients, const std::vector<std::uint8_t>& bits) {
  if (coefficients.size() != bits.size()) throw std::invalid_argument("dimension mismatch");
  Rational total(0);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k]) total += coefficients[k];
  }
  return total;
}

bool satisfies(const Constraint& row, const std::vector<std::uint8_t>& bits) {
  Rational activity = dot(row.coefficients, bits);
  return row.comparator == Comparator::le ? activity <= row.rhs : activity >= row.rhs;
}

bool satisfies_all(const BinaryLinearProgram& program, const std::vector<std::uint8_t>& bits,
                   const std::vector<Constraint>& extra_rows) {
  for (const auto& row : program.constraints) {
    if (!satisfies(row, bits)) return false;
  }
  for (const auto& row : extra_rows) {
    if (!satisfies(row, bits)) return false;
  }
  return true;
}

namespace {

void write_expression(std::ostream& out, const BinaryLinearProgram& program,
                      const std::vector<Rational>& coefficients) {
  bool first = true;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const Rational& c = coefficients[k];
    if (c == 0) continue;
    Rational magnitude = c < 0 ? -c : c;
    if (first) {
      if (c < 0) out << "- ";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    if (magnitude != 1) out << to_string(magnitude) << ' ';
    out << program.variables[k].name;
    first = false;
  }
  if (first) out << "0 " << (program.variables.empty() ? "" : program.variables[0].name);
}

}  // namespace

std::string emit_lp(const BinaryLinearProgram& program) {
  std::ostringstream out;
  out << "\\ " << program.variables.size() << " binary variables, " << program.constraints.size()
      << " constraints, " << program.objectives.size() << " objectives\n";
  out << "Maximize\n";
  for (const auto& objective : program.objectives) {
    out << " " << objective.id << ": ";
    write_expression(out, program, objective.coefficients);
    out << '\n';
  }
  out << "Subject To\n";
  for (const auto& row : program.constraints) {
    out << " " << row.name << ": ";
    write_expression(out, program, row.coefficients);
    out << (row.comparator == Comparator::le ? " <= " : " >= ") << to_string(row.rhs) << '\n';
  }
  out << "Binary\n";
  for (const auto& var : program.variables) out << " " << var.name << '\n';
  out << "End\n";
  return out.str();
}

}  // namespace pop
