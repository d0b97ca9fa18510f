#include "pop/solver.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace pop {

namespace {

using Int = std::int64_t;

Int checked_scale(const Rational& value, Int denominator) {
  __int128 scaled = static_cast<__int128>(value.numerator()) * (denominator / value.denominator());
  if (scaled > std::numeric_limits<Int>::max() / 4 || scaled < std::numeric_limits<Int>::min() / 4) {
    throw std::overflow_error("coefficient too large after scaling");
  }
  return static_cast<Int>(scaled);
}

/// sum a_k x_k <= rhs with integer data
struct IntRow {
  std::vector<std::pair<std::uint32_t, Int>> terms;
  Int rhs = 0;
  Int max_abs = 0;
};

IntRow scale_row(const Constraint& row, std::size_t n) {
  if (row.coefficients.size() != n) throw std::invalid_argument("row '" + row.name + "' has wrong width");
  Int den = row.rhs.denominator();
  for (const auto& c : row.coefficients) den = std::lcm(den, c.denominator());
  const Int sign = row.comparator == Comparator::le ? 1 : -1;
  IntRow out;
  for (std::size_t k = 0; k < n; ++k) {
    if (row.coefficients[k] == 0) continue;
    Int a = sign * checked_scale(row.coefficients[k], den);
    out.terms.emplace_back(static_cast<std::uint32_t>(k), a);
    out.max_abs = std::max(out.max_abs, a < 0 ? -a : a);
  }
  out.rhs = sign * checked_scale(row.rhs, den);
  return out;
}

struct IntObjective {
  std::vector<Int> coefficients;
  Int denominator = 1;

  Rational value(Int scaled) const { return Rational(scaled, denominator); }
};

IntObjective scale_objective(const std::vector<Rational>& objective, std::size_t n) {
  if (objective.size() != n) throw std::invalid_argument("objective has wrong width");
  IntObjective out;
  for (const auto& c : objective) out.denominator = std::lcm(out.denominator, c.denominator());
  for (const auto& c : objective) out.coefficients.push_back(checked_scale(c, out.denominator));
  return out;
}

std::vector<IntRow> scale_rows(const BinaryLinearProgram& program, const std::vector<Constraint>& extra) {
  std::vector<IntRow> rows;
  const std::size_t n = program.variables.size();
  for (const auto& r : program.constraints) rows.push_back(scale_row(r, n));
  for (const auto& r : extra) rows.push_back(scale_row(r, n));
  return rows;
}

class Search {
 public:
  enum class Mode { optimize, enumerate };

  Search(const BinaryLinearProgram& program, const std::vector<Constraint>& extra,
         const std::vector<Rational>& objective)
      : n_(program.variables.size()),
        rows_(scale_rows(program, extra)),
        objective_(scale_objective(objective, n_)),
        occurrences_(n_),
        value_(n_, -1),
        min_activity_(rows_.size(), 0) {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (const auto& [k, a] : rows_[r].terms) {
        occurrences_[k].emplace_back(static_cast<std::uint32_t>(r), a);
        min_activity_[r] += std::min<Int>(a, 0);
      }
    }
    for (Int c : objective_.coefficients) positive_free_ += std::max<Int>(c, 0);
  }

  SolveResult optimize() {
    mode_ = Mode::optimize;
    run();
    SolveResult result;
    result.nodes = nodes_;
    if (found_) {
      result.status = SolveStatus::optimal;
      result.objective = objective_.value(best_);
      result.solution = best_bits_;
    }
    return result;
  }

  Enumeration enumerate(std::optional<Int> target, std::size_t cap) {
    mode_ = Mode::enumerate;
    target_ = target;
    cap_ = cap;
    run();
    Enumeration out;
    out.nodes = nodes_;
    out.truncated = truncated_;
    for (auto& bits : collected_) {
      SolveResult r;
      r.status = SolveStatus::optimal;
      r.objective = objective_.value(value_of(bits));
      r.solution = std::move(bits);
      r.nodes = nodes_;
      out.solutions.push_back(std::move(r));
    }
    return out;
  }

  Int scaled(const Rational& value) const { return checked_scale(value, objective_.denominator); }

 private:
  void run() {
    for (std::size_t r = 0; r < rows_.size(); ++r) dirty_.push_back(static_cast<std::uint32_t>(r));
    if (!propagate()) {
      nodes_ = 1;
      return;
    }
    dfs(0);
  }

  Int value_of(const std::vector<std::uint8_t>& bits) const {
    Int total = 0;
    for (std::size_t k = 0; k < n_; ++k) {
      if (bits[k]) total += objective_.coefficients[k];
    }
    return total;
  }

  void assign(std::size_t k, bool on) {
    value_[k] = on ? 1 : 0;
    trail_.push_back(static_cast<std::uint32_t>(k));
    const Int c = objective_.coefficients[k];
    positive_free_ -= std::max<Int>(c, 0);
    if (on) fixed_ += c;
    for (const auto& [r, a] : occurrences_[k]) {
      min_activity_[r] += (on ? a : 0) - std::min<Int>(a, 0);
      dirty_.push_back(r);
    }
  }

  void unassign_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const std::size_t k = trail_.back();
      trail_.pop_back();
      const bool on = value_[k] == 1;
      const Int c = objective_.coefficients[k];
      positive_free_ += std::max<Int>(c, 0);
      if (on) fixed_ -= c;
      for (const auto& [r, a] : occurrences_[k]) min_activity_[r] -= (on ? a : 0) - std::min<Int>(a, 0);
      value_[k] = -1;
    }
  }

  bool propagate() {
    while (!dirty_.empty()) {
      const std::uint32_t r = dirty_.back();
      dirty_.pop_back();
      const IntRow& row = rows_[r];
      const Int slack = row.rhs - min_activity_[r];
      if (slack < 0) {
        dirty_.clear();
        return false;
      }
      if (slack >= row.max_abs) continue;
      for (const auto& [k, a] : row.terms) {
        if (value_[k] != -1) continue;
        if (a > 0 && a > slack) {
          assign(k, false);
        } else if (a < 0 && -a > slack) {
          assign(k, true);
        }
      }
    }
    return true;
  }

  bool pruned(Int bound) const {
    if (mode_ == Mode::optimize) return found_ && bound <= best_;
    return target_ && bound < *target_;
  }

  bool dfs(std::size_t cursor) {
    ++nodes_;
    if (pruned(fixed_ + positive_free_)) return true;
    while (cursor < n_ && value_[cursor] != -1) ++cursor;
    if (cursor == n_) return leaf();
    for (bool on : {true, false}) {
      const std::size_t mark = trail_.size();
      assign(cursor, on);
      bool keep_going = true;
      if (propagate()) keep_going = dfs(cursor + 1);
      unassign_to(mark);
      if (!keep_going) return false;
    }
    return true;
  }

  bool leaf() {
    std::vector<std::uint8_t> bits(n_);
    for (std::size_t k = 0; k < n_; ++k) bits[k] = static_cast<std::uint8_t>(value_[k]);
    if (mode_ == Mode::optimize) {
      if (!found_ || fixed_ > best_) {
        found_ = true;
        best_ = fixed_;
        best_bits_ = std::move(bits);
      }
      return true;
    }
    if (target_ && fixed_ < *target_) return true;
    if (collected_.size() == cap_) {
      truncated_ = true;
      return false;
    }
    collected_.push_back(std::move(bits));
    return true;
  }

  std::size_t n_;
  std::vector<IntRow> rows_;
  IntObjective objective_;
  std::vector<std::vector<std::pair<std::uint32_t, Int>>> occurrences_;
  std::vector<std::int8_t> value_;
  std::vector<Int> min_activity_;
  std::vector<std::uint32_t> trail_;
  std::vector<std::uint32_t> dirty_;
  Int fixed_ = 0;
  Int positive_free_ = 0;
  std::uint64_t nodes_ = 0;

  Mode mode_ = Mode::optimize;
  bool found_ = false;
  Int best_ = 0;
  std::vector<std::uint8_t> best_bits_;

  std::optional<Int> target_;
  std::size_t cap_ = 0;
  bool truncated_ = false;
  std::vector<std::vector<std::uint8_t>> collected_;
};

}  // namespace

SolveResult solve_objective(const BinaryLinearProgram& program, const std::vector<Rational>& objective,
                            const std::vector<Constraint>& extra_rows) {
  return Search(program, extra_rows, objective).optimize();
}

SolveResult solve(const BinaryLinearProgram& program, const std::string& objective_id,
                  const std::vector<Constraint>& extra_rows) {
  return solve_objective(program, program.objective(objective_id).coefficients, extra_rows);
}

Enumeration enumerate_optima_objective(const BinaryLinearProgram& program,
                                       const std::vector<Rational>& objective, std::size_t cap,
                                       const std::vector<Constraint>& extra_rows) {
  SolveResult best = solve_objective(program, objective, extra_rows);
  Enumeration out;
  out.nodes = best.nodes;
  if (best.status != SolveStatus::optimal) return out;
  Search search(program, extra_rows, objective);
  Enumeration all = search.enumerate(search.scaled(best.objective), cap);
  all.nodes += best.nodes;
  return all;
}

Enumeration enumerate_optima(const BinaryLinearProgram& program, const std::string& objective_id,
                             std::size_t cap, const std::vector<Constraint>& extra_rows) {
  return enumerate_optima_objective(program, program.objective(objective_id).coefficients, cap,
                                    extra_rows);
}

Enumeration enumerate_feasible(const BinaryLinearProgram& program,
                               const std::vector<Constraint>& extra_rows, std::size_t cap) {
  std::vector<Rational> zero(program.variables.size(), Rational(0));
  return Search(program, extra_rows, zero).enumerate(std::nullopt, cap);
}

Constraint no_good_cut(const std::vector<std::uint8_t>& bits) {
  Constraint cut{"nogood", std::vector<Rational>(bits.size(), Rational(0)), Comparator::le, Rational(-1)};
  for (std::size_t k = 0; k < bits.size(); ++k) {
    cut.coefficients[k] = bits[k] ? 1 : -1;
    if (bits[k]) cut.rhs += 1;
  }
  return cut;
}

std::vector<std::uint8_t> mask_to_bits(std::uint64_t mask, std::size_t variables) {
  std::vector<std::uint8_t> bits(variables);
  for (std::size_t k = 0; k < variables; ++k) bits[k] = (mask >> (variables - 1 - k)) & 1u;
  return bits;
}

void for_each_feasible(const BinaryLinearProgram& program, const std::vector<Constraint>& extra_rows,
                       const std::function<void(std::uint64_t)>& visit) {
  const std::size_t n = program.variables.size();
  if (n > kBruteForceLimit) {
    throw std::length_error("brute force refuses " + std::to_string(n) + " variables (limit " +
                            std::to_string(kBruteForceLimit) + ")");
  }
  const auto rows = scale_rows(program, extra_rows);
  std::vector<std::vector<std::pair<std::uint32_t, Int>>> occurrences(n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [k, a] : rows[r].terms) occurrences[k].emplace_back(static_cast<std::uint32_t>(r), a);
  }
  std::vector<Int> activity(rows.size(), 0);
  std::size_t violated = 0;
  for (const auto& row : rows) violated += row.rhs < 0 ? 1 : 0;
  std::uint64_t mask = 0;
  if (violated == 0) visit(mask);
  const std::uint64_t total = n == 0 ? 1 : (std::uint64_t{1} << n);
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto k = static_cast<std::size_t>(__builtin_ctzll(step));
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - k);
    const bool on = (mask & bit) == 0;
    mask ^= bit;
    for (const auto& [r, a] : occurrences[k]) {
      const bool was = activity[r] > rows[r].rhs;
      activity[r] += on ? a : -a;
      const bool now = activity[r] > rows[r].rhs;
      if (was != now) {
        if (now) {
          ++violated;
        } else {
          --violated;
        }
      }
    }
    if (violated == 0) visit(mask);
  }
}

SolveResult brute_force_objective(const BinaryLinearProgram& program,
                                  const std::vector<Rational>& objective,
                                  const std::vector<Constraint>& extra_rows) {
  const std::size_t n = program.variables.size();
  const IntObjective scaled = scale_objective(objective, n);
  bool found = false;
  Int best = 0;
  std::uint64_t best_mask = 0;
  std::uint64_t visited = 0;
  for_each_feasible(program, extra_rows, [&](std::uint64_t mask) {
    ++visited;
    Int value = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if ((mask >> (n - 1 - k)) & 1u) value += scaled.coefficients[k];
    }
    if (!found || value > best || (value == best && mask > best_mask)) {
      found = true;
      best = value;
      best_mask = mask;
    }
  });
  SolveResult result;
  result.nodes = n == 0 ? 1 : (std::uint64_t{1} << n);
  if (found) {
    result.status = SolveStatus::optimal;
    result.objective = scaled.value(best);
    result.solution = mask_to_bits(best_mask, n);
  }
  return result;
}

SolveResult brute_force(const BinaryLinearProgram& program, const std::string& objective_id,
                        const std::vector<Constraint>& extra_rows) {
  return brute_force_objective(program, program.objective(objective_id).coefficients, extra_rows);
}

}  // namespace pop
