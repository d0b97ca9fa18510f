#include "pop/instance.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace pop {

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::plain: return "plain";
    case Variant::temporal: return "temporal";
    case Variant::stochastic: return "stochastic";
  }
  return "plain";
}

Variant variant_from_string(const std::string& text) {
  if (text == "plain") return Variant::plain;
  if (text == "temporal") return Variant::temporal;
  if (text == "stochastic") return Variant::stochastic;
  throw std::invalid_argument("unknown variant '" + text + "'");
}

std::size_t Instance::context_count() const {
  switch (variant) {
    case Variant::plain: return 1;
    case Variant::temporal: return periods.size();
    case Variant::stochastic: return scenarios.size();
  }
  return 1;
}

std::string Instance::context_id(std::size_t context) const {
  switch (variant) {
    case Variant::plain: return "";
    case Variant::temporal: return periods.at(context);
    case Variant::stochastic: return scenarios.at(context).id;
  }
  return "";
}

namespace {

template <typename Range, typename Key>
std::optional<std::size_t> find_by_id(const Range& range, const std::string& id, Key key) {
  for (std::size_t i = 0; i < range.size(); ++i) {
    if (key(range[i]) == id) return i;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> Instance::find_criterion(const std::string& id) const {
  return find_by_id(criteria, id, [](const LevelScale& s) { return s.id; });
}
std::optional<std::size_t> Instance::find_objective(const std::string& id) const {
  return find_by_id(objectives, id, [](const ObjectiveDescriptor& o) { return o.id; });
}
std::optional<std::size_t> Instance::find_element(const std::string& id) const {
  return find_by_id(elements, id, [](const Element& e) { return e.id; });
}
std::optional<std::size_t> Instance::find_project(const std::string& id) const {
  return find_by_id(projects, id, [](const Project& p) { return p.id; });
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  std::ostringstream out;
  out << "invalid instance";
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::error) out << "; " << d.message;
  }
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

namespace {

void error(std::vector<Diagnostic>& out, std::string code, std::string message);

void check_structure(const Instance& instance) {
  std::vector<Diagnostic> out;
  const std::size_t contexts = instance.context_count();
  for (const auto& scale : instance.criteria) {
    if (scale.levels.empty()) error(out, "empty-scale", "criterion '" + scale.id + "' has no levels");
  }
  for (const auto& e : instance.elements) {
    if (e.performances.size() != contexts) {
      error(out, "missing-performance", "element '" + e.id + "' lacks per-context performances");
      continue;
    }
    for (const auto& row : e.performances) {
      for (std::size_t p = row.size(); p < instance.criteria.size(); ++p) {
        error(out, "missing-performance",
              "missing performance for (element '" + e.id + "', criterion '" +
                  instance.criteria[p].id + "')");
      }
    }
  }
  if (has_errors(out)) throw ValidationError(std::move(out));
}

}  // namespace

// ---------------------------------------------------------------------------
// QualificationTable

QualificationTable::QualificationTable(std::size_t contexts, std::size_t elements,
                                       std::vector<std::size_t> levels_per_criterion)
    : contexts_(contexts), elements_(elements), levels_(std::move(levels_per_criterion)) {
  level_offset_.reserve(levels_.size());
  for (std::size_t n : levels_) {
    level_offset_.push_back(row_width_);
    row_width_ += n;
  }
  bits_.assign(contexts_ * elements_ * row_width_, 0);
}

std::size_t QualificationTable::index(std::size_t context, std::size_t element,
                                      std::size_t criterion, std::size_t level) const {
  if (context >= contexts_ || element >= elements_ || criterion >= levels_.size() ||
      level >= levels_[criterion]) {
    throw std::out_of_range("qualification index out of range");
  }
  return (context * elements_ + element) * row_width_ + level_offset_[criterion] + level;
}

bool QualificationTable::at(std::size_t context, std::size_t element, std::size_t criterion,
                            std::size_t level) const {
  return bits_[index(context, element, criterion, level)] != 0;
}

void QualificationTable::set(std::size_t context, std::size_t element, std::size_t criterion,
                             std::size_t level, bool value) {
  bits_[index(context, element, criterion, level)] = value ? 1 : 0;
}

std::size_t QualificationTable::qualifying_count(std::size_t context, std::size_t criterion,
                                                 std::size_t level) const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < elements_; ++i) count += at(context, i, criterion, level) ? 1 : 0;
  return count;
}

namespace {

std::vector<std::size_t> level_counts(const Instance& instance) {
  std::vector<std::size_t> counts;
  counts.reserve(instance.criteria.size());
  for (const auto& c : instance.criteria) counts.push_back(c.levels.size());
  return counts;
}

}  // namespace

QualificationTable qualification_from_performances(
    const Instance& instance, const std::vector<std::vector<Rational>>& performances) {
  QualificationTable table(1, instance.elements.size(), level_counts(instance));
  for (std::size_t i = 0; i < instance.elements.size(); ++i) {
    for (std::size_t p = 0; p < instance.criteria.size(); ++p) {
      const auto& levels = instance.criteria[p].levels;
      for (std::size_t h = 0; h < levels.size(); ++h) {
        table.set(0, i, p, h, performances.at(i).at(p) >= levels[h]);
      }
    }
  }
  return table;
}

QualificationTable derive_qualification(const Instance& instance) {
  check_structure(instance);
  QualificationTable table(instance.context_count(), instance.elements.size(),
                           level_counts(instance));
  for (std::size_t t = 0; t < instance.context_count(); ++t) {
    for (std::size_t i = 0; i < instance.elements.size(); ++i) {
      const auto& perf = instance.elements[i].performances[t];
      for (std::size_t p = 0; p < instance.criteria.size(); ++p) {
        const auto& levels = instance.criteria[p].levels;
        for (std::size_t h = 0; h < levels.size(); ++h) {
          table.set(t, i, p, h, perf[p] >= levels[h]);
        }
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// validation

namespace {

void error(std::vector<Diagnostic>& out, std::string code, std::string message) {
  out.push_back({Severity::error, std::move(code), std::move(message)});
}

void warning(std::vector<Diagnostic>& out, std::string code, std::string message) {
  out.push_back({Severity::warning, std::move(code), std::move(message)});
}

template <typename T, typename Key>
void check_unique_ids(std::vector<Diagnostic>& out, const std::vector<T>& items,
                      const std::string& what, Key key) {
  std::vector<std::string> ids;
  for (const auto& item : items) ids.push_back(key(item));
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i] == ids[i - 1]) error(out, "duplicate-id", "duplicate " + what + " id '" + ids[i] + "'");
  }
  for (const auto& id : ids) {
    if (id.empty()) error(out, "empty-id", what + " with empty id");
  }
}

bool structurally_sound(const Instance& instance, std::vector<Diagnostic>& out) {
  const std::size_t contexts = instance.context_count();
  bool sound = true;
  for (const auto& e : instance.elements) {
    if (e.performances.size() != contexts) {
      error(out, "missing-performance",
            "element '" + e.id + "' has performances for " + std::to_string(e.performances.size()) +
                " of " + std::to_string(contexts) + " contexts");
      sound = false;
      continue;
    }
    for (std::size_t t = 0; t < contexts; ++t) {
      if (e.performances[t].size() < instance.criteria.size()) {
        for (std::size_t p = e.performances[t].size(); p < instance.criteria.size(); ++p) {
          error(out, "missing-performance",
                "missing performance for (element '" + e.id + "', criterion '" +
                    instance.criteria[p].id + "')");
        }
        sound = false;
      }
    }
    if (e.costs.size() != instance.projects.size()) {
      error(out, "cost-shape", "element '" + e.id + "' cost list does not match the projects");
      sound = false;
    }
  }
  for (const auto& pr : instance.projects) {
    if (pr.objective_values.size() != contexts) {
      error(out, "missing-objective-value",
            "project '" + pr.id + "' objective values do not cover every context");
      sound = false;
      continue;
    }
    for (const auto& row : pr.objective_values) {
      if (row.size() != instance.objectives.size()) {
        error(out, "missing-objective-value",
              "project '" + pr.id + "' is missing objective values");
        sound = false;
      }
    }
  }
  return sound;
}

/// Cheapest set of elements meeting every requirement of one project in one
/// context, by exhaustive subset enumeration. nullopt when none exists or the
/// instance is too large for enumeration.
std::optional<Rational> min_staffing_cost(const Instance& instance, const QualificationTable& v,
                                          std::size_t context, std::size_t project) {
  const std::size_t m = instance.elements.size();
  if (m > 20) return std::nullopt;
  std::optional<Rational> best;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    Rational cost{0};
    bool allowed = true;
    for (std::size_t i = 0; i < m && allowed; ++i) {
      if (!(mask >> i & 1u)) continue;
      const auto& w = instance.elements[i].costs[project];
      if (!w) allowed = false; else cost += *w;
    }
    if (!allowed || (best && cost >= *best)) continue;
    bool ok = true;
    for (const auto& r : instance.projects[project].requirements) {
      std::int64_t count = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if ((mask >> i & 1u) && v.at(context, i, r.criterion, r.level)) ++count;
      }
      if (count < r.min_count) { ok = false; break; }
    }
    if (ok) best = cost;
  }
  return best;
}

bool requirements_met(const Instance& instance, const QualificationTable& v, std::size_t context,
                      std::size_t project, const std::vector<int>& owner, int tag) {
  for (const auto& r : instance.projects[project].requirements) {
    std::int64_t count = 0;
    for (std::size_t i = 0; i < owner.size(); ++i) {
      if (owner[i] == tag && v.at(context, i, r.criterion, r.level)) ++count;
    }
    if (count < r.min_count) return false;
  }
  return true;
}

/// Cheapest disjoint staffing of two projects in the same context
/// (3^m enumeration of element owners).
std::optional<Rational> min_pair_cost(const Instance& instance, const QualificationTable& v,
                                      std::size_t context, std::size_t a, std::size_t b) {
  const std::size_t m = instance.elements.size();
  if (m > 12) return std::nullopt;
  std::vector<int> owner(m, 0);
  std::optional<Rational> best;
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    Rational cost{0};
    bool allowed = true;
    for (std::size_t i = 0; i < m; ++i) {
      owner[i] = static_cast<int>(c % 3);
      c /= 3;
      if (owner[i] == 0) continue;
      const auto& w = instance.elements[i].costs[owner[i] == 1 ? a : b];
      if (!w) allowed = false; else cost += *w;
    }
    if (!allowed || (best && cost >= *best)) continue;
    if (requirements_met(instance, v, context, a, owner, 1) &&
        requirements_met(instance, v, context, b, owner, 2)) {
      best = cost;
    }
  }
  return best;
}

/// Qualification used for the feasibility warnings: per context for the
/// plain and temporal variants, best case over scenarios for stochastic.
QualificationTable warning_table(const Instance& instance) {
  if (instance.variant != Variant::stochastic) return derive_qualification(instance);
  std::vector<std::vector<Rational>> best(instance.elements.size());
  for (std::size_t i = 0; i < instance.elements.size(); ++i) {
    for (std::size_t p = 0; p < instance.criteria.size(); ++p) {
      Rational top = instance.elements[i].performances[0][p];
      for (const auto& row : instance.elements[i].performances) top = std::max(top, row[p]);
      best[i].push_back(top);
    }
  }
  return qualification_from_performances(instance, best);
}

void feasibility_warnings(const Instance& instance, std::vector<Diagnostic>& out) {
  const QualificationTable v = warning_table(instance);
  for (std::size_t t = 0; t < v.contexts(); ++t) {
    std::string where = instance.variant == Variant::temporal
                            ? " in period '" + instance.periods[t] + "'"
                            : std::string();
    std::vector<std::optional<Rational>> single(instance.projects.size());
    for (std::size_t j = 0; j < instance.projects.size(); ++j) {
      const auto& project = instance.projects[j];
      bool satisfiable = true;
      for (const auto& r : project.requirements) {
        std::size_t qualifying = v.qualifying_count(t, r.criterion, r.level);
        if (static_cast<std::int64_t>(qualifying) < r.min_count) {
          satisfiable = false;
          warning(out, "requirement-unsatisfiable",
                  "project '" + project.id + "' needs " + std::to_string(r.min_count) +
                      " elements at level " + std::to_string(r.level + 1) + " of criterion '" +
                      instance.criteria[r.criterion].id + "' but only " +
                      std::to_string(qualifying) + " can ever qualify" + where);
        }
      }
      if (!satisfiable) continue;
      single[j] = min_staffing_cost(instance, v, t, j);
      if (single[j] && *single[j] > instance.budget) {
        warning(out, "project-over-budget",
                "cheapest staffing of project '" + project.id + "' costs " + to_string(*single[j]) +
                    " which exceeds the budget " + to_string(instance.budget) + where);
      }
    }
    std::vector<std::string> pairs;
    for (std::size_t a = 0; a < instance.projects.size(); ++a) {
      for (std::size_t b = a + 1; b < instance.projects.size(); ++b) {
        if (!single[a] || !single[b]) continue;
        if (*single[a] > instance.budget || *single[b] > instance.budget) continue;
        auto cost = min_pair_cost(instance, v, t, a, b);
        if (cost && *cost > instance.budget) {
          pairs.push_back(instance.projects[a].id + "+" + instance.projects[b].id + " (min " +
                          to_string(*cost) + ")");
        }
      }
    }
    if (!pairs.empty()) {
      std::string list;
      for (const auto& p : pairs) list += (list.empty() ? "" : ", ") + p;
      warning(out, "budget-excludes-combinations",
              "every requirement-satisfying staffing of these project pairs exceeds the budget " +
                  to_string(instance.budget) + where + ": " + list);
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate(const Instance& instance) {
  std::vector<Diagnostic> out;
  check_unique_ids(out, instance.criteria, "criterion", [](const LevelScale& s) { return s.id; });
  check_unique_ids(out, instance.objectives, "objective",
                   [](const ObjectiveDescriptor& o) { return o.id; });
  check_unique_ids(out, instance.elements, "element", [](const Element& e) { return e.id; });
  check_unique_ids(out, instance.projects, "project", [](const Project& p) { return p.id; });

  if (instance.criteria.empty()) error(out, "no-criteria", "instance defines no criteria");
  if (instance.objectives.empty()) error(out, "no-objectives", "instance defines no objectives");
  for (const auto& scale : instance.criteria) {
    if (scale.levels.empty()) {
      error(out, "empty-scale", "criterion '" + scale.id + "' has an empty level list");
    }
    for (std::size_t h = 1; h < scale.levels.size(); ++h) {
      if (!(scale.levels[h - 1] < scale.levels[h])) {
        error(out, "scale-not-increasing",
              "levels of criterion '" + scale.id + "' must be strictly increasing");
        break;
      }
    }
  }
  for (const auto& objective : instance.objectives) {
    for (std::size_t s = 1; s < objective.thresholds.size(); ++s) {
      if (!(objective.thresholds[s - 1] < objective.thresholds[s])) {
        error(out, "thresholds-not-increasing",
              "threshold levels of objective '" + objective.id + "' must be strictly increasing");
        break;
      }
    }
  }
  if (instance.budget < 0) error(out, "negative-budget", "budget must be non-negative");

  switch (instance.variant) {
    case Variant::plain: break;
    case Variant::temporal:
      if (instance.periods.empty()) error(out, "no-periods", "temporal instance defines no periods");
      break;
    case Variant::stochastic: {
      if (instance.scenarios.empty()) {
        error(out, "no-scenarios", "stochastic instance defines no scenarios");
        break;
      }
      Rational total{0};
      for (const auto& s : instance.scenarios) {
        if (s.probability <= 0 || s.probability > 1) {
          error(out, "probability-range",
                "probability of scenario '" + s.id + "' must lie in (0,1]");
        }
        total += s.probability;
      }
      if (total != 1) {
        error(out, "probability-sum",
              "probabilities must sum to 1 (got " + to_string(total) + ")");
      }
      break;
    }
  }

  for (const auto& project : instance.projects) {
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& r : project.requirements) {
      if (r.criterion >= instance.criteria.size() ||
          r.level >= instance.criteria[r.criterion].levels.size()) {
        error(out, "bad-requirement", "project '" + project.id + "' references an unknown level");
        continue;
      }
      if (r.min_count < 0) {
        error(out, "negative-requirement",
              "project '" + project.id + "' has a negative minimum count");
      }
      std::pair key{r.criterion, r.level};
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
        error(out, "duplicate-requirement",
              "project '" + project.id + "' repeats requirement (" +
                  instance.criteria[r.criterion].id + ", level " + std::to_string(r.level + 1) + ")");
      }
      seen.push_back(key);
    }
  }
  for (const auto& e : instance.elements) {
    for (const auto& w : e.costs) {
      if (w && *w < 0) error(out, "negative-cost", "element '" + e.id + "' has a negative cost");
    }
  }

  if (!structurally_sound(instance, out) || has_errors(out)) return out;
  feasibility_warnings(instance, out);
  return out;
}

void require_valid(const Instance& instance) {
  auto diagnostics = validate(instance);
  if (has_errors(diagnostics)) throw ValidationError(std::move(diagnostics));
}

}  // namespace pop
