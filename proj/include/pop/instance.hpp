#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pop/rational.hpp"

namespace pop {

enum class Variant { plain, temporal, stochastic };

std::string to_string(Variant variant);
Variant variant_from_string(const std::string& text);

/// Ordered discrete scale L_p of one criterion. Qualitative scales store
/// their ordinal codes as numbers; `labels` maps code -> display text.
struct LevelScale {
  std::string id;
  std::string name;
  std::vector<Rational> levels;
  std::map<std::int64_t, std::string> labels;
};

/// An objective z_l together with the optional threshold levels used by
/// the interactive quantities F_{l,s}.
struct ObjectiveDescriptor {
  std::string id;
  std::string name;
  std::vector<Rational> thresholds;
};

/// One allocatable resource. `performances[context][criterion]`, where the
/// context is the single deterministic state, a period or a scenario
/// depending on the variant. `costs[project]` is empty when the element may
/// not join that project.
struct Element {
  std::string id;
  std::vector<std::vector<Rational>> performances;
  std::vector<std::optional<Rational>> costs;
};

/// u_jph > 0 for one (criterion, level) pair; `level` is 0-based.
struct Requirement {
  std::size_t criterion = 0;
  std::size_t level = 0;
  std::int64_t min_count = 0;
};

struct Project {
  std::string id;
  std::string name;
  /// `objective_values[context][objective]`
  std::vector<std::vector<Rational>> objective_values;
  std::vector<Requirement> requirements;
};

struct Scenario {
  std::string id;
  Rational probability;
};

struct Instance {
  Variant variant = Variant::plain;
  std::string name;
  std::vector<LevelScale> criteria;
  std::vector<ObjectiveDescriptor> objectives;
  std::vector<Element> elements;
  std::vector<Project> projects;
  Rational budget{0};
  std::vector<std::string> periods;
  std::vector<Scenario> scenarios;

  /// 1 for plain, |periods| for temporal, |scenarios| for stochastic.
  std::size_t context_count() const;
  std::string context_id(std::size_t context) const;

  std::optional<std::size_t> find_criterion(const std::string& id) const;
  std::optional<std::size_t> find_objective(const std::string& id) const;
  std::optional<std::size_t> find_element(const std::string& id) const;
  std::optional<std::size_t> find_project(const std::string& id) const;
};

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string code;
  std::string message;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Thrown when an instance cannot be used for solving.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Bits v[context][element][criterion][level].
class QualificationTable {
 public:
  QualificationTable() = default;
  QualificationTable(std::size_t contexts, std::size_t elements,
                     std::vector<std::size_t> levels_per_criterion);

  bool at(std::size_t context, std::size_t element, std::size_t criterion,
          std::size_t level) const;
  void set(std::size_t context, std::size_t element, std::size_t criterion,
           std::size_t level, bool value);

  std::size_t contexts() const noexcept { return contexts_; }
  std::size_t elements() const noexcept { return elements_; }
  std::size_t criteria() const noexcept { return level_offset_.size(); }
  std::size_t levels(std::size_t criterion) const { return levels_.at(criterion); }

  /// Number of elements qualifying at (criterion, level) in a context.
  std::size_t qualifying_count(std::size_t context, std::size_t criterion,
                               std::size_t level) const;

  bool operator==(const QualificationTable&) const = default;

 private:
  std::size_t index(std::size_t context, std::size_t element, std::size_t criterion,
                    std::size_t level) const;

  std::size_t contexts_ = 0;
  std::size_t elements_ = 0;
  std::size_t row_width_ = 0;
  std::vector<std::size_t> levels_;
  std::vector<std::size_t> level_offset_;
  std::vector<std::uint8_t> bits_;
};

/// v = 1 iff performance >= level value, evaluated per context. For the
/// stochastic variant the contexts are the individual scenarios; use
/// stochastic::qualification_at_phi for the probabilistic table.
QualificationTable derive_qualification(const Instance& instance);

/// Qualification from an explicit performance matrix perf[element][criterion].
QualificationTable qualification_from_performances(
    const Instance& instance, const std::vector<std::vector<Rational>>& performances);

/// Errors (broken invariants) and warnings (requirements no assignment can
/// meet, budget ruling out staffing). Warnings never block solving.
std::vector<Diagnostic> validate(const Instance& instance);

/// Throws ValidationError when validate() reports any error.
void require_valid(const Instance& instance);

}  // namespace pop
