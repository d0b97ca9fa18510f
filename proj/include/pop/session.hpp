#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pop/drsa.hpp"
#include "pop/pareto.hpp"
#include "pop/quantity.hpp"

namespace pop {

enum class SessionStatus { awaiting_candidates, awaiting_classification, awaiting_rule_choice, converged, infeasible };

std::string to_string(SessionStatus status);

/// Raised when an operation is not allowed in the current status.
class SessionStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised for unknown candidate or rule ids.
class NotFoundError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

enum class CandidateMode {
  quantities,  // optimize each quantity on its own
  front,       // full epsilon-constraint front
};

struct SessionOptions {
  /// Stochastic only; empty means every admissible phi.
  std::vector<Rational> phis;
  CandidateMode mode = CandidateMode::quantities;
  /// Converge once at most this many candidates remain.
  std::size_t converge_at = 2;
  std::size_t rule_budget = 200000;
};

nlohmann::json to_json(const SessionOptions& options);
SessionOptions session_options_from_json(const nlohmann::json& j);

struct Candidate {
  std::string id;
  PortfolioSolution portfolio;
  std::vector<std::int64_t> values;  // one per schema quantity
};

struct IterationRecord {
  std::size_t number = 0;
  std::vector<Candidate> candidates;
  std::map<std::string, Label> classifications;
  RuleSet induced_rules;
  std::vector<std::string> chosen_rules;
  bool relaxed = false;
};

/// Single-writer state machine; callers serialize mutations.
class Session {
 public:
  Session(Instance instance, SessionOptions options = {});

  const Instance& instance() const { return instance_; }
  const SessionOptions& options() const { return options_; }
  SessionStatus status() const { return status_; }
  const std::vector<QuantityDescriptor>& schema() const { return schema_; }
  const std::vector<IterationRecord>& iterations() const { return iterations_; }
  const std::vector<DecisionRule>& accepted_rules() const { return accepted_; }
  const std::optional<std::string>& final_choice() const { return final_choice_; }
  const IterationRecord* current() const { return iterations_.empty() ? nullptr : &iterations_.back(); }

  /// Program used for candidate generation under the accepted rules; one per
  /// phi for stochastic sessions, otherwise a single entry.
  std::vector<BinaryLinearProgram> programs() const;

  const std::vector<Candidate>& generate_candidates();
  /// Labels are "good", "other" or "final" (at most one). A final label
  /// converges the session; otherwise every candidate needs a label.
  const IterationRecord& classify(const std::map<std::string, std::string>& labels);
  const std::vector<Candidate>& accept_rules(const std::vector<std::string>& rule_ids);
  const std::vector<Candidate>& accept_rule(const std::string& rule_id) { return accept_rules({rule_id}); }
  /// Drops the most recently accepted rule and regenerates.
  const std::vector<Candidate>& relax();
  void finalize(const std::string& candidate_id);

  nlohmann::json state_json() const;
  nlohmann::json candidate_json(const Candidate& candidate) const;
  nlohmann::json save() const;
  /// Rebuilds the session by replaying the recorded actions and checks the
  /// replay reproduces every stored candidate bit for bit.
  static Session load(const nlohmann::json& doc);

  static constexpr int kFormatVersion = 1;

 private:
  void regenerate();
  const DecisionRule& find_rule(const std::string& id) const;
  std::vector<Candidate> compute_candidates() const;

  Instance instance_;
  SessionOptions options_;
  std::vector<QuantityDescriptor> schema_;
  SessionStatus status_ = SessionStatus::awaiting_candidates;
  std::vector<IterationRecord> iterations_;
  std::vector<DecisionRule> accepted_;
  std::optional<std::string> final_choice_;
  nlohmann::json actions_ = nlohmann::json::array();
};

/// Equal-weight utility: sum of the F quantities minus chi.
std::int64_t equal_utility(const std::vector<QuantityDescriptor>& schema, const std::vector<std::int64_t>& values);

/// good iff utility >= best - (1 - fraction) * |best|; with a non-negative
/// best this is fraction * best. `weights` defaults to +1 per gain quantity
/// and -1 per cost quantity.
std::map<std::string, std::string> simulate_dm(const std::vector<QuantityDescriptor>& schema,
                                               const std::vector<Candidate>& candidates,
                                               const std::vector<Rational>& weights = {},
                                               const Rational& fraction = Rational(9, 10));

/// Preferred rule for an automated DM: largest good coverage, then fewest
/// conditions, then schema order of (quantity, threshold).
const DecisionRule* pick_rule(const std::vector<QuantityDescriptor>& schema, const RuleSet& rules);

struct SimulationStep {
  std::size_t iteration = 0;
  std::size_t candidate_count = 0;
  std::map<std::string, std::string> labels;
  std::vector<std::string> rules;   // compact renderings
  std::string accepted;             // rule id, empty when none
  std::string note;
};

struct SimulationResult {
  std::vector<SimulationStep> steps;
  std::vector<Candidate> finals;
  SessionStatus status = SessionStatus::awaiting_candidates;
};

/// Drives a session to convergence with the simulated DM.
SimulationResult run_simulated(Session& session, const Rational& fraction = Rational(9, 10),
                               std::size_t max_iterations = 20);

std::string render_candidates(const Session& session, const std::vector<Candidate>& candidates);
std::string render_simulation(const Session& session, const SimulationResult& result);

}  // namespace pop
