#include "pop/session.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pop/instance_io.hpp"
#include "pop/solver.hpp"
#include "pop/stochastic.hpp"

namespace pop {

std::string to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::awaiting_candidates:
      return "awaiting_candidates";
    case SessionStatus::awaiting_classification:
      return "awaiting_classification";
    case SessionStatus::awaiting_rule_choice:
      return "awaiting_rule_choice";
    case SessionStatus::converged:
      return "converged";
    case SessionStatus::infeasible:
      return "infeasible";
  }
  return "unknown";
}

nlohmann::json to_json(const SessionOptions& options) {
  nlohmann::json j{{"mode", options.mode == CandidateMode::front ? "front" : "quantities"},
                   {"converge_at", options.converge_at},
                   {"rule_budget", options.rule_budget},
                   {"phis", nlohmann::json::array()}};
  for (const auto& phi : options.phis) j["phis"].push_back(to_string(phi));
  return j;
}

SessionOptions session_options_from_json(const nlohmann::json& j) {
  SessionOptions options;
  if (!j.is_object()) throw std::invalid_argument("session options must be an object");
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "front") {
      options.mode = CandidateMode::front;
    } else if (mode != "quantities") {
      throw std::invalid_argument("unknown candidate mode '" + mode + "'");
    }
  }
  options.converge_at = j.value("converge_at", options.converge_at);
  options.rule_budget = j.value("rule_budget", options.rule_budget);
  if (j.contains("phis")) {
    for (const auto& p : j.at("phis")) {
      options.phis.push_back(p.is_string() ? parse_rational(p.get<std::string>()) : rational_from_json(p));
    }
  }
  return options;
}

namespace {

std::string bit_string(const std::vector<std::uint8_t>& bits) {
  std::string s;
  for (auto b : bits) s += b ? '1' : '0';
  return s;
}

/// Strict dominance on quantity vectors, polarity aware.
bool quantity_dominates(const std::vector<QuantityDescriptor>& schema, const std::vector<std::int64_t>& a,
                        const std::vector<std::int64_t>& b) {
  bool strict = false;
  for (std::size_t q = 0; q < schema.size(); ++q) {
    const bool gain = schema[q].polarity() == Polarity::gain;
    const auto lhs = gain ? a[q] : -a[q];
    const auto rhs = gain ? b[q] : -b[q];
    if (lhs < rhs) return false;
    if (lhs > rhs) strict = true;
  }
  return strict;
}

std::vector<Rational> negated(std::vector<Rational> v) {
  for (auto& c : v) c = -c;
  return v;
}

}  // namespace

Session::Session(Instance instance, SessionOptions options)
    : instance_(std::move(instance)), options_(std::move(options)) {
  require_valid(instance_);
  if (instance_.variant == Variant::stochastic) {
    if (options_.phis.empty()) options_.phis = phi_set(instance_.scenarios);
    for (const auto& phi : options_.phis) {
      if (!is_admissible_phi(instance_, phi)) {
        throw std::invalid_argument("phi " + to_string(phi) + " is not one of the admissible probability levels");
      }
    }
  } else if (!options_.phis.empty()) {
    throw std::invalid_argument("phi values only apply to stochastic instances");
  }
  if (options_.converge_at == 0) throw std::invalid_argument("converge_at must be positive");
  schema_ = default_quantities(instance_, options_.phis);
}

std::vector<BinaryLinearProgram> Session::programs() const {
  std::vector<BinaryLinearProgram> out;
  auto finish = [&](BinaryLinearProgram p) {
    p = require_nonempty(std::move(p));
    out.push_back(append_rule_constraints(std::move(p), accepted_, instance_));
  };
  if (instance_.variant == Variant::stochastic) {
    for (const auto& phi : options_.phis) finish(compile(instance_, phi));
  } else {
    finish(compile(instance_));
  }
  return out;
}

std::vector<Candidate> Session::compute_candidates() const {
  const auto progs = programs();
  std::vector<std::vector<std::uint8_t>> found;
  std::set<std::vector<std::uint8_t>> seen;
  auto keep = [&](const std::vector<std::uint8_t>& bits) {
    if (seen.insert(bits).second) found.push_back(bits);
  };

  for (std::size_t k = 0; k < progs.size(); ++k) {
    const auto& program = progs[k];
    if (options_.mode == CandidateMode::front) {
      for (const auto& s : epsilon_constraint_front(program).solutions) keep(s.bits);
      continue;
    }
    // secondary term: every F quantity minus chi, used to break ties
    std::vector<Rational> secondary(program.variables.size(), Rational(0));
    std::vector<std::vector<Rational>> coefficients;
    for (const auto& q : schema_) {
      coefficients.push_back(quantity_coefficients(instance_, program, q));
      const Rational sign = q.polarity() == Polarity::gain ? 1 : -1;
      for (std::size_t j = 0; j < secondary.size(); ++j) secondary[j] += sign * coefficients.back()[j];
    }
    Rational spread(1);
    for (const auto& c : secondary) spread += c < 0 ? -c : c;
    for (std::size_t q = 0; q < schema_.size(); ++q) {
      const auto& quantity = schema_[q];
      if (quantity.kind == QuantityKind::f_stochastic && quantity.phi != options_.phis[k]) continue;
      const auto primary =
          quantity.polarity() == Polarity::gain ? coefficients[q] : negated(coefficients[q]);
      std::vector<Rational> objective(secondary.size());
      for (std::size_t j = 0; j < objective.size(); ++j) objective[j] = spread * primary[j] + secondary[j];
      const auto r = solve_objective(program, objective);
      if (r.status != SolveStatus::optimal) break;
      keep(r.solution);
    }
  }

  const auto& layout = progs.front();
  std::vector<Candidate> all;
  for (const auto& bits : found) {
    Candidate c;
    c.portfolio = decode(layout, bits);
    for (const auto& q : schema_) c.values.push_back(quantity_value(instance_, layout, q, bits));
    c.portfolio.quantity_values = c.values;
    all.push_back(std::move(c));
  }
  std::vector<Candidate> out;
  for (const auto& c : all) {
    const bool dominated = std::any_of(all.begin(), all.end(), [&](const Candidate& o) {
      return quantity_dominates(schema_, o.values, c.values);
    });
    if (!dominated) out.push_back(c);
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k].id = "c" + std::to_string(k + 1);
  return out;
}

void Session::regenerate() {
  IterationRecord record;
  record.number = iterations_.size() + 1;
  record.candidates = compute_candidates();
  if (record.candidates.empty()) {
    status_ = SessionStatus::infeasible;
  } else if (record.candidates.size() <= options_.converge_at) {
    status_ = SessionStatus::converged;
  } else {
    status_ = SessionStatus::awaiting_classification;
  }
  iterations_.push_back(std::move(record));
}

const std::vector<Candidate>& Session::generate_candidates() {
  if (status_ != SessionStatus::awaiting_candidates) {
    throw SessionStateError("candidates were already generated (status " + to_string(status_) + ")");
  }
  regenerate();
  actions_.push_back({{"op", "generate"}});
  return iterations_.back().candidates;
}

const IterationRecord& Session::classify(const std::map<std::string, std::string>& labels) {
  if (status_ != SessionStatus::awaiting_classification) {
    throw SessionStateError("classification is not expected (status " + to_string(status_) + ")");
  }
  auto& record = iterations_.back();
  std::map<std::string, Label> parsed;
  std::optional<std::string> final_id;
  for (const auto& [id, text] : labels) {
    const bool known = std::any_of(record.candidates.begin(), record.candidates.end(),
                                   [&](const Candidate& c) { return c.id == id; });
    if (!known) throw std::invalid_argument("unknown candidate id '" + id + "'");
    if (text == "final") {
      if (final_id) throw std::invalid_argument("only one candidate can be marked final");
      final_id = id;
    } else {
      parsed[id] = label_from_string(text);
    }
  }
  if (final_id) {
    record.classifications = parsed;
    final_choice_ = final_id;
    status_ = SessionStatus::converged;
    actions_.push_back({{"op", "classify"}, {"labels", labels}});
    return record;
  }
  std::vector<std::string> missing;
  for (const auto& c : record.candidates) {
    if (!parsed.count(c.id)) missing.push_back(c.id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw std::invalid_argument("missing labels for: " + list);
  }
  InformationTable table{schema_, {}};
  for (const auto& c : record.candidates) table.rows.push_back({c.id, c.values, parsed.at(c.id)});
  record.classifications = parsed;
  record.induced_rules = induce_rules(table, {options_.rule_budget, std::to_string(record.number) + "."});
  status_ = SessionStatus::awaiting_rule_choice;
  actions_.push_back({{"op", "classify"}, {"labels", labels}});
  return record;
}

const DecisionRule& Session::find_rule(const std::string& id) const {
  for (const auto& r : iterations_.back().induced_rules.rules) {
    if (r.id == id) return r;
  }
  throw NotFoundError("unknown rule id '" + id + "'");
}

const std::vector<Candidate>& Session::accept_rules(const std::vector<std::string>& rule_ids) {
  if (status_ != SessionStatus::awaiting_rule_choice) {
    throw SessionStateError("no rule choice is pending (status " + to_string(status_) + ")");
  }
  if (rule_ids.empty()) throw std::invalid_argument("at least one rule id is required");
  std::vector<DecisionRule> chosen;
  for (const auto& id : rule_ids) chosen.push_back(find_rule(id));
  for (auto& r : chosen) accepted_.push_back(std::move(r));
  iterations_.back().chosen_rules.insert(iterations_.back().chosen_rules.end(), rule_ids.begin(), rule_ids.end());
  regenerate();
  actions_.push_back({{"op", "accept"}, {"rules", rule_ids}});
  return iterations_.back().candidates;
}

const std::vector<Candidate>& Session::relax() {
  if (status_ != SessionStatus::awaiting_rule_choice && status_ != SessionStatus::infeasible) {
    throw SessionStateError("relaxation is only offered while choosing a rule or when infeasible");
  }
  if (accepted_.empty()) throw SessionStateError("there is no accepted rule to drop");
  accepted_.pop_back();
  iterations_.back().relaxed = true;
  regenerate();
  actions_.push_back({{"op", "relax"}});
  return iterations_.back().candidates;
}

void Session::finalize(const std::string& candidate_id) {
  if (status_ == SessionStatus::awaiting_candidates || status_ == SessionStatus::infeasible) {
    throw SessionStateError("there are no candidates to choose from (status " + to_string(status_) + ")");
  }
  if (final_choice_) throw SessionStateError("a final portfolio was already chosen");
  const auto& cands = iterations_.back().candidates;
  if (std::none_of(cands.begin(), cands.end(), [&](const Candidate& c) { return c.id == candidate_id; })) {
    throw NotFoundError("unknown candidate id '" + candidate_id + "'");
  }
  final_choice_ = candidate_id;
  status_ = SessionStatus::converged;
  actions_.push_back({{"op", "finalize"}, {"candidate", candidate_id}});
}

nlohmann::json Session::candidate_json(const Candidate& c) const {
  const auto layout = compile(instance_, options_.phis.empty() ? std::nullopt : std::optional(options_.phis[0]));
  auto j = solution_to_json(instance_, layout, c.portfolio);
  j["id"] = c.id;
  j["bits"] = bit_string(c.portfolio.bits);
  j["quantities"] = c.values;
  return j;
}

nlohmann::json Session::state_json() const {
  nlohmann::json j;
  j["status"] = to_string(status_);
  j["variant"] = to_string(instance_.variant);
  j["instance_hash"] = instance_hash(instance_);
  j["options"] = to_json(options_);
  j["schema"] = nlohmann::json::array();
  for (const auto& q : schema_) j["schema"].push_back(to_json(instance_, q));
  j["accepted_rules"] = nlohmann::json::array();
  for (const auto& r : accepted_) j["accepted_rules"].push_back(to_json(instance_, r));
  j["iterations"] = nlohmann::json::array();
  for (const auto& it : iterations_) {
    nlohmann::json rec{{"number", it.number}, {"relaxed", it.relaxed}, {"chosen_rules", it.chosen_rules}};
    rec["candidates"] = nlohmann::json::array();
    for (const auto& c : it.candidates) rec["candidates"].push_back(candidate_json(c));
    rec["classifications"] = nlohmann::json::object();
    for (const auto& [id, label] : it.classifications) rec["classifications"][id] = to_string(label);
    rec["induced_rules"] = to_json(instance_, it.induced_rules);
    j["iterations"].push_back(std::move(rec));
  }
  j["final_choice"] = final_choice_ ? nlohmann::json(*final_choice_) : nlohmann::json(nullptr);
  j["finals"] = nlohmann::json::array();
  if (status_ == SessionStatus::converged) {
    for (const auto& c : iterations_.back().candidates) {
      if (!final_choice_ || c.id == *final_choice_) j["finals"].push_back(c.id);
    }
  }
  return j;
}

nlohmann::json Session::save() const {
  return {{"format", "pop-session"},
          {"version", kFormatVersion},
          {"instance_hash", instance_hash(instance_)},
          {"instance", to_json(instance_)},
          {"options", to_json(options_)},
          {"actions", actions_},
          {"state", state_json()}};
}

Session Session::load(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", std::string()) != "pop-session") {
    throw std::invalid_argument("not a session file");
  }
  if (!doc.contains("version") || !doc.at("version").is_number_integer()) {
    throw std::invalid_argument("session file has no version");
  }
  const auto version = doc.at("version").get<int>();
  if (version != kFormatVersion) {
    throw std::invalid_argument("unsupported session file version " + std::to_string(version));
  }
  Instance instance = load_instance(doc.at("instance"));
  if (instance_hash(instance) != doc.at("instance_hash").get<std::string>()) {
    throw std::invalid_argument("embedded instance does not match the recorded instance hash");
  }
  Session s(std::move(instance), session_options_from_json(doc.at("options")));
  for (const auto& a : doc.at("actions")) {
    const auto op = a.at("op").get<std::string>();
    if (op == "generate") {
      s.generate_candidates();
    } else if (op == "classify") {
      s.classify(a.at("labels").get<std::map<std::string, std::string>>());
    } else if (op == "accept") {
      s.accept_rules(a.at("rules").get<std::vector<std::string>>());
    } else if (op == "relax") {
      s.relax();
    } else if (op == "finalize") {
      s.finalize(a.at("candidate").get<std::string>());
    } else {
      throw std::invalid_argument("unknown session action '" + op + "'");
    }
  }
  if (doc.contains("state")) {
    const auto& stored = doc.at("state");
    const auto replayed = s.state_json();
    if (stored.at("status") != replayed.at("status")) {
      throw std::runtime_error("session replay diverged: status differs");
    }
    const auto& a = stored.at("iterations");
    const auto& b = replayed.at("iterations");
    if (a.size() != b.size()) throw std::runtime_error("session replay diverged: iteration count differs");
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto& ca = a[k].at("candidates");
      const auto& cb = b[k].at("candidates");
      if (ca.size() != cb.size()) {
        throw std::runtime_error("session replay diverged: iteration " + std::to_string(k + 1) +
                                 " candidate count differs");
      }
      for (std::size_t c = 0; c < ca.size(); ++c) {
        if (ca[c].at("bits") != cb[c].at("bits")) {
          throw std::runtime_error("session replay diverged: iteration " + std::to_string(k + 1) + " candidate " +
                                   cb[c].at("id").get<std::string>() + " differs");
        }
      }
    }
  }
  return s;
}

std::int64_t equal_utility(const std::vector<QuantityDescriptor>& schema, const std::vector<std::int64_t>& values) {
  std::int64_t u = 0;
  for (std::size_t q = 0; q < schema.size(); ++q) u += schema[q].polarity() == Polarity::gain ? values[q] : -values[q];
  return u;
}

std::map<std::string, std::string> simulate_dm(const std::vector<QuantityDescriptor>& schema,
                                               const std::vector<Candidate>& candidates,
                                               const std::vector<Rational>& weights, const Rational& fraction) {
  std::vector<Rational> w = weights;
  if (w.empty()) {
    for (const auto& q : schema) w.push_back(q.polarity() == Polarity::gain ? 1 : -1);
  }
  if (w.size() != schema.size()) throw std::invalid_argument("one weight per quantity is required");
  std::vector<Rational> utility;
  for (const auto& c : candidates) {
    Rational u(0);
    for (std::size_t q = 0; q < w.size(); ++q) u += w[q] * c.values.at(q);
    utility.push_back(u);
  }
  std::map<std::string, std::string> labels;
  if (candidates.empty()) return labels;
  const Rational best = *std::max_element(utility.begin(), utility.end());
  const Rational cut = best - (1 - fraction) * (best < 0 ? -best : best);
  for (std::size_t k = 0; k < candidates.size(); ++k) labels[candidates[k].id] = utility[k] >= cut ? "good" : "other";
  return labels;
}

const DecisionRule* pick_rule(const std::vector<QuantityDescriptor>& schema, const RuleSet& rules) {
  auto key = [&](const DecisionRule& r) {
    std::vector<std::pair<std::size_t, std::int64_t>> k;
    for (const auto& c : r.conditions) {
      const auto q = static_cast<std::size_t>(std::find(schema.begin(), schema.end(), c.quantity) - schema.begin());
      k.emplace_back(q, c.threshold);
    }
    return k;
  };
  const DecisionRule* best = nullptr;
  for (const auto& r : rules.rules) {
    if (!r.consistent) continue;
    if (!best) {
      best = &r;
      continue;
    }
    if (r.coverage.size() != best->coverage.size()) {
      if (r.coverage.size() > best->coverage.size()) best = &r;
      continue;
    }
    if (r.conditions.size() != best->conditions.size()) {
      if (r.conditions.size() < best->conditions.size()) best = &r;
      continue;
    }
    if (key(r) < key(*best)) best = &r;
  }
  return best;
}

namespace {

const Candidate& best_by_utility(const Session& session) {
  const auto& cands = session.current()->candidates;
  const Candidate* best = &cands.front();
  for (const auto& c : cands) {
    if (equal_utility(session.schema(), c.values) > equal_utility(session.schema(), best->values)) best = &c;
  }
  return *best;
}

}  // namespace

SimulationResult run_simulated(Session& session, const Rational& fraction, std::size_t max_iterations) {
  SimulationResult result;
  if (session.status() == SessionStatus::awaiting_candidates) session.generate_candidates();
  while (session.status() == SessionStatus::awaiting_classification ||
         session.status() == SessionStatus::awaiting_rule_choice) {
    const auto* record = session.current();
    SimulationStep step;
    step.iteration = record->number;
    step.candidate_count = record->candidates.size();
    if (session.status() == SessionStatus::awaiting_rule_choice) {
      // resumed mid-iteration; relabel is not possible, pick from the rules
    } else {
      step.labels = simulate_dm(session.schema(), record->candidates, {}, fraction);
      if (record->number >= max_iterations) {
        step.note = "iteration limit reached; choosing the candidate with the highest utility";
        session.finalize(best_by_utility(session).id);
        result.steps.push_back(std::move(step));
        break;
      }
      session.classify(step.labels);
    }
    const auto& rules = session.current()->induced_rules;
    for (const auto& r : rules.rules) step.rules.push_back(r.id + ": " + render_rule_compact(session.instance(), r));
    const DecisionRule* rule = pick_rule(session.schema(), rules);
    if (!rule) {
      if (!session.accepted_rules().empty()) {
        step.note = "no rule separates the good portfolios; dropping the last accepted rule";
        result.steps.push_back(std::move(step));
        session.relax();
        continue;
      }
      step.note = "no rule available; choosing the candidate with the highest utility";
      session.finalize(best_by_utility(session).id);
      result.steps.push_back(std::move(step));
      break;
    }
    if (rule->conditions.empty()) {
      step.note = "every candidate is good; choosing the one with the highest utility";
      session.finalize(best_by_utility(session).id);
      result.steps.push_back(std::move(step));
      break;
    }
    step.accepted = rule->id;
    result.steps.push_back(std::move(step));
    session.accept_rule(rule->id);
  }
  result.status = session.status();
  if (session.status() == SessionStatus::converged) {
    for (const auto& c : session.current()->candidates) {
      if (!session.final_choice() || c.id == *session.final_choice()) result.finals.push_back(c);
    }
  }
  return result;
}

std::string render_candidates(const Session& session, const std::vector<Candidate>& candidates) {
  std::vector<std::string> header{"id"};
  for (const auto& q : session.schema()) header.push_back(symbol(session.instance(), q));
  std::vector<std::size_t> width;
  for (const auto& h : header) width.push_back(std::max<std::size_t>(h.size(), 3));
  std::ostringstream out;
  auto cell = [&](std::size_t k, const std::string& text) {
    out << std::string(width[k] - std::min(width[k], text.size()), ' ') << text << "  ";
  };
  for (std::size_t k = 0; k < header.size(); ++k) cell(k, header[k]);
  out << "projects\n";
  const auto layout = compile(session.instance(), session.options().phis.empty()
                                                      ? std::nullopt
                                                      : std::optional(session.options().phis[0]));
  for (const auto& c : candidates) {
    cell(0, c.id);
    for (std::size_t q = 0; q < c.values.size(); ++q) cell(q + 1, std::to_string(c.values[q]));
    const auto j = solution_to_json(session.instance(), layout, c.portfolio);
    std::string projects;
    for (const auto& p : j.at("projects")) projects += (projects.empty() ? "" : ", ") + p.get<std::string>();
    out << "{" << projects << "}\n";
  }
  return out.str();
}

std::string render_simulation(const Session& session, const SimulationResult& result) {
  std::ostringstream out;
  const auto& iterations = session.iterations();
  for (const auto& step : result.steps) {
    out << "iteration " << step.iteration << ": " << step.candidate_count << " candidates\n";
    if (step.iteration >= 1 && step.iteration <= iterations.size()) {
      out << render_candidates(session, iterations[step.iteration - 1].candidates);
    }
    if (!step.labels.empty()) {
      out << "labels:";
      for (const auto& [id, label] : step.labels) out << ' ' << id << '=' << label;
      out << '\n';
    }
    for (const auto& r : step.rules) out << "rule " << r << '\n';
    if (!step.accepted.empty()) out << "accepted rule " << step.accepted << '\n';
    if (!step.note.empty()) out << step.note << '\n';
  }
  out << "status: " << to_string(result.status) << " after " << iterations.size() << " iteration"
      << (iterations.size() == 1 ? "" : "s") << '\n';
  if (!result.finals.empty()) {
    out << result.finals.size() << " final candidate" << (result.finals.size() == 1 ? "" : "s") << '\n';
    out << render_candidates(session, result.finals);
  }
  return out.str();
}

}  // namespace pop
