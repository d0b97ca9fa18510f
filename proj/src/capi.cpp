#include "pop.h"

#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "pop/instance_io.hpp"
#include "pop/pareto.hpp"
#include "pop/service.hpp"
#include "pop/session.hpp"
#include "pop/stochastic.hpp"

struct pop_instance {
  pop::Instance instance;
};

struct pop_session {
  std::unique_ptr<pop::Session> session;
};

namespace {

thread_local std::string last_error;

/// Result carrying a status that is not an exception, e.g. infeasible.
struct Soft {
  pop_status status;
  std::string message;
};

pop_status run(const std::function<void()>& body) {
  last_error.clear();
  try {
    body();
    return POP_OK;
  } catch (const Soft& s) {
    last_error = s.message;
    return s.status;
  } catch (const pop::ValidationError& e) {
    std::string text = e.what();
    for (const auto& d : e.diagnostics()) text += "\n" + d.code + ": " + d.message;
    last_error = text;
    return POP_VALIDATION;
  } catch (const pop::IoError& e) {
    last_error = e.what();
    return POP_IO;
  } catch (const pop::SessionStateError& e) {
    last_error = e.what();
    return POP_STATE;
  } catch (const pop::NotFoundError& e) {
    last_error = e.what();
    return POP_NOT_FOUND;
  } catch (const std::invalid_argument& e) {
    last_error = e.what();
    return POP_INVALID_ARGUMENT;
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return POP_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return POP_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return POP_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void give(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

std::optional<pop::Rational> opt_phi(const char* phi) {
  if (!phi || !*phi) return std::nullopt;
  return pop::parse_rational(phi);
}

nlohmann::json candidate_payload(const pop::Session& s) {
  nlohmann::json out{{"status", pop::to_string(s.status())},
                     {"iteration", s.current() ? s.current()->number : 0},
                     {"candidates", nlohmann::json::array()}};
  if (s.current()) {
    for (const auto& c : s.current()->candidates) out["candidates"].push_back(s.candidate_json(c));
  }
  return out;
}

pop_status validate_doc(const std::string& text, char** diagnostics_json) {
  std::vector<pop::Diagnostic> diags;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    diags = pop::validate_json(doc);
  } catch (const nlohmann::json::parse_error& e) {
    diags.push_back({pop::Severity::error, "malformed", e.what()});
  }
  give(diagnostics_json, pop::to_json(diags).dump(2));
  if (pop::has_errors(diags)) throw Soft{POP_VALIDATION, "instance has validation errors"};
  return POP_OK;
}

}  // namespace

extern "C" {

const char* pop_version(void) { return "1.0.0"; }
const char* pop_last_error(void) { return last_error.c_str(); }

const char* pop_status_name(pop_status status) {
  switch (status) {
    case POP_OK:
      return "ok";
    case POP_INVALID_ARGUMENT:
      return "invalid argument";
    case POP_VALIDATION:
      return "validation failed";
    case POP_INFEASIBLE:
      return "infeasible";
    case POP_IO:
      return "i/o error";
    case POP_STATE:
      return "wrong session state";
    case POP_NOT_FOUND:
      return "not found";
    case POP_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void pop_string_free(char* text) { std::free(text); }

pop_status pop_instance_load_file(const char* path, pop_instance** out) {
  return run([&] {
    need(path, "path");
    need(out, "out");
    *out = new pop_instance{pop::load_instance_file(path)};
  });
}

pop_status pop_instance_load_json(const char* json, pop_instance** out) {
  return run([&] {
    need(json, "json");
    need(out, "out");
    *out = new pop_instance{pop::load_instance_text(json)};
  });
}

void pop_instance_free(pop_instance* instance) { delete instance; }

pop_status pop_validate_file(const char* path, char** diagnostics_json) {
  return run([&] {
    need(path, "path");
    validate_doc(pop::read_file(path), diagnostics_json);
  });
}

pop_status pop_validate_json(const char* json, char** diagnostics_json) {
  return run([&] {
    need(json, "json");
    validate_doc(json, diagnostics_json);
  });
}

pop_status pop_instance_info(const pop_instance* instance, char** info_json) {
  return run([&] {
    need(instance, "instance");
    const auto& inst = instance->instance;
    nlohmann::json j{{"name", inst.name},
                     {"variant", pop::to_string(inst.variant)},
                     {"instance_hash", pop::instance_hash(inst)},
                     {"criteria", inst.criteria.size()},
                     {"objectives", inst.objectives.size()},
                     {"elements", inst.elements.size()},
                     {"projects", inst.projects.size()},
                     {"budget", pop::to_string(inst.budget)},
                     {"phi_set", nlohmann::json::array()}};
    if (inst.variant == pop::Variant::stochastic) {
      for (const auto& phi : pop::phi_set(inst.scenarios)) j["phi_set"].push_back(pop::to_string(phi));
    }
    give(info_json, j.dump(2));
  });
}

pop_status pop_instance_json(const pop_instance* instance, char** json) {
  return run([&] {
    need(instance, "instance");
    give(json, pop::to_json(instance->instance).dump(2));
  });
}

pop_status pop_qualification_text(const pop_instance* instance, const char* phi, char** text) {
  return run([&] {
    need(instance, "instance");
    const auto& inst = instance->instance;
    const auto p = opt_phi(phi);
    std::string out;
    if (inst.variant == pop::Variant::stochastic) {
      if (!p) throw std::invalid_argument("--phi is required for stochastic instances");
      out = "phi = " + pop::to_string(*p) + "\n" + pop::render_qualification(inst, pop::qualification_at_phi(inst, *p), 0);
    } else {
      if (p) throw std::invalid_argument("phi only applies to stochastic instances");
      const auto table = pop::derive_qualification(inst);
      for (std::size_t t = 0; t < inst.context_count(); ++t) {
        if (inst.variant == pop::Variant::temporal) out += "period " + inst.periods[t] + "\n";
        out += pop::render_qualification(inst, table, t);
        if (t + 1 < inst.context_count()) out += "\n";
      }
    }
    give(text, out);
  });
}

pop_status pop_rho_text(const pop_instance* instance, const char* criterion, char** text) {
  return run([&] {
    need(instance, "instance");
    need(criterion, "criterion");
    const auto p = instance->instance.find_criterion(criterion);
    if (!p) throw pop::NotFoundError(std::string("unknown criterion '") + criterion + "'");
    give(text, pop::render_rho_table(instance->instance, *p));
  });
}

pop_status pop_emit_lp(const pop_instance* instance, const char* phi, char** text) {
  return run([&] {
    need(instance, "instance");
    give(text, pop::emit_lp(pop::require_nonempty(pop::compile(instance->instance, opt_phi(phi)))));
  });
}

pop_status pop_front(const pop_instance* instance, const char* phi, pop_format format, char** text) {
  return run([&] {
    need(instance, "instance");
    const auto& inst = instance->instance;
    const auto program = pop::require_nonempty(pop::compile(inst, opt_phi(phi)));
    const auto front = pop::epsilon_constraint_front(program);
    switch (format) {
      case POP_FORMAT_TEXT:
        give(text, pop::render_front_text(inst, program, front));
        break;
      case POP_FORMAT_CSV:
        give(text, pop::front_to_csv(inst, program, front));
        break;
      case POP_FORMAT_JSON:
        give(text, pop::front_to_json(inst, program, front).dump(2));
        break;
      default:
        throw std::invalid_argument("unknown output format");
    }
    if (front.solutions.empty()) throw Soft{POP_INFEASIBLE, "no non-empty portfolio is feasible"};
  });
}

pop_status pop_session_create(const pop_instance* instance, const char* options_json, pop_session** out) {
  return run([&] {
    need(instance, "instance");
    need(out, "out");
    pop::SessionOptions options;
    if (options_json && *options_json) options = pop::session_options_from_json(nlohmann::json::parse(options_json));
    *out = new pop_session{std::make_unique<pop::Session>(instance->instance, options)};
  });
}

void pop_session_free(pop_session* session) { delete session; }

pop_status pop_session_generate(pop_session* session, char** candidates_json) {
  return run([&] {
    need(session, "session");
    session->session->generate_candidates();
    give(candidates_json, candidate_payload(*session->session).dump(2));
    if (session->session->status() == pop::SessionStatus::infeasible) {
      throw Soft{POP_INFEASIBLE, "no non-empty portfolio satisfies the accepted rules"};
    }
  });
}

pop_status pop_session_classify(pop_session* session, const char* labels_json, char** rules_json) {
  return run([&] {
    need(session, "session");
    need(labels_json, "labels_json");
    const auto labels = nlohmann::json::parse(labels_json).get<std::map<std::string, std::string>>();
    const auto& record = session->session->classify(labels);
    nlohmann::json out{{"status", pop::to_string(session->session->status())},
                       {"iteration", record.number},
                       {"rules", pop::to_json(session->session->instance(), record.induced_rules)}};
    give(rules_json, out.dump(2));
  });
}

pop_status pop_session_accept(pop_session* session, const char* rule_ids, char** candidates_json) {
  return run([&] {
    need(session, "session");
    need(rule_ids, "rule_ids");
    std::vector<std::string> ids;
    std::stringstream in(rule_ids);
    std::string id;
    while (std::getline(in, id, ',')) {
      const auto b = id.find_first_not_of(' ');
      const auto e = id.find_last_not_of(' ');
      if (b != std::string::npos) ids.push_back(id.substr(b, e - b + 1));
    }
    session->session->accept_rules(ids);
    give(candidates_json, candidate_payload(*session->session).dump(2));
    if (session->session->status() == pop::SessionStatus::infeasible) {
      throw Soft{POP_INFEASIBLE, "no non-empty portfolio satisfies the accepted rules"};
    }
  });
}

pop_status pop_session_relax(pop_session* session, char** candidates_json) {
  return run([&] {
    need(session, "session");
    session->session->relax();
    give(candidates_json, candidate_payload(*session->session).dump(2));
    if (session->session->status() == pop::SessionStatus::infeasible) {
      throw Soft{POP_INFEASIBLE, "no non-empty portfolio satisfies the accepted rules"};
    }
  });
}

pop_status pop_session_finalize(pop_session* session, const char* candidate_id) {
  return run([&] {
    need(session, "session");
    need(candidate_id, "candidate_id");
    session->session->finalize(candidate_id);
  });
}

pop_status pop_session_state(const pop_session* session, char** state_json) {
  return run([&] {
    need(session, "session");
    give(state_json, session->session->state_json().dump(2));
  });
}

pop_status pop_session_status(const pop_session* session, char** status) {
  return run([&] {
    need(session, "session");
    give(status, pop::to_string(session->session->status()));
  });
}

pop_status pop_session_save(const pop_session* session, const char* path, char** json) {
  return run([&] {
    need(session, "session");
    const auto text = session->session->save().dump(2);
    if (path) pop::write_file(path, text + "\n");
    give(json, text);
  });
}

pop_status pop_session_load_file(const char* path, pop_session** out) {
  return run([&] {
    need(path, "path");
    need(out, "out");
    const auto doc = nlohmann::json::parse(pop::read_file(path));
    *out = new pop_session{std::make_unique<pop::Session>(pop::Session::load(doc))};
  });
}

pop_status pop_session_load_json(const char* json, pop_session** out) {
  return run([&] {
    need(json, "json");
    need(out, "out");
    *out = new pop_session{std::make_unique<pop::Session>(pop::Session::load(nlohmann::json::parse(json)))};
  });
}

pop_status pop_session_simulate(pop_session* session, const char* fraction, char** report, char** result_json) {
  return run([&] {
    need(session, "session");
    const pop::Rational f = fraction && *fraction ? pop::parse_rational(fraction) : pop::Rational(9, 10);
    if (f <= 0 || f > 1) throw std::invalid_argument("fraction must lie in (0,1]");
    auto& s = *session->session;
    const auto result = pop::run_simulated(s, f);
    give(report, pop::render_simulation(s, result));
    nlohmann::json j{{"status", pop::to_string(result.status)},
                     {"iterations", s.iterations().size()},
                     {"finals", nlohmann::json::array()}};
    for (const auto& c : result.finals) j["finals"].push_back(s.candidate_json(c));
    give(result_json, j.dump(2));
    if (result.status == pop::SessionStatus::infeasible) {
      throw Soft{POP_INFEASIBLE, "no non-empty portfolio satisfies the accepted rules"};
    }
  });
}

pop_status pop_serve(const char* addr, int port, const char* cors_origins, const char* session_dir) {
  return run([&] {
    pop::ServiceOptions options;
    if (addr && *addr) options.addr = addr;
    if (port < 0 || port > 65535) throw std::invalid_argument("port out of range");
    options.port = port;
    if (cors_origins) {
      std::stringstream in(cors_origins);
      std::string origin;
      while (std::getline(in, origin, ',')) {
        if (!origin.empty()) options.cors_origins.push_back(origin);
      }
    }
    if (session_dir) options.session_dir = session_dir;
    pop::run_service(options);
  });
}

}  // extern "C"
