#include "pop/service.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>

#include <httplib.h>

#include "pop/instance_io.hpp"
#include "pop/pareto.hpp"
#include "pop/session.hpp"
#include "pop/stochastic.hpp"

namespace pop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Carries an HTTP status out of a handler.
struct HttpError {
  int status;
  json body;
};

[[noreturn]] void fail(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  throw HttpError{status, std::move(extra)};
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    fail(400, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<Rational> phi_param(const httplib::Request& req) {
  if (!req.has_param("phi")) return std::nullopt;
  try {
    return parse_rational(req.get_param_value("phi"));
  } catch (const std::exception& e) {
    fail(422, std::string("bad phi: ") + e.what());
  }
}

struct InstanceEntry {
  std::string id;
  Instance instance;
};

struct SessionEntry {
  std::string id;
  std::string created;
  std::string instance_id;
  std::shared_mutex mutex;
  std::unique_ptr<Session> session;
};

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;
  std::shared_mutex registry;  // guards the maps and counters below
  std::map<std::string, std::shared_ptr<InstanceEntry>> instances;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions;
  std::size_t next_instance = 1;
  std::size_t next_session = 1;
  std::mutex idempotency_mutex;
  std::map<std::string, std::pair<int, std::string>> idempotent;

  explicit Impl(ServiceOptions o) : options(std::move(o)) {
    reload();
    routes();
  }

  // ---- persistence -------------------------------------------------------

  static std::size_t numeric_suffix(const std::string& id) {
    try {
      return static_cast<std::size_t>(std::stoull(id.substr(1)));
    } catch (...) {
      return 0;
    }
  }

  void persist_instance(const InstanceEntry& e) const {
    if (options.session_dir.empty()) return;
    const fs::path dir = fs::path(options.session_dir) / "instances";
    fs::create_directories(dir);
    write_file((dir / (e.id + ".json")).string(), json{{"id", e.id}, {"instance", to_json(e.instance)}}.dump(2));
  }

  void persist_session(const SessionEntry& e) const {
    if (options.session_dir.empty()) return;
    const fs::path dir = fs::path(options.session_dir) / "sessions";
    fs::create_directories(dir);
    json doc{{"id", e.id}, {"created", e.created}, {"instance_id", e.instance_id}, {"session", e.session->save()}};
    write_file((dir / (e.id + ".json")).string(), doc.dump(2));
  }

  void reload() {
    if (options.session_dir.empty()) return;
    const fs::path root(options.session_dir);
    fs::create_directories(root);
    if (fs::exists(root / "instances")) {
      for (const auto& f : fs::directory_iterator(root / "instances")) {
        try {
          const auto doc = json::parse(read_file(f.path().string()));
          auto e = std::make_shared<InstanceEntry>();
          e->id = doc.at("id").get<std::string>();
          e->instance = load_instance(doc.at("instance"));
          next_instance = std::max(next_instance, numeric_suffix(e->id) + 1);
          instances[e->id] = e;
        } catch (const std::exception& ex) {
          std::cerr << "skipping " << f.path() << ": " << ex.what() << '\n';
        }
      }
    }
    if (fs::exists(root / "sessions")) {
      for (const auto& f : fs::directory_iterator(root / "sessions")) {
        try {
          const auto doc = json::parse(read_file(f.path().string()));
          auto e = std::make_shared<SessionEntry>();
          e->id = doc.at("id").get<std::string>();
          e->created = doc.value("created", std::string());
          e->instance_id = doc.value("instance_id", std::string());
          e->session = std::make_unique<Session>(Session::load(doc.at("session")));
          next_session = std::max(next_session, numeric_suffix(e->id) + 1);
          sessions[e->id] = e;
        } catch (const std::exception& ex) {
          std::cerr << "skipping " << f.path() << ": " << ex.what() << '\n';
        }
      }
    }
  }

  // ---- lookup ------------------------------------------------------------

  std::shared_ptr<InstanceEntry> instance(const std::string& id) {
    std::shared_lock lock(registry);
    auto it = instances.find(id);
    if (it == instances.end()) fail(404, "unknown instance '" + id + "'");
    return it->second;
  }

  std::shared_ptr<SessionEntry> session(const std::string& id) {
    std::shared_lock lock(registry);
    auto it = sessions.find(id);
    if (it == sessions.end()) fail(404, "unknown session '" + id + "'");
    return it->second;
  }

  std::shared_ptr<InstanceEntry> add_instance(Instance inst) {
    auto e = std::make_shared<InstanceEntry>();
    e->instance = std::move(inst);
    {
      std::unique_lock lock(registry);
      e->id = "i" + std::to_string(next_instance++);
      instances[e->id] = e;
    }
    persist_instance(*e);
    return e;
  }

  std::shared_ptr<SessionEntry> add_session(std::unique_ptr<Session> s, const std::string& instance_id) {
    auto e = std::make_shared<SessionEntry>();
    e->session = std::move(s);
    e->created = timestamp();
    e->instance_id = instance_id;
    {
      std::unique_lock lock(registry);
      e->id = "s" + std::to_string(next_session++);
      sessions[e->id] = e;
    }
    persist_session(*e);
    return e;
  }

  static json handle_json(const SessionEntry& e) {
    return {{"id", e.id},
            {"created", e.created},
            {"instance_id", e.instance_id},
            {"instance_hash", instance_hash(e.session->instance())},
            {"status", to_string(e.session->status())}};
  }

  // ---- plumbing ----------------------------------------------------------

  static void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(2), "application/json");
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  /// Maps engine exceptions to HTTP statuses.
  static Handler guarded(Handler h) {
    return [h](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const HttpError& e) {
        reply(res, e.status, e.body);
      } catch (const ValidationError& e) {
        reply(res, 422, {{"error", e.what()}, {"diagnostics", to_json(e.diagnostics())}});
      } catch (const SessionStateError& e) {
        reply(res, 409, {{"error", e.what()}});
      } catch (const NotFoundError& e) {
        reply(res, 404, {{"error", e.what()}});
      } catch (const std::invalid_argument& e) {
        reply(res, 422, {{"error", e.what()}});
      } catch (const json::exception& e) {
        reply(res, 422, {{"error", std::string("bad request body: ") + e.what()}});
      } catch (const std::exception& e) {
        reply(res, 500, {{"error", e.what()}});
      }
    };
  }

  /// Mutating session route: exclusive session lock, idempotency replay and
  /// persistence after success.
  Handler mutation(std::function<json(SessionEntry&, const httplib::Request&)> body) {
    return guarded([this, body](const httplib::Request& req, httplib::Response& res) {
      auto entry = session(req.matches[1]);
      std::unique_lock lock(entry->mutex);
      const std::string key = req.get_header_value("Idempotency-Key");
      const std::string cache_key = req.method + " " + req.path + " " + key;
      if (!key.empty()) {
        std::lock_guard g(idempotency_mutex);
        auto it = idempotent.find(cache_key);
        if (it != idempotent.end()) {
          res.status = it->second.first;
          res.set_content(it->second.second, "application/json");
          res.set_header("Idempotent-Replay", "true");
          return;
        }
      }
      const json out = body(*entry, req);
      persist_session(*entry);
      reply(res, 200, out);
      if (!key.empty()) {
        std::lock_guard g(idempotency_mutex);
        idempotent[cache_key] = {res.status, res.body};
      }
    });
  }

  json candidates_json(const Session& s) const {
    json out{{"status", to_string(s.status())}, {"iteration", s.current() ? s.current()->number : 0},
             {"candidates", json::array()}};
    if (s.current()) {
      for (const auto& c : s.current()->candidates) out["candidates"].push_back(s.candidate_json(c));
    }
    return out;
  }

  // ---- routes ------------------------------------------------------------

  void routes() {
    server.Get("/openapi", guarded([](const httplib::Request&, httplib::Response& res) {
                 reply(res, 200, Service::openapi());
               }));

    server.Post("/instances", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json doc = parse_body(req);
                  auto diags = validate_json(doc);
                  if (has_errors(diags)) fail(422, "instance is invalid", {{"diagnostics", to_json(diags)}});
                  auto e = add_instance(load_instance(doc));
                  reply(res, 201, {{"id", e->id},
                                   {"instance_hash", instance_hash(e->instance)},
                                   {"variant", to_string(e->instance.variant)},
                                   {"diagnostics", to_json(diags)}});
                }));

    server.Get("/instances", guarded([this](const httplib::Request&, httplib::Response& res) {
                 json out = json::array();
                 std::shared_lock lock(registry);
                 for (const auto& [id, e] : instances) {
                   out.push_back({{"id", id}, {"name", e->instance.name},
                                  {"variant", to_string(e->instance.variant)},
                                  {"instance_hash", instance_hash(e->instance)}});
                 }
                 reply(res, 200, out);
               }));

    server.Get(R"(/instances/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 reply(res, 200, to_json(instance(req.matches[1])->instance));
               }));

    server.Get(R"(/instances/([^/]+)/front)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto e = instance(req.matches[1]);
                 const auto phi = phi_param(req);
                 const auto program = require_nonempty(compile(e->instance, phi));
                 const auto front = epsilon_constraint_front(program);
                 const std::string format = req.has_param("format") ? req.get_param_value("format") : "json";
                 if (format == "csv") {
                   res.set_content(front_to_csv(e->instance, program, front), "text/csv");
                 } else if (format == "text") {
                   res.set_content(render_front_text(e->instance, program, front), "text/plain");
                 } else {
                   json out = front_to_json(e->instance, program, front);
                   out["infeasible"] = front.solutions.empty();
                   if (phi) out["phi"] = to_string(*phi);
                   reply(res, 200, out);
                 }
               }));

    server.Get(R"(/instances/([^/]+)/qualification)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto e = instance(req.matches[1]);
                 const auto phi = phi_param(req);
                 const auto& inst = e->instance;
                 json out{{"contexts", json::array()}};
                 QualificationTable table;
                 std::size_t contexts = 1;
                 if (inst.variant == Variant::stochastic) {
                   if (!phi) fail(422, "phi is required for stochastic instances");
                   table = qualification_at_phi(inst, *phi);
                 } else {
                   table = derive_qualification(inst);
                   contexts = inst.context_count();
                 }
                 for (std::size_t t = 0; t < contexts; ++t) {
                   json ctx{{"text", render_qualification(inst, table, t)}, {"rows", json::array()}};
                   if (inst.variant == Variant::temporal) ctx["period"] = inst.periods[t];
                   for (std::size_t i = 0; i < inst.elements.size(); ++i) {
                     json row{{"element", inst.elements[i].id}, {"levels", json::object()}};
                     for (std::size_t p = 0; p < inst.criteria.size(); ++p) {
                       json bits = json::array();
                       for (std::size_t h = 0; h < inst.criteria[p].levels.size(); ++h) bits.push_back(table.at(t, i, p, h) ? 1 : 0);
                       row["levels"][inst.criteria[p].id] = bits;
                     }
                     ctx["rows"].push_back(std::move(row));
                   }
                   out["contexts"].push_back(std::move(ctx));
                 }
                 reply(res, 200, out);
               }));

    server.Get(R"(/instances/([^/]+)/rho)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto e = instance(req.matches[1]);
                 if (!req.has_param("criterion")) fail(422, "criterion is required");
                 const auto p = e->instance.find_criterion(req.get_param_value("criterion"));
                 if (!p) fail(404, "unknown criterion '" + req.get_param_value("criterion") + "'");
                 json out{{"criterion", e->instance.criteria[*p].id}, {"phi", json::array()}, {"rows", json::array()}};
                 const auto phis = phi_set(e->instance.scenarios);
                 for (const auto& phi : phis) out["phi"].push_back(to_string(phi));
                 for (std::size_t i = 0; i < e->instance.elements.size(); ++i) {
                   json values = json::array();
                   for (const auto& phi : phis) values.push_back(to_string(rho(e->instance, i, *p, phi)));
                   out["rows"].push_back({{"element", e->instance.elements[i].id}, {"values", values}});
                 }
                 out["text"] = render_rho_table(e->instance, *p);
                 reply(res, 200, out);
               }));

    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json doc = parse_body(req);
                  std::string instance_id;
                  Instance inst;
                  if (doc.contains("instance_id")) {
                    instance_id = doc.at("instance_id").get<std::string>();
                    inst = instance(instance_id)->instance;
                  } else if (doc.contains("instance")) {
                    inst = load_instance(doc.at("instance"));
                    instance_id = add_instance(inst)->id;
                  } else {
                    fail(422, "instance_id or instance is required");
                  }
                  const auto options = session_options_from_json(doc.value("options", json::object()));
                  auto e = add_session(std::make_unique<Session>(std::move(inst), options), instance_id);
                  reply(res, 201, handle_json(*e));
                }));

    server.Post("/sessions/import", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json doc = parse_body(req);
                  auto s = std::make_unique<Session>(Session::load(doc));
                  auto inst = add_instance(s->instance());
                  auto e = add_session(std::move(s), inst->id);
                  reply(res, 201, handle_json(*e));
                }));

    server.Get("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
                 std::vector<std::shared_ptr<SessionEntry>> all;
                 {
                   std::shared_lock lock(registry);
                   for (const auto& [id, e] : sessions) all.push_back(e);
                 }
                 json out = json::array();
                 for (const auto& e : all) {
                   std::shared_lock lock(e->mutex);
                   out.push_back(handle_json(*e));
                 }
                 reply(res, 200, out);
               }));

    server.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto e = session(req.matches[1]);
                 std::shared_lock lock(e->mutex);
                 json out = e->session->state_json();
                 out["handle"] = handle_json(*e);
                 reply(res, 200, out);
               }));

    server.Get(R"(/sessions/([^/]+)/export)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto e = session(req.matches[1]);
                 std::shared_lock lock(e->mutex);
                 reply(res, 200, e->session->save());
               }));

    server.Post(R"(/sessions/([^/]+)/candidates)", mutation([this](SessionEntry& e, const httplib::Request&) {
                  e.session->generate_candidates();
                  return candidates_json(*e.session);
                }));

    server.Post(R"(/sessions/([^/]+)/classify)", mutation([](SessionEntry& e, const httplib::Request& req) {
                  const json doc = parse_body(req);
                  if (!doc.contains("labels") || !doc.at("labels").is_object()) fail(422, "labels object is required");
                  const auto labels = doc.at("labels").get<std::map<std::string, std::string>>();
                  if (e.session->status() == SessionStatus::awaiting_classification) {
                    bool final_label = false;
                    std::vector<std::string> missing;
                    for (const auto& c : e.session->current()->candidates) {
                      auto it = labels.find(c.id);
                      if (it == labels.end()) {
                        missing.push_back(c.id);
                      } else if (it->second == "final") {
                        final_label = true;
                      }
                    }
                    if (!final_label && !missing.empty()) fail(422, "missing labels", {{"missing", missing}});
                  }
                  const auto& record = e.session->classify(labels);
                  return json{{"status", to_string(e.session->status())},
                              {"iteration", record.number},
                              {"rules", to_json(e.session->instance(), record.induced_rules)},
                              {"final_choice", e.session->final_choice() ? json(*e.session->final_choice())
                                                                         : json(nullptr)}};
                }));

    server.Post(R"(/sessions/([^/]+)/rules/([^/]+)/accept)",
                mutation([this](SessionEntry& e, const httplib::Request& req) {
                  e.session->accept_rule(req.matches[2]);
                  return candidates_json(*e.session);
                }));

    server.Post(R"(/sessions/([^/]+)/accept)", mutation([this](SessionEntry& e, const httplib::Request& req) {
                  const json doc = parse_body(req);
                  e.session->accept_rules(doc.at("rules").get<std::vector<std::string>>());
                  return candidates_json(*e.session);
                }));

    server.Post(R"(/sessions/([^/]+)/relax)", mutation([this](SessionEntry& e, const httplib::Request&) {
                  e.session->relax();
                  return candidates_json(*e.session);
                }));

    server.Post(R"(/sessions/([^/]+)/finalize)", mutation([](SessionEntry& e, const httplib::Request& req) {
                  const json doc = parse_body(req);
                  std::string id = doc.value("portfolio_id", doc.value("candidate", std::string()));
                  if (id.empty()) fail(422, "portfolio_id is required");
                  e.session->finalize(id);
                  return e.session->state_json();
                }));

    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (options.cors_origins.empty()) return;
      const auto origin = req.get_header_value("Origin");
      const bool any = std::find(options.cors_origins.begin(), options.cors_origins.end(), "*") !=
                       options.cors_origins.end();
      const bool listed = std::find(options.cors_origins.begin(), options.cors_origins.end(), origin) !=
                          options.cors_origins.end();
      if (any || (!origin.empty() && listed)) {
        res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
        res.set_header("Access-Control-Allow-Headers", "Content-Type, Idempotency-Key");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      }
    });
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Service::~Service() { stop(); }

int Service::bind() {
  int port = impl_->options.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(impl_->options.addr);
  } else if (!impl_->server.bind_to_port(impl_->options.addr, port)) {
    port = -1;
  }
  if (port < 0) {
    throw std::runtime_error("cannot bind " + impl_->options.addr + ":" + std::to_string(impl_->options.port));
  }
  return port;
}

void Service::listen() { impl_->server.listen_after_bind(); }
void Service::stop() {
  if (impl_) impl_->server.stop();
}

json Service::openapi() {
  auto op = [](const std::string& summary) { return json{{"summary", summary}}; };
  json paths;
  paths["/instances"]["post"] = op("Upload and validate an instance; 422 with diagnostics when invalid");
  paths["/instances"]["get"] = op("List uploaded instances");
  paths["/instances/{id}"]["get"] = op("Instance document");
  paths["/instances/{id}/front"]["get"] = op("Non-dominated portfolios; query phi (stochastic), format json|csv|text");
  paths["/instances/{id}/qualification"]["get"] = op("Qualification table; query phi for stochastic instances");
  paths["/instances/{id}/rho"]["get"] = op("Probability-level table of one criterion; query criterion");
  paths["/sessions"]["post"] = op("Create a session from instance_id or an inline instance, with options");
  paths["/sessions"]["get"] = op("List session handles");
  paths["/sessions/import"]["post"] = op("Create a session from an exported session file");
  paths["/sessions/{id}"]["get"] = op("Full session state including history");
  paths["/sessions/{id}/export"]["get"] = op("Versioned session file");
  paths["/sessions/{id}/candidates"]["post"] = op("Generate the first candidate set");
  paths["/sessions/{id}/classify"]["post"] = op("Submit labels {labels: {id: good|other|final}}; returns induced rules");
  paths["/sessions/{id}/rules/{rule}/accept"]["post"] = op("Accept one rule; returns the next candidates");
  paths["/sessions/{id}/accept"]["post"] = op("Accept several rules {rules: [ids]}; returns the next candidates");
  paths["/sessions/{id}/relax"]["post"] = op("Drop the most recently accepted rule; returns the next candidates");
  paths["/sessions/{id}/finalize"]["post"] = op("Choose the final portfolio {portfolio_id}");
  return {{"openapi", "3.0.3"},
          {"info", {{"title", "portfolio of portfolios decision service"}, {"version", "1"}}},
          {"paths", paths},
          {"x-errors",
           {{"404", "unknown instance, session, rule or candidate id"},
            {"409", "operation not allowed in the current session status"},
            {"422", "validation failure; body carries error and diagnostics or missing ids"}}},
          {"x-idempotency", "mutating session routes replay the first response for a repeated Idempotency-Key"}};
}

void run_service(const ServiceOptions& options) {
  Service service(options);
  const int port = service.bind();
  std::cerr << "listening on " << options.addr << ":" << port << '\n';
  service.listen();
}

}  // namespace pop
