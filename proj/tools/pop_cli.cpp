// Command-line front end; talks to the engine only through pop.h.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pop.h"

namespace {

/// Owns a string returned by the library.
struct Text {
  char* p = nullptr;
  ~Text() { pop_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct InstanceHandle {
  pop_instance* p = nullptr;
  ~InstanceHandle() { pop_instance_free(p); }
};

struct SessionHandle {
  pop_session* p = nullptr;
  ~SessionHandle() { pop_session_free(p); }
};

int exit_code(pop_status s) {
  if (s == POP_OK) return 0;
  if (s == POP_INFEASIBLE) return 2;
  return 1;
}

int report(pop_status s) {
  if (s != POP_OK && s != POP_INFEASIBLE) std::cerr << "error: " << pop_last_error() << '\n';
  return exit_code(s);
}

void print(const Text& t) {
  std::string s = t.str();
  std::cout << s;
  if (!s.empty() && s.back() != '\n') std::cout << '\n';
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

int load(const std::string& path, InstanceHandle& h) {
  const auto s = pop_instance_load_file(path.c_str(), &h.p);
  return s == POP_OK ? 0 : report(s);
}

int cmd_validate(const std::string& path) {
  Text diags;
  const auto s = pop_validate_file(path.c_str(), &diags.p);
  if (s != POP_OK && s != POP_VALIDATION) return report(s);
  const auto list = nlohmann::json::parse(diags.str());
  for (const auto& d : list) {
    std::cout << d.at("severity").get<std::string>() << ' ' << d.at("code").get<std::string>() << ": "
              << d.at("message").get<std::string>() << '\n';
  }
  if (s == POP_OK) std::cout << "ok\n";
  return exit_code(s);
}

int cmd_qualify(const std::string& path, const std::string& phi) {
  InstanceHandle h;
  if (int rc = load(path, h)) return rc;
  Text out;
  const auto s = pop_qualification_text(h.p, opt(phi), &out.p);
  if (s == POP_OK) print(out);
  return report(s);
}

int cmd_rho(const std::string& path, const std::string& criterion) {
  InstanceHandle h;
  if (int rc = load(path, h)) return rc;
  Text out;
  const auto s = pop_rho_text(h.p, criterion.c_str(), &out.p);
  if (s == POP_OK) print(out);
  return report(s);
}

int cmd_front(const std::string& path, const std::string& phi, const std::string& format, bool emit_lp) {
  InstanceHandle h;
  if (int rc = load(path, h)) return rc;
  Text out;
  if (emit_lp) {
    const auto s = pop_emit_lp(h.p, opt(phi), &out.p);
    if (s == POP_OK) print(out);
    return report(s);
  }
  const pop_format f = format == "csv" ? POP_FORMAT_CSV : format == "json" ? POP_FORMAT_JSON : POP_FORMAT_TEXT;
  const auto s = pop_front(h.p, opt(phi), f, &out.p);
  if (s == POP_OK || s == POP_INFEASIBLE) print(out);
  return report(s);
}

int cmd_interact(const std::string& path, bool simulated, const std::string& utility, const std::string& fraction,
                 const std::vector<std::string>& phis, const std::string& mode, const std::string& save) {
  if (!simulated) {
    std::cerr << "error: interactive sessions run through `pop serve`; use --simulated-dm for a batch run\n";
    return 1;
  }
  if (utility != "equal") {
    std::cerr << "error: unknown utility '" << utility << "'\n";
    return 1;
  }
  InstanceHandle h;
  if (int rc = load(path, h)) return rc;
  nlohmann::json options{{"mode", mode}};
  if (!phis.empty()) options["phis"] = phis;
  SessionHandle session;
  auto s = pop_session_create(h.p, options.dump().c_str(), &session.p);
  if (s != POP_OK) return report(s);
  Text transcript, result;
  s = pop_session_simulate(session.p, opt(fraction), &transcript.p, &result.p);
  if (s == POP_OK || s == POP_INFEASIBLE) print(transcript);
  if (!save.empty() && (s == POP_OK || s == POP_INFEASIBLE)) {
    const auto saved = pop_session_save(session.p, save.c_str(), nullptr);
    if (saved != POP_OK) return report(saved);
  }
  return report(s);
}

int cmd_replay(const std::string& path) {
  SessionHandle session;
  auto s = pop_session_load_file(path.c_str(), &session.p);
  if (s != POP_OK) return report(s);
  Text state;
  s = pop_session_state(session.p, &state.p);
  if (s != POP_OK) return report(s);
  const auto j = nlohmann::json::parse(state.str());
  std::cout << "replay ok: " << j.at("iterations").size() << " iterations, status "
            << j.at("status").get<std::string>() << '\n';
  for (const auto& it : j.at("iterations")) {
    std::cout << "iteration " << it.at("number").get<int>() << ": " << it.at("candidates").size() << " candidates";
    if (!it.at("chosen_rules").empty()) {
      std::cout << ", accepted";
      for (const auto& r : it.at("chosen_rules")) std::cout << ' ' << r.get<std::string>();
    }
    std::cout << '\n';
  }
  if (!j.at("final_choice").is_null()) std::cout << "final choice " << j.at("final_choice").get<std::string>() << '\n';
  return 0;
}

int cmd_serve(const std::string& addr, int port, const std::vector<std::string>& cors, const std::string& dir) {
  std::string origins;
  for (const auto& o : cors) origins += (origins.empty() ? "" : ",") + o;
  return report(pop_serve(addr.c_str(), port, opt(origins), opt(dir)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Portfolio-of-portfolios decision support"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pop_version()));

  std::string instance, phi, format = "text", criterion, utility = "equal", fraction, mode = "quantities", save;
  std::string addr = "127.0.0.1", session_dir, session_file;
  std::vector<std::string> phis, cors;
  int port = 8080;
  bool emit_lp = false, simulated = false;

  auto* validate = app.add_subcommand("validate", "Check an instance and print diagnostics");
  validate->add_option("instance", instance, "Instance file")->required();

  auto* qualify = app.add_subcommand("qualify", "Print the qualification table");
  qualify->add_option("instance", instance, "Instance file")->required();
  qualify->add_option("--phi", phi, "Probability level (stochastic instances)");

  auto* rho = app.add_subcommand("rho", "Print the probability-level table of one criterion");
  rho->add_option("instance", instance, "Instance file")->required();
  rho->add_option("--criterion", criterion, "Criterion id")->required();

  auto* front = app.add_subcommand("front", "Compute the non-dominated portfolios");
  front->add_option("instance", instance, "Instance file")->required();
  front->add_option("--phi", phi, "Probability level (stochastic instances)");
  front->add_option("--out", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  front->add_flag("--emit-lp", emit_lp, "Print the compiled program in LP format instead");

  auto* interact = app.add_subcommand("interact", "Run the interactive loop");
  interact->add_option("instance", instance, "Instance file")->required();
  interact->add_flag("--simulated-dm", simulated, "Let the simulated decision maker classify candidates");
  interact->add_option("--utility", utility, "Simulated utility (equal)");
  interact->add_option("--fraction", fraction, "Share of the best utility that still counts as good (0.9)");
  interact->add_option("--phi", phis, "Probability levels for stochastic quantities");
  interact->add_option("--candidates", mode, "Candidate generation")->check(CLI::IsMember({"quantities", "front"}));
  interact->add_option("--save", save, "Write the session file here");

  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--addr", addr, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--cors-origin", cors, "Allowed browser origin (repeatable, * for any)");
  serve->add_option("--session-dir", session_dir, "Directory for persisted sessions");

  auto* replay = app.add_subcommand("replay", "Reload a session file and verify it replays identically");
  replay->add_option("session", session_file, "Session file")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(instance);
  if (qualify->parsed()) return cmd_qualify(instance, phi);
  if (rho->parsed()) return cmd_rho(instance, criterion);
  if (front->parsed()) return cmd_front(instance, phi, format, emit_lp);
  if (interact->parsed()) return cmd_interact(instance, simulated, utility, fraction, phis, mode, save);
  if (serve->parsed()) return cmd_serve(addr, port, cors, session_dir);
  if (replay->parsed()) return cmd_replay(session_file);
  return 1;
}
