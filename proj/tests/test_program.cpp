#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracle.hpp"
#include "pop/program.hpp"
#include "pop/quantity.hpp"
#include "pop/solver.hpp"
#include "support.hpp"

using namespace pop;

namespace {

std::size_t count_prefix(const BinaryLinearProgram& p, const std::string& prefix) {
  return std::count_if(p.constraints.begin(), p.constraints.end(),
                       [&](const Constraint& c) { return c.name.rfind(prefix, 0) == 0; });
}

Instance tiny() {
  Instance in;
  in.name = "tiny";
  in.criteria.push_back({"g1", "g1", {Rational(1)}, {}});
  in.objectives.push_back({"z1", "z1", {}});
  in.elements.push_back({"e1", {{Rational(1)}}, {Rational(3)}});
  in.projects.push_back({"P1", "P1", {{Rational(5)}}, {}});
  in.budget = 10;
  return in;
}

}  // namespace

TEST_SUITE("program") {
  TEST_CASE("three-project program shape") {
    const auto in = testing::fixture("mopop_s32.json");
    const auto p = compile(in);
    std::size_t requirements = 0;
    for (const auto& pj : in.projects) requirements += pj.requirements.size();
    CHECK(p.variables.size() == 15);
    CHECK(p.objectives.size() == 3);
    CHECK(count_prefix(p, "assign_") == 4);
    CHECK(count_prefix(p, "link_") == 12);
    CHECK(count_prefix(p, "req_") == requirements);
    CHECK(p.constraints.size() == 4 + 12 + requirements + 1);
    CHECK(require_nonempty(p).constraints.size() == p.constraints.size() + 1);
  }

  TEST_CASE("single project and element gives three rows") {
    const auto p = compile(tiny());
    CHECK(p.variables.size() == 2);
    CHECK(p.constraints.size() == 3);
  }

  TEST_CASE("zero requirement emits no row") {
    auto in = tiny();
    in.projects[0].requirements.push_back({0, 0, 0});
    CHECK(compile(in).constraints.size() == 3);
    in.projects[0].requirements[0].min_count = 1;
    CHECK(compile(in).constraints.size() == 4);
  }

  TEST_CASE("temporal program shape") {
    const auto in = testing::fixture("tmopop_s34.json");
    const auto p = compile(in);
    const auto x = std::count_if(p.variables.begin(), p.variables.end(),
                                 [](const Variable& v) { return v.kind == VariableKind::project; });
    CHECK(x == 6);
    CHECK(p.variables.size() - x == 24);
    // element uniqueness spans both periods
    for (const auto& c : p.constraints) {
      if (c.name.rfind("assign_", 0) != 0) continue;
      std::set<std::size_t> periods;
      for (std::size_t v = 0; v < c.coefficients.size(); ++v) {
        if (c.coefficients[v] != 0) periods.insert(p.variables[v].period);
      }
      CHECK(periods.size() == 2);
    }
  }

  TEST_CASE("stochastic objective is the expectation") {
    const auto in = testing::fixture("smopop_s36.json");
    const auto p = compile(in, Rational(2, 5));
    Rational expected(0);
    for (std::size_t s = 0; s < in.scenarios.size(); ++s) {
      expected += in.scenarios[s].probability * in.projects[0].objective_values[s][0];
    }
    CHECK(p.objectives[0].coefficients[p.x_index(0, 0)] == expected);
    CHECK_THROWS_AS(compile(in, Rational(1, 2)), std::invalid_argument);
    CHECK_THROWS(compile(in));
  }

  TEST_CASE("rule rows") {
    const auto in = testing::fixture("case_study_s5.json");
    const auto p = compile(in);
    DecisionRule chi{"r1", {{chi_quantity(), 7}}, {}, true};
    const auto rows = rule_rows(in, p, chi);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].comparator == Comparator::le);
    CHECK(rows[0].rhs == 7);
    for (std::size_t v = 0; v < p.variables.size(); ++v) {
      CHECK(rows[0].coefficients[v] == (p.variables[v].kind == VariableKind::assignment ? 1 : 0));
    }

    QuantityDescriptor f21;
    f21.kind = QuantityKind::f_plain;
    f21.objective = 1;
    f21.level = 0;
    const auto f = rule_rows(in, p, {"r2", {{f21, 2}}, {}, true});
    REQUIRE(f.size() == 1);
    CHECK(f[0].comparator == Comparator::ge);
    CHECK(f[0].rhs == 2);
    for (std::size_t j = 0; j < in.projects.size(); ++j) {
      const bool counts = in.projects[j].objective_values[0][1] >= in.objectives[1].thresholds[0];
      CHECK(f[0].coefficients[p.x_index(0, j)] == (counts ? 1 : 0));
    }

    const auto same = append_rule_constraints(p, {}, in);
    CHECK(same.constraints.size() == p.constraints.size());
    CHECK(append_rule_constraints(p, {chi}, in).constraints.size() == p.constraints.size() + 1);
  }

  TEST_CASE("LP text lists every section") {
    const auto text = emit_lp(compile(testing::fixture("mopop_s32.json")));
    for (const char* section : {"Maximize", "Subject To", "Binary", "End"}) {
      CHECK(text.find(section) != std::string::npos);
    }
  }
}

TEST_SUITE("solver") {
  TEST_CASE("maximizing one objective matches brute force") {
    const auto p = require_nonempty(compile(testing::fixture("mopop_s32.json")));
    for (const auto& o : p.objectives) {
      const auto a = solve(p, o.id);
      const auto b = brute_force(p, o.id);
      REQUIRE(a.status == SolveStatus::optimal);
      CHECK(a.objective == b.objective);
      CHECK(a.solution == b.solution);
    }
  }

  TEST_CASE("contradictory rows are infeasible") {
    BinaryLinearProgram p;
    p.variables.push_back({"x1", VariableKind::project, 0, 0, 0});
    p.objectives.push_back({"z", {Rational(1)}});
    p.constraints.push_back({"a", {Rational(1)}, Comparator::ge, Rational(1)});
    p.constraints.push_back({"b", {Rational(1)}, Comparator::le, Rational(0)});
    CHECK(solve(p, "z").status == SolveStatus::infeasible);
    CHECK(brute_force(p, "z").status == SolveStatus::infeasible);
    CHECK(enumerate_optima(p, "z", 10).solutions.empty());
  }

  TEST_CASE("unconstrained positive objective sets every bit") {
    BinaryLinearProgram p;
    for (int v = 0; v < 5; ++v) p.variables.push_back({"x" + std::to_string(v), VariableKind::project, 0, 0, 0});
    p.objectives.push_back({"z", {Rational(1), Rational(2), Rational(1, 3), Rational(4), Rational(5)}});
    const auto r = solve(p, "z");
    CHECK(r.solution == std::vector<std::uint8_t>(5, 1));
    CHECK(r.objective == Rational(37, 3));
    const auto all = enumerate_optima(p, "z", 10);
    CHECK(all.solutions.size() == 1);
  }

  TEST_CASE("enumeration cap sets the truncation flag") {
    BinaryLinearProgram p;
    for (int v = 0; v < 4; ++v) p.variables.push_back({"x" + std::to_string(v), VariableKind::project, 0, 0, 0});
    p.objectives.push_back({"z", std::vector<Rational>(4, Rational(0))});
    const auto all = enumerate_optima(p, "z", 100);
    CHECK(all.solutions.size() == 16);
    CHECK_FALSE(all.truncated);
    const auto some = enumerate_optima(p, "z", 5);
    CHECK(some.solutions.size() == 5);
    CHECK(some.truncated);
    CHECK(std::is_sorted(all.solutions.begin(), all.solutions.end(),
                         [](const SolveResult& a, const SolveResult& b) { return a.solution > b.solution; }));
  }

  TEST_CASE("face of a fixed project set enumerates the oracle's assignments") {
    const auto in = testing::fixture("mopop_s32.json");
    const auto p = require_nonempty(compile(in));
    for (const auto& face : std::vector<std::vector<std::uint8_t>>{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}) {
      std::vector<Constraint> fix;
      for (std::size_t j = 0; j < 3; ++j) {
        std::vector<Rational> row(p.variables.size(), Rational(0));
        row[p.x_index(0, j)] = 1;
        fix.push_back({"fix", row, face[j] ? Comparator::ge : Comparator::le, Rational(face[j])});
      }
      std::size_t expected = 0;
      oracle::for_each_portfolio(in, std::nullopt, [&](const oracle::Portfolio& o) {
        if (std::vector<std::uint8_t>(o.x[0].begin(), o.x[0].end()) == face) ++expected;
      });
      const std::vector<Rational> flat(p.variables.size(), Rational(0));
      const auto all = enumerate_optima_objective(p, flat, 1000, fix);
      CAPTURE(face);
      CHECK(all.solutions.size() == expected);
    }
  }

  TEST_CASE("brute force refuses large programs") {
    BinaryLinearProgram p;
    for (std::size_t v = 0; v <= kBruteForceLimit; ++v) {
      p.variables.push_back({"x" + std::to_string(v), VariableKind::project, 0, 0, 0});
    }
    p.objectives.push_back({"z", std::vector<Rational>(p.variables.size(), Rational(1))});
    CHECK_THROWS_AS(brute_force(p, "z"), std::length_error);
  }

  TEST_CASE("random programs agree with brute force") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 60; ++k) {
      const auto in = testing::random_instance(rng, 2, 16);
      std::optional<Rational> phi;
      if (in.variant == Variant::stochastic) phi = Rational(1);
      const auto p = require_nonempty(compile(in, phi));
      for (const auto& o : p.objectives) {
        const auto a = solve(p, o.id);
        const auto b = brute_force(p, o.id);
        REQUIRE(a.status == b.status);
        if (a.status == SolveStatus::optimal) CHECK(a.solution == b.solution);
      }
    }
  }

  TEST_CASE("no-good cut excludes exactly one vector") {
    const std::vector<std::uint8_t> bits{1, 0, 1};
    const auto cut = no_good_cut(bits);
    CHECK_FALSE(satisfies(cut, bits));
    CHECK(satisfies(cut, {1, 1, 1}));
    CHECK(satisfies(cut, {0, 0, 1}));
  }
}
