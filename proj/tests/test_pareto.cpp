#include <doctest.h>

#include <set>

#include "oracle.hpp"
#include "pop/pareto.hpp"
#include "pop/solver.hpp"
#include "pop/stochastic.hpp"
#include "support.hpp"

using namespace pop;

namespace {

std::vector<Rational> v(std::initializer_list<int> xs) {
  std::vector<Rational> out;
  for (int x : xs) out.emplace_back(x);
  return out;
}

std::multiset<std::vector<std::uint8_t>> oracle_bits(const Instance& in, std::optional<Rational> phi) {
  std::multiset<std::vector<std::uint8_t>> out;
  for (const auto& p : oracle::front(in, phi)) out.insert(oracle::layout_bits(in, p));
  return out;
}

std::multiset<std::vector<std::uint8_t>> engine_bits(const Front& f) {
  std::multiset<std::vector<std::uint8_t>> out;
  for (const auto& s : f.solutions) out.insert(s.bits);
  return out;
}

}  // namespace

TEST_SUITE("pareto") {
  TEST_CASE("dominance") {
    CHECK(dominates(v({80, 145, 42}), v({43, 54, 24})));
    CHECK_FALSE(dominates(v({43, 54, 24}), v({80, 145, 42})));
    CHECK_FALSE(dominates(v({5, 5}), v({5, 5})));
    CHECK_FALSE(dominates(v({1, 0}), v({0, 1})));
    CHECK_FALSE(dominates(v({0, 1}), v({1, 0})));
    CHECK_THROWS(dominates(v({1, 2}), v({1})));
  }

  TEST_CASE("three-project front matches the oracle") {
    const auto in = testing::fixture("mopop_s32.json");
    const auto p = require_nonempty(compile(in));
    const auto f = epsilon_constraint_front(p);
    CHECK(engine_bits(f) == oracle_bits(in, std::nullopt));
    CHECK(testing::signature(f) == testing::signature(brute_force_front(p)));
    CHECK_FALSE(f.truncated);
  }

  TEST_CASE("budget variants of the three-project instance match the oracle") {
    auto in = testing::fixture("mopop_s32.json");
    for (int w : {0, 60, 100, 110, 120, 150, 200, 400}) {
      in.budget = w;
      CAPTURE(w);
      const auto p = require_nonempty(compile(in));
      CHECK(engine_bits(epsilon_constraint_front(p)) == oracle_bits(in, std::nullopt));
    }
  }

  TEST_CASE("temporal and stochastic fronts match the oracle") {
    const auto t = testing::fixture("tmopop_s34.json");
    CHECK(engine_bits(epsilon_constraint_front(require_nonempty(compile(t)))) == oracle_bits(t, std::nullopt));
    const auto s = testing::fixture("smopop_s36.json");
    for (const auto& phi : phi_set(s.scenarios)) {
      CAPTURE(to_string(phi));
      CHECK(engine_bits(epsilon_constraint_front(require_nonempty(compile(s, phi)))) == oracle_bits(s, phi));
    }
  }

  TEST_CASE("single objective front is the optimum set") {
    auto in = testing::fixture("mopop_s32.json");
    in.budget = 200;
    auto p = require_nonempty(compile(in));
    p.objectives.resize(1);
    const auto f = epsilon_constraint_front(p);
    const auto opt = enumerate_optima(p, p.objectives[0].id, 1000);
    CHECK(f.solutions.size() == opt.solutions.size());
    CHECK(f.outcome_count == 1);
  }

  TEST_CASE("empty feasible set gives an empty front") {
    auto in = testing::fixture("mopop_s32.json");
    in.budget = 0;
    const auto f = epsilon_constraint_front(require_nonempty(compile(in)));
    CHECK(f.solutions.empty());
    CHECK(f.outcome_count == 0);
  }

  TEST_CASE("decode and encode are inverse") {
    const auto in = testing::fixture("tmopop_s34.json");
    const auto p = require_nonempty(compile(in));
    for (const auto& s : epsilon_constraint_front(p).solutions) {
      const auto d = decode(p, s.bits);
      CHECK(encode(p, d) == s.bits);
      CHECK(d.outcome == s.outcome);
    }
  }

  TEST_CASE("renderers") {
    const auto in = testing::fixture("mopop_s32.json");
    const auto p = require_nonempty(compile(in));
    const auto f = epsilon_constraint_front(p);
    const auto text = render_front_text(in, p, f);
    CHECK(text.find("P2") != std::string::npos);
    const auto csv = front_to_csv(in, p, f);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(f.solutions.size() + 1));
    const auto j = front_to_json(in, p, f);
    CHECK(j.at("solutions").size() == f.solutions.size());
  }
}
