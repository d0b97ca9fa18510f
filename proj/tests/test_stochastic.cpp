#include <doctest.h>

#include "oracle.hpp"
#include "pop/stochastic.hpp"
#include "support.hpp"

using namespace pop;

namespace {

std::vector<Scenario> states(std::initializer_list<Rational> ps) {
  std::vector<Scenario> out;
  for (const auto& p : ps) out.push_back({"s" + std::to_string(out.size() + 1), p});
  return out;
}

}  // namespace

TEST_SUITE("stochastic") {
  TEST_CASE("achievable probability levels") {
    const auto phis = phi_set(states({Rational(1, 4), Rational(7, 20), Rational(2, 5)}));
    const std::vector<Rational> expected{Rational(1, 4), Rational(7, 20), Rational(2, 5), Rational(3, 5),
                                         Rational(13, 20), Rational(3, 4), Rational(1)};
    CHECK(phis == expected);
    CHECK(phi_set(states({Rational(1)})) == std::vector<Rational>{Rational(1)});
    CHECK(phi_set(states({Rational(1, 2), Rational(1, 2)})) == std::vector<Rational>{Rational(1, 2), Rational(1)});
  }

  TEST_CASE("alpha") {
    const std::vector<Rational> pi{Rational(1, 4), Rational(7, 20), Rational(2, 5)};
    const std::vector<Rational> g{18, 60, 44};
    CHECK(alpha(pi, g, 1) == Rational(7, 20));  // unique maximum keeps its own mass
    CHECK(alpha(pi, g, 0) == 1);                // the minimum is always met
    CHECK(alpha(pi, g, 2) == Rational(3, 4));
    CHECK_THROWS(alpha(pi, g, 3));

    const auto in = testing::fixture("smopop_s36.json");
    CHECK(alpha(in, 0, 0, 1) == Rational(7, 20));
  }

  TEST_CASE("rho table of the first criterion") {
    const auto in = testing::fixture("smopop_s36.json");
    const auto phis = phi_set(in.scenarios);
    const int table[7][4] = {
        {60, 43, 54, 42}, {60, 43, 54, 42}, {44, 43, 43, 36}, {44, 24, 43, 36},
        {44, 24, 24, 25}, {44, 17, 24, 25}, {18, 17, 24, 25},
    };
    REQUIRE(phis.size() == 7);
    for (std::size_t r = 0; r < 7; ++r) {
      for (std::size_t e = 0; e < 4; ++e) {
        CAPTURE(r);
        CAPTURE(e);
        CHECK(rho(in, e, 0, phis[r]) == table[r][e]);
        CHECK(rho(in, e, 0, phis[r]) == oracle::rho(in, e, 0, phis[r]));
      }
    }
    const auto text = render_rho_table(in, 0);
    CHECK(text.find("0.65") != std::string::npos);
  }

  TEST_CASE("qualification at phi = 0.4") {
    const auto in = testing::fixture("smopop_s36.json");
    const auto q = qualification_at_phi(in, Rational(2, 5));
    const int expected[4][6] = {
        {1, 1, 1, 1, 1, 1},
        {1, 1, 1, 0, 1, 1},
        {1, 1, 0, 0, 1, 1},
        {1, 0, 1, 0, 1, 0},
    };
    for (std::size_t e = 0; e < 4; ++e) {
      for (std::size_t k = 0; k < 6; ++k) CHECK(q.at(0, e, k / 2, k % 2) == (expected[e][k] == 1));
    }
  }

  TEST_CASE("extreme levels give best and worst case tables") {
    const auto in = testing::fixture("smopop_s36.json");
    const auto phis = phi_set(in.scenarios);
    const auto best = qualification_at_phi(in, phis.front());
    const auto worst = qualification_at_phi(in, phis.back());
    for (std::size_t e = 0; e < in.elements.size(); ++e) {
      for (std::size_t p = 0; p < in.criteria.size(); ++p) {
        Rational hi = in.elements[e].performances[0][p], lo = hi;
        for (const auto& row : in.elements[e].performances) {
          hi = std::max(hi, row[p]);
          lo = std::min(lo, row[p]);
        }
        for (std::size_t h = 0; h < in.criteria[p].levels.size(); ++h) {
          CHECK(best.at(0, e, p, h) == (hi >= in.criteria[p].levels[h]));
          CHECK(worst.at(0, e, p, h) == (lo >= in.criteria[p].levels[h]));
        }
      }
    }
  }

  TEST_CASE("inadmissible phi") {
    const auto in = testing::fixture("smopop_s36.json");
    CHECK(is_admissible_phi(in, Rational(13, 20)));
    CHECK_FALSE(is_admissible_phi(in, Rational(1, 2)));
    CHECK_FALSE(is_admissible_phi(in, Rational(0)));
  }

  TEST_CASE("random rho agrees with the definition and is monotone in phi") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 50; ++k) {
      const auto in = testing::random_instance(rng, 1, 40, 2);
      const auto phis = phi_set(in.scenarios);
      for (std::size_t e = 0; e < in.elements.size(); ++e) {
        for (std::size_t p = 0; p < in.criteria.size(); ++p) {
          for (std::size_t r = 0; r < phis.size(); ++r) {
            CHECK(rho(in, e, p, phis[r]) == oracle::rho(in, e, p, phis[r]));
            if (r > 0) CHECK(rho(in, e, p, phis[r]) <= rho(in, e, p, phis[r - 1]));
          }
        }
      }
    }
  }
}
