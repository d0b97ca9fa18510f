#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "pop/instance_io.hpp"
#include "pop/pareto.hpp"
#include "pop/program.hpp"

#ifndef POP_DATA_DIR
#error "POP_DATA_DIR must point at the fixture directory"
#endif

namespace testing {

inline std::string data(const std::string& name) { return std::string(POP_DATA_DIR) + "/" + name; }

inline pop::Instance fixture(const std::string& name) { return pop::load_instance_file(data(name)); }

inline std::size_t variable_count(const pop::Instance& in) {
  const std::size_t T = in.variant == pop::Variant::temporal ? in.periods.size() : 1;
  std::size_t n = T * in.projects.size();
  for (const auto& e : in.elements) {
    for (const auto& c : e.costs) n += c ? T : 0;
  }
  return n;
}

/// Small random instance of any variant with at most `max_vars` program
/// variables and at least `min_vars`.
inline pop::Instance random_instance(std::mt19937_64& rng, std::size_t min_vars, std::size_t max_vars,
                                     int variant = -1) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  while (true) {
    pop::Instance in;
    in.variant = static_cast<pop::Variant>(variant >= 0 ? variant : uni(0, 2));
    in.name = "random";
    const int J = uni(1, 4), E = uni(1, 5), P = uni(1, 2), L = uni(1, 3);
    std::size_t contexts = 1;
    if (in.variant == pop::Variant::temporal) {
      const int T = uni(1, 2);
      for (int t = 0; t < T; ++t) in.periods.push_back("t" + std::to_string(t + 1));
      contexts = in.periods.size();
    } else if (in.variant == pop::Variant::stochastic) {
      const int S = uni(1, 3);
      std::vector<int> w;
      int total = 0;
      for (int s = 0; s < S; ++s) {
        w.push_back(uni(1, 4));
        total += w.back();
      }
      for (int s = 0; s < S; ++s) in.scenarios.push_back({"s" + std::to_string(s + 1), pop::Rational(w[s], total)});
      contexts = in.scenarios.size();
    }
    for (int p = 0; p < P; ++p) {
      pop::LevelScale c;
      c.id = c.name = "g" + std::to_string(p + 1);
      const int H = uni(1, 2);
      int level = 0;
      for (int h = 0; h < H; ++h) {
        level += uni(1, 4);
        c.levels.push_back(level);
      }
      in.criteria.push_back(c);
    }
    for (int l = 0; l < L; ++l) {
      pop::ObjectiveDescriptor o;
      o.id = o.name = "z" + std::to_string(l + 1);
      o.thresholds = {pop::Rational(uni(1, 5)), pop::Rational(uni(6, 10))};
      in.objectives.push_back(o);
    }
    for (int j = 0; j < J; ++j) {
      pop::Project pj;
      pj.id = pj.name = "P" + std::to_string(j + 1);
      for (std::size_t c = 0; c < contexts; ++c) {
        std::vector<pop::Rational> row;
        for (int l = 0; l < L; ++l) row.push_back(uni(0, 12));
        pj.objective_values.push_back(row);
      }
      for (int p = 0; p < P; ++p) {
        for (std::size_t h = 0; h < in.criteria[p].levels.size(); ++h) {
          if (uni(0, 9) < 3) pj.requirements.push_back({static_cast<std::size_t>(p), h, uni(1, 2)});
        }
      }
      in.projects.push_back(pj);
    }
    for (int e = 0; e < E; ++e) {
      pop::Element el;
      el.id = "e" + std::to_string(e + 1);
      for (std::size_t c = 0; c < contexts; ++c) {
        std::vector<pop::Rational> row;
        for (int p = 0; p < P; ++p) row.push_back(uni(0, 9));
        el.performances.push_back(row);
      }
      for (int j = 0; j < J; ++j) {
        if (uni(0, 9) < 8) {
          el.costs.push_back(pop::Rational(uni(1, 9)));
        } else {
          el.costs.push_back(std::nullopt);
        }
      }
      in.elements.push_back(el);
    }
    in.budget = uni(3, 30);
    const auto n = variable_count(in);
    if (n >= min_vars && n <= max_vars) return in;
  }
}

/// (outcome, bits) pairs, sorted; equal iff same outcomes with the same
/// supporting solutions.
inline std::vector<std::pair<std::vector<pop::Rational>, std::vector<std::uint8_t>>> signature(
    const pop::Front& front) {
  std::vector<std::pair<std::vector<pop::Rational>, std::vector<std::uint8_t>>> out;
  for (const auto& s : front.solutions) out.emplace_back(s.outcome, s.bits);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testing
