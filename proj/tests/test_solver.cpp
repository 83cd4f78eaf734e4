#include <algorithm>
#include <limits>
#include <random>
#include <set>

#include "doctest.h"
#include "fms/solver.hpp"
#include "test_fixtures.hpp"

using namespace fms;
using fms::testing::open_line;
using fms::testing::paper_optimum;
using fms::testing::small_params;

namespace {

// Minimum objective over all feasible completions of `partial`, found by
// plain enumeration. Returns infinity when no feasible completion exists.
double brute_force_completion(const Instance& inst, const Assignment& partial, Weights w) {
  std::vector<int> open;
  for (size_t i = 0; i < partial.choice.size(); ++i)
    if (!partial.choice[i].assigned()) open.push_back(static_cast<int>(i));
  std::vector<const OperationDef*> defs;
  for (const auto& p : inst.parts)
    for (const auto& op : p.operations) defs.push_back(&op);
  Assignment full = partial;
  double best = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, size_t k) -> void {
    if (k == open.size()) {
      if (check_feasibility(inst, full).empty()) {
        double z = evaluate(inst, full, w).weighted_z;
        best = std::min(best, z);
      }
      return;
    }
    int slot = open[k];
    for (const auto& o : defs[static_cast<size_t>(slot)]->options) {
      full.choice[static_cast<size_t>(slot)] = {o.machine, o.tool};
      self(self, k + 1);
    }
    full.choice[static_cast<size_t>(slot)] = {};
  };
  rec(rec, 0);
  return best;
}

}  // namespace

TEST_CASE("the example instance solves to its published figures") {
  Instance inst = paper_example();
  SolveResult r = solve(inst, Weights{});
  REQUIRE(r.status == SolveStatus::Optimal);
  REQUIRE(r.best.has_value());
  REQUIRE(r.metrics.has_value());
  CHECK(r.metrics->weighted_z == 611.0);
  CHECK(r.metrics->f1_total_time == 1193);
  CHECK(r.metrics->unbalance == 29);
  CHECK(r.metrics->processing_cost == 4390);
  CHECK(r.metrics->setup_cost == 520);
  std::multiset<long long> loads(r.metrics->loads.begin(), r.metrics->loads.end());
  CHECK(loads == std::multiset<long long>{294, 297, 299, 303});
  CHECK(check_feasibility(inst, *r.best).empty());
  CHECK(*r.best == paper_optimum());
  CHECK(r.proof.root_bound <= r.metrics->weighted_z);
  CHECK(r.proof.incumbent == r.metrics->weighted_z);

  SolveResult again = solve(inst, Weights{});
  CHECK(again.best == r.best);
  CHECK(again.nodes_explored == r.nodes_explored);
}

TEST_CASE("exhaustive search agrees with branch and bound on the example") {
  Instance inst = paper_example();
  SolveResult bb = solve(inst, Weights{});
  SolveResult ex = solve_exhaustive(inst, Weights{});
  REQUIRE(ex.status == SolveStatus::Optimal);
  CHECK(ex.metrics->weighted_z == bb.metrics->weighted_z);
  CHECK(ex.best == bb.best);
}

TEST_CASE("branch order is a permutation of all operations") {
  Instance inst = paper_example();
  std::vector<int> order = branch_order(inst);
  REQUIRE(order.size() == 16);
  std::set<int> seen(order.begin(), order.end());
  CHECK(seen.size() == 16);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 15);
}

TEST_CASE("bound of a complete assignment is its exact objective") {
  Instance inst = paper_example();
  Assignment a = paper_optimum();
  Weights w;
  CHECK(lower_bound(inst, a, w) == evaluate(inst, a, w).weighted_z);
}

TEST_CASE("bound of the empty assignment with identical times is perfectly balanced") {
  // 3 ops of 10 min each, both machines available: the relaxation spreads
  // 30 min with zero unbalance, so the bound is w1 * 30.
  Instance inst = open_line(3, {{1, 1}, {2, 2}}, 10);
  Assignment empty = Assignment::empty_for(inst);
  CHECK(lower_bound(inst, empty, Weights{}) == 0.5 * 30);
  CHECK(lower_bound(inst, empty, Weights{1.0, 0.0}) == 30.0);
}

TEST_CASE("bound is admissible and monotone on sampled partials") {
  std::mt19937_64 rng(99);
  int admissible_checked = 0;
  for (uint64_t seed = 0; seed < 80; ++seed) {
    RandomParams p = small_params(seed);
    p.ops_per_part = std::min(p.ops_per_part, 2);
    Instance inst = generate_random(p, seed + 7000);
    Weights w;
    Assignment partial = Assignment::empty_for(inst);
    double prev_bound = lower_bound(inst, partial, w);
    // Extend one operation at a time along a random order; the bound must
    // never decrease and must never exceed the best feasible completion.
    std::vector<int> order(partial.choice.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::shuffle(order.begin(), order.end(), rng);
    for (int slot : order) {
      double from_completion = brute_force_completion(inst, partial, w);
      if (from_completion < std::numeric_limits<double>::infinity()) {
        CAPTURE(seed);
        CHECK(lower_bound(inst, partial, w) <= from_completion);
        ++admissible_checked;
      }
      int flat = 0, part_idx = 0;
      for (const auto& part : inst.parts) {
        if (slot < flat + static_cast<int>(part.operations.size())) break;
        flat += static_cast<int>(part.operations.size());
        ++part_idx;
      }
      const auto& options =
          inst.parts[static_cast<size_t>(part_idx)].operations[static_cast<size_t>(slot - flat)].options;
      const auto& o = options[rng() % options.size()];
      partial.choice[static_cast<size_t>(slot)] = {o.machine, o.tool};
      double next_bound = lower_bound(inst, partial, w);
      CHECK(next_bound >= prev_bound);
      prev_bound = next_bound;
    }
  }
  CHECK(admissible_checked > 100);
}

TEST_CASE("bound rejects malformed partials") {
  Instance inst = open_line(2, {{1, 1}});
  Assignment wrong_size;
  wrong_size.choice = {{1, 1}};
  CHECK_THROWS_AS(lower_bound(inst, wrong_size, Weights{}), std::invalid_argument);
  Assignment off_menu = Assignment::empty_for(inst);
  off_menu.choice[0] = {2, 9};
  CHECK_THROWS_AS(lower_bound(inst, off_menu, Weights{}), std::invalid_argument);
}

TEST_CASE("forced instance returns its only assignment") {
  Instance inst = open_line(2, {{1, 1}}, 30);
  SolveResult r = solve(inst, Weights{});
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.best->choice == std::vector<OpChoice>{{1, 1}, {1, 1}});
  CHECK(r.metrics->weighted_z == 30.0);
}

TEST_CASE("unmeetable due date is proven infeasible by both searches") {
  Instance inst = open_line(2, {{1, 1}}, 30);
  inst.parts[0].due_date = 50;
  SolveResult bb = solve(inst, Weights{});
  CHECK(bb.status == SolveStatus::Infeasible);
  CHECK(!bb.best.has_value());
  SolveResult ex = solve_exhaustive(inst, Weights{});
  CHECK(ex.status == SolveStatus::Infeasible);
  CHECK(!ex.best.has_value());
}

TEST_CASE("cross-part tool conflicts are proven infeasible") {
  // Both parts are forced to tool 1 but on different machines.
  Instance inst;
  inst.machines = 2;
  inst.tools = 1;
  inst.tool_life = {1000};
  inst.magazine_capacity = {5, 5};
  inst.total_cost_budget = 1000;
  inst.setup_cost_budget = 1000;
  inst.parts = {{1, 1000, 1, {{{{1, 1, 10, 1}}}}}, {2, 1000, 1, {{{{2, 1, 10, 1}}}}}};
  REQUIRE(validate(inst).empty());
  CHECK(solve(inst, Weights{}).status == SolveStatus::Infeasible);
  CHECK(solve_exhaustive(inst, Weights{}).status == SolveStatus::Infeasible);
}

TEST_CASE("node limit stops the search without an optimality claim") {
  Instance inst = paper_example();
  SolverConfig cfg;
  cfg.node_limit = 3;
  SolveResult r = solve(inst, Weights{}, cfg);
  CHECK(r.status == SolveStatus::Feasible);
  if (r.best) CHECK(check_feasibility(inst, *r.best).empty());
}

TEST_CASE("zero time limit stops immediately") {
  Instance inst = paper_example();
  SolverConfig cfg;
  cfg.time_limit_seconds = 0.0;
  SolveResult r = solve(inst, Weights{}, cfg);
  CHECK(r.status == SolveStatus::Feasible);
}

TEST_CASE("exhaustive search refuses oversized spaces") {
  Instance inst = paper_example();
  SolverConfig cfg;
  cfg.exhaustive_cap = 10;
  CHECK_THROWS_AS(solve_exhaustive(inst, Weights{}, cfg), std::runtime_error);
}

TEST_CASE("solver rejects invalid input") {
  Instance broken = open_line(1, {{1, 1}});
  broken.parts[0].due_date = 0;
  CHECK_THROWS_AS(solve(broken, Weights{}), std::invalid_argument);
  CHECK_THROWS_AS(solve(open_line(1, {{1, 1}}), Weights{0.9, 0.9}), std::invalid_argument);
  CHECK_THROWS_AS(solve_exhaustive(open_line(1, {{1, 1}}), Weights{0.9, 0.9}),
                  std::invalid_argument);
}

TEST_CASE("search and oracle agree across random instances") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Instance inst = generate_random(small_params(seed), seed + 100);
    Weights w;
    SolveResult bb = solve(inst, w);
    SolveResult ex = solve_exhaustive(inst, w);
    CAPTURE(seed);
    REQUIRE(bb.status == ex.status);
    if (bb.status == SolveStatus::Optimal) {
      CHECK(bb.metrics->weighted_z == ex.metrics->weighted_z);
      CHECK(bb.best == ex.best);
      CHECK(check_feasibility(inst, *bb.best).empty());
    }
  }
}
