#pragma once

#include <optional>

#include "fms/model.hpp"

namespace fms {

struct SolverConfig {
  std::optional<long long> node_limit;
  std::optional<double> time_limit_seconds;
  int workers = 1;  // accepted for forward compatibility; search is serial
  long long exhaustive_cap = 10'000'000;
  long long log_every = 0;  // 0 = no progress lines
  ModelOptions options{};
};

enum class SolveStatus { Optimal, Feasible, Infeasible };

struct BoundTrace {
  double root_bound = 0.0;
  double incumbent = 0.0;
  long long nodes_pruned = 0;
  long long incumbent_updates = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Assignment> best;
  std::optional<Metrics> metrics;
  long long nodes_explored = 0;
  BoundTrace proof;
};

// Operations ordered fewest-options first, then largest minimum time,
// then part-major position. This is the documented tie-break coordinate
// system: among equal-objective optima the returned assignment is the
// first one reached when options are tried in ascending
// (time, cost, machine, tool) order along this operation order.
std::vector<int> branch_order(const Instance& inst);

// Admissible bound on the weighted objective over completions of a partial
// assignment: committed time plus every unassigned operation's minimum
// time, plus the unbalance left after water-filling that remaining time
// (and optionally up to sum(max - min) extra, when trading extra time for
// balance pays off under the weights). Never exceeds any feasible
// completion's objective and never decreases along extensions.
double lower_bound(const Instance& inst, const Assignment& partial, Weights w);

// Depth-first branch and bound over per-operation choices. Exact unless a
// node or time limit stops the search early (status Feasible).
SolveResult solve(const Instance& inst, Weights w, const SolverConfig& cfg = {});

// Enumerates every complete assignment in the same order as solve, keeping
// the best that passes the standalone feasibility check. Throws if the
// search space exceeds cfg.exhaustive_cap.
SolveResult solve_exhaustive(const Instance& inst, Weights w, const SolverConfig& cfg = {});

}  // namespace fms
