#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fms/instance.hpp"

namespace fms {

// Choice of one processing option, identified by its machine/tool pair.
// machine == 0 means the operation is not assigned yet.
struct OpChoice {
  MachineId machine = 0;
  ToolId tool = 0;
  bool assigned() const { return machine != 0; }
  bool operator==(const OpChoice&) const = default;
};

// One choice per operation, flat part-major order (see Instance::op_base).
struct Assignment {
  std::vector<OpChoice> choice;

  static Assignment empty_for(const Instance& inst);
  bool complete() const;
  bool operator==(const Assignment&) const = default;
};

struct Weights {
  double w1 = 0.5;  // total processing time
  double w2 = 0.5;  // load unbalance
  bool valid() const;
};

struct Metrics {
  long long f1_total_time = 0;
  std::vector<long long> loads;  // index 0 = machine 1
  long long unbalance = 0;
  double weighted_z = 0.0;
  long long processing_cost = 0;
  long long setup_cost = 0;
  std::vector<int> movements;       // per part
  std::vector<long long> part_time; // per part
  long long max_load = 0;
};

// Which optional constraint families are active.
struct ModelOptions {
  bool tool_life = true;
  bool magazine = true;
};

std::vector<long long> machine_loads(const Instance& inst, const Assignment& a);

// Sum of absolute pairwise load differences over unordered machine pairs.
long long unbalance(const std::vector<long long>& loads);

// Number of inter-machine transfers between consecutive operations of the
// part, computed as the half-sum of per-machine indicator differences.
int movements(const Instance& inst, const Assignment& a, PartId part);

Metrics evaluate(const Instance& inst, const Assignment& a, Weights w);

std::vector<Violation> check_feasibility(const Instance& inst, const Assignment& a);
std::vector<Violation> check_feasibility(const Instance& inst, const Assignment& a,
                                         const ModelOptions& opts);

// Allocation-free feasibility test used by the exhaustive oracle. Recomputes
// everything from the assignment; shares no state with the solver's search.
struct FeasScratch {
  std::vector<long long> loads;
  std::vector<long long> tool_time;
  std::vector<int> tool_machine;
  std::vector<int> distinct_tools;
};
bool is_feasible(const Instance& inst, const Assignment& a, const ModelOptions& opts,
                 FeasScratch& scratch);

// ---- Linear model -------------------------------------------------------

enum class VarKind { Binary, Continuous };
enum class Relation { LE, EQ, GE };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double objective = 0.0;
};

struct LinTerm {
  int var = 0;
  double coeff = 0.0;
};

struct Constraint {
  std::string name;
  Relation rel = Relation::LE;
  double rhs = 0.0;
  std::vector<LinTerm> terms;
};

// Minimization model over binary and continuous non-negative variables.
struct LinearModel {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;

  int add_variable(std::string name, VarKind kind, double objective);
  int add_constraint(std::string name, Relation rel, double rhs);
  void add_term(int constraint, int var, double coeff);
};

struct LinExpr {
  std::vector<LinTerm> terms;
  double constant = 0.0;
};

struct AbsPair {
  int pos_var = 0;  // positive deviation
  int neg_var = 0;  // negative deviation
  int eq_constraint = 0;
};

struct AbsItem {
  LinExpr left;
  LinExpr right;
  std::string stem;  // appended to the variable and row prefixes
};

// For each item emits continuous pos/neg deviation variables with the given
// objective coefficient and the equality left - right = pos - neg. The
// product pos*neg = 0 is intentionally not modeled; it holds at any optimum
// whenever the pair carries positive objective weight.
std::vector<AbsPair> linearize_abs(LinearModel& model, const std::vector<AbsItem>& items,
                                   const std::string& pos_prefix, const std::string& neg_prefix,
                                   const std::string& row_prefix, double objective_coeff);

// Builds the full 0-1 model: assignment equalities, optional machine load
// cap, due dates, one machine per tool with choice/placement linking, cost
// budget, tool life, magazine capacity, load-deviation pairs (objective),
// and transfer indicators feeding the setup budget (doubled to stay integer).
LinearModel build_model(const Instance& inst, Weights w, const ModelOptions& opts = {});

// Free-format MPS text; deterministic, byte-identical for identical models.
std::string export_mps(const LinearModel& model);

}  // namespace fms
