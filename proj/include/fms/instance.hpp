#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fms {

// Identifiers are 1-based: machines 1..M, tools 1..T, parts 1..N.
using MachineId = int;
using ToolId = int;
using PartId = int;

// One way to perform an operation: a machine/tool pair with its
// processing time (minutes) and cost.
struct ProcessingOption {
  MachineId machine = 0;
  ToolId tool = 0;
  int time = 0;
  int cost = 0;
  bool operator==(const ProcessingOption&) const = default;
};

struct OperationDef {
  std::vector<ProcessingOption> options;
  bool operator==(const OperationDef&) const = default;
};

struct Part {
  PartId id = 0;
  int due_date = 0;    // bound on the part's summed processing time
  int setup_cost = 0;  // charged once per inter-machine transfer of the part
  std::vector<OperationDef> operations;
  bool operator==(const Part&) const = default;
};

struct Instance {
  int machines = 0;
  int tools = 0;
  std::vector<int> tool_life;          // per tool, cumulative minutes
  std::vector<int> magazine_capacity;  // per machine, tool slots
  long long total_cost_budget = 0;
  long long setup_cost_budget = 0;
  std::optional<long long> max_completion_time;  // per-machine load cap, absent = unlimited
  int stages = 1;  // carried for forward compatibility, semantics collapse at 1
  std::vector<Part> parts;

  int total_operations() const;
  // Flat index of the first operation of parts[part_index]; operations are
  // numbered part-major across the instance.
  int op_base(int part_index) const;

  bool operator==(const Instance&) const = default;
};

struct Violation {
  std::string rule;
  std::string detail;
};

struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses the instance text format (JSON, comments allowed). Unknown keys,
// type mismatches, missing fields, and out-of-range machine/tool references
// throw LoadError. origin is used in error messages.
Instance parse_instance(const std::string& text, const std::string& origin = "<input>");
Instance load_instance(const std::string& path);

std::string serialize_instance(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);

// Structural well-formedness checks; empty result means the instance is
// usable by the model and solver layers.
std::vector<Violation> validate(const Instance& inst);

// Built-in benchmark: 4 parts x 4 operations, 4 machines, 20 tools,
// reconstructed from the published example this project reproduces.
Instance paper_example();

struct RandomParams {
  int n_parts = 2;
  int ops_per_part = 2;
  int n_machines = 2;
  int n_tools = 3;
  int options_per_op = 2;
  int time_min = 1;
  int time_max = 50;
  int cost_min = 0;
  int cost_max = 100;
};

// Deterministic for a fixed (params, seed). Budgets and due dates are set
// loose enough that cost and due-date constraints never bind; tool and
// machine coupling can still make an instance infeasible.
Instance generate_random(const RandomParams& params, std::uint64_t seed);

}  // namespace fms
