#pragma once

#include "fms/model.hpp"

namespace fms {

struct TimedOperation {
  PartId part = 0;
  int op = 0;  // 1-based position within the part
  MachineId machine = 0;
  ToolId tool = 0;
  long long start = 0;
  long long end = 0;
  bool operator==(const TimedOperation&) const = default;
};

struct Schedule {
  std::vector<TimedOperation> items;
  long long makespan = 0;
  std::vector<double> utilization;  // load / makespan per machine
};

// Deterministic non-delay list scheduling of a feasible assignment.
// Dispatch priority: earliest feasible start, then longest remaining part
// work, then part id. Transfer and setup times are zero.
Schedule build_schedule(const Instance& inst, const Assignment& a);

// Checks interval/duration consistency, per-part precedence, per-machine
// non-overlap, makespan, and utilization against the instance.
std::vector<Violation> verify_schedule(const Instance& inst, const Schedule& s);

// max(max machine load, max per-part total time); no schedule of the
// assignment can finish earlier.
long long makespan_lower_bound(const Instance& inst, const Assignment& a);

}  // namespace fms
