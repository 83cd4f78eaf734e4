#include "fms/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fms {

namespace {

const ProcessingOption* option_of(const Instance& inst, PartId part, int op, MachineId machine,
                                  ToolId tool) {
  if (part < 1 || part > static_cast<int>(inst.parts.size())) return nullptr;
  const Part& p = inst.parts[static_cast<size_t>(part - 1)];
  if (op < 1 || op > static_cast<int>(p.operations.size())) return nullptr;
  for (const auto& o : p.operations[static_cast<size_t>(op - 1)].options)
    if (o.machine == machine && o.tool == tool) return &o;
  return nullptr;
}

// The chosen option per flat operation; throws if the assignment is not a
// complete selection from the instance's options.
std::vector<const ProcessingOption*> resolve(const Instance& inst, const Assignment& a) {
  if (static_cast<int>(a.choice.size()) != inst.total_operations() || !a.complete())
    throw std::invalid_argument("schedule: assignment must be complete");
  std::vector<const ProcessingOption*> chosen;
  int flat = 0;
  for (const auto& p : inst.parts)
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      const OpChoice& c = a.choice[static_cast<size_t>(flat)];
      const ProcessingOption* o =
          option_of(inst, p.id, static_cast<int>(j) + 1, c.machine, c.tool);
      if (!o) throw std::invalid_argument("schedule: choice outside the operation's options");
      chosen.push_back(o);
    }
  return chosen;
}

}  // namespace

Schedule build_schedule(const Instance& inst, const Assignment& a) {
  auto chosen = resolve(inst, a);
  const int N = static_cast<int>(inst.parts.size());

  std::vector<int> next_op(static_cast<size_t>(N), 0);
  std::vector<long long> ready(static_cast<size_t>(N), 0);
  std::vector<long long> machine_free(static_cast<size_t>(inst.machines) + 1, 0);
  std::vector<long long> remaining(static_cast<size_t>(N), 0);
  for (int pi = 0; pi < N; ++pi) {
    int base = inst.op_base(pi);
    for (size_t j = 0; j < inst.parts[static_cast<size_t>(pi)].operations.size(); ++j)
      remaining[static_cast<size_t>(pi)] += chosen[static_cast<size_t>(base) + j]->time;
  }

  Schedule s;
  int left = inst.total_operations();
  while (left > 0) {
    int best_part = -1;
    long long best_start = 0;
    for (int pi = 0; pi < N; ++pi) {
      const Part& p = inst.parts[static_cast<size_t>(pi)];
      if (next_op[static_cast<size_t>(pi)] >= static_cast<int>(p.operations.size())) continue;
      const ProcessingOption* o =
          chosen[static_cast<size_t>(inst.op_base(pi) + next_op[static_cast<size_t>(pi)])];
      long long start =
          std::max(ready[static_cast<size_t>(pi)], machine_free[static_cast<size_t>(o->machine)]);
      bool better = false;
      if (best_part < 0) {
        better = true;
      } else if (start != best_start) {
        better = start < best_start;
      } else {
        better = remaining[static_cast<size_t>(pi)] > remaining[static_cast<size_t>(best_part)];
        // Equal start and equal remaining work: lower part id wins, which the
        // ascending scan already guarantees.
      }
      if (better) {
        best_part = pi;
        best_start = start;
      }
    }
    const Part& p = inst.parts[static_cast<size_t>(best_part)];
    int j = next_op[static_cast<size_t>(best_part)];
    const ProcessingOption* o = chosen[static_cast<size_t>(inst.op_base(best_part) + j)];
    TimedOperation t;
    t.part = p.id;
    t.op = j + 1;
    t.machine = o->machine;
    t.tool = o->tool;
    t.start = best_start;
    t.end = best_start + o->time;
    s.items.push_back(t);
    ready[static_cast<size_t>(best_part)] = t.end;
    machine_free[static_cast<size_t>(o->machine)] = t.end;
    remaining[static_cast<size_t>(best_part)] -= o->time;
    ++next_op[static_cast<size_t>(best_part)];
    --left;
  }

  for (const auto& t : s.items) s.makespan = std::max(s.makespan, t.end);
  std::vector<long long> loads(static_cast<size_t>(inst.machines), 0);
  for (const auto& t : s.items) loads[static_cast<size_t>(t.machine - 1)] += t.end - t.start;
  s.utilization.assign(static_cast<size_t>(inst.machines), 0.0);
  if (s.makespan > 0)
    for (int m = 0; m < inst.machines; ++m)
      s.utilization[static_cast<size_t>(m)] =
          static_cast<double>(loads[static_cast<size_t>(m)]) / static_cast<double>(s.makespan);
  return s;
}

std::vector<Violation> verify_schedule(const Instance& inst, const Schedule& s) {
  std::vector<Violation> out;
  auto add = [&out](const char* rule, std::string detail) {
    out.push_back({rule, std::move(detail)});
  };

  std::vector<std::vector<const TimedOperation*>> by_part(inst.parts.size());
  std::vector<std::vector<const TimedOperation*>> by_machine(
      static_cast<size_t>(inst.machines) + 1);
  for (const auto& t : s.items) {
    std::string tag = "part " + std::to_string(t.part) + " op " + std::to_string(t.op);
    const ProcessingOption* o = option_of(inst, t.part, t.op, t.machine, t.tool);
    if (!o) {
      add("UnknownOption", tag);
      continue;
    }
    if (t.start < 0) add("NegativeStart", tag);
    if (t.end - t.start != o->time)
      add("DurationMismatch", tag + " runs " + std::to_string(t.end - t.start) +
                                  " instead of " + std::to_string(o->time));
    by_part[static_cast<size_t>(t.part - 1)].push_back(&t);
    by_machine[static_cast<size_t>(t.machine)].push_back(&t);
  }

  for (size_t pi = 0; pi < by_part.size(); ++pi) {
    auto& ops = by_part[pi];
    std::sort(ops.begin(), ops.end(), [](const TimedOperation* a, const TimedOperation* b) {
      if (a->op != b->op) return a->op < b->op;
      return a->start < b->start;
    });
    std::string pwhere = "part " + std::to_string(pi + 1);
    int expected = 1;
    const TimedOperation* prev = nullptr;
    for (const TimedOperation* t : ops) {
      if (t->op < expected) {
        add("DuplicateOperation", pwhere + " op " + std::to_string(t->op));
        continue;
      }
      if (t->op > expected)
        add("MissingPredecessor", pwhere + " op " + std::to_string(t->op));
      if (prev && t->start < prev->end)
        add("PrecedenceViolation", pwhere + " op " + std::to_string(t->op) +
                                       " starts before op " + std::to_string(prev->op) + " ends");
      prev = t;
      expected = t->op + 1;
    }
    int op_count = static_cast<int>(inst.parts[pi].operations.size());
    if (expected <= op_count)
      add("MissingOperation", pwhere + " op " + std::to_string(expected) + " never scheduled");
  }

  for (int m = 1; m <= inst.machines; ++m) {
    auto& ops = by_machine[static_cast<size_t>(m)];
    std::sort(ops.begin(), ops.end(), [](const TimedOperation* a, const TimedOperation* b) {
      if (a->start != b->start) return a->start < b->start;
      return a->end < b->end;
    });
    for (size_t i = 1; i < ops.size(); ++i)
      if (ops[i]->start < ops[i - 1]->end)
        add("MachineOverlap", "machine " + std::to_string(m) + " at time " +
                                  std::to_string(ops[i]->start));
  }

  long long max_end = 0;
  for (const auto& t : s.items) max_end = std::max(max_end, t.end);
  if (s.makespan != max_end)
    add("MakespanMismatch", std::to_string(s.makespan) + " recorded, " +
                                std::to_string(max_end) + " actual");

  if (static_cast<int>(s.utilization.size()) != inst.machines) {
    add("UtilizationMismatch", "expected one entry per machine");
  } else {
    std::vector<long long> loads(static_cast<size_t>(inst.machines), 0);
    for (const auto& t : s.items)
      if (t.machine >= 1 && t.machine <= inst.machines)
        loads[static_cast<size_t>(t.machine - 1)] += t.end - t.start;
    for (int m = 0; m < inst.machines; ++m) {
      double expect = s.makespan > 0 ? static_cast<double>(loads[static_cast<size_t>(m)]) /
                                           static_cast<double>(s.makespan)
                                     : 0.0;
      if (std::abs(s.utilization[static_cast<size_t>(m)] - expect) > 1e-9)
        add("UtilizationMismatch", "machine " + std::to_string(m + 1));
    }
  }
  return out;
}

long long makespan_lower_bound(const Instance& inst, const Assignment& a) {
  auto chosen = resolve(inst, a);
  std::vector<long long> loads(static_cast<size_t>(inst.machines) + 1, 0);
  long long best = 0;
  int flat = 0;
  for (const auto& p : inst.parts) {
    long long part_total = 0;
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      loads[static_cast<size_t>(chosen[static_cast<size_t>(flat)]->machine)] +=
          chosen[static_cast<size_t>(flat)]->time;
      part_total += chosen[static_cast<size_t>(flat)]->time;
    }
    best = std::max(best, part_total);
  }
  for (int m = 1; m <= inst.machines; ++m)
    best = std::max(best, loads[static_cast<size_t>(m)]);
  return best;
}

}  // namespace fms
