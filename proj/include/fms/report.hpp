#pragma once

#include <optional>

#include "fms/schedule.hpp"
#include "fms/solver.hpp"

namespace fms {

// One line of the model-comparison table. Absent fields render as "-".
struct ComparisonRow {
  std::string label;
  std::optional<long long> processing_cost;
  std::optional<long long> total_time;
  std::optional<long long> max_completion;
  std::optional<double> mean_machine_time;
  std::optional<long long> max_load_deviation;
};

// Published benchmark figures, shipped as constants.
ComparisonRow sarin_chen_baseline();
ComparisonRow balanced_model_baseline();

ComparisonRow result_row(const std::string& label, const Metrics& m, const Schedule& s);

std::string render_comparison(const std::vector<ComparisonRow>& rows);

// Per-machine table: assigned operation codes, tools, load, completion,
// cost, utilization, plus a Sum row. Operation codes concatenate part and
// op digits when both are single-digit, else use "part.op".
std::string render_table3(const Instance& inst, const SolveResult& result, const Schedule& s);

enum class GanttFormat { Ascii, Svg };

// ASCII: one fixed-width lane per machine, one column per time_quantum
// minutes. SVG: standalone markup whose bars carry data-part/op/machine/
// tool/start/end attributes, so the schedule can be parsed back from it.
std::string render_gantt(const Schedule& s, GanttFormat format, int time_quantum = 10);

}  // namespace fms
