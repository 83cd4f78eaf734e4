#include "fms/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fms {

namespace {

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string op_code(PartId part, int op) {
  if (part <= 9 && op <= 9) return std::to_string(part * 10 + op);
  return std::to_string(part) + "." + std::to_string(op);
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Left-aligns the first `left_cols` columns, right-aligns the rest.
std::string layout(const std::vector<std::vector<std::string>>& rows, size_t left_cols) {
  size_t cols = 0;
  for (const auto& r : rows) cols = std::max(cols, r.size());
  std::vector<size_t> width(cols, 0);
  for (const auto& r : rows)
    for (size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::ostringstream out;
  for (const auto& r : rows) {
    std::string line;
    for (size_t c = 0; c < r.size(); ++c) {
      std::string cell = r[c];
      if (c < left_cols)
        cell += std::string(width[c] - cell.size(), ' ');
      else
        cell = std::string(width[c] - cell.size(), ' ') + cell;
      if (c) line += "  ";
      line += cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
  return out.str();
}

}  // namespace

ComparisonRow sarin_chen_baseline() {
  // Published figures; the source does not report a load deviation.
  ComparisonRow r;
  r.label = "Sarin-Chen model";
  r.processing_cost = 3590;
  r.total_time = 1369;
  r.max_completion = 558;
  r.mean_machine_time = 394.0;
  return r;
}

ComparisonRow balanced_model_baseline() {
  // Published figures for the load-balancing reference model.
  ComparisonRow r;
  r.label = "Balanced loading model";
  r.processing_cost = 4540;
  r.total_time = 1201;
  r.max_completion = 403;
  r.mean_machine_time = 300.25;
  r.max_load_deviation = 65;
  return r;
}

ComparisonRow result_row(const std::string& label, const Metrics& m, const Schedule& s) {
  ComparisonRow r;
  r.label = label;
  r.processing_cost = m.processing_cost;
  r.total_time = m.f1_total_time;
  r.max_completion = s.makespan;
  if (!m.loads.empty()) {
    r.mean_machine_time =
        static_cast<double>(m.f1_total_time) / static_cast<double>(m.loads.size());
    long long lo = m.loads.front();
    long long hi = m.loads.front();
    for (long long l : m.loads) {
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
    r.max_load_deviation = hi - lo;
  }
  return r;
}

std::string render_comparison(const std::vector<ComparisonRow>& rows) {
  std::vector<std::vector<std::string>> table;
  table.push_back({"Model", "Processing cost", "Total time", "Max completion",
                   "Mean machine time", "Max load deviation"});
  auto cell_int = [](const std::optional<long long>& v) {
    return v ? std::to_string(*v) : std::string("-");
  };
  for (const auto& r : rows) {
    table.push_back({r.label, cell_int(r.processing_cost), cell_int(r.total_time),
                     cell_int(r.max_completion),
                     r.mean_machine_time ? two_decimals(*r.mean_machine_time) : std::string("-"),
                     cell_int(r.max_load_deviation)});
  }
  return layout(table, 1);
}

std::string render_table3(const Instance& inst, const SolveResult& result, const Schedule& s) {
  std::ostringstream out;
  if (!result.best || !result.metrics) {
    out << "No assignment to report (status: "
        << (result.status == SolveStatus::Infeasible ? "Infeasible" : "unknown") << ")\n";
    return out.str();
  }
  const Assignment& a = *result.best;
  const Metrics& metrics = *result.metrics;

  std::vector<std::vector<std::string>> ops_on(static_cast<size_t>(inst.machines) + 1);
  std::vector<std::set<int>> tools_on(static_cast<size_t>(inst.machines) + 1);
  std::vector<long long> cost_on(static_cast<size_t>(inst.machines) + 1, 0);
  int flat = 0;
  for (const auto& p : inst.parts)
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      const OpChoice& c = a.choice[static_cast<size_t>(flat)];
      ops_on[static_cast<size_t>(c.machine)].push_back(op_code(p.id, static_cast<int>(j) + 1));
      tools_on[static_cast<size_t>(c.machine)].insert(c.tool);
      for (const auto& o : p.operations[j].options)
        if (o.machine == c.machine && o.tool == c.tool) cost_on[static_cast<size_t>(c.machine)] += o.cost;
    }
  std::vector<long long> completion(static_cast<size_t>(inst.machines) + 1, 0);
  for (const auto& t : s.items)
    completion[static_cast<size_t>(t.machine)] =
        std::max(completion[static_cast<size_t>(t.machine)], t.end);

  std::vector<std::vector<std::string>> table;
  table.push_back({"Machine", "Operations", "Tools", "Load", "Completion", "Cost",
                   "Utilization"});
  for (int m = 1; m <= inst.machines; ++m) {
    std::vector<std::string> tool_codes;
    for (int t : tools_on[static_cast<size_t>(m)]) tool_codes.push_back(std::to_string(t));
    table.push_back({"M" + std::to_string(m), join(ops_on[static_cast<size_t>(m)], ","),
                     join(tool_codes, ","),
                     std::to_string(metrics.loads[static_cast<size_t>(m - 1)]),
                     std::to_string(completion[static_cast<size_t>(m)]),
                     std::to_string(cost_on[static_cast<size_t>(m)]),
                     two_decimals(static_cast<size_t>(m - 1) < s.utilization.size()
                                      ? s.utilization[static_cast<size_t>(m - 1)]
                                      : 0.0)});
  }
  table.push_back({"Sum", "", "", std::to_string(metrics.f1_total_time),
                   std::to_string(s.makespan), std::to_string(metrics.processing_cost), ""});
  out << "Operation codes: <part><op> (two-digit) or <part>.<op>; completion is the "
         "scheduled finish per machine, which can exceed its load.\n";
  out << layout(table, 3);
  return out.str();
}

std::string render_gantt(const Schedule& s, GanttFormat format, int time_quantum) {
  if (time_quantum < 1) time_quantum = 1;
  int lanes = static_cast<int>(s.utilization.size());
  for (const auto& t : s.items) {
    if (t.start < 0 || t.end < t.start || t.end > s.makespan || t.machine < 1 ||
        t.machine > lanes)
      throw std::invalid_argument("render_gantt: schedule item out of range");
  }
  if (format == GanttFormat::Ascii) {
    std::ostringstream out;
    long long cols = (s.makespan + time_quantum - 1) / time_quantum;
    out << "1 column = " << time_quantum << " min; bars labeled <part>.<op>\n";
    for (int m = 1; m <= lanes; ++m) {
      std::string lane(static_cast<size_t>(cols), ' ');
      for (const auto& t : s.items) {
        if (t.machine != m || t.end == t.start) continue;
        // Cell c covers [c*q, (c+1)*q); the op paints cells whose start it covers.
        long long first = (t.start + time_quantum - 1) / time_quantum;
        if (first * time_quantum >= t.end) continue;
        long long last = (t.end - 1) / time_quantum;
        for (long long c = first; c <= last; ++c) lane[static_cast<size_t>(c)] = '=';
        std::string label = std::to_string(t.part) + "." + std::to_string(t.op);
        if (last - first + 1 < static_cast<long long>(label.size()))
          label = std::to_string(t.part % 10);
        for (size_t i = 0; i < label.size(); ++i)
          lane[static_cast<size_t>(first) + i] = label[i];
      }
      out << "M" << m << " |" << lane << "|\n";
    }
    std::string axis(static_cast<size_t>(cols), '-');
    if (axis.empty()) axis = "-";
    for (size_t c = 0; c < axis.size(); c += 10) axis[c] = '+';
    out << "    " << axis << "\n";
    std::string labels = "0";
    for (long long c = 10; c < cols; c += 10) {
      std::string v = std::to_string(c * time_quantum);
      if (labels.size() + 1 < static_cast<size_t>(c))
        labels += std::string(static_cast<size_t>(c) - labels.size(), ' ') + v;
    }
    out << "    " << labels << "\n";
    return out.str();
  }

  // SVG with machine lanes; bars carry the schedule as data attributes.
  const long long px_per_min = 2;
  const long long left = 50;
  const long long top = 24;
  const long long row_h = 28;
  const long long bar_h = 20;
  const long long width = left + s.makespan * px_per_min + 20;
  const long long height = top + lanes * row_h + 40;
  static const char* palette[8] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                   "#59a14f", "#edc948", "#b07aa1", "#9c755f"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<style>text{font-family:monospace;font-size:11px;fill:#333}"
         ".op{stroke:#333;stroke-width:0.5}</style>\n";
  for (int m = 1; m <= lanes; ++m)
    out << "<text x=\"6\" y=\"" << top + (m - 1) * row_h + bar_h - 5 << "\">M" << m
        << "</text>\n";
  for (const auto& t : s.items) {
    long long x = left + t.start * px_per_min;
    long long y = top + (t.machine - 1) * row_h;
    long long w = (t.end - t.start) * px_per_min;
    out << "<rect class=\"op\" data-part=\"" << t.part << "\" data-op=\"" << t.op
        << "\" data-machine=\"" << t.machine << "\" data-tool=\"" << t.tool << "\" data-start=\""
        << t.start << "\" data-end=\"" << t.end << "\" x=\"" << x << "\" y=\"" << y
        << "\" width=\"" << w << "\" height=\"" << bar_h << "\" fill=\""
        << palette[(t.part - 1) % 8] << "\"/>\n";
    out << "<text x=\"" << x + 3 << "\" y=\"" << y + bar_h - 5 << "\">" << t.part << "." << t.op
        << "</text>\n";
  }
  long long axis_y = top + lanes * row_h + 8;
  out << "<line x1=\"" << left << "\" y1=\"" << axis_y << "\" x2=\""
      << left + s.makespan * px_per_min << "\" y2=\"" << axis_y
      << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  for (long long tick = 0; tick <= s.makespan; tick += 50) {
    long long x = left + tick * px_per_min;
    out << "<line x1=\"" << x << "\" y1=\"" << axis_y << "\" x2=\"" << x << "\" y2=\""
        << axis_y + 4 << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << x - 4 << "\" y=\"" << axis_y + 16 << "\">" << tick << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace fms
