// fmsload: validate, solve, and inspect FMS loading instances.
//
// Exit codes: 0 success, 1 infeasible or violations found (or a search that
// hit its limit with no solution), 2 usage or input errors. File outputs are
// written atomically (temp file + rename), never as partial files.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fms/instance.hpp"
#include "fms/model.hpp"
#include "fms/report.hpp"
#include "fms/schedule.hpp"
#include "fms/solver.hpp"

namespace {

using nlohmann::ordered_json;

struct CommonOpts {
  std::string instance_path;
  double w1 = 0.5;
  double w2 = 0.5;
  std::optional<long long> max_completion;
  bool no_tool_life = false;
  bool no_magazine = false;
};

struct SearchOpts {
  std::optional<long long> node_limit;
  std::optional<double> time_limit;
  int workers = 1;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--instance", o.instance_path, "Instance file (JSON, // comments allowed)")
      ->required();
  sub->add_option("--w1", o.w1, "Weight on total processing time (default 0.5)");
  sub->add_option("--w2", o.w2, "Weight on load unbalance (default 0.5)");
  sub->add_option("--max-completion-time", o.max_completion,
                  "Cap every machine load at this many minutes");
  sub->add_flag("--no-tool-life", o.no_tool_life, "Drop tool-life constraints");
  sub->add_flag("--no-magazine", o.no_magazine, "Drop magazine-capacity constraints");
}

void add_search(CLI::App* sub, SearchOpts& o) {
  sub->add_option("--node-limit", o.node_limit, "Stop after exploring this many nodes");
  sub->add_option("--time-limit", o.time_limit, "Stop after this many seconds");
  sub->add_option("--workers", o.workers, "Worker threads (current build runs serially)")
      ->check(CLI::PositiveNumber);
}

fms::Instance load_with_overrides(const CommonOpts& o) {
  fms::Instance inst = fms::load_instance(o.instance_path);
  if (o.max_completion) inst.max_completion_time = *o.max_completion;
  return inst;
}

fms::Weights weights_of(const CommonOpts& o) {
  fms::Weights w{o.w1, o.w2};
  if (!w.valid()) throw fms::LoadError("weights must be non-negative and sum to 1");
  return w;
}

fms::SolverConfig config_of(const CommonOpts& c, const SearchOpts& s) {
  fms::SolverConfig cfg;
  cfg.node_limit = s.node_limit;
  cfg.time_limit_seconds = s.time_limit;
  cfg.workers = s.workers;
  cfg.options.tool_life = !c.no_tool_life;
  cfg.options.magazine = !c.no_magazine;
  return cfg;
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw fms::LoadError("cannot open " + tmp + " for writing");
    out << content;
    if (!out.flush()) throw fms::LoadError("write to " + tmp + " failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw fms::LoadError("cannot rename " + tmp + " to " + path);
}

const char* status_name(fms::SolveStatus s) {
  switch (s) {
    case fms::SolveStatus::Optimal: return "Optimal";
    case fms::SolveStatus::Feasible: return "Feasible";
    default: return "Infeasible";
  }
}

std::string joined(const std::vector<long long>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

// Deterministic text summary; --seed-check byte-compares two of these.
std::string solve_report(const fms::Instance& inst, const fms::Weights& w,
                         const fms::SolveResult& r) {
  std::ostringstream out;
  out << "status: " << status_name(r.status) << "\n";
  out << "nodes explored: " << r.nodes_explored << "\n";
  if (r.metrics) {
    const fms::Metrics& m = *r.metrics;
    out << "objective Z: " << m.weighted_z << " (w1=" << w.w1 << ", w2=" << w.w2 << ")\n";
    out << "total time F1: " << m.f1_total_time << "\n";
    out << "unbalance L: " << m.unbalance << "\n";
    out << "processing cost: " << m.processing_cost << "\n";
    out << "setup cost: " << m.setup_cost << "\n";
    out << "loads: " << joined(m.loads) << "\n";
  }
  if (r.best && r.metrics) {
    fms::Schedule s = fms::build_schedule(inst, *r.best);
    out << "\n" << fms::render_table3(inst, r, s);
  }
  return out.str();
}

ordered_json metrics_json(const fms::Metrics& m) {
  return ordered_json{{"f1_total_time", m.f1_total_time},
                      {"unbalance", m.unbalance},
                      {"weighted_z", m.weighted_z},
                      {"processing_cost", m.processing_cost},
                      {"setup_cost", m.setup_cost},
                      {"loads", m.loads},
                      {"movements", m.movements},
                      {"part_time", m.part_time},
                      {"max_load", m.max_load}};
}

ordered_json result_json(const fms::Instance& inst, const fms::Weights& w,
                         const fms::SolveResult& r) {
  ordered_json j;
  j["status"] = status_name(r.status);
  j["w1"] = w.w1;
  j["w2"] = w.w2;
  j["nodes_explored"] = r.nodes_explored;
  if (r.metrics) {
    j["objective"] = r.metrics->weighted_z;
    j["metrics"] = metrics_json(*r.metrics);
  }
  if (r.best) {
    ordered_json arr = ordered_json::array();
    int flat = 0;
    for (const auto& p : inst.parts)
      for (size_t op = 0; op < p.operations.size(); ++op, ++flat) {
        const fms::OpChoice& c = r.best->choice[static_cast<size_t>(flat)];
        arr.push_back(ordered_json{{"part", p.id},
                                   {"op", static_cast<int>(op) + 1},
                                   {"machine", c.machine},
                                   {"tool", c.tool}});
      }
    j["assignment"] = arr;
  }
  return j;
}

ordered_json schedule_json(const fms::Schedule& s) {
  ordered_json items = ordered_json::array();
  for (const auto& t : s.items)
    items.push_back(ordered_json{{"part", t.part},
                                 {"op", t.op},
                                 {"machine", t.machine},
                                 {"tool", t.tool},
                                 {"start", t.start},
                                 {"end", t.end}});
  return ordered_json{{"makespan", s.makespan}, {"utilization", s.utilization}, {"items", items}};
}

int exit_for(const fms::SolveResult& r) {
  if (r.status == fms::SolveStatus::Infeasible) return 1;
  if (!r.best) return 1;  // limit hit before any solution
  return 0;
}

int run_validate(const CommonOpts& common) {
  fms::Instance inst = load_with_overrides(common);
  std::vector<fms::Violation> violations = fms::validate(inst);
  for (const auto& v : violations) std::cout << v.rule << ": " << v.detail << "\n";
  if (violations.empty()) {
    std::cout << "ok: " << inst.parts.size() << " parts, " << inst.total_operations()
              << " operations, " << inst.machines << " machines, " << inst.tools << " tools\n";
    return 0;
  }
  return 1;
}

int run_solve(const CommonOpts& common, const SearchOpts& search, bool seed_check,
              const std::string& out_path, bool exhaustive) {
  fms::Instance inst = load_with_overrides(common);
  fms::Weights w = weights_of(common);
  fms::SolverConfig cfg = config_of(common, search);
  auto run = [&] { return exhaustive ? fms::solve_exhaustive(inst, w, cfg) : fms::solve(inst, w, cfg); };
  fms::SolveResult result = run();
  std::string report = solve_report(inst, w, result);
  if (seed_check) {
    fms::SolveResult again = run();
    if (solve_report(inst, w, again) != report) {
      std::cerr << "seed-check: two runs produced different reports\n";
      return 1;
    }
    std::cout << "seed-check: two runs produced byte-identical reports\n";
  }
  std::cout << report;
  if (!out_path.empty()) atomic_write(out_path, result_json(inst, w, result).dump(2) + "\n");
  return exit_for(result);
}

int run_export_mps(const CommonOpts& common, const std::string& mps_path) {
  fms::Instance inst = load_with_overrides(common);
  fms::Weights w = weights_of(common);
  fms::ModelOptions opts{!common.no_tool_life, !common.no_magazine};
  fms::LinearModel model = fms::build_model(inst, w, opts);
  atomic_write(mps_path, fms::export_mps(model));
  std::cout << "wrote " << mps_path << ": " << model.variables.size() << " variables, "
            << model.constraints.size() << " constraints\n";
  return 0;
}

int run_schedule(const CommonOpts& common, const SearchOpts& search, const std::string& format,
                 const std::string& out_path) {
  fms::Instance inst = load_with_overrides(common);
  fms::Weights w = weights_of(common);
  fms::SolveResult result = fms::solve(inst, w, config_of(common, search));
  if (!result.best) {
    std::cerr << "no assignment to schedule (status: " << status_name(result.status) << ")\n";
    return 1;
  }
  fms::Schedule s = fms::build_schedule(inst, *result.best);
  std::vector<fms::Violation> bad = fms::verify_schedule(inst, s);
  for (const auto& v : bad) std::cerr << v.rule << ": " << v.detail << "\n";
  if (!bad.empty()) return 1;
  std::string rendered;
  if (format == "json")
    rendered = schedule_json(s).dump(2) + "\n";
  else if (format == "svg")
    rendered = fms::render_gantt(s, fms::GanttFormat::Svg);
  else
    rendered = fms::render_gantt(s, fms::GanttFormat::Ascii);
  if (!out_path.empty())
    atomic_write(out_path, rendered);
  else
    std::cout << rendered;
  return 0;
}

int run_report(const CommonOpts& common, const SearchOpts& search, const std::string& format,
               const std::string& out_path) {
  fms::Instance inst = load_with_overrides(common);
  fms::Weights w = weights_of(common);
  fms::SolveResult result = fms::solve(inst, w, config_of(common, search));
  if (!result.best || !result.metrics) {
    std::cerr << "nothing to report (status: " << status_name(result.status) << ")\n";
    return 1;
  }
  fms::Schedule s = fms::build_schedule(inst, *result.best);
  std::vector<fms::ComparisonRow> rows{fms::sarin_chen_baseline(), fms::balanced_model_baseline(),
                                       fms::result_row("This model", *result.metrics, s)};
  std::string rendered;
  if (format == "json") {
    ordered_json j = result_json(inst, w, result);
    j["schedule"] = schedule_json(s);
    ordered_json comp = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json row;
      row["label"] = r.label;
      row["processing_cost"] = r.processing_cost ? ordered_json(*r.processing_cost) : nullptr;
      row["total_time"] = r.total_time ? ordered_json(*r.total_time) : nullptr;
      row["max_completion"] = r.max_completion ? ordered_json(*r.max_completion) : nullptr;
      row["mean_machine_time"] =
          r.mean_machine_time ? ordered_json(*r.mean_machine_time) : nullptr;
      row["max_load_deviation"] =
          r.max_load_deviation ? ordered_json(*r.max_load_deviation) : nullptr;
      comp.push_back(row);
    }
    j["comparison"] = comp;
    rendered = j.dump(2) + "\n";
  } else {
    rendered = fms::render_table3(inst, result, s) + "\n" + fms::render_comparison(rows);
  }
  if (!out_path.empty())
    atomic_write(out_path, rendered);
  else
    std::cout << rendered;
  return exit_for(result);
}

struct GenOpts {
  unsigned long long seed = 1;
  fms::RandomParams params;
  std::string out_path;
};

int run_gen(const GenOpts& g) {
  fms::Instance inst = fms::generate_random(g.params, g.seed);
  if (!g.out_path.empty()) {
    fms::save_instance(inst, g.out_path);
    std::cout << "wrote " << g.out_path << "\n";
  } else {
    std::cout << fms::serialize_instance(inst);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FMS machine loading: exact 0-1 solver, oracle, MPS export, schedules, reports"};
  app.require_subcommand(1);

  CommonOpts common;
  SearchOpts search;
  GenOpts gen;
  bool seed_check = false;
  std::string out_path;
  std::string mps_path;
  std::string format = "ascii";

  CLI::App* validate = app.add_subcommand("validate", "Check an instance file and list violations");
  add_common(validate, common);

  CLI::App* solve = app.add_subcommand("solve", "Branch-and-bound to a proven optimum");
  add_common(solve, common);
  add_search(solve, search);
  solve->add_flag("--seed-check", seed_check, "Solve twice and require byte-identical reports");
  solve->add_option("--out", out_path, "Write the result as JSON to this path");

  CLI::App* oracle = app.add_subcommand("oracle", "Exhaustive search (small instances only)");
  add_common(oracle, common);
  add_search(oracle, search);
  oracle->add_option("--out", out_path, "Write the result as JSON to this path");

  CLI::App* export_mps = app.add_subcommand("export-mps", "Write the 0-1 model in MPS format");
  add_common(export_mps, common);
  export_mps->add_option("--mps-out", mps_path, "Output MPS path")->required();

  CLI::App* schedule = app.add_subcommand("schedule", "Solve, then build and render a schedule");
  add_common(schedule, common);
  add_search(schedule, search);
  schedule->add_option("--format", format, "ascii | svg | json")
      ->check(CLI::IsMember({"ascii", "svg", "json"}));
  schedule->add_option("--out", out_path, "Write the rendering to this path");

  CLI::App* report = app.add_subcommand("report", "Solve and print machine table + comparison");
  add_common(report, common);
  add_search(report, search);
  report->add_option("--format", format, "ascii | json")
      ->check(CLI::IsMember({"ascii", "json"}));
  report->add_option("--out", out_path, "Write the report to this path");

  CLI::App* generate = app.add_subcommand("gen", "Generate a random instance");
  generate->add_option("--seed", gen.seed, "RNG seed (default 1)");
  generate->add_option("--parts", gen.params.n_parts, "Part count");
  generate->add_option("--ops", gen.params.ops_per_part, "Operations per part");
  generate->add_option("--machines", gen.params.n_machines, "Machine count");
  generate->add_option("--tools", gen.params.n_tools, "Tool count");
  generate->add_option("--options", gen.params.options_per_op, "Processing options per operation");
  generate->add_option("--time-min", gen.params.time_min, "Minimum processing time");
  generate->add_option("--time-max", gen.params.time_max, "Maximum processing time");
  generate->add_option("--cost-min", gen.params.cost_min, "Minimum processing cost");
  generate->add_option("--cost-max", gen.params.cost_max, "Maximum processing cost");
  generate->add_option("--out", gen.out_path, "Write the instance here (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*validate) return run_validate(common);
    if (*solve) return run_solve(common, search, seed_check, out_path, false);
    if (*oracle) return run_solve(common, search, false, out_path, true);
    if (*export_mps) return run_export_mps(common, mps_path);
    if (*schedule) return run_schedule(common, search, format, out_path);
    if (*report) return run_report(common, search, format, out_path);
    if (*generate) return run_gen(gen);
  } catch (const fms::LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
