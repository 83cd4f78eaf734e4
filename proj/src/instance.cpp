#include "fms/instance.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace fms {

using nlohmann::json;
using nlohmann::ordered_json;

int Instance::total_operations() const {
  int n = 0;
  for (const auto& p : parts) n += static_cast<int>(p.operations.size());
  return n;
}

int Instance::op_base(int part_index) const {
  int n = 0;
  for (int i = 0; i < part_index; ++i) n += static_cast<int>(parts[i].operations.size());
  return n;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw LoadError(where + ": " + what);
}

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) fail(where, "unknown key '" + it.key() + "'");
  }
}

const json& require_key(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing required field '") + key + "'");
  return *it;
}

long long require_int(const json& j, const char* key, const std::string& where) {
  const json& v = require_key(j, key, where);
  if (!v.is_number_integer()) fail(where, std::string("field '") + key + "' must be an integer");
  return v.get<long long>();
}

int require_int32(const json& j, const char* key, const std::string& where) {
  long long v = require_int(j, key, where);
  if (v < -2000000000LL || v > 2000000000LL)
    fail(where, std::string("field '") + key + "' out of range");
  return static_cast<int>(v);
}

// Accepts either a scalar (replicated) or an array of exactly `count` ints.
std::vector<int> int_vector_or_scalar(const json& j, const char* key, int count,
                                      const std::string& where) {
  const json& v = require_key(j, key, where);
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.assign(static_cast<size_t>(count), v.get<int>());
    return out;
  }
  if (!v.is_array()) fail(where, std::string("field '") + key + "' must be an integer or array");
  if (static_cast<int>(v.size()) != count)
    fail(where, std::string("field '") + key + "' must have " + std::to_string(count) +
                    " entries, got " + std::to_string(v.size()));
  for (const auto& e : v) {
    if (!e.is_number_integer())
      fail(where, std::string("field '") + key + "' entries must be integers");
    out.push_back(e.get<int>());
  }
  return out;
}

ProcessingOption parse_option(const json& j, const Instance& inst, const std::string& where) {
  expect_object(j, where);
  reject_unknown_keys(j, {"machine", "tool", "time", "cost"}, where);
  ProcessingOption o;
  o.machine = require_int32(j, "machine", where);
  o.tool = require_int32(j, "tool", where);
  o.time = require_int32(j, "time", where);
  o.cost = require_int32(j, "cost", where);
  if (o.machine < 1 || o.machine > inst.machines)
    fail(where, "machine " + std::to_string(o.machine) + " out of range 1.." +
                    std::to_string(inst.machines));
  if (o.tool < 1 || o.tool > inst.tools)
    fail(where, "tool " + std::to_string(o.tool) + " out of range 1.." +
                    std::to_string(inst.tools));
  return o;
}

Part parse_part(const json& j, const Instance& inst, const std::string& where) {
  expect_object(j, where);
  reject_unknown_keys(j, {"id", "due_date", "setup_cost", "operations"}, where);
  Part p;
  p.id = require_int32(j, "id", where);
  p.due_date = require_int32(j, "due_date", where);
  p.setup_cost = require_int32(j, "setup_cost", where);
  const json& ops = require_key(j, "operations", where);
  if (!ops.is_array()) fail(where, "field 'operations' must be an array");
  for (size_t oi = 0; oi < ops.size(); ++oi) {
    std::string opwhere = where + ".operations[" + std::to_string(oi) + "]";
    const json& jo = ops[oi];
    expect_object(jo, opwhere);
    reject_unknown_keys(jo, {"options"}, opwhere);
    const json& choices = require_key(jo, "options", opwhere);
    if (!choices.is_array()) fail(opwhere, "field 'options' must be an array");
    OperationDef od;
    for (size_t ci = 0; ci < choices.size(); ++ci)
      od.options.push_back(
          parse_option(choices[ci], inst, opwhere + ".options[" + std::to_string(ci) + "]"));
    p.operations.push_back(std::move(od));
  }
  return p;
}

}  // namespace

Instance parse_instance(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw LoadError(origin + ": " + e.what());
  }
  expect_object(root, origin);
  reject_unknown_keys(root,
                      {"machines", "tools", "tool_life", "magazine_capacity",
                       "total_cost_budget", "setup_cost_budget", "max_completion_time",
                       "stages", "parts"},
                      origin);
  Instance inst;
  inst.machines = require_int32(root, "machines", origin);
  inst.tools = require_int32(root, "tools", origin);
  if (inst.machines < 1) fail(origin, "machines must be at least 1");
  if (inst.tools < 0) fail(origin, "tools must be non-negative");
  inst.tool_life = int_vector_or_scalar(root, "tool_life", inst.tools, origin);
  inst.magazine_capacity = int_vector_or_scalar(root, "magazine_capacity", inst.machines, origin);
  inst.total_cost_budget = require_int(root, "total_cost_budget", origin);
  inst.setup_cost_budget = require_int(root, "setup_cost_budget", origin);
  if (auto it = root.find("max_completion_time"); it != root.end()) {
    if (!it->is_number_integer()) fail(origin, "field 'max_completion_time' must be an integer");
    inst.max_completion_time = it->get<long long>();
  }
  if (auto it = root.find("stages"); it != root.end()) {
    if (!it->is_number_integer()) fail(origin, "field 'stages' must be an integer");
    inst.stages = it->get<int>();
  }
  const json& parts = require_key(root, "parts", origin);
  if (!parts.is_array()) fail(origin, "field 'parts' must be an array");
  for (size_t pi = 0; pi < parts.size(); ++pi)
    inst.parts.push_back(
        parse_part(parts[pi], inst, origin + ".parts[" + std::to_string(pi) + "]"));
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), path);
}

std::string serialize_instance(const Instance& inst) {
  ordered_json root;
  root["machines"] = inst.machines;
  root["tools"] = inst.tools;
  root["tool_life"] = inst.tool_life;
  root["magazine_capacity"] = inst.magazine_capacity;
  root["total_cost_budget"] = inst.total_cost_budget;
  root["setup_cost_budget"] = inst.setup_cost_budget;
  if (inst.max_completion_time) root["max_completion_time"] = *inst.max_completion_time;
  root["stages"] = inst.stages;
  root["parts"] = ordered_json::array();
  for (const auto& p : inst.parts) {
    ordered_json jp;
    jp["id"] = p.id;
    jp["due_date"] = p.due_date;
    jp["setup_cost"] = p.setup_cost;
    jp["operations"] = ordered_json::array();
    for (const auto& op : p.operations) {
      ordered_json jo;
      jo["options"] = ordered_json::array();
      for (const auto& c : op.options) {
        ordered_json jc;
        jc["machine"] = c.machine;
        jc["tool"] = c.tool;
        jc["time"] = c.time;
        jc["cost"] = c.cost;
        jo["options"].push_back(std::move(jc));
      }
      jp["operations"].push_back(std::move(jo));
    }
    root["parts"].push_back(std::move(jp));
  }
  return root.dump(2) + "\n";
}

void save_instance(const Instance& inst, const std::string& path) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError(tmp.string() + ": cannot open for writing");
    out << serialize_instance(inst);
    out.flush();
    if (!out) throw LoadError(tmp.string() + ": write failed");
  }
  fs::rename(tmp, target);
}

std::vector<Violation> validate(const Instance& inst) {
  std::vector<Violation> out;
  auto add = [&out](const char* rule, std::string detail) {
    out.push_back({rule, std::move(detail)});
  };
  if (inst.machines < 1) add("NonPositiveMachineCount", std::to_string(inst.machines));
  if (inst.tools < 0) add("NegativeToolCount", std::to_string(inst.tools));
  if (inst.stages < 1) add("NonPositiveStages", std::to_string(inst.stages));
  if (static_cast<int>(inst.tool_life.size()) != inst.tools)
    add("ToolLifeLengthMismatch", std::to_string(inst.tool_life.size()) + " entries for " +
                                      std::to_string(inst.tools) + " tools");
  for (size_t i = 0; i < inst.tool_life.size(); ++i)
    if (inst.tool_life[i] <= 0)
      add("NonPositiveToolLife", "tool " + std::to_string(i + 1));
  if (static_cast<int>(inst.magazine_capacity.size()) != inst.machines)
    add("MagazineLengthMismatch", std::to_string(inst.magazine_capacity.size()) +
                                      " entries for " + std::to_string(inst.machines) +
                                      " machines");
  for (size_t m = 0; m < inst.magazine_capacity.size(); ++m)
    if (inst.magazine_capacity[m] < 0)
      add("NegativeMagazineCapacity", "machine " + std::to_string(m + 1));
  if (inst.total_cost_budget < 0) add("NegativeCostBudget", std::to_string(inst.total_cost_budget));
  if (inst.setup_cost_budget < 0)
    add("NegativeSetupBudget", std::to_string(inst.setup_cost_budget));
  if (inst.max_completion_time && *inst.max_completion_time <= 0)
    add("NonPositiveMaxCompletionTime", std::to_string(*inst.max_completion_time));

  for (size_t pi = 0; pi < inst.parts.size(); ++pi) {
    const Part& p = inst.parts[pi];
    std::string pwhere = "part " + std::to_string(pi + 1);
    if (p.id != static_cast<int>(pi) + 1)
      add("PartIdOutOfOrder", pwhere + " has id " + std::to_string(p.id));
    if (p.due_date <= 0) add("NonPositiveDueDate", pwhere);
    if (p.setup_cost < 0) add("NegativeSetupCost", pwhere);
    if (p.operations.empty()) add("PartWithoutOperations", pwhere);
    for (size_t oi = 0; oi < p.operations.size(); ++oi) {
      const OperationDef& op = p.operations[oi];
      std::string owhere = pwhere + " op " + std::to_string(oi + 1);
      if (op.options.empty()) {
        add("NoProcessingOption", owhere);
        continue;
      }
      for (size_t ci = 0; ci < op.options.size(); ++ci) {
        const ProcessingOption& c = op.options[ci];
        if (c.machine < 1 || c.machine > inst.machines)
          add("MachineRefOutOfRange", owhere + " machine " + std::to_string(c.machine));
        if (c.tool < 1 || c.tool > inst.tools)
          add("ToolRefOutOfRange", owhere + " tool " + std::to_string(c.tool));
        if (c.time <= 0) add("NonPositiveTime", owhere);
        if (c.cost < 0) add("NegativeCost", owhere);
        for (size_t cj = 0; cj < ci; ++cj)
          if (op.options[cj].machine == c.machine && op.options[cj].tool == c.tool)
            add("DuplicateOption", owhere + " machine " + std::to_string(c.machine) + " tool " +
                                       std::to_string(c.tool));
      }
    }
  }
  return out;
}

Instance paper_example() {
  Instance inst;
  inst.machines = 4;
  inst.tools = 20;
  inst.tool_life.assign(20, 150);
  inst.magazine_capacity.assign(4, 40);
  inst.total_cost_budget = 4600;
  inst.setup_cost_budget = 700;
  inst.stages = 1;

  auto op = [](std::initializer_list<ProcessingOption> options) {
    OperationDef d;
    d.options = options;
    return d;
  };
  auto part = [](PartId id, int due, int setup, std::vector<OperationDef> ops) {
    Part p;
    p.id = id;
    p.due_date = due;
    p.setup_cost = setup;
    p.operations = std::move(ops);
    return p;
  };

  // {machine, tool, time, cost}
  inst.parts.push_back(part(1, 380, 90,
                            {op({{1, 1, 104, 240},
                                 {2, 1, 110, 230},
                                 {2, 2, 120, 350},
                                 {3, 1, 101, 140},
                                 {3, 2, 106, 300}}),
                             op({{1, 4, 68, 140},
                                 {2, 7, 110, 400},
                                 {2, 4, 130, 290},
                                 {3, 4, 118, 400}}),
                             op({{1, 6, 84, 210},
                                 {2, 6, 76, 350},
                                 {2, 10, 126, 350},
                                 {4, 6, 100, 600}}),
                             op({{1, 13, 114, 210},
                                 {2, 13, 98, 210},
                                 {3, 13, 119, 330}})}));
  inst.parts.push_back(part(2, 420, 70,
                            {op({{1, 1, 114, 280},
                                 {2, 1, 66, 190},
                                 {2, 3, 116, 140},
                                 {3, 1, 29, 420},
                                 {3, 3, 112, 250}}),
                             op({{1, 8, 25, 540},
                                 {1, 6, 106, 270},
                                 {3, 8, 84, 340}}),
                             op({{1, 17, 24, 300}}),
                             op({{1, 12, 96, 170},
                                 {1, 16, 23, 310}})}));
  inst.parts.push_back(part(3, 350, 140,
                            {op({{1, 12, 67, 100},
                                 {3, 15, 90, 250},
                                 {3, 12, 102, 310},
                                 {4, 15, 120, 250},
                                 {4, 12, 134, 140}}),
                             op({{2, 18, 47, 270},
                                 {2, 9, 117, 170},
                                 {4, 9, 40, 400},
                                 {4, 18, 132, 220}}),
                             op({{2, 11, 85, 170},
                                 {2, 19, 110, 190}}),
                             op({{1, 14, 137, 360},
                                 {2, 14, 38, 390},
                                 {2, 3, 114, 310},
                                 {3, 3, 49, 220},
                                 {3, 14, 140, 370},
                                 {4, 14, 118, 290}})}));
  inst.parts.push_back(part(4, 400, 110,
                            {op({{2, 2, 115, 410},
                                 {4, 2, 120, 350}}),
                             op({{3, 20, 101, 330}}),
                             op({{2, 13, 40, 300}}),
                             op({{3, 8, 87, 240},
                                 {2, 5, 38, 310}})}));
  return inst;
}

namespace {

// Platform-independent bounded draw; std::uniform_int_distribution is not
// specified bit-for-bit across standard libraries.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

}  // namespace

Instance generate_random(const RandomParams& p, std::uint64_t seed) {
  if (p.n_parts < 1 || p.ops_per_part < 1 || p.n_machines < 1 || p.n_tools < 1 ||
      p.options_per_op < 1)
    throw std::invalid_argument("generate_random: counts must be at least 1");
  if (p.time_min < 1 || p.time_max < p.time_min)
    throw std::invalid_argument("generate_random: bad time range");
  if (p.cost_min < 0 || p.cost_max < p.cost_min)
    throw std::invalid_argument("generate_random: bad cost range");
  if (static_cast<long long>(p.options_per_op) >
      static_cast<long long>(p.n_machines) * p.n_tools)
    throw std::invalid_argument("generate_random: options_per_op exceeds machine*tool pairs");

  std::mt19937_64 rng(seed);
  Instance inst;
  inst.machines = p.n_machines;
  inst.tools = p.n_tools;
  inst.magazine_capacity.assign(static_cast<size_t>(p.n_machines), p.n_tools);
  inst.total_cost_budget = 0;
  inst.setup_cost_budget = 0;

  long long total_max_time = 0;
  for (int pi = 0; pi < p.n_parts; ++pi) {
    Part part;
    part.id = pi + 1;
    part.setup_cost = p.cost_min + static_cast<int>(draw(rng, static_cast<std::uint64_t>(
                                                              p.cost_max - p.cost_min + 1)));
    long long due = 0;
    for (int oi = 0; oi < p.ops_per_part; ++oi) {
      OperationDef op;
      int max_time = 0;
      while (static_cast<int>(op.options.size()) < p.options_per_op) {
        int m = 1 + static_cast<int>(draw(rng, static_cast<std::uint64_t>(p.n_machines)));
        int l = 1 + static_cast<int>(draw(rng, static_cast<std::uint64_t>(p.n_tools)));
        bool dup = false;
        for (const auto& o : op.options)
          if (o.machine == m && o.tool == l) dup = true;
        if (dup) continue;
        int t = p.time_min +
                static_cast<int>(draw(rng, static_cast<std::uint64_t>(p.time_max - p.time_min + 1)));
        int c = p.cost_min +
                static_cast<int>(draw(rng, static_cast<std::uint64_t>(p.cost_max - p.cost_min + 1)));
        op.options.push_back({m, l, t, c});
        max_time = std::max(max_time, t);
        inst.total_cost_budget += std::max(c, 0);
      }
      due += max_time;
      total_max_time += max_time;
      part.operations.push_back(std::move(op));
    }
    part.due_date = static_cast<int>(due);
    inst.setup_cost_budget += static_cast<long long>(part.setup_cost) * (p.ops_per_part - 1);
    inst.parts.push_back(std::move(part));
  }
  inst.tool_life.assign(static_cast<size_t>(p.n_tools),
                        static_cast<int>(std::max<long long>(total_max_time, 1)));
  return inst;
}

}  // namespace fms
