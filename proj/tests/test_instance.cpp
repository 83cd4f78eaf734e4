#include <set>

#include "doctest.h"
#include "fms/instance.hpp"

using namespace fms;

namespace {

// Smallest valid instance: 1 part, 1 op, 1 option.
Instance minimal() {
  Instance inst;
  inst.machines = 1;
  inst.tools = 1;
  inst.tool_life = {100};
  inst.magazine_capacity = {1};
  inst.total_cost_budget = 10;
  inst.setup_cost_budget = 0;
  inst.parts = {{1, 50, 0, {{{{1, 1, 10, 5}}}}}};
  return inst;
}

}  // namespace

TEST_CASE("built-in example matches its published shape") {
  Instance inst = paper_example();
  CHECK(inst.parts.size() == 4);
  CHECK(inst.machines == 4);
  CHECK(inst.tools == 20);
  for (const auto& p : inst.parts) CHECK(p.operations.size() == 4);
  CHECK(inst.parts[0].due_date == 380);
  CHECK(inst.parts[2].due_date == 350);
  CHECK(inst.total_cost_budget == 4600);
  CHECK(inst.setup_cost_budget == 700);
  for (long long life : inst.tool_life) CHECK(life == 150);
  CHECK(!inst.max_completion_time.has_value());
  CHECK(inst.total_operations() == 16);
  CHECK(validate(inst).empty());
}

TEST_CASE("shipped instance file parses to the built-in instance") {
  Instance from_file = load_instance(FMS_SOURCE_DIR "/data/paper_instance.json");
  CHECK(from_file == paper_example());
}

TEST_CASE("serialize then parse is the identity") {
  Instance inst = paper_example();
  CHECK(parse_instance(serialize_instance(inst)) == inst);
  Instance tiny = minimal();
  CHECK(parse_instance(serialize_instance(tiny)) == tiny);
  tiny.max_completion_time = 123;
  CHECK(parse_instance(serialize_instance(tiny)) == tiny);
}

TEST_CASE("minimal file parses") {
  Instance inst = parse_instance(R"({
    "machines": 1, "tools": 1, "tool_life": 100, "magazine_capacity": 1,
    "total_cost_budget": 10, "setup_cost_budget": 0,
    "parts": [{"id": 1, "due_date": 50, "setup_cost": 0,
               "operations": [{"options": [{"machine":1,"tool":1,"time":10,"cost":5}]}]}]
  })");
  CHECK(inst == minimal());
  CHECK(inst.stages == 1);
}

TEST_CASE("comments are allowed in instance files") {
  Instance inst = parse_instance(R"({
    // a comment
    "machines": 1, "tools": 1, "tool_life": 100, "magazine_capacity": 1,
    "total_cost_budget": 10, "setup_cost_budget": 0,
    "parts": [{"id": 1, "due_date": 50, "setup_cost": 0,
               "operations": [{"options": [{"machine":1,"tool":1,"time":10,"cost":5}]}]}]
  })");
  CHECK(inst == minimal());
}

TEST_CASE("scalar tool_life and magazine_capacity are replicated") {
  Instance inst = parse_instance(R"({
    "machines": 2, "tools": 3, "tool_life": 99, "magazine_capacity": 7,
    "total_cost_budget": 10, "setup_cost_budget": 0,
    "parts": [{"id": 1, "due_date": 50, "setup_cost": 0,
               "operations": [{"options": [{"machine":1,"tool":1,"time":10,"cost":5}]}]}]
  })");
  CHECK(inst.tool_life == std::vector<int>{99, 99, 99});
  CHECK(inst.magazine_capacity == std::vector<int>{7, 7});
}

TEST_CASE("out-of-range references are load errors") {
  auto text = [](int machine, int tool) {
    return std::string(R"({
      "machines": 4, "tools": 20, "tool_life": 150, "magazine_capacity": 40,
      "total_cost_budget": 100, "setup_cost_budget": 100,
      "parts": [{"id": 1, "due_date": 50, "setup_cost": 0,
                 "operations": [{"options": [{"machine":)") +
           std::to_string(machine) + R"(,"tool":)" + std::to_string(tool) +
           R"(,"time":10,"cost":5}]}]}]})";
  };
  CHECK_NOTHROW(parse_instance(text(4, 20)));
  CHECK_THROWS_AS(parse_instance(text(5, 20)), LoadError);
  CHECK_THROWS_AS(parse_instance(text(4, 21)), LoadError);
  CHECK_THROWS_AS(parse_instance(text(0, 20)), LoadError);
}

TEST_CASE("malformed files produce load errors naming the problem") {
  CHECK_THROWS_AS(parse_instance("not json at all"), LoadError);
  CHECK_THROWS_AS(parse_instance("[]"), LoadError);
  CHECK_THROWS_AS(parse_instance("{}"), LoadError);
  CHECK_THROWS_AS(parse_instance(R"({"machines": 1})"), LoadError);
  CHECK_THROWS_WITH_AS(parse_instance(R"({"machines": 1, "tools": 0, "tool_life": [],
    "magazine_capacity": 1, "total_cost_budget": 1, "setup_cost_budget": 1,
    "parts": [], "mystery_key": 1})"),
                       doctest::Contains("mystery_key"), LoadError);
  CHECK_THROWS_AS(load_instance("/definitely/not/a/file.json"), LoadError);
}

TEST_CASE("validate flags semantic problems by rule name") {
  auto rule_set = [](const Instance& inst) {
    std::set<std::string> rules;
    for (const auto& v : validate(inst)) rules.insert(v.rule);
    return rules;
  };

  Instance inst = minimal();
  inst.parts[0].operations[0].options.clear();
  CHECK(rule_set(inst).count("NoProcessingOption") == 1);

  inst = minimal();
  inst.parts[0].operations[0].options[0].time = 0;
  CHECK(rule_set(inst).count("NonPositiveTime") == 1);

  inst = minimal();
  inst.parts[0].operations[0].options.push_back({1, 1, 20, 9});
  CHECK(rule_set(inst).count("DuplicateOption") == 1);

  inst = minimal();
  inst.parts[0].due_date = 0;
  CHECK(rule_set(inst).count("NonPositiveDueDate") == 1);

  inst = minimal();
  inst.parts[0].operations.clear();
  CHECK(rule_set(inst).count("PartWithoutOperations") == 1);

  inst = minimal();
  inst.tool_life = {0};
  CHECK(rule_set(inst).count("NonPositiveToolLife") == 1);

  inst = minimal();
  inst.tool_life = {100, 100};
  CHECK(rule_set(inst).count("ToolLifeLengthMismatch") == 1);

  inst = minimal();
  inst.magazine_capacity = {-1};
  CHECK(rule_set(inst).count("NegativeMagazineCapacity") == 1);

  inst = minimal();
  inst.max_completion_time = 0;
  CHECK(rule_set(inst).count("NonPositiveMaxCompletionTime") == 1);

  inst = minimal();
  inst.parts[0].id = 2;
  CHECK(rule_set(inst).count("PartIdOutOfOrder") == 1);

  CHECK(validate(minimal()).empty());
}

TEST_CASE("random generation is deterministic per seed") {
  RandomParams p;
  p.n_parts = 2;
  p.ops_per_part = 2;
  p.n_machines = 2;
  p.n_tools = 2;
  p.options_per_op = 2;
  Instance a = generate_random(p, 1);
  Instance b = generate_random(p, 1);
  CHECK(a == b);
  Instance c = generate_random(p, 2);
  CHECK(a != c);
}

TEST_CASE("single-everything generation forces one assignment") {
  RandomParams p;
  p.n_parts = 1;
  p.ops_per_part = 1;
  p.n_machines = 1;
  p.n_tools = 1;
  p.options_per_op = 1;
  Instance inst = generate_random(p, 7);
  CHECK(inst.total_operations() == 1);
  REQUIRE(inst.parts[0].operations[0].options.size() == 1);
  CHECK(inst.parts[0].operations[0].options[0].machine == 1);
  CHECK(inst.parts[0].operations[0].options[0].tool == 1);
}

TEST_CASE("generated instances always validate cleanly") {
  for (uint64_t seed = 0; seed < 120; ++seed) {
    RandomParams p;
    p.n_parts = 1 + static_cast<int>(seed % 3);
    p.ops_per_part = 1 + static_cast<int>(seed % 4);
    p.n_machines = 1 + static_cast<int>(seed % 3);
    p.n_tools = 1 + static_cast<int>(seed % 4);
    p.options_per_op = 1 + static_cast<int>(seed % 2);
    Instance inst = generate_random(p, seed);
    CAPTURE(seed);
    CHECK(validate(inst).empty());
    for (const auto& part : inst.parts)
      for (const auto& op : part.operations) {
        std::set<std::pair<int, int>> seen;
        for (const auto& o : op.options) {
          CHECK(o.time >= p.time_min);
          CHECK(o.time <= p.time_max);
          CHECK(o.cost >= p.cost_min);
          CHECK(o.cost <= p.cost_max);
          CHECK(seen.insert({o.machine, o.tool}).second);
        }
      }
  }
}

TEST_CASE("generation rejects impossible parameters") {
  RandomParams p;
  p.n_parts = 0;
  CHECK_THROWS_AS(generate_random(p, 1), std::invalid_argument);
  p = RandomParams{};
  p.time_min = 0;
  CHECK_THROWS_AS(generate_random(p, 1), std::invalid_argument);
  p = RandomParams{};
  p.time_min = 50;
  p.time_max = 40;
  CHECK_THROWS_AS(generate_random(p, 1), std::invalid_argument);
  p = RandomParams{};
  p.n_machines = 2;
  p.n_tools = 2;
  p.options_per_op = 5;
  CHECK_THROWS_AS(generate_random(p, 1), std::invalid_argument);
}
