#include "fms/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace fms {

Assignment Assignment::empty_for(const Instance& inst) {
  Assignment a;
  a.choice.assign(static_cast<size_t>(inst.total_operations()), OpChoice{});
  return a;
}

bool Assignment::complete() const {
  for (const auto& c : choice)
    if (!c.assigned()) return false;
  return true;
}

bool Weights::valid() const {
  return w1 >= 0.0 && w2 >= 0.0 && std::abs(w1 + w2 - 1.0) <= 1e-9;
}

namespace {

const ProcessingOption* find_option(const OperationDef& op, const OpChoice& c) {
  for (const auto& o : op.options)
    if (o.machine == c.machine && o.tool == c.tool) return &o;
  return nullptr;
}

[[noreturn]] void bad_assignment(const std::string& what) {
  throw std::invalid_argument("assignment: " + what);
}

}  // namespace

std::vector<long long> machine_loads(const Instance& inst, const Assignment& a) {
  if (static_cast<int>(a.choice.size()) != inst.total_operations())
    bad_assignment("wrong number of operations");
  std::vector<long long> loads(static_cast<size_t>(inst.machines), 0);
  int flat = 0;
  for (const auto& p : inst.parts) {
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      const OpChoice& c = a.choice[static_cast<size_t>(flat)];
      if (!c.assigned()) bad_assignment("incomplete");
      const ProcessingOption* o = find_option(p.operations[j], c);
      if (!o)
        bad_assignment("part " + std::to_string(p.id) + " op " + std::to_string(j + 1) +
                       " choice is not one of its options");
      loads[static_cast<size_t>(o->machine - 1)] += o->time;
    }
  }
  return loads;
}

long long unbalance(const std::vector<long long>& loads) {
  long long sum = 0;
  for (size_t m = 0; m < loads.size(); ++m)
    for (size_t n = m + 1; n < loads.size(); ++n)
      sum += std::llabs(loads[m] - loads[n]);
  return sum;
}

int movements(const Instance& inst, const Assignment& a, PartId part) {
  if (part < 1 || part > static_cast<int>(inst.parts.size()))
    bad_assignment("part id out of range");
  const Part& p = inst.parts[static_cast<size_t>(part - 1)];
  int base = inst.op_base(part - 1);
  // Half-sum of per-machine indicator differences between consecutive
  // operations; each transfer contributes 2 to the raw sum.
  int raw = 0;
  for (size_t j = 0; j + 1 < p.operations.size(); ++j) {
    const OpChoice& c1 = a.choice[static_cast<size_t>(base) + j];
    const OpChoice& c2 = a.choice[static_cast<size_t>(base) + j + 1];
    if (!c1.assigned() || !c2.assigned()) bad_assignment("incomplete");
    for (int m = 1; m <= inst.machines; ++m) {
      int u1 = c1.machine == m ? 1 : 0;
      int u2 = c2.machine == m ? 1 : 0;
      raw += std::abs(u1 - u2);
    }
  }
  return raw / 2;
}

Metrics evaluate(const Instance& inst, const Assignment& a, Weights w) {
  Metrics m;
  m.loads = machine_loads(inst, a);
  for (long long l : m.loads) {
    m.f1_total_time += l;
    m.max_load = std::max(m.max_load, l);
  }
  m.unbalance = fms::unbalance(m.loads);
  m.weighted_z = w.w1 * static_cast<double>(m.f1_total_time) +
                 w.w2 * static_cast<double>(m.unbalance);
  int flat = 0;
  for (const auto& p : inst.parts) {
    long long pt = 0;
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      const ProcessingOption* o = find_option(p.operations[j], a.choice[static_cast<size_t>(flat)]);
      pt += o->time;
      m.processing_cost += o->cost;
    }
    m.part_time.push_back(pt);
    int mv = movements(inst, a, p.id);
    m.movements.push_back(mv);
    m.setup_cost += static_cast<long long>(mv) * p.setup_cost;
  }
  return m;
}

std::vector<Violation> check_feasibility(const Instance& inst, const Assignment& a) {
  return check_feasibility(inst, a, ModelOptions{});
}

std::vector<Violation> check_feasibility(const Instance& inst, const Assignment& a,
                                         const ModelOptions& opts) {
  std::vector<Violation> out;
  if (static_cast<int>(a.choice.size()) != inst.total_operations() || !a.complete()) {
    out.push_back({"IncompleteAssignment", "every operation needs a choice"});
    return out;
  }
  std::vector<long long> loads(static_cast<size_t>(inst.machines), 0);
  std::vector<long long> tool_time(static_cast<size_t>(inst.tools) + 1, 0);
  std::vector<int> tool_machine(static_cast<size_t>(inst.tools) + 1, 0);
  std::vector<std::vector<bool>> tool_on_machine(
      static_cast<size_t>(inst.machines) + 1,
      std::vector<bool>(static_cast<size_t>(inst.tools) + 1, false));
  long long cost = 0;
  long long setup = 0;
  std::vector<int> conflicted_tool(static_cast<size_t>(inst.tools) + 1, 0);

  int flat = 0;
  for (const auto& p : inst.parts) {
    long long pt = 0;
    bool part_ok = true;
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      const OpChoice& c = a.choice[static_cast<size_t>(flat)];
      const ProcessingOption* o = find_option(p.operations[j], c);
      if (!o) {
        out.push_back({"ChoiceNotInOptions",
                       "part " + std::to_string(p.id) + " op " + std::to_string(j + 1)});
        part_ok = false;
        continue;
      }
      loads[static_cast<size_t>(o->machine - 1)] += o->time;
      pt += o->time;
      cost += o->cost;
      tool_time[static_cast<size_t>(o->tool)] += o->time;
      tool_on_machine[static_cast<size_t>(o->machine)][static_cast<size_t>(o->tool)] = true;
      int& placed = tool_machine[static_cast<size_t>(o->tool)];
      if (placed == 0) {
        placed = o->machine;
      } else if (placed != o->machine && !conflicted_tool[static_cast<size_t>(o->tool)]) {
        conflicted_tool[static_cast<size_t>(o->tool)] = 1;
        out.push_back({"ToolOnTwoMachines", "tool " + std::to_string(o->tool)});
      }
    }
    if (part_ok) {
      if (pt > p.due_date)
        out.push_back({"DueDateExceeded", "part " + std::to_string(p.id) + " time " +
                                              std::to_string(pt) + " exceeds " +
                                              std::to_string(p.due_date)});
      setup += static_cast<long long>(movements(inst, a, p.id)) * p.setup_cost;
    }
  }
  if (inst.max_completion_time) {
    for (int m = 1; m <= inst.machines; ++m)
      if (loads[static_cast<size_t>(m - 1)] > *inst.max_completion_time)
        out.push_back({"MaxCompletionTimeExceeded",
                       "machine " + std::to_string(m) + " load " +
                           std::to_string(loads[static_cast<size_t>(m - 1)]) + " exceeds " +
                           std::to_string(*inst.max_completion_time)});
  }
  if (cost > inst.total_cost_budget)
    out.push_back({"CostBudgetExceeded", std::to_string(cost) + " exceeds " +
                                             std::to_string(inst.total_cost_budget)});
  if (setup > inst.setup_cost_budget)
    out.push_back({"SetupBudgetExceeded", std::to_string(setup) + " exceeds " +
                                              std::to_string(inst.setup_cost_budget)});
  if (opts.tool_life) {
    for (int l = 1; l <= inst.tools; ++l)
      if (tool_time[static_cast<size_t>(l)] > inst.tool_life[static_cast<size_t>(l - 1)])
        out.push_back({"ToolLifeExceeded", "tool " + std::to_string(l) + " time " +
                                               std::to_string(tool_time[static_cast<size_t>(l)]) +
                                               " exceeds " +
                                               std::to_string(inst.tool_life[static_cast<size_t>(l - 1)])});
  }
  if (opts.magazine) {
    for (int m = 1; m <= inst.machines; ++m) {
      int distinct = 0;
      for (int l = 1; l <= inst.tools; ++l)
        if (tool_on_machine[static_cast<size_t>(m)][static_cast<size_t>(l)]) ++distinct;
      if (distinct > inst.magazine_capacity[static_cast<size_t>(m - 1)])
        out.push_back({"MagazineCapacityExceeded",
                       "machine " + std::to_string(m) + " holds " + std::to_string(distinct) +
                           " tools, capacity " +
                           std::to_string(inst.magazine_capacity[static_cast<size_t>(m - 1)])});
    }
  }
  return out;
}

bool is_feasible(const Instance& inst, const Assignment& a, const ModelOptions& opts,
                 FeasScratch& s) {
  if (static_cast<int>(a.choice.size()) != inst.total_operations()) return false;
  s.loads.assign(static_cast<size_t>(inst.machines), 0);
  s.tool_time.assign(static_cast<size_t>(inst.tools) + 1, 0);
  s.tool_machine.assign(static_cast<size_t>(inst.tools) + 1, 0);
  s.distinct_tools.assign(static_cast<size_t>(inst.machines) + 1, 0);
  long long cost = 0;
  long long setup = 0;
  int flat = 0;
  for (const auto& p : inst.parts) {
    long long pt = 0;
    int prev_machine = 0;
    int transfers = 0;
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      const OpChoice& c = a.choice[static_cast<size_t>(flat)];
      if (!c.assigned()) return false;
      const ProcessingOption* o = find_option(p.operations[j], c);
      if (!o) return false;
      s.loads[static_cast<size_t>(o->machine - 1)] += o->time;
      pt += o->time;
      cost += o->cost;
      long long& tt = s.tool_time[static_cast<size_t>(o->tool)];
      tt += o->time;
      if (opts.tool_life && tt > inst.tool_life[static_cast<size_t>(o->tool - 1)]) return false;
      int& placed = s.tool_machine[static_cast<size_t>(o->tool)];
      if (placed == 0) {
        placed = o->machine;
        if (++s.distinct_tools[static_cast<size_t>(o->machine)] >
                inst.magazine_capacity[static_cast<size_t>(o->machine - 1)] &&
            opts.magazine)
          return false;
      } else if (placed != o->machine) {
        return false;
      }
      // Transfers counted directly from consecutive machines; the movements()
      // function computes the same quantity through indicator differences.
      if (j > 0 && o->machine != prev_machine) ++transfers;
      prev_machine = o->machine;
      if (inst.max_completion_time &&
          s.loads[static_cast<size_t>(o->machine - 1)] > *inst.max_completion_time)
        return false;
    }
    if (pt > p.due_date) return false;
    setup += static_cast<long long>(transfers) * p.setup_cost;
  }
  if (cost > inst.total_cost_budget) return false;
  if (setup > inst.setup_cost_budget) return false;
  return true;
}

// ---- Linear model -------------------------------------------------------

int LinearModel::add_variable(std::string name, VarKind kind, double objective) {
  variables.push_back({std::move(name), kind, objective});
  return static_cast<int>(variables.size()) - 1;
}

int LinearModel::add_constraint(std::string name, Relation rel, double rhs) {
  constraints.push_back({std::move(name), rel, rhs, {}});
  return static_cast<int>(constraints.size()) - 1;
}

void LinearModel::add_term(int constraint, int var, double coeff) {
  constraints[static_cast<size_t>(constraint)].terms.push_back({var, coeff});
}

std::vector<AbsPair> linearize_abs(LinearModel& model, const std::vector<AbsItem>& items,
                                   const std::string& pos_prefix, const std::string& neg_prefix,
                                   const std::string& row_prefix, double objective_coeff) {
  std::vector<AbsPair> out;
  for (const auto& item : items) {
    AbsPair pair;
    pair.pos_var = model.add_variable(pos_prefix + item.stem, VarKind::Continuous,
                                      objective_coeff);
    pair.neg_var = model.add_variable(neg_prefix + item.stem, VarKind::Continuous,
                                      objective_coeff);
    pair.eq_constraint = model.add_constraint(row_prefix + item.stem, Relation::EQ,
                                              item.right.constant - item.left.constant);
    // Merge duplicate variables so each (row, column) pair appears once.
    std::vector<std::pair<int, double>> merged;
    auto accumulate = [&merged](int var, double coeff) {
      for (auto& t : merged)
        if (t.first == var) {
          t.second += coeff;
          return;
        }
      merged.emplace_back(var, coeff);
    };
    for (const auto& t : item.left.terms) accumulate(t.var, t.coeff);
    for (const auto& t : item.right.terms) accumulate(t.var, -t.coeff);
    for (const auto& t : merged)
      if (t.second != 0.0) model.add_term(pair.eq_constraint, t.first, t.second);
    model.add_term(pair.eq_constraint, pair.pos_var, -1.0);
    model.add_term(pair.eq_constraint, pair.neg_var, 1.0);
    out.push_back(pair);
  }
  return out;
}

LinearModel build_model(const Instance& inst, Weights w, const ModelOptions& opts) {
  if (!validate(inst).empty())
    throw std::invalid_argument("build_model: instance fails validation");
  if (!w.valid()) throw std::invalid_argument("build_model: invalid weights");

  LinearModel model;
  const int M = inst.machines;

  // Choice variables, instance order.
  std::vector<std::vector<int>> x;  // x[flat_op][option] -> var index
  int flat = 0;
  for (const auto& p : inst.parts) {
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      std::vector<int> vars;
      for (const auto& o : p.operations[j].options) {
        std::string name = "X_" + std::to_string(p.id) + "_" + std::to_string(j + 1) + "_" +
                           std::to_string(o.machine) + "_" + std::to_string(o.tool);
        vars.push_back(model.add_variable(std::move(name), VarKind::Binary, w.w1 * o.time));
      }
      x.push_back(std::move(vars));
    }
  }

  // Placement variables for every referenced machine/tool pair.
  std::map<std::pair<int, int>, int> placement;
  for (const auto& p : inst.parts)
    for (const auto& op : p.operations)
      for (const auto& o : op.options) placement[{o.machine, o.tool}] = -1;
  for (auto& [key, var] : placement)
    var = model.add_variable("T_" + std::to_string(key.first) + "_" + std::to_string(key.second),
                             VarKind::Binary, 0.0);

  // One choice per operation.
  flat = 0;
  for (const auto& p : inst.parts)
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      int row = model.add_constraint(
          "ASGN_" + std::to_string(p.id) + "_" + std::to_string(j + 1), Relation::EQ, 1.0);
      for (int v : x[static_cast<size_t>(flat)]) model.add_term(row, v, 1.0);
    }

  // Per-machine load expressions, reused by the cap rows and deviation pairs.
  std::vector<LinExpr> load_expr(static_cast<size_t>(M) + 1);
  flat = 0;
  for (const auto& p : inst.parts)
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat)
      for (size_t k = 0; k < p.operations[j].options.size(); ++k) {
        const auto& o = p.operations[j].options[k];
        load_expr[static_cast<size_t>(o.machine)].terms.push_back(
            {x[static_cast<size_t>(flat)][k], static_cast<double>(o.time)});
      }

  if (inst.max_completion_time) {
    for (int m = 1; m <= M; ++m) {
      int row = model.add_constraint("CMAX_" + std::to_string(m), Relation::LE,
                                     static_cast<double>(*inst.max_completion_time));
      for (const auto& t : load_expr[static_cast<size_t>(m)].terms)
        model.add_term(row, t.var, t.coeff);
    }
  }

  // Summed processing time per part stays within its due date.
  flat = 0;
  for (const auto& p : inst.parts) {
    int row = model.add_constraint("DUE_" + std::to_string(p.id), Relation::LE,
                                   static_cast<double>(p.due_date));
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat)
      for (size_t k = 0; k < p.operations[j].options.size(); ++k)
        model.add_term(row, x[static_cast<size_t>(flat)][k],
                       static_cast<double>(p.operations[j].options[k].time));
  }

  // Each tool sits on at most one machine.
  std::vector<std::vector<int>> tool_placements(static_cast<size_t>(inst.tools) + 1);
  for (const auto& [key, var] : placement)
    tool_placements[static_cast<size_t>(key.second)].push_back(var);
  for (int l = 1; l <= inst.tools; ++l) {
    if (tool_placements[static_cast<size_t>(l)].empty()) continue;
    int row = model.add_constraint("TOOL_" + std::to_string(l), Relation::LE, 1.0);
    for (int v : tool_placements[static_cast<size_t>(l)]) model.add_term(row, v, 1.0);
  }

  // A choice requires its tool placed on its machine.
  flat = 0;
  for (const auto& p : inst.parts)
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat)
      for (size_t k = 0; k < p.operations[j].options.size(); ++k) {
        const auto& o = p.operations[j].options[k];
        int row = model.add_constraint("LINK_" + std::to_string(p.id) + "_" +
                                           std::to_string(j + 1) + "_" +
                                           std::to_string(o.machine) + "_" +
                                           std::to_string(o.tool),
                                       Relation::LE, 0.0);
        model.add_term(row, x[static_cast<size_t>(flat)][k], 1.0);
        model.add_term(row, placement[{o.machine, o.tool}], -1.0);
      }

  {
    int row = model.add_constraint("COSTBUD", Relation::LE,
                                   static_cast<double>(inst.total_cost_budget));
    flat = 0;
    for (const auto& p : inst.parts)
      for (size_t j = 0; j < p.operations.size(); ++j, ++flat)
        for (size_t k = 0; k < p.operations[j].options.size(); ++k)
          if (p.operations[j].options[k].cost != 0)
            model.add_term(row, x[static_cast<size_t>(flat)][k],
                           static_cast<double>(p.operations[j].options[k].cost));
  }

  if (opts.tool_life) {
    std::vector<std::vector<LinTerm>> life_terms(static_cast<size_t>(inst.tools) + 1);
    flat = 0;
    for (const auto& p : inst.parts)
      for (size_t j = 0; j < p.operations.size(); ++j, ++flat)
        for (size_t k = 0; k < p.operations[j].options.size(); ++k) {
          const auto& o = p.operations[j].options[k];
          life_terms[static_cast<size_t>(o.tool)].push_back(
              {x[static_cast<size_t>(flat)][k], static_cast<double>(o.time)});
        }
    for (int l = 1; l <= inst.tools; ++l) {
      if (life_terms[static_cast<size_t>(l)].empty()) continue;
      int row = model.add_constraint("LIFE_" + std::to_string(l), Relation::LE,
                                     static_cast<double>(inst.tool_life[static_cast<size_t>(l - 1)]));
      for (const auto& t : life_terms[static_cast<size_t>(l)]) model.add_term(row, t.var, t.coeff);
    }
  }

  if (opts.magazine) {
    std::vector<std::vector<int>> machine_placements(static_cast<size_t>(M) + 1);
    for (const auto& [key, var] : placement)
      machine_placements[static_cast<size_t>(key.first)].push_back(var);
    for (int m = 1; m <= M; ++m) {
      if (machine_placements[static_cast<size_t>(m)].empty()) continue;
      int row = model.add_constraint("MAG_" + std::to_string(m), Relation::LE,
                                     static_cast<double>(inst.magazine_capacity[static_cast<size_t>(m - 1)]));
      for (int v : machine_placements[static_cast<size_t>(m)]) model.add_term(row, v, 1.0);
    }
  }

  // Pairwise load deviations carry the unbalance share of the objective.
  {
    std::vector<AbsItem> items;
    int k = 0;
    for (int m = 1; m <= M; ++m)
      for (int n = m + 1; n <= M; ++n) {
        ++k;
        AbsItem item;
        item.left = load_expr[static_cast<size_t>(m)];
        item.right = load_expr[static_cast<size_t>(n)];
        item.stem = std::to_string(k);
        items.push_back(std::move(item));
      }
    linearize_abs(model, items, "DP_", "DN_", "DEV_", w.w2);
  }

  // Transfer indicators: for consecutive operations of a part and each
  // machine either of them can use, |on(j,m) - on(j+1,m)| summed over
  // machines is twice the transfer count, so the setup budget row carries
  // a doubled right-hand side.
  {
    std::vector<AbsItem> items;
    std::vector<int> item_part;
    flat = 0;
    for (const auto& p : inst.parts) {
      int base = flat;
      for (size_t j = 0; j + 1 < p.operations.size(); ++j) {
        std::vector<char> touched(static_cast<size_t>(M) + 1, 0);
        for (const auto& o : p.operations[j].options) touched[static_cast<size_t>(o.machine)] |= 1;
        for (const auto& o : p.operations[j + 1].options)
          touched[static_cast<size_t>(o.machine)] |= 1;
        for (int m = 1; m <= M; ++m) {
          if (!touched[static_cast<size_t>(m)]) continue;
          AbsItem item;
          for (size_t k = 0; k < p.operations[j].options.size(); ++k)
            if (p.operations[j].options[k].machine == m)
              item.left.terms.push_back({x[static_cast<size_t>(base) + j][k], 1.0});
          for (size_t k = 0; k < p.operations[j + 1].options.size(); ++k)
            if (p.operations[j + 1].options[k].machine == m)
              item.right.terms.push_back({x[static_cast<size_t>(base) + j + 1][k], 1.0});
          item.stem = std::to_string(p.id) + "_" + std::to_string(j + 1) + "_" +
                      std::to_string(m);
          items.push_back(std::move(item));
          item_part.push_back(p.id);
        }
      }
      flat += static_cast<int>(p.operations.size());
    }
    std::vector<AbsPair> pairs = linearize_abs(model, items, "MP_", "MN_", "MOV_", 0.0);
    for (size_t i = 0; i < pairs.size(); ++i) {
      int row = model.add_constraint("MOVB_" + items[i].stem, Relation::LE, 1.0);
      model.add_term(row, pairs[i].pos_var, 1.0);
      model.add_term(row, pairs[i].neg_var, 1.0);
    }
    int setup_row = model.add_constraint("SETUP", Relation::LE,
                                         2.0 * static_cast<double>(inst.setup_cost_budget));
    for (size_t i = 0; i < pairs.size(); ++i) {
      double sc = static_cast<double>(
          inst.parts[static_cast<size_t>(item_part[i] - 1)].setup_cost);
      if (sc == 0.0) continue;
      model.add_term(setup_row, pairs[i].pos_var, sc);
      model.add_term(setup_row, pairs[i].neg_var, sc);
    }
  }

  return model;
}

}  // namespace fms
