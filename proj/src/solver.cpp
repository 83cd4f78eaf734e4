#include "fms/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace fms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct OptionView {
  int machine = 0;
  int tool = 0;
  int time = 0;
  int cost = 0;
};

struct OpView {
  int flat = 0;
  int part_idx = 0;
  int op_idx = 0;  // 0-based within the part
  std::vector<OptionView> options;
  int min_time = 0;
  int max_time = 0;
  int min_cost = 0;
};

std::vector<OpView> make_views(const Instance& inst) {
  std::vector<OpView> views;
  int flat = 0;
  for (size_t pi = 0; pi < inst.parts.size(); ++pi) {
    const Part& p = inst.parts[pi];
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      OpView v;
      v.flat = flat;
      v.part_idx = static_cast<int>(pi);
      v.op_idx = static_cast<int>(j);
      for (const auto& o : p.operations[j].options)
        v.options.push_back({o.machine, o.tool, o.time, o.cost});
      std::sort(v.options.begin(), v.options.end(),
                [](const OptionView& a, const OptionView& b) {
                  return std::tie(a.time, a.cost, a.machine, a.tool) <
                         std::tie(b.time, b.cost, b.machine, b.tool);
                });
      v.min_time = v.options.empty() ? 0 : v.options.front().time;
      v.max_time = 0;
      v.min_cost = v.options.empty() ? 0 : v.options.front().cost;
      for (const auto& o : v.options) {
        v.max_time = std::max(v.max_time, o.time);
        v.min_cost = std::min(v.min_cost, o.cost);
      }
      views.push_back(std::move(v));
    }
  }
  return views;
}

std::vector<int> order_of(const std::vector<OpView>& views) {
  std::vector<int> order(views.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&views](int a, int b) {
    const OpView& va = views[static_cast<size_t>(a)];
    const OpView& vb = views[static_cast<size_t>(b)];
    if (va.options.size() != vb.options.size()) return va.options.size() < vb.options.size();
    if (va.min_time != vb.min_time) return va.min_time > vb.min_time;
    return a < b;
  });
  return order;
}

// Minimum weighted objective reachable from committed loads when the
// remaining mandatory time R (sum of unassigned minimum times) and up to E
// optional extra minutes (sum of max - min) can be placed on any machine in
// any split. Water-filling places time on the lowest loads first; extra time
// is taken only while one more minute removes more weighted unbalance than
// it adds weighted processing time.
double weighted_bound(const std::vector<long long>& loads, long long R, long long E, Weights w,
                      std::vector<double>& buf) {
  const int M = static_cast<int>(loads.size());
  long long committed = 0;
  for (long long l : loads) committed += l;
  double base = w.w1 * static_cast<double>(committed + R);
  if (M <= 1) return base;

  buf.assign(loads.begin(), loads.end());
  std::sort(buf.begin(), buf.end());
  double level = buf[0];
  int k = 1;
  double budget = static_cast<double>(R);
  while (k < M && budget >= static_cast<double>(k) * (buf[static_cast<size_t>(k)] - level)) {
    budget -= static_cast<double>(k) * (buf[static_cast<size_t>(k)] - level);
    level = buf[static_cast<size_t>(k)];
    ++k;
  }
  level += budget / static_cast<double>(k);

  double extra = 0.0;
  const double extra_cap = static_cast<double>(E);
  while (k < M && w.w2 * static_cast<double>(M - k) > w.w1 && extra < extra_cap) {
    double need = static_cast<double>(k) * (buf[static_cast<size_t>(k)] - level);
    double avail = extra_cap - extra;
    if (avail >= need) {
      level = buf[static_cast<size_t>(k)];
      extra += need;
      ++k;
    } else {
      level += avail / static_cast<double>(k);
      extra = extra_cap;
    }
  }

  double unb = 0.0;
  for (int i = k; i < M; ++i) unb += static_cast<double>(k) * (buf[static_cast<size_t>(i)] - level);
  for (int i = k; i < M; ++i)
    for (int j = i + 1; j < M; ++j)
      unb += buf[static_cast<size_t>(j)] - buf[static_cast<size_t>(i)];
  return base + w.w1 * extra + w.w2 * unb;
}

long long unbalance_raw(const std::vector<long long>& loads, int M) {
  long long sum = 0;
  for (int m = 1; m <= M; ++m)
    for (int n = m + 1; n <= M; ++n)
      sum += std::llabs(loads[static_cast<size_t>(m)] - loads[static_cast<size_t>(n)]);
  return sum;
}

class Search {
 public:
  Search(const Instance& inst, Weights w, const SolverConfig& cfg)
      : inst_(inst),
        w_(w),
        cfg_(cfg),
        M_(inst.machines),
        views_(make_views(inst)),
        order_(order_of(views_)),
        n_(static_cast<int>(views_.size())) {
    load_.assign(static_cast<size_t>(M_) + 1, 0);
    tool_machine_.assign(static_cast<size_t>(inst.tools) + 1, 0);
    tool_users_.assign(static_cast<size_t>(inst.tools) + 1, 0);
    tool_time_.assign(static_cast<size_t>(inst.tools) + 1, 0);
    distinct_tools_.assign(static_cast<size_t>(M_) + 1, 0);
    part_time_.assign(inst.parts.size(), 0);
    part_remaining_min_.assign(inst.parts.size(), 0);
    for (const auto& v : views_) {
      part_remaining_min_[static_cast<size_t>(v.part_idx)] += v.min_time;
      remaining_min_time_ += v.min_time;
      remaining_extra_ += v.max_time - v.min_time;
      remaining_min_cost_ += v.min_cost;
    }
    cur_ = Assignment::empty_for(inst);
  }

  SolveResult run() {
    SolveResult res;
    res.proof.root_bound = current_bound();
    t0_ = std::chrono::steady_clock::now();
    seed_greedy();
    dfs(0);
    res.nodes_explored = nodes_;
    res.proof.nodes_pruned = pruned_;
    res.proof.incumbent_updates = updates_;
    if (inc_z_ < kInf) {
      res.proof.incumbent = inc_z_;
      res.best = best_;
      res.metrics = evaluate(inst_, best_, w_);
      res.status = stopped_ ? SolveStatus::Feasible : SolveStatus::Optimal;
    } else {
      res.status = stopped_ ? SolveStatus::Feasible : SolveStatus::Infeasible;
    }
    return res;
  }

 private:
  struct Undo {
    long long setup_delta = 0;
  };

  bool try_apply(const OpView& op, const OptionView& c, Undo& undo) {
    const int m = c.machine;
    const int l = c.tool;
    const int p = op.part_idx;
    const Part& part = inst_.parts[static_cast<size_t>(p)];
    int placed = tool_machine_[static_cast<size_t>(l)];
    if (placed != 0 && placed != m) return false;
    if (cfg_.options.magazine && placed == 0 &&
        distinct_tools_[static_cast<size_t>(m)] + 1 >
            inst_.magazine_capacity[static_cast<size_t>(m - 1)])
      return false;
    if (cfg_.options.tool_life &&
        tool_time_[static_cast<size_t>(l)] + c.time > inst_.tool_life[static_cast<size_t>(l - 1)])
      return false;
    if (inst_.max_completion_time &&
        load_[static_cast<size_t>(m)] + c.time > *inst_.max_completion_time)
      return false;
    if (part_time_[static_cast<size_t>(p)] + c.time +
            (part_remaining_min_[static_cast<size_t>(p)] - op.min_time) >
        part.due_date)
      return false;
    if (cost_ + c.cost + (remaining_min_cost_ - op.min_cost) > inst_.total_cost_budget)
      return false;

    long long setup_delta = 0;
    if (op.op_idx > 0) {
      const OpChoice& prev = cur_.choice[static_cast<size_t>(op.flat) - 1];
      if (prev.assigned() && prev.machine != m) setup_delta += part.setup_cost;
    }
    if (op.op_idx + 1 < static_cast<int>(part.operations.size())) {
      const OpChoice& next = cur_.choice[static_cast<size_t>(op.flat) + 1];
      if (next.assigned() && next.machine != m) setup_delta += part.setup_cost;
    }
    if (committed_setup_ + setup_delta > inst_.setup_cost_budget) return false;

    load_[static_cast<size_t>(m)] += c.time;
    if (placed == 0) {
      tool_machine_[static_cast<size_t>(l)] = m;
      ++distinct_tools_[static_cast<size_t>(m)];
    }
    ++tool_users_[static_cast<size_t>(l)];
    tool_time_[static_cast<size_t>(l)] += c.time;
    part_time_[static_cast<size_t>(p)] += c.time;
    part_remaining_min_[static_cast<size_t>(p)] -= op.min_time;
    remaining_min_time_ -= op.min_time;
    remaining_extra_ -= op.max_time - op.min_time;
    remaining_min_cost_ -= op.min_cost;
    cost_ += c.cost;
    committed_setup_ += setup_delta;
    total_time_ += c.time;
    cur_.choice[static_cast<size_t>(op.flat)] = {m, l};
    undo.setup_delta = setup_delta;
    return true;
  }

  void revert(const OpView& op, const OptionView& c, const Undo& undo) {
    const int m = c.machine;
    const int l = c.tool;
    const int p = op.part_idx;
    load_[static_cast<size_t>(m)] -= c.time;
    tool_time_[static_cast<size_t>(l)] -= c.time;
    if (--tool_users_[static_cast<size_t>(l)] == 0) {
      tool_machine_[static_cast<size_t>(l)] = 0;
      --distinct_tools_[static_cast<size_t>(m)];
    }
    part_time_[static_cast<size_t>(p)] -= c.time;
    part_remaining_min_[static_cast<size_t>(p)] += op.min_time;
    remaining_min_time_ += op.min_time;
    remaining_extra_ += op.max_time - op.min_time;
    remaining_min_cost_ += op.min_cost;
    cost_ -= c.cost;
    committed_setup_ -= undo.setup_delta;
    total_time_ -= c.time;
    cur_.choice[static_cast<size_t>(op.flat)] = {};
  }

  double current_bound() {
    loads_view_.assign(load_.begin() + 1, load_.end());
    return weighted_bound(loads_view_, remaining_min_time_, remaining_extra_, w_, bound_buf_);
  }

  double leaf_objective() const {
    return w_.w1 * static_cast<double>(total_time_) +
           w_.w2 * static_cast<double>(unbalance_raw(load_, M_));
  }

  void take_incumbent(double z, bool from_search) {
    auto violations = check_feasibility(inst_, cur_, cfg_.options);
    if (!violations.empty())
      throw std::logic_error("internal: search produced an infeasible incumbent: " +
                             violations.front().rule);
    inc_z_ = z;
    best_ = cur_;
    from_search_ = from_search;
    ++updates_;
  }

  // Cheap incumbent before the search starts: walk the branch order picking,
  // among options that pass the incremental checks, the one on the least
  // loaded machine, shortest first. Never reported without the search
  // confirming; only used to prune early.
  void seed_greedy() {
    std::vector<std::pair<const OpView*, const OptionView*>> applied;
    std::vector<Undo> undos;
    bool ok = true;
    for (int d = 0; d < n_ && ok; ++d) {
      const OpView& op = views_[static_cast<size_t>(order_[static_cast<size_t>(d)])];
      std::vector<int> idx(op.options.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return load_[static_cast<size_t>(op.options[static_cast<size_t>(a)].machine)] <
               load_[static_cast<size_t>(op.options[static_cast<size_t>(b)].machine)];
      });
      ok = false;
      for (int k : idx) {
        const OptionView& c = op.options[static_cast<size_t>(k)];
        Undo u;
        if (try_apply(op, c, u)) {
          applied.emplace_back(&op, &c);
          undos.push_back(u);
          ok = true;
          break;
        }
      }
    }
    if (ok && static_cast<int>(applied.size()) == n_) take_incumbent(leaf_objective(), false);
    for (size_t i = applied.size(); i-- > 0;)
      revert(*applied[i].first, *applied[i].second, undos[i]);
  }

  bool limits_hit() {
    if (cfg_.node_limit && nodes_ >= *cfg_.node_limit) return true;
    // Clock checked at the first node and then every 4096, so a zero limit
    // stops before the search grows while big runs amortize the syscall.
    if (cfg_.time_limit_seconds && (nodes_ & 4095) == 1) {
      double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
      if (sec > *cfg_.time_limit_seconds) return true;
    }
    return false;
  }

  void dfs(int depth) {
    if (stopped_) return;
    if (depth == n_) {
      double z = leaf_objective();
      if (z < inc_z_ || (z == inc_z_ && !from_search_ && inc_z_ < kInf))
        take_incumbent(z, true);
      return;
    }
    const OpView& op = views_[static_cast<size_t>(order_[static_cast<size_t>(depth)])];
    for (const OptionView& c : op.options) {
      if (stopped_) break;
      Undo u;
      if (!try_apply(op, c, u)) continue;
      ++nodes_;
      if (cfg_.log_every > 0 && nodes_ % cfg_.log_every == 0)
        std::fprintf(stderr, "solver: nodes=%lld pruned=%lld incumbent=%s\n", nodes_, pruned_,
                     inc_z_ < kInf ? std::to_string(inc_z_).c_str() : "none");
      if (limits_hit()) {
        stopped_ = true;
        revert(op, c, u);
        break;
      }
      double b = current_bound();
      bool prune = from_search_ ? (b >= inc_z_) : (b > inc_z_);
      if (prune) {
        ++pruned_;
        revert(op, c, u);
        continue;
      }
      dfs(depth + 1);
      revert(op, c, u);
    }
  }

  const Instance& inst_;
  Weights w_;
  SolverConfig cfg_;
  int M_;
  std::vector<OpView> views_;
  std::vector<int> order_;
  int n_;

  std::vector<long long> load_;  // 1-based
  std::vector<int> tool_machine_;
  std::vector<int> tool_users_;
  std::vector<long long> tool_time_;
  std::vector<int> distinct_tools_;
  std::vector<long long> part_time_;
  std::vector<long long> part_remaining_min_;
  long long remaining_min_time_ = 0;
  long long remaining_extra_ = 0;
  long long remaining_min_cost_ = 0;
  long long cost_ = 0;
  long long committed_setup_ = 0;
  long long total_time_ = 0;
  Assignment cur_;

  double inc_z_ = kInf;
  Assignment best_;
  bool from_search_ = false;
  long long nodes_ = 0;
  long long pruned_ = 0;
  long long updates_ = 0;
  bool stopped_ = false;
  std::chrono::steady_clock::time_point t0_;

  std::vector<long long> loads_view_;
  std::vector<double> bound_buf_;
};

void require_solvable(const Instance& inst, Weights w) {
  auto violations = validate(inst);
  if (!violations.empty())
    throw std::invalid_argument("solver: instance fails validation: " + violations.front().rule +
                                " (" + violations.front().detail + ")");
  if (!w.valid()) throw std::invalid_argument("solver: weights must be non-negative and sum to 1");
}

}  // namespace

std::vector<int> branch_order(const Instance& inst) {
  auto views = make_views(inst);
  return order_of(views);
}

double lower_bound(const Instance& inst, const Assignment& partial, Weights w) {
  if (static_cast<int>(partial.choice.size()) != inst.total_operations())
    throw std::invalid_argument("lower_bound: wrong assignment size");
  std::vector<long long> loads(static_cast<size_t>(inst.machines), 0);
  long long R = 0;
  long long E = 0;
  int flat = 0;
  for (const auto& p : inst.parts) {
    for (size_t j = 0; j < p.operations.size(); ++j, ++flat) {
      const OpChoice& c = partial.choice[static_cast<size_t>(flat)];
      if (c.assigned()) {
        const ProcessingOption* found = nullptr;
        for (const auto& o : p.operations[j].options)
          if (o.machine == c.machine && o.tool == c.tool) found = &o;
        if (!found)
          throw std::invalid_argument("lower_bound: choice outside the operation's options");
        loads[static_cast<size_t>(found->machine - 1)] += found->time;
      } else {
        int mn = p.operations[j].options.front().time;
        int mx = mn;
        for (const auto& o : p.operations[j].options) {
          mn = std::min(mn, o.time);
          mx = std::max(mx, o.time);
        }
        R += mn;
        E += mx - mn;
      }
    }
  }
  std::vector<double> buf;
  return weighted_bound(loads, R, E, w, buf);
}

SolveResult solve(const Instance& inst, Weights w, const SolverConfig& cfg) {
  require_solvable(inst, w);
  Search search(inst, w, cfg);
  return search.run();
}

SolveResult solve_exhaustive(const Instance& inst, Weights w, const SolverConfig& cfg) {
  require_solvable(inst, w);
  auto views = make_views(inst);
  auto order = order_of(views);
  const int n = static_cast<int>(views.size());

  long long space = views.empty() ? 1 : 1;
  for (const auto& v : views) {
    long long count = static_cast<long long>(v.options.size());
    if (count == 0) {
      space = 0;
      break;
    }
    if (space > cfg.exhaustive_cap / count + 1) {
      space = cfg.exhaustive_cap + 1;
      break;
    }
    space *= count;
  }
  if (space > cfg.exhaustive_cap)
    throw std::runtime_error("solve_exhaustive: search space exceeds cap of " +
                             std::to_string(cfg.exhaustive_cap));

  SolveResult res;
  Assignment cur = Assignment::empty_for(inst);
  FeasScratch scratch;
  double best_z = kInf;
  Assignment best;
  long long leaves = 0;

  // Iterative enumeration in the same (branch order, option rank) order as
  // the branch-and-bound search, so equal-objective ties resolve identically.
  std::vector<int> pick(static_cast<size_t>(n), 0);
  int depth = 0;
  while (depth >= 0) {
    if (depth == n) {
      ++leaves;
      if (is_feasible(inst, cur, cfg.options, scratch)) {
        long long total = 0;
        for (long long l : scratch.loads) total += l;
        double z = w.w1 * static_cast<double>(total) +
                   w.w2 * static_cast<double>(unbalance(scratch.loads));
        if (z < best_z) {
          best_z = z;
          best = cur;
        }
      }
      --depth;
      continue;
    }
    const OpView& op = views[static_cast<size_t>(order[static_cast<size_t>(depth)])];
    int& k = pick[static_cast<size_t>(depth)];
    if (k == static_cast<int>(op.options.size())) {
      k = 0;
      cur.choice[static_cast<size_t>(op.flat)] = {};
      --depth;
      continue;
    }
    cur.choice[static_cast<size_t>(op.flat)] = {op.options[static_cast<size_t>(k)].machine,
                                                op.options[static_cast<size_t>(k)].tool};
    ++k;
    ++depth;
  }

  res.nodes_explored = leaves;
  if (best_z < kInf) {
    res.status = SolveStatus::Optimal;
    res.best = best;
    res.metrics = evaluate(inst, best, w);
    res.proof.incumbent = best_z;
  } else {
    res.status = SolveStatus::Infeasible;
  }
  return res;
}

}  // namespace fms
