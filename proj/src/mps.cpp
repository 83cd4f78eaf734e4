#include <cstdio>
#include <string>
#include <vector>

#include "fms/model.hpp"

namespace fms {

namespace {

std::string fmt_num(double v) {
  long long as_int = static_cast<long long>(v);
  if (static_cast<double>(as_int) == v && v > -1e15 && v < 1e15) return std::to_string(as_int);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string export_mps(const LinearModel& model) {
  std::string out;
  out.reserve(4096);
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };

  line("NAME FMS_LOADING");
  line("ROWS");
  line(" N OBJ");
  for (const auto& c : model.constraints) {
    char rel = c.rel == Relation::LE ? 'L' : (c.rel == Relation::EQ ? 'E' : 'G');
    line(std::string(" ") + rel + " " + c.name);
  }

  // Column-major view of the constraint matrix, rows in declaration order.
  std::vector<std::vector<std::pair<int, double>>> columns(model.variables.size());
  for (size_t ci = 0; ci < model.constraints.size(); ++ci)
    for (const auto& t : model.constraints[ci].terms)
      columns[static_cast<size_t>(t.var)].emplace_back(static_cast<int>(ci), t.coeff);

  line("COLUMNS");
  bool in_integer_block = false;
  int marker = 0;
  for (size_t vi = 0; vi < model.variables.size(); ++vi) {
    const Variable& v = model.variables[vi];
    bool integral = v.kind == VarKind::Binary;
    if (integral != in_integer_block) {
      ++marker;
      line(" MK" + std::to_string(marker) + " 'MARKER' '" +
           (integral ? "INTORG" : "INTEND") + "'");
      in_integer_block = integral;
    }
    if (v.objective != 0.0) line(" " + v.name + " OBJ " + fmt_num(v.objective));
    for (const auto& [row, coeff] : columns[vi])
      line(" " + v.name + " " + model.constraints[static_cast<size_t>(row)].name + " " +
           fmt_num(coeff));
  }
  if (in_integer_block) {
    ++marker;
    line(" MK" + std::to_string(marker) + " 'MARKER' 'INTEND'");
  }

  line("RHS");
  for (const auto& c : model.constraints)
    if (c.rhs != 0.0) line(" RHS " + c.name + " " + fmt_num(c.rhs));

  line("BOUNDS");
  for (const auto& v : model.variables) {
    if (v.kind == VarKind::Binary)
      line(" BV BND " + v.name);
    else
      line(" PL BND " + v.name);
  }
  line("ENDATA");
  return out;
}

}  // namespace fms
