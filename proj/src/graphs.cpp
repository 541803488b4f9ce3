#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "attnloc/graphs.hpp"

namespace attnloc {

bool Vdg::has_edge(const std::string& from, const std::string& to) const {
  return edges.count({from, to, DepKind::Data}) || edges.count({from, to, DepKind::Control});
}

bool Vdg::has_node(const std::string& n) const { return std::find(nodes.begin(), nodes.end(), n) != nodes.end(); }

std::string Vdg::to_dot() const {
  std::ostringstream os;
  os << "digraph vdg {\n";
  for (const auto& n : nodes) os << "  \"" << n << "\";\n";
  for (const auto& e : edges) {
    os << "  \"" << e.from << "\" -> \"" << e.to << "\"";
    if (e.kind == DepKind::Control) os << " [style=dashed, label=\"ctrl\"]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

Vdg build_vdg(const Design& design) {
  Vdg g;
  g.nodes = design.variables();
  for (const auto& s : design.clocked)
    for (const auto& u : s.rhs_operands) g.edges.insert({u, s.lhs, DepKind::Data});
  // Arm k executes only when guards 0..k-1 are false and guard k is true, so
  // every guard up to and including its own dominates its assignments.
  std::vector<std::string> dominating;
  for (const auto& arm : design.comb) {
    if (arm.guard) arm.guard->collect_identifiers(dominating);
    for (const auto& s : arm.body) {
      for (const auto& u : s.rhs_operands) g.edges.insert({u, s.lhs, DepKind::Data});
      for (const auto& u : dominating) g.edges.insert({u, s.lhs, DepKind::Control});
    }
  }
  return g;
}

DependenceSet dependence_set(const Vdg& vdg, const std::string& target) {
  if (!vdg.has_node(target)) throw Error("unknown target variable '" + target + "'");
  std::map<std::string, std::vector<std::string>> reverse;
  for (const auto& e : vdg.edges) reverse[e.to].push_back(e.from);
  DependenceSet d;
  d.target = target;
  std::vector<std::string> stack{target};
  while (!stack.empty()) {
    std::string v = std::move(stack.back());
    stack.pop_back();
    if (!d.members.insert(v).second) continue;
    for (const auto& u : reverse[v])
      if (!d.members.count(u)) stack.push_back(u);
  }
  return d;
}

int Cdfg::node_of(const StatementId& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].kind == CdfgNodeKind::Statement && nodes[i].statement == id) return static_cast<int>(i);
  return -1;
}

std::vector<bool> Cdfg::reachable() const {
  std::vector<std::vector<int>> succ(nodes.size());
  for (const auto& [a, b] : flow_edges) succ[a].push_back(b);
  for (const auto& e : control_edges) succ[e.guard].push_back(e.target);
  std::vector<bool> seen(nodes.size(), false);
  std::vector<int> stack{entry};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = true;
    for (int w : succ[v])
      if (!seen[w]) stack.push_back(w);
  }
  return seen;
}

std::string Cdfg::to_dot() const {
  std::ostringstream os;
  os << "digraph cdfg {\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    const char* shape = n.kind == CdfgNodeKind::Guard       ? "diamond"
                        : n.kind == CdfgNodeKind::Statement ? "ellipse"
                                                            : "box";
    std::string label = n.label;
    for (std::size_t p = 0; (p = label.find('"', p)) != std::string::npos; p += 2) label.replace(p, 1, "\\\"");
    os << "  n" << i << " [shape=" << shape << ", label=\"" << label << "\"];\n";
  }
  for (const auto& [a, b] : flow_edges) os << "  n" << a << " -> n" << b << ";\n";
  for (const auto& e : control_edges)
    os << "  n" << e.guard << " -> n" << e.target << " [color=blue, label=\"" << (e.polarity ? "T" : "F") << "\"];\n";
  for (const auto& e : data_edges)
    os << "  n" << e.def << " -> n" << e.use << " [color=red, style=dashed, label=\"" << e.variable
       << (e.cross_cycle ? "@-1" : "") << "\"];\n";
  os << "}\n";
  return os.str();
}

Cdfg build_cdfg(const Design& design) {
  Cdfg g;
  auto add = [&](CdfgNode n) {
    g.nodes.push_back(std::move(n));
    return static_cast<int>(g.nodes.size() - 1);
  };
  g.entry = add({CdfgNodeKind::Entry, -1, {}, {}, "entry"});

  const int arms = static_cast<int>(design.comb.size());
  std::vector<int> guard_node(arms, -1);
  std::vector<std::vector<int>> arm_nodes(arms);
  for (int k = 0; k < arms; ++k) {
    const Arm& arm = design.comb[k];
    if (arm.guard) guard_node[k] = add({CdfgNodeKind::Guard, k, {}, {}, "if (" + print_guard(*arm.guard) + ")"});
    for (const auto& s : arm.body) arm_nodes[k].push_back(add({CdfgNodeKind::Statement, k, s.id, s.lhs, print_statement(s)}));
  }
  const int merge = add({CdfgNodeKind::Merge, -1, {}, {}, "merge"});
  std::vector<int> clocked_nodes;
  for (const auto& s : design.clocked) clocked_nodes.push_back(add({CdfgNodeKind::Statement, -1, s.id, s.lhs, print_statement(s)}));
  g.exit = add({CdfgNodeKind::Exit, -1, {}, {}, "exit"});

  // Entry point of arm k: its guard, or its first statement, or merge.
  auto arm_entry = [&](int k) {
    if (k >= arms) return merge;
    if (guard_node[k] >= 0) return guard_node[k];
    return arm_nodes[k].empty() ? merge : arm_nodes[k].front();
  };
  g.flow_edges.emplace_back(g.entry, arm_entry(0));
  for (int k = 0; k < arms; ++k) {
    const auto& body = arm_nodes[k];
    if (guard_node[k] >= 0) {
      if (body.empty()) g.control_edges.push_back({guard_node[k], merge, true});
      for (int s : body) g.control_edges.push_back({guard_node[k], s, true});
      const int next = arm_entry(k + 1);
      if (k + 1 < arms && guard_node[k + 1] < 0) {
        for (int s : arm_nodes[k + 1]) g.control_edges.push_back({guard_node[k], s, false});
        if (arm_nodes[k + 1].empty()) g.control_edges.push_back({guard_node[k], merge, false});
      } else {
        g.control_edges.push_back({guard_node[k], next, false});
      }
    }
    for (std::size_t i = 0; i + 1 < body.size(); ++i) g.flow_edges.emplace_back(body[i], body[i + 1]);
    if (!body.empty()) g.flow_edges.emplace_back(body.back(), merge);
  }
  int prev = merge;
  for (int n : clocked_nodes) {
    g.flow_edges.emplace_back(prev, n);
    prev = n;
  }
  g.flow_edges.emplace_back(prev, g.exit);

  // Def-use chains.
  std::map<std::string, std::vector<int>> clocked_defs;
  for (std::size_t i = 0; i < design.clocked.size(); ++i) clocked_defs[design.clocked[i].lhs].push_back(clocked_nodes[i]);
  std::map<std::string, std::vector<int>> comb_defs;  // every comb def of a variable
  for (int k = 0; k < arms; ++k)
    for (std::size_t i = 0; i < design.comb[k].body.size(); ++i)
      comb_defs[design.comb[k].body[i].lhs].push_back(arm_nodes[k][i]);

  auto add_data = [&](int def, int use, const std::string& v, bool cross) {
    for (const auto& e : g.data_edges)
      if (e.def == def && e.use == use && e.variable == v) return;
    g.data_edges.push_back({def, use, v, cross});
  };

  std::vector<std::map<std::string, int>> last_def(arms);
  for (int k = 0; k < arms; ++k) {
    const auto& body = design.comb[k].body;
    for (std::size_t i = 0; i < body.size(); ++i) {
      for (const auto& x : body[i].rhs_operands) {
        if (auto it = last_def[k].find(x); it != last_def[k].end()) {
          add_data(it->second, arm_nodes[k][i], x, false);
          continue;
        }
        for (int d : clocked_defs[x]) add_data(d, arm_nodes[k][i], x, true);
        for (int d : comb_defs[x]) add_data(d, arm_nodes[k][i], x, true);
      }
      last_def[k][body[i].lhs] = arm_nodes[k][i];
    }
  }
  // Clocked statements read end-of-cycle values.
  for (std::size_t i = 0; i < design.clocked.size(); ++i) {
    for (const auto& x : design.clocked[i].rhs_operands) {
      bool every_arm_defines = arms > 0;
      for (int k = 0; k < arms; ++k) {
        if (auto it = last_def[k].find(x); it != last_def[k].end()) {
          add_data(it->second, clocked_nodes[i], x, false);
        } else {
          every_arm_defines = false;
        }
      }
      if (!every_arm_defines)
        for (int d : clocked_defs[x]) add_data(d, clocked_nodes[i], x, true);
    }
  }
  return g;
}

}  // namespace attnloc
