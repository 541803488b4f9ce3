#pragma once

#include <set>
#include <string>
#include <vector>

#include "attnloc/frontend.hpp"

namespace attnloc {

enum class DepKind : std::uint8_t { Data, Control };

struct VdgEdge {
  std::string from;  // u
  std::string to;    // v depends on u
  DepKind kind = DepKind::Data;
  auto operator<=>(const VdgEdge&) const = default;
};

// Variable dependence graph. Edges are deduplicated per (from, to, kind).
struct Vdg {
  std::vector<std::string> nodes;
  std::set<VdgEdge> edges;

  bool has_edge(const std::string& from, const std::string& to) const;
  bool has_node(const std::string& n) const;
  std::string to_dot() const;
};

struct DependenceSet {
  std::string target;
  std::set<std::string> members;
  bool contains(const std::string& v) const { return members.count(v) != 0; }
};

Vdg build_vdg(const Design& design);

// Reverse-edge DFS from target; the target itself is a member. Throws Error
// for a name that is not a design variable.
DependenceSet dependence_set(const Vdg& vdg, const std::string& target);

enum class CdfgNodeKind : std::uint8_t { Entry, Guard, Statement, Merge, Exit };

struct CdfgNode {
  CdfgNodeKind kind = CdfgNodeKind::Entry;
  int arm = -1;                   // Guard / Statement in comb block
  StatementId statement;          // Statement only
  std::string lhs;                // Statement only
  std::string label;
};

struct ControlEdge {
  int guard = 0;  // node index, always a Guard node
  int target = 0;
  bool polarity = true;
};

struct DataEdge {
  int def = 0;  // statement node indices
  int use = 0;
  std::string variable;
  bool cross_cycle = false;
};

struct Cdfg {
  std::vector<CdfgNode> nodes;
  std::vector<ControlEdge> control_edges;
  std::vector<DataEdge> data_edges;
  // Sequential successor edges (entry -> ... -> exit), excluding guard
  // outcomes, which live in control_edges.
  std::vector<std::pair<int, int>> flow_edges;
  int entry = 0;
  int exit = 0;

  int node_of(const StatementId& id) const;  // -1 if absent
  // Every node reachable from entry over flow + control edges.
  std::vector<bool> reachable() const;
  std::string to_dot() const;
};

Cdfg build_cdfg(const Design& design);

}  // namespace attnloc
