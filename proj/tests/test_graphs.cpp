#include <doctest.h>

#include <deque>

#include "attnloc/graphs.hpp"
#include "support/oracles.hpp"

using namespace attnloc;

namespace {

const char* kChain = R"(module chain(clk, a, c);
  input clk;
  input a;
  output reg c;
  reg b;
  always @(posedge clk) begin
  end
  always @(*) begin
    b = a;
    c = b;
  end
endmodule
)";

const char* kIsolated = R"(module iso(clk, a, y, z);
  input clk;
  input a;
  output reg y;
  output reg z;
  always @(posedge clk) begin
  end
  always @(*) begin
    y = a;
  end
endmodule
)";

// Fixpoint of one-step reverse expansion over an explicit edge list.
std::set<std::string> fixpoint(const Vdg& g, const std::string& t) {
  std::set<std::string> s{t};
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : g.edges)
      if (s.count(e.to) && s.insert(e.from).second) changed = true;
  }
  return s;
}

}  // namespace

TEST_CASE("arbiter dependence graph and target set") {
  const Design d = parse_design(oracle::kArbiter);
  const Vdg g = build_vdg(d);
  CHECK(g.has_edge("req1", "gnt1"));
  CHECK(g.has_edge("req2", "gnt1"));
  CHECK(g.has_edge("state", "gnt1"));
  CHECK(g.edges.count(VdgEdge{"state", "gnt1", DepKind::Control}) == 1);
  const auto dep = dependence_set(g, "gnt1");
  CHECK(dep.members == std::set<std::string>{"gnt1", "req1", "req2", "state"});
  CHECK_THROWS_AS(dependence_set(g, "nope"), Error);
}

TEST_CASE("empty design has nodes but no edges") {
  const char* src = R"(module e(clk, a, y);
  input clk;
  input a;
  output reg y;
  always @(posedge clk) begin
  end
  always @(*) begin
  end
endmodule
)";
  const Vdg g = build_vdg(parse_design(src));
  CHECK(g.edges.empty());
  CHECK(g.has_node("a"));
  CHECK(g.has_node("y"));
}

TEST_CASE("isolated output depends only on itself") {
  const Design d = parse_design(kIsolated);
  CHECK(dependence_set(build_vdg(d), "z").members == std::set<std::string>{"z"});
}

TEST_CASE("chain closure matches matrix powering") {
  const Design d = parse_design(kChain);
  const auto dep = dependence_set(build_vdg(d), "c");
  CHECK(dep.members == std::set<std::string>{"a", "b", "c"});
  CHECK(dep.members == oracle::closure_dep(d, "c"));
}

TEST_CASE("random designs: edges match a syntactic scan and Dep matches closures") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Design d = oracle::random_design(seed);
    const Vdg g = build_vdg(d);
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& e : g.edges) got.insert({e.from, e.to});
    INFO("seed " << seed);
    CHECK(got == oracle::syntactic_edges(d));
    for (const auto& v : d.variables()) {
      const auto dep = dependence_set(g, v).members;
      CHECK(dep == oracle::closure_dep(d, v));
      CHECK(dep == fixpoint(g, v));
    }
  }
}

TEST_CASE("control edges come exactly from dominating guards") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const Design d = oracle::random_design(seed);
    const Vdg g = build_vdg(d);
    std::set<std::pair<std::string, std::string>> expected;
    std::vector<std::string> guards;
    for (const auto& arm : d.comb) {
      if (arm.guard) arm.guard->collect_identifiers(guards);
      for (const auto& s : arm.body)
        for (const auto& v : guards) expected.insert({v, s.lhs});
    }
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& e : g.edges)
      if (e.kind == DepKind::Control) got.insert({e.from, e.to});
    CHECK(got == expected);
  }
}

TEST_CASE("adding an edge never shrinks a dependence set") {
  const Design d = oracle::random_design(5);
  Vdg g = build_vdg(d);
  const auto vars = d.variables();
  for (const auto& t : vars) {
    const auto before = dependence_set(g, t).members;
    Vdg h = g;
    h.edges.insert(VdgEdge{vars.front(), vars.back(), DepKind::Data});
    const auto after = dependence_set(h, t).members;
    for (const auto& v : before) CHECK(after.count(v) == 1);
  }
}

TEST_CASE("cdfg def-use edge between sequential assignments") {
  const Design d = parse_design(kChain);
  const Cdfg c = build_cdfg(d);
  const int first = c.node_of(StatementId{9, 0});
  const int second = c.node_of(StatementId{10, 0});
  REQUIRE(first >= 0);
  REQUIRE(second >= 0);
  bool found = false;
  for (const auto& e : c.data_edges)
    if (e.def == first && e.use == second && e.variable == "b" && !e.cross_cycle) found = true;
  CHECK(found);
}

TEST_CASE("arbiter cdfg guard controls both grant assignments") {
  const Design d = parse_design(oracle::kArbiter);
  const Cdfg c = build_cdfg(d);
  int guard = -1;
  for (std::size_t i = 0; i < c.nodes.size(); ++i)
    if (c.nodes[i].kind == CdfgNodeKind::Guard) guard = static_cast<int>(i);
  REQUIRE(guard >= 0);
  std::set<std::string> true_side, false_side;
  for (const auto& e : c.control_edges) {
    if (e.guard != guard) continue;
    if (c.nodes[e.target].kind != CdfgNodeKind::Statement) continue;
    (e.polarity ? true_side : false_side).insert(c.nodes[e.target].statement.str());
  }
  CHECK(true_side == std::set<std::string>{"15.0", "16.0"});
  CHECK(false_side == std::set<std::string>{"18.0", "19.0"});
  CHECK(c.to_dot().find("digraph") == 0);
}

TEST_CASE("random cdfgs: every node reachable by an independent BFS") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Design d = oracle::random_design(seed);
    const Cdfg c = build_cdfg(d);
    std::vector<std::vector<int>> adj(c.nodes.size());
    for (auto [a, b] : c.flow_edges) adj[a].push_back(b);
    for (const auto& e : c.control_edges) adj[e.guard].push_back(e.target);
    std::vector<bool> seen(c.nodes.size(), false);
    std::deque<int> q{c.entry};
    seen[c.entry] = true;
    while (!q.empty()) {
      const int n = q.front();
      q.pop_front();
      for (int m : adj[n])
        if (!seen[m]) seen[m] = true, q.push_back(m);
    }
    INFO("seed " << seed);
    for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i]);
    CHECK(c.reachable() == seen);
    for (const Statement* s : d.statements()) CHECK(c.node_of(s->id) >= 0);
  }
}
