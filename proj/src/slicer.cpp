#include "attnloc/slicer.hpp"

namespace attnloc {

DynamicSlice dynamic_slice(const Cdfg& cdfg, const DependenceSet& deps, const Trace& trace) {
  if (trace.signal_index(deps.target) < 0)
    throw Error("slice target '" + deps.target + "' is not a variable of the traced design");
  std::map<StatementId, std::vector<int>> executed;
  for (const auto& e : trace.executions) {
    auto& cyc = executed[e.statement];
    if (cyc.empty() || cyc.back() != e.cycle) cyc.push_back(e.cycle);
  }
  DynamicSlice slice;
  slice.target = deps.target;
  for (const auto& n : cdfg.nodes) {
    if (n.kind != CdfgNodeKind::Statement || !deps.contains(n.lhs)) continue;
    auto it = executed.find(n.statement);
    if (it == executed.end()) continue;
    slice.statements.push_back(n.statement);
    slice.cycles.emplace(n.statement, it->second);
  }
  return slice;
}

}  // namespace attnloc
