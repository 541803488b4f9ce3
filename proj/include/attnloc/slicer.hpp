#pragma once

#include <map>
#include <string>
#include <vector>

#include "attnloc/graphs.hpp"
#include "attnloc/sim.hpp"

namespace attnloc {

struct DynamicSlice {
  std::string target;
  std::vector<StatementId> statements;  // CDFG order
  std::map<StatementId, std::vector<int>> cycles;  // executed cycles per member

  bool contains(const StatementId& id) const { return cycles.count(id) != 0; }
};

// l is in the slice iff lhs(l) is in Dep_t and l executed at least once in
// the trace.
DynamicSlice dynamic_slice(const Cdfg& cdfg, const DependenceSet& deps, const Trace& trace);

}  // namespace attnloc
