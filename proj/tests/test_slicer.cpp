#include <doctest.h>

#include "attnloc/slicer.hpp"
#include "support/oracles.hpp"

using namespace attnloc;

namespace {

std::set<StatementId> independent_slice(const Design& d, const std::string& target, const Trace& t) {
  const auto dep = oracle::closure_dep(d, target);
  std::set<StatementId> out;
  for (const auto& x : t.executions)
    if (dep.count(d.find_statement(x.statement)->lhs)) out.insert(x.statement);
  return out;
}

DynamicSlice slice_of(const Design& d, const std::string& target, const Trace& t) {
  return dynamic_slice(build_cdfg(d), dependence_set(build_vdg(d), target), t);
}

}  // namespace

TEST_CASE("arbiter slice on a fixed stimulus is the taken branch") {
  const Design d = parse_design(oracle::kArbiter);
  InputVectorSequence s;
  s.inputs = d.inputs();
  s.cycles = 1;
  s.vectors = {{0, 1}};
  const Trace t = simulate(d, s);
  const auto sl = slice_of(d, "gnt1", t);
  // gnt1 and the clocked update of state; gnt2 is outside Dep(gnt1).
  CHECK(sl.statements == std::vector<StatementId>{{15, 0}, {10, 0}});
  CHECK(sl.cycles.at(StatementId{15, 0}) == std::vector<int>{0});
  CHECK_FALSE(sl.contains(StatementId{18, 0}));
}

TEST_CASE("statements of untaken branches are excluded") {
  const Design d = parse_design(oracle::kArbiter);
  InputVectorSequence s;
  s.inputs = d.inputs();
  s.cycles = 3;
  s.vectors = {{1, 0}, {1, 0}, {0, 0}};  // req2 = 0 keeps state at 0
  const Trace t = simulate(d, s);
  const auto sl = slice_of(d, "gnt1", t);
  CHECK(sl.contains(StatementId{15, 0}));
  CHECK_FALSE(sl.contains(StatementId{18, 0}));
}

TEST_CASE("slice equals executed statements with lhs in the dependence set") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Design d = oracle::random_design(seed);
    const Trace t = simulate(d, generate_testbench(d, 24, seed + 1000));
    for (const auto& out : d.outputs()) {
      const auto sl = slice_of(d, out, t);
      const std::set<StatementId> got(sl.statements.begin(), sl.statements.end());
      INFO("seed " << seed << " target " << out);
      CHECK(got == independent_slice(d, out, t));
      CHECK(got.size() == sl.statements.size());
      CHECK(sl.cycles.size() == sl.statements.size());
    }
  }
}

TEST_CASE("extending a trace never removes slice members") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Design d = oracle::random_design(seed);
    const Trace t = simulate(d, generate_testbench(d, 40, seed));
    const auto target = d.outputs().front();
    std::set<StatementId> prev;
    for (int len : {1, 5, 10, 20, 40}) {
      const auto sl = slice_of(d, target, t.window(0, len));
      const std::set<StatementId> cur(sl.statements.begin(), sl.statements.end());
      for (const auto& id : prev) CHECK(cur.count(id) == 1);
      prev = cur;
    }
  }
}
