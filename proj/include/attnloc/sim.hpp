#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "attnloc/frontend.hpp"

namespace attnloc {

using Bit = std::uint8_t;

struct InputVectorSequence {
  std::uint64_t seed = 0;
  int cycles = 0;
  std::vector<std::string> inputs;
  std::vector<std::vector<Bit>> vectors;  // [cycle][input]

  bool operator==(const InputVectorSequence&) const = default;
};

struct ExecutedStatementInstance {
  StatementId statement;
  int cycle = 0;
  std::vector<Bit> operand_values;  // one per RHS occurrence
  Bit lhs_value = 0;
  int arm = -1;  // comb arm index, -1 for the clocked block
  // Outcomes of the guards evaluated before this statement's arm was taken.
  std::vector<bool> branch_path;

  bool operator==(const ExecutedStatementInstance&) const = default;
};

enum class TraceLabel : std::uint8_t { Unlabeled, Correct, Failure };

struct Trace {
  InputVectorSequence input_sequence;
  std::vector<std::string> signals;   // design variable order
  std::vector<std::vector<Bit>> values;  // [cycle][signal], after comb evaluation
  std::vector<ExecutedStatementInstance> executions;  // cycle-major, execution order
  TraceLabel label = TraceLabel::Unlabeled;
  int first_cycle = 0;  // nonzero for windows cut out of a longer trace

  int cycles() const { return static_cast<int>(values.size()); }
  int signal_index(const std::string& name) const;  // -1 if absent
  Bit value(int cycle, const std::string& name) const;
  // Sub-trace covering cycles [begin, end) with executions restricted to it.
  Trace window(int begin, int end) const;

  bool operator==(const Trace&) const = default;
};

// Uniform i.i.d. bits, deterministic in seed.
InputVectorSequence generate_testbench(const Design& design, int cycles, std::uint64_t seed);

// Compiled form of a design; reuse across many stimuli.
class Simulator {
 public:
  explicit Simulator(const Design& design);
  Trace run(const InputVectorSequence& stimulus) const;

 private:
  struct Program {
    std::vector<std::int32_t> code;  // postfix; >= 0 pushes a variable slot
  };
  struct CompiledStatement {
    StatementId id;
    int lhs = 0;
    std::vector<int> operands;  // variable slots, one per occurrence
    Program rhs;                // operand-indexed program (pushes operand k)
    std::optional<bool> constant;
  };
  struct CompiledArm {
    bool has_guard = false;
    Program guard;  // variable-indexed
    std::vector<CompiledStatement> body;
  };

  static Bit eval(const Program& p, const Bit* slots);
  CompiledStatement compile(const Statement& s) const;

  std::vector<std::string> vars_;
  std::vector<int> input_slots_;
  std::vector<std::string> input_names_;
  std::vector<CompiledStatement> clocked_;
  std::vector<CompiledArm> arms_;
  int index_of(const std::string& n) const;
};

Trace simulate(const Design& design, const InputVectorSequence& stimulus);

// Failure iff the target differs in at least one cycle.
TraceLabel classify_trace(const Trace& mutant, const Trace& golden, const std::string& target);

// One JSON object per cycle: inputs, state, outputs, exec.
void write_trace_jsonl(const Design& design, const Trace& trace, std::ostream& os);

// Re-evaluates a statement's RHS for given operand occurrence values.
Bit evaluate_rhs(const Statement& s, const std::vector<Bit>& operand_values);

}  // namespace attnloc
