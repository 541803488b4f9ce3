#include <algorithm>
#include <functional>
#include <ostream>

#include <nlohmann/json.hpp>

#include "attnloc/rng.hpp"
#include "attnloc/sim.hpp"

namespace attnloc {
namespace {

enum Op : std::int32_t { kNot = -1, kAnd = -2, kOr = -3, kXor = -4, kConst0 = -5, kConst1 = -6, kEq = -7, kNeq = -8 };

// Emits postfix code for an expression, numbering operand leaves in order.
void emit_expr(const AstNode& n, std::vector<std::int32_t>& code, std::int32_t& next_leaf) {
  switch (n.kind) {
    case NodeKind::Identifier:
      code.push_back(next_leaf++);
      return;
    case NodeKind::Not:
      emit_expr(n.children[0], code, next_leaf);
      code.push_back(kNot);
      return;
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Xor:
      emit_expr(n.children[0], code, next_leaf);
      emit_expr(n.children[1], code, next_leaf);
      code.push_back(n.kind == NodeKind::And ? kAnd : n.kind == NodeKind::Or ? kOr : kXor);
      return;
    default:
      for (const auto& c : n.children) emit_expr(c, code, next_leaf);
  }
}

}  // namespace

int Trace::signal_index(const std::string& name) const {
  auto it = std::find(signals.begin(), signals.end(), name);
  return it == signals.end() ? -1 : static_cast<int>(it - signals.begin());
}

Bit Trace::value(int cycle, const std::string& name) const {
  const int i = signal_index(name);
  if (i < 0) throw SimulationError("trace has no signal '" + name + "'");
  return values.at(cycle)[i];
}

Trace Trace::window(int begin, int end) const {
  Trace t;
  t.signals = signals;
  t.first_cycle = first_cycle + begin;
  t.input_sequence.seed = input_sequence.seed;
  t.input_sequence.inputs = input_sequence.inputs;
  t.input_sequence.cycles = end - begin;
  t.input_sequence.vectors.assign(input_sequence.vectors.begin() + begin, input_sequence.vectors.begin() + end);
  t.values.assign(values.begin() + begin, values.begin() + end);
  for (const auto& e : executions)
    if (e.cycle >= begin && e.cycle < end) {
      t.executions.push_back(e);
      t.executions.back().cycle -= begin;
    }
  t.label = label;
  return t;
}

InputVectorSequence generate_testbench(const Design& design, int cycles, std::uint64_t seed) {
  if (cycles < 1) throw Error("testbench needs at least one cycle");
  InputVectorSequence seq;
  seq.seed = seed;
  seq.cycles = cycles;
  seq.inputs = design.inputs();
  Rng rng(seed);
  seq.vectors.resize(cycles);
  for (auto& v : seq.vectors) {
    v.resize(seq.inputs.size());
    for (auto& b : v) b = static_cast<Bit>(rng.next() >> 63);
  }
  return seq;
}

Simulator::Simulator(const Design& design) {
  vars_ = design.variables();
  input_names_ = design.inputs();
  for (const auto& n : input_names_) input_slots_.push_back(index_of(n));
  for (const auto& s : design.clocked) clocked_.push_back(compile(s));
  for (const auto& arm : design.comb) {
    CompiledArm ca;
    if (arm.guard) {
      ca.has_guard = true;
      // Guards are recursive over a small tree; flatten to postfix once.
      std::function<void(const GuardExpr&)> emit = [&](const GuardExpr& g) {
        switch (g.op) {
          case GuardOp::Const: ca.guard.code.push_back(g.value ? kConst1 : kConst0); return;
          case GuardOp::Ident: ca.guard.code.push_back(index_of(g.name)); return;
          case GuardOp::BitNot:
          case GuardOp::LogicalNot:
            emit(g.children[0]);
            ca.guard.code.push_back(kNot);
            return;
          default:
            emit(g.children[0]);
            emit(g.children[1]);
            switch (g.op) {
              case GuardOp::BitAnd:
              case GuardOp::LogicalAnd: ca.guard.code.push_back(kAnd); break;
              case GuardOp::BitOr:
              case GuardOp::LogicalOr: ca.guard.code.push_back(kOr); break;
              case GuardOp::BitXor: ca.guard.code.push_back(kXor); break;
              case GuardOp::Eq: ca.guard.code.push_back(kEq); break;
              case GuardOp::Neq: ca.guard.code.push_back(kNeq); break;
              default: break;
            }
        }
      };
      emit(*arm.guard);
    }
    for (const auto& s : arm.body) ca.body.push_back(compile(s));
    arms_.push_back(std::move(ca));
  }
}

int Simulator::index_of(const std::string& n) const {
  auto it = std::find(vars_.begin(), vars_.end(), n);
  if (it == vars_.end()) throw SimulationError("use of undeclared signal '" + n + "'");
  return static_cast<int>(it - vars_.begin());
}

Simulator::CompiledStatement Simulator::compile(const Statement& s) const {
  CompiledStatement c;
  c.id = s.id;
  c.lhs = index_of(s.lhs);
  for (const auto& op : s.rhs_operands) c.operands.push_back(index_of(op));
  c.constant = s.constant;
  if (!s.constant) {
    std::int32_t leaf = 0;
    emit_expr(s.rvalue(), c.rhs.code, leaf);
  }
  return c;
}

Bit Simulator::eval(const Program& p, const Bit* slots) {
  Bit small[64] = {};
  std::vector<Bit> big;
  Bit* stack = small;
  if (p.code.size() > 64) {
    big.resize(p.code.size());
    stack = big.data();
  }
  int sp = 0;
  for (std::int32_t op : p.code) {
    switch (op) {
      case kNot: stack[sp - 1] ^= 1; break;
      case kAnd: --sp; stack[sp - 1] &= stack[sp]; break;
      case kOr: --sp; stack[sp - 1] |= stack[sp]; break;
      case kXor:
      case kNeq: --sp; stack[sp - 1] ^= stack[sp]; break;
      case kEq: --sp; stack[sp - 1] = static_cast<Bit>(!(stack[sp - 1] ^ stack[sp])); break;
      case kConst0: stack[sp++] = 0; break;
      case kConst1: stack[sp++] = 1; break;
      default: stack[sp++] = slots[op]; break;
    }
  }
  return stack[0];
}

Trace Simulator::run(const InputVectorSequence& stimulus) const {
  if (stimulus.inputs != input_names_) throw SimulationError("stimulus inputs do not match design inputs");
  Trace t;
  t.input_sequence = stimulus;
  t.signals = vars_;
  std::vector<Bit> cur(vars_.size(), 0);  // registers reset to 0
  auto execute = [&](const CompiledStatement& s, int cycle, int arm, const std::vector<bool>& path) {
    ExecutedStatementInstance e;
    e.statement = s.id;
    e.cycle = cycle;
    e.arm = arm;
    e.branch_path = path;
    e.operand_values.resize(s.operands.size());
    for (std::size_t k = 0; k < s.operands.size(); ++k) e.operand_values[k] = cur[s.operands[k]];
    e.lhs_value = s.constant ? static_cast<Bit>(*s.constant) : eval(s.rhs, e.operand_values.data());
    t.executions.push_back(std::move(e));
    return t.executions.back().lhs_value;
  };
  for (int c = 0; c < stimulus.cycles; ++c) {
    const auto& vec = stimulus.vectors.at(c);
    for (std::size_t i = 0; i < input_slots_.size(); ++i) cur[input_slots_[i]] = vec[i];
    std::vector<bool> path;
    for (std::size_t k = 0; k < arms_.size(); ++k) {
      const CompiledArm& arm = arms_[k];
      if (arm.has_guard) {
        const bool taken = eval(arm.guard, cur.data()) != 0;
        path.push_back(taken);
        if (!taken) continue;
      }
      for (const auto& s : arm.body) cur[s.lhs] = execute(s, c, static_cast<int>(k), path);
      break;
    }
    t.values.push_back(cur);
    // Nonblocking commit: evaluate everything first, then write.
    std::vector<std::pair<int, Bit>> commits;
    commits.reserve(clocked_.size());
    for (const auto& s : clocked_) commits.emplace_back(s.lhs, execute(s, c, -1, {}));
    for (const auto& [slot, v] : commits) cur[slot] = v;
  }
  return t;
}

Trace simulate(const Design& design, const InputVectorSequence& stimulus) { return Simulator(design).run(stimulus); }

TraceLabel classify_trace(const Trace& mutant, const Trace& golden, const std::string& target) {
  if (!(mutant.input_sequence == golden.input_sequence)) throw SimulationError("stimulus mismatch between traces");
  const int mi = mutant.signal_index(target);
  const int gi = golden.signal_index(target);
  if (mi < 0 || gi < 0) throw SimulationError("target '" + target + "' missing from trace");
  for (int c = 0; c < golden.cycles(); ++c)
    if (mutant.values[c][mi] != golden.values[c][gi]) return TraceLabel::Failure;
  return TraceLabel::Correct;
}

void write_trace_jsonl(const Design& design, const Trace& trace, std::ostream& os) {
  const auto state = design.state_registers();
  const auto outputs = design.outputs();
  std::size_t e = 0;
  for (int c = 0; c < trace.cycles(); ++c) {
    nlohmann::ordered_json rec;
    rec["inputs"] = nlohmann::ordered_json::object();
    for (const auto& n : trace.input_sequence.inputs) rec["inputs"][n] = trace.value(c, n);
    rec["state"] = nlohmann::ordered_json::object();
    for (const auto& n : state) rec["state"][n] = trace.value(c, n);
    rec["outputs"] = nlohmann::ordered_json::object();
    for (const auto& n : outputs) rec["outputs"][n] = trace.value(c, n);
    rec["exec"] = nlohmann::ordered_json::array();
    for (; e < trace.executions.size() && trace.executions[e].cycle == c; ++e) {
      const auto& x = trace.executions[e];
      nlohmann::ordered_json ex;
      ex["stmt"] = x.statement.str();
      ex["operands"] = x.operand_values;
      ex["lhs"] = x.lhs_value;
      rec["exec"].push_back(std::move(ex));
    }
    os << rec.dump() << '\n';
  }
}

Bit evaluate_rhs(const Statement& s, const std::vector<Bit>& operand_values) {
  if (s.constant) return static_cast<Bit>(*s.constant);
  if (operand_values.size() != s.rhs_operands.size()) throw SimulationError("operand count mismatch");
  std::size_t next = 0;
  std::function<Bit(const AstNode&)> ev = [&](const AstNode& n) -> Bit {
    switch (n.kind) {
      case NodeKind::Identifier: return operand_values[next++];
      case NodeKind::Not: return ev(n.children[0]) ^ 1;
      case NodeKind::And: { Bit a = ev(n.children[0]); return a & ev(n.children[1]); }
      case NodeKind::Or: { Bit a = ev(n.children[0]); return a | ev(n.children[1]); }
      case NodeKind::Xor: { Bit a = ev(n.children[0]); return a ^ ev(n.children[1]); }
      default: return ev(n.children[0]);
    }
  };
  return ev(s.rvalue());
}

}  // namespace attnloc
