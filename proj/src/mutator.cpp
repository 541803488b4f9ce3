#include <algorithm>

#include "attnloc/mutator.hpp"
#include "attnloc/rng.hpp"

namespace attnloc {

namespace {

constexpr std::string_view kKindNames[] = {"negation", "operation_substitution", "variable_misuse"};

const char* op_symbol(NodeKind k) {
  switch (k) {
    case NodeKind::And: return "&";
    case NodeKind::Or: return "|";
    case NodeKind::Xor: return "^";
    default: return "";
  }
}

std::optional<NodeKind> op_kind(std::string_view s) {
  if (s == "&") return NodeKind::And;
  if (s == "|") return NodeKind::Or;
  if (s == "^") return NodeKind::Xor;
  return std::nullopt;
}

bool is_binary(NodeKind k) { return k == NodeKind::And || k == NodeKind::Or || k == NodeKind::Xor; }

// Identifier leaf `index` in left-to-right order with its parent.
struct LeafRef {
  AstNode* leaf = nullptr;
  AstNode* parent = nullptr;
};

void find_leaf(AstNode& node, AstNode* parent, int& remaining, LeafRef& out) {
  if (out.leaf) return;
  if (node.kind == NodeKind::Identifier) {
    if (remaining-- == 0) out = {&node, parent};
    return;
  }
  for (auto& c : node.children) find_leaf(c, &node, remaining, out);
}

void binary_nodes(AstNode& node, std::vector<AstNode*>& out) {
  if (is_binary(node.kind)) out.push_back(&node);
  for (auto& c : node.children) binary_nodes(c, out);
}

LeafRef leaf_at(Statement& s, int site) {
  LeafRef r;
  int remaining = site;
  find_leaf(s.ast.children[1], &s.ast, remaining, r);
  if (!r.leaf) throw Error("no operand " + std::to_string(site) + " in statement " + s.id.str());
  return r;
}

std::string stale(const Mutation& m) { return "stale mutation (" + m.describe() + ")"; }

}  // namespace

std::string_view mutation_kind_name(MutationKind k) { return kKindNames[static_cast<int>(k)]; }

MutationKind mutation_kind_from_name(std::string_view name) {
  for (int i = 0; i < 3; ++i)
    if (kKindNames[i] == name) return static_cast<MutationKind>(i);
  throw Error("unknown mutation kind '" + std::string(name) + "'");
}

std::string Mutation::describe() const {
  std::string where = kind == MutationKind::OperationSubstitution ? " operator " : " operand ";
  return std::string(mutation_kind_name(kind)) + " at " + statement.str() + where + std::to_string(site) + ": " +
         original + " -> " + replacement;
}

std::vector<std::string> in_scope_variables(const Design& design, const StatementId& id) {
  std::vector<std::string> out = design.inputs();
  for (const auto& s : design.clocked) {
    if (s.id == id) {
      for (const auto& v : design.variables())
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
      return out;
    }
  }
  for (const auto& r : design.state_registers())
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  for (const auto& arm : design.comb) {
    std::vector<std::string> earlier;
    for (const auto& s : arm.body) {
      if (s.id == id) {
        for (const auto& v : earlier)
          if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        return out;
      }
      earlier.push_back(s.lhs);
    }
  }
  throw Error("unknown statement " + id.str());
}

std::vector<Mutation> enumerate_mutations(const Design& design, const std::string& target, const DependenceSet& deps) {
  if (deps.target != target) throw Error("dependence set was computed for '" + deps.target + "', not '" + target + "'");
  std::vector<Mutation> out;
  for (const Statement* sp : design.statements()) {
    if (!deps.contains(sp->lhs) || sp->rhs_operands.empty()) continue;
    Statement s = *sp;
    const auto scope = in_scope_variables(design, s.id);
    for (int i = 0; i < static_cast<int>(s.rhs_operands.size()); ++i) {
      const LeafRef r = leaf_at(s, i);
      const std::string& name = r.leaf->name;
      if (r.parent->kind == NodeKind::Not)
        out.push_back({MutationKind::Negation, s.id, i, "~" + name, name});
      else
        out.push_back({MutationKind::Negation, s.id, i, name, "~" + name});
    }
    std::vector<AstNode*> ops;
    binary_nodes(s.ast.children[1], ops);
    for (int i = 0; i < static_cast<int>(ops.size()); ++i)
      for (NodeKind k : {NodeKind::And, NodeKind::Or, NodeKind::Xor})
        if (k != ops[i]->kind) out.push_back({MutationKind::OperationSubstitution, s.id, i, op_symbol(ops[i]->kind), op_symbol(k)});
    for (int i = 0; i < static_cast<int>(s.rhs_operands.size()); ++i)
      for (const auto& v : scope)
        if (v != s.rhs_operands[i]) out.push_back({MutationKind::VariableMisuse, s.id, i, s.rhs_operands[i], v});
  }
  return out;
}

Design apply_mutation(const Design& design, const Mutation& m) {
  Design mutant = design;
  Statement* s = mutant.find_statement(m.statement);
  if (!s || s->rhs_operands.empty()) throw Error(stale(m));
  switch (m.kind) {
    case MutationKind::Negation: {
      if (m.site < 0 || m.site >= static_cast<int>(s->rhs_operands.size())) throw Error(stale(m));
      const LeafRef r = leaf_at(*s, m.site);
      const bool negated = r.parent->kind == NodeKind::Not;
      const std::string current = negated ? "~" + r.leaf->name : r.leaf->name;
      if (current != m.original) throw Error(stale(m));
      if (negated) {
        if (m.replacement != r.leaf->name) throw Error("invalid negation replacement (" + m.describe() + ")");
        AstNode leaf = std::move(*r.leaf);
        *r.parent = std::move(leaf);
      } else {
        if (m.replacement != "~" + r.leaf->name) throw Error("invalid negation replacement (" + m.describe() + ")");
        AstNode leaf = std::move(*r.leaf);
        *r.leaf = AstNode::unary(NodeKind::Not, std::move(leaf));
      }
      break;
    }
    case MutationKind::OperationSubstitution: {
      std::vector<AstNode*> ops;
      binary_nodes(s->ast.children[1], ops);
      if (m.site < 0 || m.site >= static_cast<int>(ops.size()) || op_symbol(ops[m.site]->kind) != m.original)
        throw Error(stale(m));
      const auto k = op_kind(m.replacement);
      if (!k || *k == ops[m.site]->kind) throw Error("invalid operator replacement (" + m.describe() + ")");
      ops[m.site]->kind = *k;
      break;
    }
    case MutationKind::VariableMisuse: {
      if (m.site < 0 || m.site >= static_cast<int>(s->rhs_operands.size()) || s->rhs_operands[m.site] != m.original)
        throw Error(stale(m));
      if (m.replacement == m.original || !design.find_signal(m.replacement) || m.replacement == design.clock)
        throw Error("invalid misuse replacement (" + m.describe() + ")");
      leaf_at(*s, m.site).leaf->name = m.replacement;
      break;
    }
  }
  s->refresh_operands();
  return mutant;
}

std::vector<InputVectorSequence> random_stimuli(const Design& design, int count, int cycles, std::uint64_t seed) {
  std::vector<InputVectorSequence> out;
  for (int k = 0; k < count; ++k) out.push_back(generate_testbench(design, cycles, mix_seed(seed, k)));
  return out;
}

ObservabilityResult check_observability(const Design& golden, const Design& mutant, const std::string& target,
                                        const std::vector<InputVectorSequence>& stimuli) {
  if (stimuli.empty()) throw Error("observability check needs at least one stimulus");
  const Simulator g(golden);
  const Simulator m(mutant);
  ObservabilityResult r;
  for (const auto& stim : stimuli) {
    r.golden_traces.push_back(g.run(stim));
    r.mutant_traces.push_back(m.run(stim));
    r.labels.push_back(classify_trace(r.mutant_traces.back(), r.golden_traces.back(), target));
    r.observable |= r.labels.back() == TraceLabel::Failure;
  }
  return r;
}

}  // namespace attnloc
