#include <algorithm>
#include <array>
#include <charconv>

#include "attnloc/frontend.hpp"

namespace attnloc {

std::string Diagnostic::format() const {
  return std::to_string(line) + ":" + std::to_string(column) + ": error[" + code + "]: " + message;
}

ParseError::ParseError(Diagnostic d) : Error(d.format()), diag_(std::move(d)) {}

namespace {
constexpr std::array<std::string_view, kNodeKindCount> kKindNames = {
    "BlockingAssignment", "NonblockingAssignment", "Lvalue", "Rvalue", "And",
    "Or",                 "Xor",                   "Not",    "Identifier",
};
}  // namespace

std::string_view node_kind_name(NodeKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<NodeKind> node_kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<NodeKind>(i);
  }
  return std::nullopt;
}

AstNode AstNode::identifier(std::string n) {
  AstNode node;
  node.kind = NodeKind::Identifier;
  node.name = std::move(n);
  return node;
}

AstNode AstNode::unary(NodeKind k, AstNode child) {
  AstNode node;
  node.kind = k;
  node.children.push_back(std::move(child));
  return node;
}

AstNode AstNode::binary(NodeKind k, AstNode lhs, AstNode rhs) {
  AstNode node;
  node.kind = k;
  node.children.push_back(std::move(lhs));
  node.children.push_back(std::move(rhs));
  return node;
}

std::string StatementId::str() const { return std::to_string(line) + "." + std::to_string(ordinal); }

std::optional<StatementId> StatementId::parse(std::string_view s) {
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  StatementId id;
  auto r1 = std::from_chars(s.data(), s.data() + dot, id.line);
  auto r2 = std::from_chars(s.data() + dot + 1, s.data() + s.size(), id.ordinal);
  if (r1.ec != std::errc{} || r1.ptr != s.data() + dot) return std::nullopt;
  if (r2.ec != std::errc{} || r2.ptr != s.data() + s.size()) return std::nullopt;
  return id;
}

void collect_leaves(const AstNode& node, std::vector<const AstNode*>& out) {
  if (node.kind == NodeKind::Identifier) {
    out.push_back(&node);
    return;
  }
  for (const auto& c : node.children) collect_leaves(c, out);
}

void Statement::refresh_operands() {
  lhs = ast.children[0].children[0].name;
  std::vector<const AstNode*> leaves;
  collect_leaves(ast.children[1], leaves);
  rhs_operands.clear();
  for (const auto* l : leaves) rhs_operands.push_back(l->name);
}

void GuardExpr::collect_identifiers(std::vector<std::string>& out) const {
  if (op == GuardOp::Ident) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    return;
  }
  for (const auto& c : children) c.collect_identifiers(out);
}

std::vector<std::string> Design::inputs() const {
  std::vector<std::string> r;
  for (const auto& s : signals)
    if (s.role == SignalRole::Input) r.push_back(s.name);
  return r;
}

std::vector<std::string> Design::outputs() const {
  std::vector<std::string> r;
  for (const auto& s : signals)
    if (s.role == SignalRole::Output) r.push_back(s.name);
  return r;
}

std::vector<std::string> Design::variables() const {
  std::vector<std::string> r;
  r.reserve(signals.size());
  for (const auto& s : signals) r.push_back(s.name);
  return r;
}

std::vector<std::string> Design::state_registers() const {
  std::vector<std::string> r;
  for (const auto& st : clocked)
    if (std::find(r.begin(), r.end(), st.lhs) == r.end()) r.push_back(st.lhs);
  return r;
}

const Signal* Design::find_signal(std::string_view n) const {
  for (const auto& s : signals)
    if (s.name == n) return &s;
  return nullptr;
}

std::vector<const Statement*> Design::statements() const {
  std::vector<const Statement*> r;
  for (const auto& s : clocked) r.push_back(&s);
  for (const auto& arm : comb)
    for (const auto& s : arm.body) r.push_back(&s);
  return r;
}

const Statement* Design::find_statement(const StatementId& id) const {
  for (const auto* s : statements())
    if (s->id == id) return s;
  return nullptr;
}

Statement* Design::find_statement(const StatementId& id) {
  return const_cast<Statement*>(static_cast<const Design*>(this)->find_statement(id));
}

std::size_t Design::statement_count() const {
  std::size_t n = clocked.size();
  for (const auto& arm : comb) n += arm.body.size();
  return n;
}

bool structurally_equal(const Statement& a, const Statement& b) {
  return a.ast == b.ast && a.lhs == b.lhs && a.rhs_operands == b.rhs_operands && a.kind == b.kind &&
         a.constant == b.constant;
}

namespace {
bool same_statements(const std::vector<Statement>& a, const std::vector<Statement>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!structurally_equal(a[i], b[i])) return false;
  return true;
}
}  // namespace

bool structurally_equal(const Design& a, const Design& b) {
  if (a.name != b.name || a.ports != b.ports || a.clock != b.clock || a.signals != b.signals) return false;
  if (!same_statements(a.clocked, b.clocked)) return false;
  if (a.comb.size() != b.comb.size()) return false;
  for (std::size_t i = 0; i < a.comb.size(); ++i) {
    if (a.comb[i].guard != b.comb[i].guard) return false;
    if (!same_statements(a.comb[i].body, b.comb[i].body)) return false;
  }
  return true;
}

}  // namespace attnloc
