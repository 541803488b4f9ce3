#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attnloc/error.hpp"

namespace attnloc {

// Fixed node-kind vocabulary of statement ASTs.
enum class NodeKind : std::uint8_t {
  BlockingAssignment,
  NonblockingAssignment,
  Lvalue,
  Rvalue,
  And,
  Or,
  Xor,
  Not,
  Identifier,
};

inline constexpr int kNodeKindCount = 9;

std::string_view node_kind_name(NodeKind k);
std::optional<NodeKind> node_kind_from_name(std::string_view name);

struct AstNode {
  NodeKind kind = NodeKind::Identifier;
  std::vector<AstNode> children;
  std::string name;  // Identifier only

  static AstNode identifier(std::string n);
  static AstNode unary(NodeKind k, AstNode child);
  static AstNode binary(NodeKind k, AstNode lhs, AstNode rhs);

  bool operator==(const AstNode&) const = default;
};

struct StatementId {
  int line = 0;
  int ordinal = 0;  // index among statements starting on the same line

  auto operator<=>(const StatementId&) const = default;
  std::string str() const;  // "line.ordinal"
  static std::optional<StatementId> parse(std::string_view s);
};

enum class AssignKind : std::uint8_t { Blocking, Nonblocking };

struct Statement {
  StatementId id;
  AstNode ast;  // root: assignment kind with children [Lvalue, Rvalue]
  std::string lhs;
  // Left-to-right Identifier leaves under the Rvalue subtree, one entry per
  // occurrence.
  std::vector<std::string> rhs_operands;
  AssignKind kind = AssignKind::Blocking;
  // Set for `x = 1'b0;` style assignments; the Rvalue then has no children.
  std::optional<bool> constant;

  const AstNode& rvalue() const { return ast.children[1]; }
  // |L(l_k)|: the LHS leaf plus every RHS occurrence.
  std::size_t leaf_count() const { return rhs_operands.size() + 1; }

  // Rebuilds lhs/rhs_operands from the AST after an in-place edit.
  void refresh_operands();
};

// Guard expressions live outside the statement vocabulary.
enum class GuardOp : std::uint8_t {
  Const,
  Ident,
  BitNot,      // ~
  LogicalNot,  // !
  BitAnd,
  BitOr,
  BitXor,
  Eq,
  Neq,
  LogicalAnd,
  LogicalOr,
};

struct GuardExpr {
  GuardOp op = GuardOp::Const;
  bool value = false;  // Const
  std::string name;    // Ident
  std::vector<GuardExpr> children;

  bool operator==(const GuardExpr&) const = default;
  void collect_identifiers(std::vector<std::string>& out) const;
};

struct Arm {
  std::optional<GuardExpr> guard;  // nullopt: final else or unconditional list
  std::vector<Statement> body;
  int line = 0;
};

enum class SignalRole : std::uint8_t { Input, Output, Internal };

struct Signal {
  std::string name;
  SignalRole role = SignalRole::Internal;
  bool is_reg = false;
  bool operator==(const Signal&) const = default;
};

struct Design {
  std::string name;
  std::vector<std::string> ports;
  std::string clock;
  std::vector<Signal> signals;  // declaration order, clock excluded
  std::vector<Statement> clocked;
  std::vector<Arm> comb;  // if / else-if / else chain

  std::vector<std::string> inputs() const;
  std::vector<std::string> outputs() const;
  // Every design variable (inputs, outputs, internals); clock excluded.
  std::vector<std::string> variables() const;
  // Registers assigned in the clocked block.
  std::vector<std::string> state_registers() const;
  const Signal* find_signal(std::string_view n) const;

  // All statements: clocked block first, then comb arms in order.
  std::vector<const Statement*> statements() const;
  const Statement* find_statement(const StatementId& id) const;
  Statement* find_statement(const StatementId& id);
  std::size_t statement_count() const;
};

Design parse_design(std::string_view source);
std::string pretty_print(const Design& design);

std::string print_expression(const AstNode& expr);
std::string print_statement(const Statement& s);
std::string print_guard(const GuardExpr& g);

// Hooks for annotated rendering; operand indices count RHS occurrences
// left to right.
struct ExpressionDecorator {
  virtual ~ExpressionDecorator() = default;
  virtual std::string operand(int index, const std::string& name) const = 0;
  virtual std::string text(std::string_view t) const { return std::string(t); }
};
std::string print_statement(const Statement& s, const ExpressionDecorator& decorate);

// Structural identity: everything except source positions.
bool structurally_equal(const Statement& a, const Statement& b);
bool structurally_equal(const Design& a, const Design& b);

// Ordered Identifier leaves of a subtree.
void collect_leaves(const AstNode& node, std::vector<const AstNode*>& out);

}  // namespace attnloc
