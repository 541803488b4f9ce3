#include <sstream>

#include "attnloc/frontend.hpp"

namespace attnloc {
namespace {

int expr_precedence(const AstNode& n) {
  switch (n.kind) {
    case NodeKind::Or: return 1;
    case NodeKind::Xor: return 2;
    case NodeKind::And: return 3;
    case NodeKind::Not: return 4;
    default: return 5;
  }
}

struct ExprSink {
  std::ostream& os;
  const ExpressionDecorator* decorate = nullptr;
  int next_leaf = 0;

  void text(std::string_view t) {
    if (decorate) {
      os << decorate->text(t);
    } else {
      os << t;
    }
  }
  void leaf(const std::string& name) {
    const int index = next_leaf++;
    if (decorate) {
      os << decorate->operand(index, name);
    } else {
      os << name;
    }
  }
};

void print_expr(const AstNode& n, ExprSink& out) {
  switch (n.kind) {
    case NodeKind::Identifier:
      out.leaf(n.name);
      return;
    case NodeKind::Not: {
      const AstNode& c = n.children[0];
      out.text("~");
      if (expr_precedence(c) < expr_precedence(n)) {
        out.text("(");
        print_expr(c, out);
        out.text(")");
      } else {
        print_expr(c, out);
      }
      return;
    }
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Xor: {
      const int p = expr_precedence(n);
      const AstNode& l = n.children[0];
      const AstNode& r = n.children[1];
      // Left-associative grammar: a right operand of equal precedence needs
      // parentheses to keep the tree shape on re-parse.
      const bool lp = expr_precedence(l) < p;
      const bool rp = expr_precedence(r) <= p;
      if (lp) out.text("(");
      print_expr(l, out);
      if (lp) out.text(")");
      out.text(n.kind == NodeKind::And ? " & " : n.kind == NodeKind::Or ? " | " : " ^ ");
      if (rp) out.text("(");
      print_expr(r, out);
      if (rp) out.text(")");
      return;
    }
    default:
      for (const auto& c : n.children) print_expr(c, out);
  }
}

int guard_precedence(const GuardExpr& g) {
  switch (g.op) {
    case GuardOp::LogicalOr: return 1;
    case GuardOp::LogicalAnd: return 2;
    case GuardOp::BitOr: return 3;
    case GuardOp::BitXor: return 4;
    case GuardOp::BitAnd: return 5;
    case GuardOp::Eq:
    case GuardOp::Neq: return 6;
    case GuardOp::BitNot:
    case GuardOp::LogicalNot: return 7;
    default: return 8;
  }
}

void print_guard_to(const GuardExpr& g, std::ostream& os) {
  switch (g.op) {
    case GuardOp::Const:
      os << (g.value ? "1'b1" : "1'b0");
      return;
    case GuardOp::Ident:
      os << g.name;
      return;
    case GuardOp::BitNot:
    case GuardOp::LogicalNot: {
      os << (g.op == GuardOp::BitNot ? '~' : '!');
      const bool p = guard_precedence(g.children[0]) < guard_precedence(g);
      if (p) os << '(';
      print_guard_to(g.children[0], os);
      if (p) os << ')';
      return;
    }
    default: {
      const int p = guard_precedence(g);
      const bool lp = guard_precedence(g.children[0]) < p;
      const bool rp = guard_precedence(g.children[1]) <= p;
      if (lp) os << '(';
      print_guard_to(g.children[0], os);
      if (lp) os << ')';
      switch (g.op) {
        case GuardOp::LogicalOr: os << " || "; break;
        case GuardOp::LogicalAnd: os << " && "; break;
        case GuardOp::BitOr: os << " | "; break;
        case GuardOp::BitXor: os << " ^ "; break;
        case GuardOp::BitAnd: os << " & "; break;
        case GuardOp::Eq: os << " == "; break;
        case GuardOp::Neq: os << " != "; break;
        default: break;
      }
      if (rp) os << '(';
      print_guard_to(g.children[1], os);
      if (rp) os << ')';
    }
  }
}

}  // namespace

std::string print_expression(const AstNode& expr) {
  std::ostringstream os;
  ExprSink sink{os};
  print_expr(expr, sink);
  return os.str();
}

std::string print_guard(const GuardExpr& g) {
  std::ostringstream os;
  print_guard_to(g, os);
  return os.str();
}

std::string print_statement(const Statement& s) {
  std::string out = s.lhs + (s.kind == AssignKind::Blocking ? " = " : " <= ");
  if (s.constant) {
    out += *s.constant ? "1'b1" : "1'b0";
  } else {
    out += print_expression(s.rvalue().children[0]);
  }
  out += ';';
  return out;
}

std::string print_statement(const Statement& s, const ExpressionDecorator& decorate) {
  std::ostringstream os;
  ExprSink sink{os, &decorate};
  sink.text(s.lhs + (s.kind == AssignKind::Blocking ? " = " : " <= "));
  if (s.constant) {
    sink.text(*s.constant ? "1'b1" : "1'b0");
  } else {
    print_expr(s.rvalue().children[0], sink);
  }
  sink.text(";");
  return os.str();
}

std::string pretty_print(const Design& d) {
  std::ostringstream os;
  os << "module " << d.name << '(';
  for (std::size_t i = 0; i < d.ports.size(); ++i) os << (i ? ", " : "") << d.ports[i];
  os << ");\n";
  if (!d.clock.empty()) os << "  input " << d.clock << ";\n";
  for (const auto& s : d.signals) {
    switch (s.role) {
      case SignalRole::Input: os << "  input " << s.name << ";\n"; break;
      case SignalRole::Output: os << (s.is_reg ? "  output reg " : "  output ") << s.name << ";\n"; break;
      case SignalRole::Internal: os << (s.is_reg ? "  reg " : "  wire ") << s.name << ";\n"; break;
    }
  }
  os << "\n  always @(posedge " << d.clock << ") begin\n";
  for (const auto& s : d.clocked) os << "    " << print_statement(s) << '\n';
  os << "  end\n\n  always @(*) begin\n";
  const bool flat = d.comb.size() == 1 && !d.comb[0].guard;
  if (flat) {
    for (const auto& s : d.comb[0].body) os << "    " << print_statement(s) << '\n';
  } else {
    for (std::size_t i = 0; i < d.comb.size(); ++i) {
      const Arm& arm = d.comb[i];
      os << (i == 0 ? "    " : " else ");
      if (arm.guard) os << "if (" << print_guard(*arm.guard) << ") ";
      os << "begin\n";
      for (const auto& s : arm.body) os << "      " << print_statement(s) << '\n';
      os << "    end";
    }
    if (!d.comb.empty()) os << '\n';
  }
  os << "  end\nendmodule\n";
  return os.str();
}

}  // namespace attnloc
