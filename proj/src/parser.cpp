#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "attnloc/frontend.hpp"

namespace attnloc {
namespace {

enum class Tok { Ident, Number, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

const std::set<std::string, std::less<>> kKeywords = {
    "module", "endmodule", "input", "output", "reg",  "wire",   "always", "posedge",   "negedge", "begin",
    "end",    "if",        "else",  "or",     "assign", "case", "endcase", "parameter", "integer", "localparam",
    "initial", "for",      "while", "function", "task", "generate", "logic", "always_ff", "always_comb",
};

[[noreturn]] void fail(const Token& at, std::string code, std::string message) {
  throw ParseError(Diagnostic{at.line, at.column, std::move(code), std::move(message)});
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      const Token at{Tok::Symbol, "/*", line, col};
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
      if (i + 1 >= src.size()) fail(at, "syntax", "unterminated block comment");
      advance(2);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '$')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '\'') {
        ++j;
        if (j < src.size() && (src[j] == 's' || src[j] == 'S')) ++j;
        while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      }
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    static const char* kTwoChar[] = {"<=", "==", "!=", "&&", "||", "~^", "^~", "~&", "~|", ">=", "<<", ">>"};
    bool matched = false;
    for (const char* sym : kTwoChar) {
      if (src.substr(i, 2) == sym) {
        t.kind = Tok::Symbol;
        t.text = sym;
        advance(2);
        matched = true;
        break;
      }
    }
    if (!matched) {
      static const std::string_view kOneChar = "()[]{};,:@*=!~&|^+-/%<>?#.";
      if (kOneChar.find(c) == std::string_view::npos) {
        fail(t, "syntax", std::string("unexpected character '") + c + "'");
      }
      t.kind = Tok::Symbol;
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

// Returns the bit value of a 1-bit literal or throws a subset violation.
bool literal_bit(const Token& t) {
  const std::string& s = t.text;
  const auto tick = s.find('\'');
  std::string digits;
  int width = 1;
  char base = 'd';
  if (tick == std::string::npos) {
    digits = s;
  } else {
    if (tick > 0) width = std::stoi(s.substr(0, tick));
    std::size_t k = tick + 1;
    if (k < s.size() && (s[k] == 's' || s[k] == 'S')) ++k;
    if (k >= s.size()) fail(t, "syntax", "malformed number literal '" + s + "'");
    base = static_cast<char>(std::tolower(static_cast<unsigned char>(s[k])));
    digits = s.substr(k + 1);
  }
  if (width != 1) fail(t, "subset-violation", "multi-bit signal: literal '" + s + "' is wider than 1 bit");
  if (base != 'b' && base != 'd' && base != 'h' && base != 'o')
    fail(t, "syntax", "malformed number literal '" + s + "'");
  digits.erase(std::remove(digits.begin(), digits.end(), '_'), digits.end());
  if (digits == "0") return false;
  if (digits == "1") return true;
  if (!digits.empty() && (digits.find_first_of("xXzZ?") != std::string::npos))
    fail(t, "subset-violation", "X/Z literal '" + s + "' is not supported");
  fail(t, "subset-violation", "multi-bit signal: literal '" + s + "' does not fit in 1 bit");
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Design parse() {
    Design d;
    expect_kw("module");
    d.name = expect_ident("module name");
    if (accept("#")) fail(peek(), "subset-violation", "module parameters are not supported");
    expect("(");
    if (!check(")")) {
      do {
        if (is_kw(peek(), "input") || is_kw(peek(), "output"))
          fail(peek(), "subset-violation", "ANSI-style port declarations are not supported");
        d.ports.push_back(expect_ident("port name"));
      } while (accept(","));
    }
    expect(")");
    expect(";");

    bool seen_clocked = false;
    bool seen_comb = false;
    while (!is_kw(peek(), "endmodule")) {
      const Token& t = peek();
      if (t.kind == Tok::End) fail(t, "syntax", "expected 'endmodule' before end of input");
      if (is_kw(t, "input") || is_kw(t, "output") || is_kw(t, "reg") || is_kw(t, "wire")) {
        parse_declaration(d);
      } else if (is_kw(t, "always")) {
        parse_always(d, seen_clocked, seen_comb);
      } else if (is_kw(t, "assign")) {
        fail(t, "subset-violation", "continuous assignment ('assign') is not supported");
      } else if (t.kind == Tok::Ident && kKeywords.count(t.text)) {
        fail(t, "subset-violation", "unsupported construct '" + t.text + "'");
      } else {
        fail(t, "syntax", "expected one of: input, output, reg, wire, always, endmodule; got '" + t.text + "'");
      }
    }
    expect_kw("endmodule");
    if (peek().kind != Tok::End) fail(peek(), "subset-violation", "multiple modules are not supported");
    if (!seen_clocked) fail(peek(), "subset-violation", "missing clocked always block (always @(posedge clk))");
    if (!seen_comb) fail(peek(), "subset-violation", "missing combinational always block (always @(*))");
    finish(d);
    return d;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<int, int> per_line_;
  std::string clock_;
  Token clock_tok_;
  std::map<std::string, Token> uses_;    // first use of each identifier
  std::map<std::string, Token> decl_at_;  // declaration position

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  static bool is_kw(const Token& t, std::string_view kw) { return t.kind == Tok::Ident && t.text == kw; }
  bool check(std::string_view sym) const { return peek().kind == Tok::Symbol && peek().text == sym; }
  bool accept(std::string_view sym) {
    if (check(sym)) {
      next();
      return true;
    }
    return false;
  }
  bool accept_kw(std::string_view kw) {
    if (is_kw(peek(), kw)) {
      next();
      return true;
    }
    return false;
  }
  void expect(std::string_view sym) {
    if (!accept(sym)) fail(peek(), "syntax", "expected '" + std::string(sym) + "', got '" + describe(peek()) + "'");
  }
  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) fail(peek(), "syntax", "expected '" + std::string(kw) + "', got '" + describe(peek()) + "'");
  }
  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }
  std::string expect_ident(std::string_view what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text))
      fail(t, "syntax", "expected " + std::string(what) + ", got '" + describe(t) + "'");
    next();
    return t.text;
  }

  void parse_declaration(Design& d) {
    const Token kw = next();
    SignalRole role = SignalRole::Internal;
    bool is_reg = false;
    if (kw.text == "input") {
      role = SignalRole::Input;
      if (accept_kw("reg")) fail(kw, "subset-violation", "input declared as reg");
      accept_kw("wire");
    } else if (kw.text == "output") {
      role = SignalRole::Output;
      if (accept_kw("reg")) {
        is_reg = true;
      } else {
        accept_kw("wire");
      }
    } else {
      is_reg = kw.text == "reg";
    }
    if (accept_kw("signed")) fail(kw, "subset-violation", "signed signals are not supported");
    if (check("[")) fail(peek(), "subset-violation", "multi-bit signal: range declarations are not supported");
    do {
      const Token at = peek();
      const std::string name = expect_ident("signal name");
      if (check("[")) fail(peek(), "subset-violation", "multi-bit signal: arrays are not supported");
      declare(d, at, name, role, is_reg, kw.text);
    } while (accept(","));
    expect(";");
  }

  void declare(Design& d, const Token& at, const std::string& name, SignalRole role, bool is_reg,
               const std::string& keyword) {
    for (auto& s : d.signals) {
      if (s.name != name) continue;
      // `output y; reg y;` is the one legal redeclaration.
      if (s.role == SignalRole::Output && !s.is_reg && keyword == "reg") {
        s.is_reg = true;
        return;
      }
      fail(at, "declaration", "identifier '" + name + "' declared more than once");
    }
    d.signals.push_back(Signal{name, role, is_reg});
    decl_at_.emplace(name, at);
  }

  void parse_always(Design& d, bool& seen_clocked, bool& seen_comb) {
    const Token always = next();
    expect("@");
    bool clocked = false;
    if (accept("*")) {
    } else {
      expect("(");
      if (accept("*")) {
      } else if (is_kw(peek(), "posedge")) {
        next();
        const Token ct = peek();
        const std::string clk = expect_ident("clock signal");
        if (check(",") || is_kw(peek(), "or"))
          fail(peek(), "subset-violation", "multiple clocks or asynchronous resets are not supported");
        if (!clock_.empty() && clock_ != clk) fail(ct, "subset-violation", "multi-clock designs are not supported");
        clock_ = clk;
        clock_tok_ = ct;
        clocked = true;
      } else if (is_kw(peek(), "negedge")) {
        fail(peek(), "subset-violation", "negedge clocking is not supported");
      } else {
        do {
          if (is_kw(peek(), "posedge") || is_kw(peek(), "negedge"))
            fail(peek(), "subset-violation", "mixed edge/level sensitivity list");
          const Token at = peek();
          note_use(at, expect_ident("signal in sensitivity list"));
        } while (accept(",") || accept_kw("or"));
      }
      expect(")");
    }
    if (clocked) {
      if (seen_clocked) fail(always, "subset-violation", "multiple always blocks: only one clocked block is allowed");
      seen_clocked = true;
      parse_clocked_body(d);
    } else {
      if (seen_comb)
        fail(always, "subset-violation", "multiple always blocks: only one combinational block is allowed");
      seen_comb = true;
      parse_comb_body(d);
    }
  }

  void parse_clocked_body(Design& d) {
    if (accept_kw("begin")) {
      while (!accept_kw("end")) {
        if (peek().kind == Tok::End) fail(peek(), "syntax", "expected 'end'");
        d.clocked.push_back(parse_assignment(AssignKind::Nonblocking));
      }
    } else {
      d.clocked.push_back(parse_assignment(AssignKind::Nonblocking));
    }
  }

  void parse_comb_body(Design& d) {
    if (!accept_kw("begin")) {
      if (is_kw(peek(), "if")) {
        parse_if_chain(d);
      } else {
        Arm arm;
        arm.line = peek().line;
        arm.body.push_back(parse_assignment(AssignKind::Blocking));
        d.comb.push_back(std::move(arm));
      }
      return;
    }
    if (accept_kw("end")) return;
    if (is_kw(peek(), "if")) {
      parse_if_chain(d);
      if (!is_kw(peek(), "end"))
        fail(peek(), "subset-violation", "statements outside the if/else-if chain of the combinational block");
      next();
      return;
    }
    Arm arm;
    arm.line = peek().line;
    while (!accept_kw("end")) {
      if (peek().kind == Tok::End) fail(peek(), "syntax", "expected 'end'");
      if (is_kw(peek(), "if"))
        fail(peek(), "subset-violation", "statements outside the if/else-if chain of the combinational block");
      arm.body.push_back(parse_assignment(AssignKind::Blocking));
    }
    d.comb.push_back(std::move(arm));
  }

  void parse_if_chain(Design& d) {
    for (;;) {
      Arm arm;
      arm.line = peek().line;
      expect_kw("if");
      expect("(");
      arm.guard = parse_guard();
      expect(")");
      parse_arm_body(arm);
      d.comb.push_back(std::move(arm));
      if (!accept_kw("else")) return;
      if (is_kw(peek(), "if")) continue;
      Arm last;
      last.line = peek().line;
      parse_arm_body(last);
      d.comb.push_back(std::move(last));
      return;
    }
  }

  void parse_arm_body(Arm& arm) {
    if (accept_kw("begin")) {
      while (!accept_kw("end")) {
        if (peek().kind == Tok::End) fail(peek(), "syntax", "expected 'end'");
        if (is_kw(peek(), "if")) fail(peek(), "subset-violation", "nested if statements are not supported");
        arm.body.push_back(parse_assignment(AssignKind::Blocking));
      }
      return;
    }
    if (is_kw(peek(), "if")) fail(peek(), "subset-violation", "nested if statements are not supported");
    arm.body.push_back(parse_assignment(AssignKind::Blocking));
  }

  void note_use(const Token& at, const std::string& name) { uses_.emplace(name, at); }

  Statement parse_assignment(AssignKind kind) {
    const Token start = peek();
    if (is_kw(start, "case")) fail(start, "subset-violation", "case statements are not supported");
    if (start.kind == Tok::Ident && kKeywords.count(start.text))
      fail(start, "subset-violation", "unsupported construct '" + start.text + "'");
    const std::string lhs = expect_ident("assignment target");
    note_use(start, lhs);
    if (check("[")) fail(peek(), "subset-violation", "multi-bit signal: bit/part selects are not supported");
    const Token op = peek();
    if (kind == AssignKind::Nonblocking) {
      if (check("=")) fail(op, "subset-violation", "blocking assignment in the clocked block");
      expect("<=");
    } else {
      if (check("<=")) fail(op, "subset-violation", "nonblocking assignment in the combinational block");
      expect("=");
    }
    Statement s;
    s.kind = kind;
    s.id = StatementId{start.line, per_line_[start.line]++};
    AstNode rvalue;
    rvalue.kind = NodeKind::Rvalue;
    if (peek().kind == Tok::Number && peek(1).kind == Tok::Symbol && peek(1).text == ";") {
      s.constant = literal_bit(next());
    } else {
      rvalue.children.push_back(parse_expr());
    }
    expect(";");
    AstNode root;
    root.kind = kind == AssignKind::Blocking ? NodeKind::BlockingAssignment : NodeKind::NonblockingAssignment;
    root.children.push_back(AstNode::unary(NodeKind::Lvalue, AstNode::identifier(lhs)));
    root.children.push_back(std::move(rvalue));
    s.ast = std::move(root);
    s.refresh_operands();
    lhs_tokens_.emplace_back(start, kind);
    return s;
  }

  std::vector<std::pair<Token, AssignKind>> lhs_tokens_;

  [[noreturn]] void unsupported_operator(const Token& t) {
    fail(t, "subset-violation", "unsupported operator '" + t.text + "' (allowed: & | ^ ~)");
  }

  void reject_foreign_operator() {
    const Token& t = peek();
    if (t.kind != Tok::Symbol) return;
    static const std::set<std::string, std::less<>> kForeign = {"+", "-", "*", "/", "%", "<<", ">>", "&&", "||",
                                                                "==", "!=", "!", "~^", "^~", "~&", "~|", "?",
                                                                ">", "<", ">=", "{", "}"};
    if (kForeign.count(t.text)) unsupported_operator(t);
  }

  AstNode parse_expr() {
    AstNode lhs = parse_xor();
    while (check("|")) {
      next();
      lhs = AstNode::binary(NodeKind::Or, std::move(lhs), parse_xor());
    }
    reject_foreign_operator();
    return lhs;
  }

  AstNode parse_xor() {
    AstNode lhs = parse_and();
    while (check("^")) {
      next();
      lhs = AstNode::binary(NodeKind::Xor, std::move(lhs), parse_and());
    }
    return lhs;
  }

  AstNode parse_and() {
    AstNode lhs = parse_unary();
    while (check("&")) {
      next();
      lhs = AstNode::binary(NodeKind::And, std::move(lhs), parse_unary());
    }
    return lhs;
  }

  AstNode parse_unary() {
    const Token& t = peek();
    if (t.kind == Tok::Symbol) {
      if (t.text == "~") {
        next();
        return AstNode::unary(NodeKind::Not, parse_unary());
      }
      if (t.text == "(") {
        next();
        AstNode inner = parse_expr();
        expect(")");
        return inner;
      }
      if (t.text == "!" || t.text == "-" || t.text == "~&" || t.text == "~|" || t.text == "~^" || t.text == "&" ||
          t.text == "|" || t.text == "^" || t.text == "{")
        unsupported_operator(t);
      fail(t, "syntax", "expected one of: identifier, '~', '('; got '" + t.text + "'");
    }
    if (t.kind == Tok::Number) {
      literal_bit(t);
      fail(t, "subset-violation", "constant operand inside an expression is not supported");
    }
    if (t.kind == Tok::Ident && !kKeywords.count(t.text)) {
      next();
      note_use(t, t.text);
      if (check("[")) fail(peek(), "subset-violation", "multi-bit signal: bit/part selects are not supported");
      return AstNode::identifier(t.text);
    }
    fail(t, "syntax", "expected one of: identifier, '~', '('; got '" + describe(t) + "'");
  }

  // Guards.
  GuardExpr gbin(GuardOp op, GuardExpr a, GuardExpr b) {
    GuardExpr g;
    g.op = op;
    g.children.push_back(std::move(a));
    g.children.push_back(std::move(b));
    return g;
  }

  GuardExpr parse_guard() {
    GuardExpr lhs = parse_gland();
    while (accept("||")) lhs = gbin(GuardOp::LogicalOr, std::move(lhs), parse_gland());
    return lhs;
  }
  GuardExpr parse_gland() {
    GuardExpr lhs = parse_gbor();
    while (accept("&&")) lhs = gbin(GuardOp::LogicalAnd, std::move(lhs), parse_gbor());
    return lhs;
  }
  GuardExpr parse_gbor() {
    GuardExpr lhs = parse_gbxor();
    while (accept("|")) lhs = gbin(GuardOp::BitOr, std::move(lhs), parse_gbxor());
    return lhs;
  }
  GuardExpr parse_gbxor() {
    GuardExpr lhs = parse_gband();
    while (accept("^")) lhs = gbin(GuardOp::BitXor, std::move(lhs), parse_gband());
    return lhs;
  }
  GuardExpr parse_gband() {
    GuardExpr lhs = parse_geq();
    while (accept("&")) lhs = gbin(GuardOp::BitAnd, std::move(lhs), parse_geq());
    return lhs;
  }
  GuardExpr parse_geq() {
    GuardExpr lhs = parse_gunary();
    for (;;) {
      if (accept("==")) {
        lhs = gbin(GuardOp::Eq, std::move(lhs), parse_gunary());
      } else if (accept("!=")) {
        lhs = gbin(GuardOp::Neq, std::move(lhs), parse_gunary());
      } else {
        break;
      }
    }
    const Token& t = peek();
    if (t.kind == Tok::Symbol && (t.text == "+" || t.text == "-" || t.text == "<" || t.text == ">" ||
                                  t.text == ">=" || t.text == "?" || t.text == "*"))
      unsupported_operator(t);
    return lhs;
  }
  GuardExpr parse_gunary() {
    const Token& t = peek();
    if (accept("~")) {
      GuardExpr g;
      g.op = GuardOp::BitNot;
      g.children.push_back(parse_gunary());
      return g;
    }
    if (accept("!")) {
      GuardExpr g;
      g.op = GuardOp::LogicalNot;
      g.children.push_back(parse_gunary());
      return g;
    }
    if (accept("(")) {
      GuardExpr inner = parse_guard();
      expect(")");
      return inner;
    }
    if (t.kind == Tok::Number) {
      GuardExpr g;
      g.op = GuardOp::Const;
      g.value = literal_bit(t);
      next();
      return g;
    }
    if (t.kind == Tok::Ident && !kKeywords.count(t.text)) {
      next();
      note_use(t, t.text);
      if (check("[")) fail(peek(), "subset-violation", "multi-bit signal: bit/part selects are not supported");
      GuardExpr g;
      g.op = GuardOp::Ident;
      g.name = t.text;
      return g;
    }
    if (t.kind == Tok::Symbol && t.text != ")") unsupported_operator(t);
    fail(t, "syntax", "expected one of: identifier, constant, '!', '~', '('; got '" + describe(t) + "'");
  }

  void finish(Design& d) {
    // Clock: must be a declared input; it leaves the signal list.
    if (!clock_.empty()) {
      auto it = std::find_if(d.signals.begin(), d.signals.end(), [&](const Signal& s) { return s.name == clock_; });
      if (it == d.signals.end()) fail(clock_tok_, "declaration", "undeclared clock '" + clock_ + "'");
      if (it->role != SignalRole::Input) fail(clock_tok_, "declaration", "clock '" + clock_ + "' must be an input");
      d.signals.erase(it);
      d.clock = clock_;
    }
    for (const auto& [name, at] : uses_) {
      if (name == d.clock) fail(at, "subset-violation", "clock '" + name + "' used as a data signal");
      if (!d.find_signal(name)) fail(at, "declaration", "undeclared identifier '" + name + "'");
    }
    for (const auto& p : d.ports) {
      const Signal* s = d.find_signal(p);
      if (p == d.clock) continue;
      if (!s || s->role == SignalRole::Internal)
        fail(toks_.front(), "declaration", "port '" + p + "' lacks an input/output declaration");
    }
    for (const auto& s : d.signals) {
      if (s.role != SignalRole::Internal && std::find(d.ports.begin(), d.ports.end(), s.name) == d.ports.end())
        fail(decl_at_[s.name], "declaration", "'" + s.name + "' is declared input/output but is not a port");
    }
    std::set<std::string> clocked_lhs;
    std::set<std::string> comb_lhs;
    for (const auto& [at, kind] : lhs_tokens_) {
      const Signal* s = d.find_signal(at.text);
      if (!s) continue;
      if (s->role == SignalRole::Input) fail(at, "declaration", "assignment to input '" + at.text + "'");
      if (!s->is_reg) fail(at, "declaration", "procedural assignment to non-reg '" + at.text + "'");
      (kind == AssignKind::Nonblocking ? clocked_lhs : comb_lhs).insert(at.text);
    }
    for (const auto& [at, kind] : lhs_tokens_) {
      if (clocked_lhs.count(at.text) && comb_lhs.count(at.text))
        fail(at, "subset-violation", "'" + at.text + "' is driven from both always blocks");
    }
  }
};

}  // namespace

Design parse_design(std::string_view source) { return Parser(source).parse(); }

}  // namespace attnloc
