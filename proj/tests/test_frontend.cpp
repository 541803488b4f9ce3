#include <doctest.h>

#include "attnloc/frontend.hpp"
#include "support/oracles.hpp"

using namespace attnloc;

namespace {

const Statement& stmt_with_lhs(const Design& d, const std::string& lhs, int nth = 0) {
  for (const Statement* s : d.statements())
    if (s->lhs == lhs && nth-- == 0) return *s;
  FAIL("no statement assigns " << lhs);
  throw 0;
}

std::string diag_code(std::string_view src) {
  try {
    parse_design(src);
  } catch (const ParseError& e) {
    return e.diagnostic().code + ": " + e.diagnostic().message;
  }
  return "";
}

const char* kEmpty = R"(module empty(clk, a, y);
  input clk;
  input a;
  output reg y;
  always @(posedge clk) begin
  end
  always @(*) begin
  end
endmodule
)";

int count_leaves(const AstNode& n) {
  if (n.kind == NodeKind::Identifier) return 1;
  int c = 0;
  for (const auto& ch : n.children) c += count_leaves(ch);
  return c;
}

void collect_names(const AstNode& n, std::vector<std::string>& out) {
  if (n.kind == NodeKind::Identifier) out.push_back(n.name);
  for (const auto& ch : n.children) collect_names(ch, out);
}

}  // namespace

TEST_CASE("arbiter statement parses into the expected tree") {
  const Design d = parse_design(oracle::kArbiter);
  const Statement& s = stmt_with_lhs(d, "gnt1");
  CHECK(s.kind == AssignKind::Blocking);
  const AstNode expected = AstNode::binary(
      NodeKind::BlockingAssignment, AstNode::unary(NodeKind::Lvalue, AstNode::identifier("gnt1")),
      AstNode::unary(NodeKind::Rvalue,
                     AstNode::binary(NodeKind::And, AstNode::identifier("req1"),
                                     AstNode::unary(NodeKind::Not, AstNode::identifier("req2")))));
  CHECK(s.ast == expected);
  CHECK(s.rhs_operands == std::vector<std::string>{"req1", "req2"});
  CHECK(s.leaf_count() == 3);
  CHECK(s.id.str() == "15.0");
  CHECK(print_statement(s) == "gnt1 = req1 & ~req2;");
}

TEST_CASE("design with empty blocks has no statements") {
  const Design d = parse_design(kEmpty);
  CHECK(d.statement_count() == 0);
  CHECK(d.statements().empty());
  const Design again = parse_design(pretty_print(d));
  CHECK(structurally_equal(d, again));
  CHECK(again.statement_count() == 0);
}

TEST_CASE("subset violations are reported with a code") {
  std::string src = oracle::kArbiter;
  src.replace(src.find("reg state;"), 10, "reg [3:0] state;");
  const auto msg = diag_code(src);
  CHECK(msg.find("subset-violation") == 0);
  CHECK(msg.find("multi-bit signal") != std::string::npos);

  std::string nested = oracle::kArbiter;
  nested.replace(nested.find("gnt2 = req2;"), 12, "if (req1) gnt2 = req2;");
  CHECK(diag_code(nested).find("subset-violation") == 0);

  CHECK(diag_code("module m(clk; endmodule").find("syntax") == 0);
  CHECK_THROWS_AS(parse_design(""), ParseError);
}

TEST_CASE("statement ids are line and ordinal") {
  const char* src = R"(module two(clk, a, b, y);
  input clk;
  input a;
  input b;
  output reg y;
  reg t;
  always @(posedge clk) begin
  end
  always @(*) begin
    t = a & b; y = t ^ a;
  end
endmodule
)";
  const Design d = parse_design(src);
  REQUIRE(d.statement_count() == 2);
  CHECK(d.statements()[0]->id == StatementId{10, 0});
  CHECK(d.statements()[1]->id == StatementId{10, 1});
  CHECK(StatementId::parse("10.1") == StatementId{10, 1});
  CHECK_FALSE(StatementId::parse("10").has_value());
  CHECK_FALSE(StatementId::parse("a.b").has_value());
  // Same text, same ids.
  const Design e = parse_design(src);
  for (std::size_t i = 0; i < d.statement_count(); ++i) CHECK(d.statements()[i]->id == e.statements()[i]->id);
}

TEST_CASE("repeated operands are separate occurrences in source order") {
  const char* src = R"(module dup(clk, x, z, y);
  input clk;
  input x;
  input z;
  output reg y;
  always @(posedge clk) begin
  end
  always @(*) begin
    y = (x & z) ^ (~x | x);
  end
endmodule
)";
  const Design d = parse_design(src);
  const Statement& s = *d.statements()[0];
  CHECK(s.rhs_operands == std::vector<std::string>{"x", "z", "x", "x"});
}

TEST_CASE("round trip over random synthetic designs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::string src = generate_design(sample_config(seed));
    const Design d = parse_design(src);
    const Design r = parse_design(pretty_print(d));
    INFO("seed " << seed);
    CHECK(structurally_equal(d, r));
    CHECK(pretty_print(r) == pretty_print(d));
    for (const Statement* s : d.statements()) {
      CHECK(static_cast<int>(s->leaf_count()) == count_leaves(s->ast));
      std::vector<std::string> names;
      collect_names(s->rvalue(), names);
      CHECK(names == s->rhs_operands);
    }
  }
}

TEST_CASE("comments and whitespace do not change structure") {
  std::string src = oracle::kArbiter;
  src.insert(src.find("  always @(*)"), "  // combinational part\n  /* grants */\n");
  CHECK(structurally_equal(parse_design(src), parse_design(oracle::kArbiter)));
}

TEST_CASE("node kind names round trip") {
  for (int k = 0; k < kNodeKindCount; ++k) {
    const auto kind = static_cast<NodeKind>(k);
    CHECK(node_kind_from_name(node_kind_name(kind)) == kind);
  }
  CHECK_FALSE(node_kind_from_name("Plus").has_value());
}
