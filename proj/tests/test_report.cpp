#include <doctest.h>

#include <regex>

#include "attnloc/campaign.hpp"
#include "attnloc/report.hpp"
#include "support/oracles.hpp"

using namespace attnloc;

namespace {

const char* kTwoArms = R"(module two(clk, sel, a, b, y);
  input clk;
  input sel;
  input a;
  input b;
  output reg y;
  always @(posedge clk) begin
  end
  always @(*) begin
    if (sel == 1'b1) begin
      y = a ^ b;
    end else begin
      y = a | b;
    end
  end
endmodule
)";

std::string mutated_source() {
  std::string s = kTwoArms;
  s.replace(s.find("y = a ^ b;"), 10, "y = ~a ^ b;");
  return s;
}

struct Fixture {
  Design golden = parse_design(kTwoArms);
  std::string source = mutated_source();
  Design mutant = parse_design(source);
  Localization loc = localize(golden, mutant, "y", ModelParams::initialize(ModelDims{}, 5), LocalizeConfig{});
  std::string json = localization_to_json(loc, mutant);
};

// Minimal tag-balance check: every element closes in order; void tags end in "/>".
bool well_formed(const std::string& html) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = html.find('<', i)) != std::string::npos) {
    const std::size_t end = html.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = html.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.starts_with("!")) continue;
    if (tag.ends_with("/")) continue;
    if (tag.starts_with("/")) {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    stack.push_back(tag.substr(0, tag.find(' ')));
  }
  // No raw '&' outside entities.
  for (std::size_t k = html.find('&'); k != std::string::npos; k = html.find('&', k + 1)) {
    const std::size_t semi = html.find(';', k);
    if (semi == std::string::npos || semi - k > 6) return false;
  }
  return stack.empty();
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t k = s.find(needle); k != std::string::npos; k = s.find(needle, k + 1)) ++n;
  return n;
}

CampaignRecord rec(const std::string& design, MutationKind kind, bool observable, std::optional<int> rank,
                   int heat) {
  CampaignRecord r;
  r.mutant_id = design + "_" + std::string(mutation_kind_name(kind));
  r.design = design;
  r.target = "y";
  r.mutation = Mutation{kind, {3, 0}, 0, "a", "~a"};
  r.observable = observable;
  r.rank = rank;
  r.localized = observable && rank == 1;
  r.heatmap_size = heat;
  return r;
}

}  // namespace

TEST_CASE("color bins") {
  CHECK(color_bin(1.0) == 4);
  CHECK(color_bin(0.0) == 0);
  CHECK(color_bin(0.19999) == 0);
  CHECK(color_bin(0.2) == 1);
  CHECK(color_bin(0.79) == 3);
  CHECK(color_bin(0.8) == 4);
}

TEST_CASE("html report structure") {
  Fixture f;
  REQUIRE_FALSE(f.loc.ranking.empty());
  const auto html = render_html(f.loc, f.source, f.json);
  CHECK(well_formed(html));
  std::size_t expected = 0;
  for (const auto& r : f.loc.ranking) expected += f.mutant.find_statement(r.id)->rhs_operands.size();
  CHECK(count(html, "class=\"op h") == expected);
  CHECK(html.find(generated_from(f.json)) != std::string::npos);
  CHECK(html.find("11.0 rank 1 score 1.000") != std::string::npos);
  CHECK(render_html(f.loc, f.source, f.json) == html);
}

TEST_CASE("empty heatmap message") {
  Fixture f;
  f.loc.ranking.clear();
  const auto html = render_html(f.loc, f.source, f.json);
  CHECK(html.find("no suspicious statements above threshold 0.10") != std::string::npos);
  CHECK(well_formed(html));
  CHECK(render_ansi(f.loc, f.source, f.json).find("no suspicious statements above threshold 0.10") !=
        std::string::npos);
}

TEST_CASE("ansi report") {
  Fixture f;
  f.loc.ranking[0].entry.f_weights = {1.0, 0.0};
  const auto text = render_ansi(f.loc, f.source, f.json);
  CHECK(text.find("\x1b[97;48;5;196ma\x1b[0m") != std::string::npos);  // deepest red
  CHECK(text.find("\x1b[30;48;5;224mb\x1b[0m") != std::string::npos);   // lightest red
  CHECK(text.find("<- #1 score 1.000") != std::string::npos);
  const std::regex strip("\x1b\\[[0-9;]*m");
  const auto plain = std::regex_replace(text, strip, "");
  CHECK(plain.find("y = ~a ^ b;") != std::string::npos);
}

TEST_CASE("dangling statement id") {
  Fixture f;
  f.loc.ranking[0].id = StatementId{42, 0};
  CHECK_THROWS_AS(render_html(f.loc, f.source, f.json), Error);
  CHECK_THROWS_AS(render_ansi(f.loc, f.source, f.json), Error);
  Fixture g;
  g.loc.ranking[0].entry.f_weights.push_back(0.0);
  CHECK_THROWS_AS(render_html(g.loc, g.source, g.json), Error);
}

TEST_CASE("coverage formatting") {
  CoverageRow row;
  row.observable = 103;
  row.localized = 85;
  CHECK(format_coverage(row.coverage()) == "82.5%");
  row.observable = 0;
  row.localized = 0;
  CHECK(format_coverage(row.coverage()) == "n/a");
  CHECK_THROWS_AS(compute_coverage({}), Error);
}

TEST_CASE("coverage against a hand tally") {
  using K = MutationKind;
  const std::vector<CampaignRecord> records = {
      rec("d1", K::Negation, true, 1, 2),
      rec("d1", K::OperationSubstitution, true, 2, 4),
      rec("d1", K::VariableMisuse, false, std::nullopt, 0),
      rec("d2", K::Negation, true, 1, 1),
      rec("d2", K::OperationSubstitution, true, std::nullopt, 5),
      rec("d2", K::VariableMisuse, true, 1, 2),
      rec("d3", K::Negation, false, std::nullopt, 0),
      rec("d3", K::VariableMisuse, false, std::nullopt, 0),
      rec("d4", K::Negation, true, 3, 4),
      rec("d4", K::OperationSubstitution, true, 1, 1),
  };
  const auto rep = compute_coverage(records);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].design == "d1");
  CHECK(rep.rows[0].injected == 3);
  CHECK(rep.rows[0].observable == 2);
  CHECK(rep.rows[0].localized == 1);
  CHECK(format_coverage(rep.rows[0].coverage()) == "50.0%");
  CHECK(format_coverage(rep.rows[1].coverage()) == "66.7%");
  CHECK(format_coverage(rep.rows[2].coverage()) == "n/a");
  CHECK(rep.rows[3].injected_by_kind == std::array<int, 3>{1, 1, 0});
  CHECK(rep.overall.injected == 10);
  CHECK(rep.overall.observable == 7);
  CHECK(rep.overall.localized == 4);
  CHECK(rep.overall.injected_by_kind == std::array<int, 3>{4, 3, 3});
  CHECK(rep.random_baseline == doctest::Approx((0.5 + 0.25 + 1.0 + 0.2 + 0.5 + 0.25 + 1.0) / 7));
  for (const auto& r : rep.rows) {
    CHECK(r.localized <= r.observable);
    CHECK(r.observable <= r.injected);
  }
  const auto table = coverage_table(rep);
  CHECK(table.find("57.1%") != std::string::npos);
  CHECK(coverage_table(compute_coverage(records)) == table);
  CHECK(coverage_to_json(compute_coverage(records)) == coverage_to_json(rep));

  auto bad = records;
  bad[2].localized = true;
  CHECK_THROWS_AS(compute_coverage(bad), Error);
}

TEST_CASE("record json round trip") {
  const auto r = rec("d9", MutationKind::VariableMisuse, true, 2, 3);
  const auto text = record_to_json(r);
  CHECK(record_to_json(record_from_json(text)) == text);
  const auto back = record_from_json(text);
  CHECK(back.rank == 2);
  CHECK(back.mutation.kind == MutationKind::VariableMisuse);
  CHECK_THROWS_AS(record_from_json("[]"), Error);
}
