#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "attnloc/report.hpp"
#include "attnloc/rng.hpp"

namespace attnloc {

int color_bin(double weight) {
  if (!(weight > 0.0)) return 0;
  return std::min(kColorBins - 1, static_cast<int>(std::floor(weight * kColorBins)));
}

std::string generated_from(std::string_view json_text) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(json_text)));
  return std::string("fnv1a:") + buf;
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const std::vector<double>& checked(const std::vector<double>& w, const Statement& s) {
  if (w.size() != s.rhs_operands.size())
    throw Error("weights for statement " + s.id.str() + " do not match its " + std::to_string(s.rhs_operands.size()) +
                " operands");
  return w;
}

struct HtmlOperands : ExpressionDecorator {
  const std::vector<double>& w;
  char side;  // 'h' heatmap (reds) or 'c' passing (blues)
  HtmlOperands(const std::vector<double>& weights, char s) : w(weights), side(s) {}
  std::string operand(int i, const std::string& name) const override {
    return std::string("<span class=\"op ") + side + std::to_string(color_bin(w[i])) + "\" title=\"" +
           fixed(w[i], 3) + "\">" + html_escape(name) + "</span>";
  }
  std::string text(std::string_view t) const override { return html_escape(t); }
};

constexpr int kRed[kColorBins] = {224, 217, 210, 203, 196};
constexpr int kBlue[kColorBins] = {195, 153, 111, 69, 27};

struct AnsiOperands : ExpressionDecorator {
  const std::vector<double>& w;
  const int* palette;
  AnsiOperands(const std::vector<double>& weights, const int* p) : w(weights), palette(p) {}
  std::string operand(int i, const std::string& name) const override {
    const int bin = color_bin(w[i]);
    const char* fg = bin >= 3 ? "97" : "30";
    return "\x1b[" + std::string(fg) + ";48;5;" + std::to_string(palette[bin]) + "m" + name + "\x1b[0m";
  }
};

// Shared walk over the source: each line is either copied or rebuilt from
// the statements that start on it.
struct Listing {
  Design design;
  std::vector<std::string> lines;
  std::map<int, std::vector<const Statement*>> by_line;
  std::map<StatementId, const RankedStatement*> heat;

  Listing(const Localization& loc, std::string_view source) : design(parse_design(source)) {
    std::string cur;
    for (char c : source) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) lines.push_back(cur);
    for (const Statement* s : design.statements()) by_line[s->id.line].push_back(s);
    for (auto& [line, v] : by_line)
      std::sort(v.begin(), v.end(), [](const Statement* a, const Statement* b) { return a->id < b->id; });
    for (const auto& r : loc.ranking) {
      const Statement* s = design.find_statement(r.id);
      if (!s) throw Error("localization references statement " + r.id.str() + ", which is not in the source");
      checked(r.entry.f_weights, *s);
      if (r.entry.c_weights) checked(*r.entry.c_weights, *s);
      heat[r.id] = &r;
    }
    for (const auto& [id, e] : loc.passing.entries) {
      const Statement* s = design.find_statement(id);
      if (!s) throw Error("localization references statement " + id.str() + ", which is not in the source");
      checked(e.mean, *s);
    }
  }

  static std::string indent_of(const std::string& line) {
    return line.substr(0, line.find_first_not_of(" \t") == std::string::npos ? line.size()
                                                                              : line.find_first_not_of(" \t"));
  }
};

std::string empty_message(double threshold) {
  return "no suspicious statements above threshold " + fixed(threshold, 2);
}

}  // namespace

std::string render_html(const Localization& loc, std::string_view source, std::string_view json_text) {
  const Listing l(loc, source);
  std::ostringstream os;
  os << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\" />\n<title>heatmap " << html_escape(loc.target)
     << "</title>\n<style>\n"
     << "pre { font-family: monospace; }\n"
     << ".ln { color: #999; }\n.score { font-weight: bold; color: #900; }\n.cmp { color: #555; }\n"
     << ".h0 { background: #fee5d9; } .h1 { background: #fcae91; } .h2 { background: #fb6a4a; }\n"
     << ".h3 { background: #de2d26; color: #fff; } .h4 { background: #a50f15; color: #fff; }\n"
     << ".c0 { background: #eff3ff; } .c1 { background: #bdd7e7; } .c2 { background: #6baed6; }\n"
     << ".c3 { background: #3182bd; color: #fff; } .c4 { background: #08519c; color: #fff; }\n"
     << "</style>\n</head>\n<body>\n";
  os << "<p class=\"meta\">target: " << html_escape(loc.target) << ", threshold " << fixed(loc.threshold, 2)
     << ", failing windows " << loc.failing_windows << ", passing windows " << loc.passing_windows
     << ", generated-from " << generated_from(json_text) << "</p>\n";
  if (loc.ranking.empty()) os << "<p class=\"empty\">" << empty_message(loc.threshold) << "</p>\n";
  os << "<pre>\n";
  for (std::size_t i = 0; i < l.lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    os << "<span class=\"ln\">" << line << "</span> ";
    auto it = l.by_line.find(line);
    if (it == l.by_line.end()) {
      os << html_escape(l.lines[i]) << '\n';
      continue;
    }
    os << html_escape(Listing::indent_of(l.lines[i]));
    std::string trailer;
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      const Statement& s = *it->second[k];
      if (k) os << ' ';
      auto h = l.heat.find(s.id);
      auto c = loc.passing.entries.find(s.id);
      if (h != l.heat.end()) {
        const auto& e = h->second->entry;
        os << print_statement(s, HtmlOperands(e.f_weights, 'h'));
        trailer += "  <span class=\"score\">" + s.id.str() + " rank " + std::to_string(h->second->rank) +
                   " score " + fixed(e.score, 3) + "</span>";
        if (e.c_weights) trailer += "  <span class=\"cmp\">C: " + print_statement(s, HtmlOperands(*e.c_weights, 'c')) + "</span>";
      } else if (c != loc.passing.entries.end()) {
        os << print_statement(s, HtmlOperands(c->second.mean, 'c'));
      } else {
        os << html_escape(print_statement(s));
      }
    }
    os << trailer << '\n';
  }
  os << "</pre>\n</body>\n</html>\n";
  return os.str();
}

std::string render_ansi(const Localization& loc, std::string_view source, std::string_view json_text) {
  const Listing l(loc, source);
  std::ostringstream os;
  os << "target " << loc.target << ", threshold " << fixed(loc.threshold, 2) << ", generated-from "
     << generated_from(json_text) << '\n';
  if (loc.ranking.empty()) os << empty_message(loc.threshold) << '\n';
  for (std::size_t i = 0; i < l.lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    char num[16];
    std::snprintf(num, sizeof num, "%4d  ", line);
    os << num;
    auto it = l.by_line.find(line);
    if (it == l.by_line.end()) {
      os << l.lines[i] << '\n';
      continue;
    }
    os << Listing::indent_of(l.lines[i]);
    std::string trailer;
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      const Statement& s = *it->second[k];
      if (k) os << ' ';
      auto h = l.heat.find(s.id);
      auto c = loc.passing.entries.find(s.id);
      if (h != l.heat.end()) {
        const auto& e = h->second->entry;
        os << print_statement(s, AnsiOperands(e.f_weights, kRed));
        trailer += "   <- #" + std::to_string(h->second->rank) + " score " + fixed(e.score, 3);
        if (e.c_weights) trailer += "  C: " + print_statement(s, AnsiOperands(*e.c_weights, kBlue));
      } else if (c != loc.passing.entries.end()) {
        os << print_statement(s, AnsiOperands(c->second.mean, kBlue));
      } else {
        os << print_statement(s);
      }
    }
    os << trailer << '\n';
  }
  return os.str();
}

}  // namespace attnloc
