#pragma once
// Test-side reference implementations. They share only the AST and data
// types with the library, never its algorithms.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "attnloc/context.hpp"
#include "attnloc/frontend.hpp"
#include "attnloc/model.hpp"
#include "attnloc/rvdg.hpp"
#include "attnloc/sim.hpp"

namespace oracle {

using namespace attnloc;

inline const char* kArbiter = R"(module arbiter(clk, req1, req2, gnt1, gnt2);
  input clk;
  input req1;
  input req2;
  output reg gnt1;
  output reg gnt2;
  reg state;

  always @(posedge clk) begin
    state <= req2 & ~state;
  end

  always @(*) begin
    if (state == 1'b0) begin
      gnt1 = req1 & ~req2;
      gnt2 = req2;
    end else begin
      gnt1 = req1;
      gnt2 = ~req1 & req2;
    end
  end
endmodule
)";

inline Design random_design(std::uint64_t seed) { return parse_design(generate_design(sample_config(seed))); }

// ---- brute-force interpreter ----

inline int eval_expr(const AstNode& n, const std::map<std::string, int>& env) {
  switch (n.kind) {
    case NodeKind::Identifier: return env.at(n.name);
    case NodeKind::Not: return 1 - eval_expr(n.children[0], env);
    case NodeKind::And: return eval_expr(n.children[0], env) & eval_expr(n.children[1], env);
    case NodeKind::Or: return eval_expr(n.children[0], env) | eval_expr(n.children[1], env);
    case NodeKind::Xor: return eval_expr(n.children[0], env) ^ eval_expr(n.children[1], env);
    default: return eval_expr(n.children[0], env);
  }
}

inline int eval_guard(const GuardExpr& g, const std::map<std::string, int>& env) {
  auto c = [&](int i) { return eval_guard(g.children[i], env); };
  switch (g.op) {
    case GuardOp::Const: return g.value ? 1 : 0;
    case GuardOp::Ident: return env.at(g.name);
    case GuardOp::BitNot:
    case GuardOp::LogicalNot: return 1 - c(0);
    case GuardOp::BitAnd:
    case GuardOp::LogicalAnd: return c(0) & c(1);
    case GuardOp::BitOr:
    case GuardOp::LogicalOr: return c(0) | c(1);
    case GuardOp::BitXor: return c(0) ^ c(1);
    case GuardOp::Eq: return c(0) == c(1) ? 1 : 0;
    case GuardOp::Neq: return c(0) != c(1) ? 1 : 0;
  }
  return 0;
}

inline int eval_rhs(const Statement& s, const std::map<std::string, int>& env) {
  if (s.constant) return *s.constant ? 1 : 0;
  return eval_expr(s.rvalue().children[0], env);
}

// [cycle] -> variable -> value after the combinational block; registers
// start at 0.
inline std::vector<std::map<std::string, int>> interpret(const Design& d,
                                                         const std::vector<std::vector<int>>& vectors) {
  std::map<std::string, int> env;
  for (const auto& v : d.variables()) env[v] = 0;
  const auto inputs = d.inputs();
  std::vector<std::map<std::string, int>> out;
  for (const auto& vec : vectors) {
    for (std::size_t i = 0; i < inputs.size(); ++i) env[inputs[i]] = vec[i];
    for (const auto& arm : d.comb) {
      if (arm.guard && !eval_guard(*arm.guard, env)) continue;
      for (const auto& s : arm.body) env[s.lhs] = eval_rhs(s, env);
      break;
    }
    out.push_back(env);
    std::map<std::string, int> next = env;
    for (const auto& s : d.clocked) next[s.lhs] = eval_rhs(s, env);
    env = next;
  }
  return out;
}

// ---- dependence by syntactic scan + closure ----

inline std::set<std::pair<std::string, std::string>> syntactic_edges(const Design& d) {
  std::set<std::pair<std::string, std::string>> e;
  for (const auto& s : d.clocked)
    for (const auto& u : s.rhs_operands) e.insert({u, s.lhs});
  std::vector<std::string> guard_vars;
  for (const auto& arm : d.comb) {
    if (arm.guard) arm.guard->collect_identifiers(guard_vars);
    for (const auto& s : arm.body) {
      for (const auto& u : s.rhs_operands) e.insert({u, s.lhs});
      for (const auto& g : guard_vars) e.insert({g, s.lhs});
    }
  }
  return e;
}

// Reflexive-transitive closure by repeated Boolean matrix squaring.
inline std::set<std::string> closure_dep(const Design& d, const std::string& target) {
  const auto vars = d.variables();
  const std::size_t n = vars.size();
  std::map<std::string, std::size_t> ix;
  for (std::size_t i = 0; i < n; ++i) ix[vars[i]] = i;
  std::vector<std::vector<int>> r(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = 1;
  for (const auto& [u, v] : syntactic_edges(d)) r[ix.at(u)][ix.at(v)] = 1;
  for (std::size_t len = 1; len < n; len *= 2) {
    auto sq = r;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (r[i][k])
          for (std::size_t j = 0; j < n; ++j) sq[i][j] |= r[k][j];
    r = sq;
  }
  std::set<std::string> dep;
  for (std::size_t i = 0; i < n; ++i)
    if (r[i][ix.at(target)]) dep.insert(vars[i]);
  return dep;
}

// ---- dense forward pass ----

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline std::vector<double> lstm(const ModelParams& p, const std::vector<int>& ids) {
  const auto& d = p.dims;
  const int dc = d.d_c;
  std::vector<double> h(dc, 0.0), c(dc, 0.0);
  const auto& E = p[ParamGroup::TokenEmbedding];
  const auto& W = p[ParamGroup::LstmInput];
  const auto& U = p[ParamGroup::LstmRecurrent];
  const auto& b = p[ParamGroup::LstmBias];
  for (int tok : ids) {
    std::vector<double> a(4 * dc);
    for (int r = 0; r < 4 * dc; ++r) {
      double s = b[r];
      for (int k = 0; k < d.d_n; ++k) s += W[r * d.d_n + k] * E[tok * d.d_n + k];
      for (int k = 0; k < dc; ++k) s += U[r * dc + k] * h[k];
      a[r] = s;
    }
    for (int j = 0; j < dc; ++j) {
      c[j] = sig(a[dc + j]) * c[j] + sig(a[j]) * std::tanh(a[2 * dc + j]);
      h[j] = sig(a[3 * dc + j]) * std::tanh(c[j]);
    }
  }
  return h;
}

struct Dense {
  std::vector<std::vector<double>> x, xs;
  std::vector<double> w, probs;
  double xs_norm = 0.0;
};

inline Dense forward(const ModelParams& p, const Statement& s, const std::vector<int>& values) {
  const auto& d = p.dims;
  const auto& vocab = Vocabulary::standard();
  Dense r;
  const auto ctx = extract_contexts(s);
  const std::size_t n = ctx.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> xi(d.d_x(), 0.0);
    for (const auto& path : ctx[i].paths) {
      std::vector<int> ids;
      for (auto k : path) ids.push_back(vocab.id(k));
      const auto e = lstm(p, ids);
      for (int j = 0; j < d.d_c; ++j) xi[j] += e[j];
    }
    xi[d.d_c + (values[i] ? 1 : 0)] = 1.0;
    r.x.push_back(xi);
  }
  std::vector<double> sum(d.d_x(), 0.0);
  for (const auto& xi : r.x)
    for (int j = 0; j < d.d_x(); ++j) sum[j] += xi[j];
  const double eps = p.epsilon();
  const auto& W1 = p[ParamGroup::AggWeight];
  const auto& b1 = p[ParamGroup::AggBias];
  const auto& a = p[ParamGroup::Attention];
  std::vector<double> score;
  double sq = 0.0;
  for (const auto& xi : r.x) {
    std::vector<double> o(d.d_a);
    for (int q = 0; q < d.d_a; ++q) {
      double t = b1[q];
      for (int j = 0; j < d.d_x(); ++j) t += W1[q * d.d_x() + j] * (sum[j] + eps * xi[j]);
      o[q] = std::tanh(t);
      sq += o[q] * o[q];
    }
    double sc = 0.0;
    for (int q = 0; q < d.d_a; ++q) sc += a[q] * o[q];
    score.push_back(sc);
    r.xs.push_back(o);
  }
  r.xs_norm = std::sqrt(sq);
  double mx = score[0];
  for (double v : score) mx = std::max(mx, v);
  double z = 0.0;
  for (double v : score) z += std::exp(v - mx);
  for (double v : score) r.w.push_back(std::exp(v - mx) / z);
  std::vector<double> sv(d.d_x(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < d.d_x(); ++j) sv[j] += r.w[i] * r.x[i][j];
  const auto& W2 = p[ParamGroup::HiddenWeight];
  const auto& b2 = p[ParamGroup::HiddenBias];
  const auto& W3 = p[ParamGroup::OutputWeight];
  const auto& b3 = p[ParamGroup::OutputBias];
  std::vector<double> h(d.d_h);
  for (int q = 0; q < d.d_h; ++q) {
    double t = b2[q];
    for (int j = 0; j < d.d_x(); ++j) t += W2[q * d.d_x() + j] * sv[j];
    h[q] = std::max(0.0, t);
  }
  std::vector<double> logit(d.classes);
  for (int c = 0; c < d.classes; ++c) {
    double t = b3[c];
    for (int q = 0; q < d.d_h; ++q) t += W3[c * d.d_h + q] * h[q];
    logit[c] = t;
  }
  const double m = std::max(logit[0], logit[1]);
  const double zz = std::exp(logit[0] - m) + std::exp(logit[1] - m);
  r.probs = {std::exp(logit[0] - m) / zz, std::exp(logit[1] - m) / zz};
  return r;
}

}  // namespace oracle
