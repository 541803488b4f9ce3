#include <doctest.h>

#include <cmath>

#include "attnloc/model.hpp"
#include "attnloc/rng.hpp"
#include "support/oracles.hpp"

using namespace attnloc;

namespace {

Design small(const std::string& body) {
  return parse_design("module m(clk, a, b, c, x, y);\n  input clk;\n  input a;\n  input b;\n  input c;\n"
                      "  input x;\n  output reg y;\n  always @(posedge clk) begin\n  end\n  always @(*) begin\n    " +
                      body + "\n  end\nendmodule\n");
}

const Statement& first(const Design& d) { return *d.statements()[0]; }

std::vector<Bit> bits(std::initializer_list<int> v) { return std::vector<Bit>(v.begin(), v.end()); }

ModelParams random_params(std::uint64_t seed) {
  // Larger spread than the initializer so every layer is exercised.
  ModelParams p = ModelParams::initialize(ModelDims{}, seed);
  Rng r(seed + 1);
  for (auto& g : p.groups)
    for (auto& v : g) v += r.uniform(-0.3, 0.3);
  return p;
}

double loss_of(const ModelParams& p, const FeatureSet& f, const std::vector<Sample>& samples, const LossConfig& c) {
  std::vector<const Sample*> ptr;
  for (const auto& s : samples) ptr.push_back(&s);
  return batch_loss(p, f, ptr, c).loss;
}

}  // namespace

TEST_CASE("path embeddings") {
  const ModelParams p = random_params(1);
  const std::vector<int> path{5, 8};
  const auto e = embed_path(p, path);
  CHECK(e.size() == 16);
  for (double v : e) CHECK(std::isfinite(v));
  CHECK(embed_path(p, path) == e);
  for (int tok = 1; tok < 10; ++tok) {
    const auto one = embed_path(p, std::vector<int>{tok});
    const auto ref = oracle::lstm(p, {tok});
    for (int j = 0; j < 16; ++j) CHECK(one[j] == doctest::Approx(ref[j]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(embed_path(p, std::vector<int>{}), ModelError);
  CHECK_THROWS_AS(embed_path(p, std::vector<int>{42}), ModelError);
}

TEST_CASE("operand embedding layout and context sums") {
  const ModelParams p = random_params(2);
  const Design d = small("y = a & (b | c);");
  FeatureSet f;
  const int shape = f.add(first(d));
  const auto enc = encode_statement(p, f, shape, bits({0, 1, 1}));
  const auto ref = oracle::forward(p, first(d), {0, 1, 1});
  REQUIRE(enc.x.size() == 3);
  CHECK(enc.x[0][16] == 1.0);
  CHECK(enc.x[0][17] == 0.0);
  CHECK(enc.x[1][16] == 0.0);
  CHECK(enc.x[1][17] == 1.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 18; ++j) CHECK(enc.x[i][j] == doctest::Approx(ref.x[i][j]).epsilon(1e-12));
  for (int i = 0; i < 3; ++i)
    for (int q = 0; q < 32; ++q) CHECK(enc.x_star[i][q] == doctest::Approx(ref.xs[i][q]).epsilon(1e-12));
}

TEST_CASE("single operand aggregation collapses to (1 + eps) x") {
  const ModelParams p = random_params(3);
  const Design d = small("y = ~x;");
  FeatureSet f;
  const int shape = f.add(first(d));
  const auto enc = encode_statement(p, f, shape, bits({1}));
  const auto& W = p[ParamGroup::AggWeight];
  const auto& b = p[ParamGroup::AggBias];
  for (int q = 0; q < 32; ++q) {
    double t = b[q];
    for (int j = 0; j < 18; ++j) t += W[q * 18 + j] * (1 + p.epsilon()) * enc.x[0][j];
    CHECK(enc.x_star[0][q] == doctest::Approx(std::tanh(t)).epsilon(1e-12));
  }
  CHECK(enc.weights == std::vector<double>{1.0});
}

TEST_CASE("identical operands get identical rows and equal weights") {
  const ModelParams p = random_params(4);
  const Design d = small("y = x & x;");
  const auto pr = predict(p, first(d), bits({1, 1}));
  REQUIRE(pr.weights.size() == 2);
  CHECK(pr.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pr.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
  FeatureSet f;
  const int shape = f.add(first(d));
  const auto enc = encode_statement(p, f, shape, bits({1, 1}));
  CHECK(enc.x_star[0] == enc.x_star[1]);
}

TEST_CASE("attention with scores ln 2 and 0") {
  ModelParams p = ModelParams::zeros(ModelDims{});
  p[ParamGroup::SkipEpsilon][0] = 1.0;
  // x*_0 = tanh(k * z[value-1 slot] - k): operand valued 1 sees z = 2, the
  // other z = 1.
  const double k = 1.0;
  p[ParamGroup::AggWeight][0 * 18 + 17] = k;
  p[ParamGroup::AggBias][0] = -k;
  p[ParamGroup::Attention][0] = std::log(2.0) / std::tanh(k);
  const Design d = small("y = a & b;");
  const auto pr = predict(p, first(d), bits({1, 0}));
  CHECK(pr.weights[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pr.weights[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("full forward pass matches the dense oracle") {
  const Design arb = parse_design(oracle::kArbiter);
  const Statement& s = *arb.find_statement(StatementId{15, 0});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ModelParams p = random_params(seed + 10);
    for (int v = 0; v < 4; ++v) {
      const std::vector<int> vals{v & 1, v >> 1};
      const auto pr = predict(p, s, bits({vals[0], vals[1]}));
      const auto ref = oracle::forward(p, s, vals);
      for (int c = 0; c < 2; ++c) CHECK(std::abs(pr.probs[c] - ref.probs[c]) <= 1e-10);
      for (int i = 0; i < 2; ++i) CHECK(std::abs(pr.weights[i] - ref.w[i]) <= 1e-10);
      CHECK(pr.predicted == (pr.probs[1] > pr.probs[0] ? 1 : 0));
    }
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Design d = oracle::random_design(seed);
    const ModelParams p = random_params(seed);
    Rng r(seed);
    for (const Statement* st : d.statements()) {
      if (st->rhs_operands.empty()) continue;
      std::vector<int> vals;
      std::vector<Bit> b;
      for (std::size_t i = 0; i < st->rhs_operands.size(); ++i) {
        vals.push_back(static_cast<int>(r.below(2)));
        b.push_back(static_cast<Bit>(vals.back()));
      }
      const auto pr = predict(p, *st, b);
      const auto ref = oracle::forward(p, *st, vals);
      CHECK(std::abs(pr.probs[0] + pr.probs[1] - 1.0) <= 1e-9);
      CHECK(std::abs(pr.probs[1] - ref.probs[1]) <= 1e-10);
    }
  }
}

TEST_CASE("permuting operands permutes weights") {
  const ModelParams p = random_params(7);
  const Design ab = small("y = a & b;");
  const Design ba = small("y = b & a;");
  const auto p1 = predict(p, first(ab), bits({1, 0}));
  const auto p2 = predict(p, first(ba), bits({0, 1}));
  CHECK(p1.weights[0] == doctest::Approx(p2.weights[1]).epsilon(1e-12));
  CHECK(p1.weights[1] == doctest::Approx(p2.weights[0]).epsilon(1e-12));
  CHECK(p1.probs[1] == doctest::Approx(p2.probs[1]).epsilon(1e-12));
}

TEST_CASE("loss closed forms") {
  const Design d = small("y = a & b;");
  FeatureSet f;
  const int shape = f.add(first(d));
  LossConfig cfg;
  cfg.alpha = 0.0;

  ModelParams p = ModelParams::zeros(ModelDims{});
  CHECK(loss_of(p, f, {{shape, bits({1, 1}), 1}}, cfg) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  p[ParamGroup::OutputBias] = {-60.0, 60.0};
  CHECK(loss_of(p, f, {{shape, bits({1, 1}), 1}}, cfg) <= 1e-12);

  // ||X*||_F = 2 from a constant bias: 32 entries of 1/8 squared.
  ModelParams q = ModelParams::zeros(ModelDims{});
  for (auto& b : q[ParamGroup::AggBias]) b = std::atanh(std::sqrt(0.125));
  const Design one = small("y = ~x;");
  FeatureSet f1;
  const int s1 = f1.add(first(one));
  cfg.alpha = 0.1;
  CHECK(loss_of(q, f1, {{s1, bits({0}), 0}}, cfg) == doctest::Approx(std::log(2.0) + 0.05).epsilon(1e-12));
}

TEST_CASE("output bias gradient is the weighted softmax residual") {
  ModelParams p = random_params(8);
  for (auto& w : p[ParamGroup::OutputWeight]) w = 0.0;
  p[ParamGroup::OutputBias] = {0.3, -0.2};
  const Design d = small("y = a ^ b;");
  FeatureSet f;
  const int shape = f.add(first(d));
  const std::vector<Sample> samples{{shape, bits({0, 1}), 1}, {shape, bits({1, 1}), 0}, {shape, bits({0, 0}), 1}};
  LossConfig cfg;
  cfg.alpha = 0.0;
  cfg.w0 = 1.5;
  cfg.w1 = 0.5;
  std::vector<const Sample*> ptr;
  for (const auto& s : samples) ptr.push_back(&s);
  ModelParams g = ModelParams::zeros(p.dims);
  loss_and_gradients(p, f, ptr, cfg, g);
  const double p1 = 1.0 / (1.0 + std::exp(0.3 - -0.2));
  const double prob[2] = {1 - p1, p1};
  double num[2] = {0, 0}, den = 0;
  for (const auto& s : samples) {
    const double w = s.label ? cfg.w1 : cfg.w0;
    for (int c = 0; c < 2; ++c) num[c] += w * (prob[c] - (c == s.label ? 1.0 : 0.0));
    den += w;
  }
  CHECK(g[ParamGroup::OutputBias][0] == doctest::Approx(num[0] / den).epsilon(1e-12));
  CHECK(g[ParamGroup::OutputBias][1] == doctest::Approx(num[1] / den).epsilon(1e-12));
}

TEST_CASE("unused tokens get exactly zero gradient") {
  const ModelParams p = random_params(9);
  const Design d = small("y = a & b;");  // no Or, Xor, Not, Nonblocking tokens
  FeatureSet f;
  const int shape = f.add(first(d));
  const std::vector<Sample> samples{{shape, bits({0, 1}), 0}};
  std::vector<const Sample*> ptr{&samples[0]};
  ModelParams g = ModelParams::zeros(p.dims);
  loss_and_gradients(p, f, ptr, LossConfig{}, g);
  const auto& v = Vocabulary::standard();
  for (NodeKind k : {NodeKind::Or, NodeKind::Xor, NodeKind::Not, NodeKind::NonblockingAssignment})
    for (int j = 0; j < 8; ++j) CHECK(g[ParamGroup::TokenEmbedding][v.id(k) * 8 + j] == 0.0);
  for (int j = 0; j < 8; ++j) CHECK(g[ParamGroup::TokenEmbedding][j] == 0.0);
  double used = 0;
  for (int j = 0; j < 8; ++j) used += std::abs(g[ParamGroup::TokenEmbedding][v.id(NodeKind::And) * 8 + j]);
  CHECK(used > 0);
}

TEST_CASE("finite differences on a small batch, every group") {
  const ModelParams p = random_params(11);
  const Design d = oracle::random_design(2);
  FeatureSet f;
  std::vector<Sample> samples;
  Rng r(3);
  for (const Statement* s : d.statements()) {
    if (s->rhs_operands.empty()) continue;
    Sample smp;
    smp.shape = f.add(*s);
    for (std::size_t i = 0; i < s->rhs_operands.size(); ++i) smp.values.push_back(static_cast<Bit>(r.below(2)));
    smp.label = static_cast<Bit>(r.below(2));
    samples.push_back(smp);
  }
  LossConfig cfg;
  cfg.w0 = 0.8;
  cfg.w1 = 1.2;
  std::vector<const Sample*> ptr;
  for (const auto& s : samples) ptr.push_back(&s);
  ModelParams g = ModelParams::zeros(p.dims);
  loss_and_gradients(p, f, ptr, cfg, g);
  const double h = 1e-4;
  for (int gi = 0; gi < kParamGroupCount; ++gi) {
    const auto grp = static_cast<ParamGroup>(gi);
    for (int k = 0; k < 4; ++k) {
      const std::size_t idx = r.below(p[grp].size());
      ModelParams a = p, b = p;
      a[grp][idx] += h;
      b[grp][idx] -= h;
      const double fd = (loss_of(a, f, samples, cfg) - loss_of(b, f, samples, cfg)) / (2 * h);
      const double an = g[grp][idx];
      const double scale = std::max(std::abs(fd), std::abs(an));
      INFO(param_group_name(grp) << "[" << idx << "] analytic " << an << " fd " << fd);
      if (scale > 1e-7) CHECK(std::abs(fd - an) / scale <= 1e-4);
    }
  }
}

TEST_CASE("regularizer moves theta1 even when cross-entropy is saturated") {
  ModelParams p = random_params(12);
  p[ParamGroup::OutputBias] = {-80.0, 80.0};
  for (auto& w : p[ParamGroup::OutputWeight]) w = 0.0;
  const Design d = small("y = a | b;");
  FeatureSet f;
  const int shape = f.add(first(d));
  const std::vector<Sample> samples{{shape, bits({1, 0}), 1}};
  std::vector<const Sample*> ptr{&samples[0]};
  LossConfig cfg;
  cfg.alpha = 0.1;
  ModelParams g = ModelParams::zeros(p.dims);
  const auto res = loss_and_gradients(p, f, ptr, cfg, g);
  CHECK(res.ce_term <= 1e-12);
  double norm = 0;
  for (double v : g[ParamGroup::AggWeight]) norm += std::abs(v);
  CHECK(norm > 1e-6);
  cfg.alpha = 0.0;
  ModelParams g0 = ModelParams::zeros(p.dims);
  loss_and_gradients(p, f, ptr, cfg, g0);
  double norm0 = 0;
  for (double v : g0[ParamGroup::AggWeight]) norm0 += std::abs(v);
  CHECK(norm0 <= 1e-20);
}

TEST_CASE("non-finite parameters are reported by layer") {
  ModelParams p = random_params(13);
  p[ParamGroup::AggBias][0] = std::nan("");
  const Design d = small("y = a & b;");
  try {
    predict(p, first(d), bits({0, 1}));
    FAIL("expected a ModelError");
  } catch (const ModelError& e) {
    CHECK(std::string(e.what()).find("non-finite value in aggregation layer") != std::string::npos);
  }
}

TEST_CASE("checkpoint round trip and validation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Checkpoint c;
    c.params = random_params(seed);
    c.loss.alpha = 0.05 * static_cast<double>(seed);
    c.loss.mode = seed % 2 ? LossMode::AsPrinted : LossMode::WeightedMean;
    c.notes = "seed " + std::to_string(seed);
    const auto text = checkpoint_to_json(c);
    const Checkpoint back = checkpoint_from_json(text);
    CHECK(back.params == c.params);
    CHECK(back.loss.alpha == c.loss.alpha);
    CHECK(back.loss.mode == c.loss.mode);
    CHECK(checkpoint_to_json(back) == text);
  }
  Checkpoint c;
  c.params = random_params(1);
  std::string text = checkpoint_to_json(c);
  auto broken = [&](const std::string& from, const std::string& to) {
    std::string t = text;
    const auto pos = t.find(from);
    REQUIRE(pos != std::string::npos);
    t.replace(pos, from.size(), to);
    return t;
  };
  CHECK_THROWS_AS(checkpoint_from_json(broken("\"version\": 1", "\"version\": 9")), ModelError);
  CHECK_THROWS_AS(checkpoint_from_json(broken("attnloc-checkpoint", "other")), ModelError);
  CHECK_THROWS_AS(checkpoint_from_json("{"), ModelError);
  CHECK_THROWS_AS(checkpoint_from_json(broken(Vocabulary::standard().hash(), "fnv1a:0")), ModelError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.json"), Error);
}
