#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>

#include "attnloc/kernels.hpp"
#include "attnloc/model.hpp"

namespace attnloc {
namespace {

namespace k = kernels;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require_finite(std::span<const double> v, const char* layer) {
  for (double x : v)
    if (!std::isfinite(x)) throw ModelError(std::string("non-finite value in ") + layer + " layer");
}

// Per-step activations kept for backpropagation through time.
struct LstmTape {
  std::vector<int> tokens;
  std::vector<double> gates;   // T x 4*d_c, post-activation (i, f, g, o)
  std::vector<double> cell;    // (T+1) x d_c, row 0 = zero state
  std::vector<double> hidden;  // (T+1) x d_c
  std::vector<double> tanh_cell;  // T x d_c

  std::span<const double> output(int d_c) const {
    return {hidden.data() + (hidden.size() - static_cast<std::size_t>(d_c)), static_cast<std::size_t>(d_c)};
  }
};

void lstm_forward(const ModelParams& p, std::span<const int> ids, LstmTape& tape) {
  const auto& d = p.dims;
  const int dc = d.d_c;
  const int g4 = 4 * dc;
  const auto T = ids.size();
  if (T == 0) throw ModelError("empty path");
  tape.tokens.assign(ids.begin(), ids.end());
  tape.gates.assign(T * g4, 0.0);
  tape.cell.assign((T + 1) * dc, 0.0);
  tape.hidden.assign((T + 1) * dc, 0.0);
  tape.tanh_cell.assign(T * dc, 0.0);
  const auto& emb = p[ParamGroup::TokenEmbedding];
  const auto& w = p[ParamGroup::LstmInput];
  const auto& u = p[ParamGroup::LstmRecurrent];
  const auto& b = p[ParamGroup::LstmBias];
  for (std::size_t t = 0; t < T; ++t) {
    const int tok = ids[t];
    if (tok < 0 || tok >= d.vocab) throw ModelError("token id " + std::to_string(tok) + " out of vocabulary");
    std::span<double> a(tape.gates.data() + t * g4, g4);
    std::copy(b.begin(), b.end(), a.begin());
    k::gemv(w, g4, d.d_n, std::span<const double>(emb.data() + tok * d.d_n, d.d_n), a);
    k::gemv(u, g4, dc, std::span<const double>(tape.hidden.data() + t * dc, dc), a);
    const double* c_prev = tape.cell.data() + t * dc;
    double* c = tape.cell.data() + (t + 1) * dc;
    double* h = tape.hidden.data() + (t + 1) * dc;
    double* tc = tape.tanh_cell.data() + t * dc;
    for (int j = 0; j < dc; ++j) {
      const double ig = sigmoid(a[j]);
      const double fg = sigmoid(a[dc + j]);
      const double gg = std::tanh(a[2 * dc + j]);
      const double og = sigmoid(a[3 * dc + j]);
      a[j] = ig;
      a[dc + j] = fg;
      a[2 * dc + j] = gg;
      a[3 * dc + j] = og;
      c[j] = fg * c_prev[j] + ig * gg;
      tc[j] = std::tanh(c[j]);
      h[j] = og * tc[j];
    }
  }
  require_finite(tape.output(dc), "path encoder");
}

void lstm_backward(const ModelParams& p, const LstmTape& tape, std::span<const double> dh_out, ModelParams& grads) {
  const auto& d = p.dims;
  const int dc = d.d_c;
  const int g4 = 4 * dc;
  const auto T = tape.tokens.size();
  std::vector<double> dh(dh_out.begin(), dh_out.end());
  std::vector<double> dc_next(dc, 0.0);
  std::vector<double> da(g4);
  std::vector<double> dx(d.d_n);
  auto& gw = grads[ParamGroup::LstmInput];
  auto& gu = grads[ParamGroup::LstmRecurrent];
  auto& gb = grads[ParamGroup::LstmBias];
  auto& gemb = grads[ParamGroup::TokenEmbedding];
  const auto& emb = p[ParamGroup::TokenEmbedding];
  for (std::size_t t = T; t-- > 0;) {
    const double* a = tape.gates.data() + t * g4;
    const double* c_prev = tape.cell.data() + t * dc;
    const double* tc = tape.tanh_cell.data() + t * dc;
    for (int j = 0; j < dc; ++j) {
      const double ig = a[j], fg = a[dc + j], gg = a[2 * dc + j], og = a[3 * dc + j];
      const double dcell = dc_next[j] + dh[j] * og * (1.0 - tc[j] * tc[j]);
      da[j] = dcell * gg * ig * (1.0 - ig);
      da[dc + j] = dcell * c_prev[j] * fg * (1.0 - fg);
      da[2 * dc + j] = dcell * ig * (1.0 - gg * gg);
      da[3 * dc + j] = dh[j] * tc[j] * og * (1.0 - og);
      dc_next[j] = dcell * fg;
    }
    const int tok = tape.tokens[t];
    std::span<const double> x(emb.data() + tok * d.d_n, d.d_n);
    k::ger(gw, g4, d.d_n, da, x);
    k::ger(gu, g4, dc, da, std::span<const double>(tape.hidden.data() + t * dc, dc));
    k::axpy(1.0, da, gb);
    std::fill(dx.begin(), dx.end(), 0.0);
    k::gemv_t(p[ParamGroup::LstmInput], g4, d.d_n, da, dx);
    k::axpy(1.0, dx, std::span<double>(gemb.data() + tok * d.d_n, d.d_n));
    std::fill(dh.begin(), dh.end(), 0.0);
    k::gemv_t(p[ParamGroup::LstmRecurrent], g4, dc, da, dh);
  }
}

// LSTM tapes for every distinct path referenced by a set of statements.
class PathCache {
 public:
  PathCache(const ModelParams& p, const FeatureSet& f) : params_(p), features_(f) {}

  int slot(int path) {
    auto [it, inserted] = slots_.emplace(path, static_cast<int>(tapes_.size()));
    if (inserted) {
      tapes_.emplace_back();
      lstm_forward(params_, features_.paths.paths.at(path), tapes_.back());
      grads_.emplace_back(params_.dims.d_c, 0.0);
    }
    return it->second;
  }
  std::span<const double> embedding(int slot) const { return tapes_[slot].output(params_.dims.d_c); }
  std::vector<double>& grad(int slot) { return grads_[slot]; }

  void backward(ModelParams& grads) const {
    for (std::size_t s = 0; s < tapes_.size(); ++s) {
      bool any = false;
      for (double g : grads_[s]) any |= g != 0.0;
      if (any) lstm_backward(params_, tapes_[s], grads_[s], grads);
    }
  }

 private:
  const ModelParams& params_;
  const FeatureSet& features_;
  std::map<int, int> slots_;
  std::vector<LstmTape> tapes_;
  std::vector<std::vector<double>> grads_;
};

void softmax_inplace(std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double z = 0.0;
  for (auto& x : v) {
    x = std::exp(x - m);
    z += x;
  }
  for (auto& x : v) x /= z;
}

struct Forward {
  StatementEncoding enc;
  std::vector<std::vector<int>> slots;  // [operand][path] -> cache slot
};

void forward(const ModelParams& p, const StatementFeatures& f, std::span<const Bit> values, PathCache& cache,
             Forward& out) {
  const auto& d = p.dims;
  const std::size_t n = f.operand_count();
  if (n == 0) throw ModelError("statement has no operands");
  if (values.size() != n) throw ModelError("operand value count does not match statement");
  const int dx = d.d_x();
  auto& e = out.enc;
  e.path_embeddings.assign(n, {});
  e.context.assign(n, std::vector<double>(d.d_c, 0.0));
  e.x.assign(n, std::vector<double>(dx, 0.0));
  out.slots.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (int path : f.operand_paths[i]) {
      const int s = cache.slot(path);
      out.slots[i].push_back(s);
      const auto emb = cache.embedding(s);
      e.path_embeddings[i].insert(e.path_embeddings[i].end(), emb.begin(), emb.end());
      k::axpy(1.0, emb, e.context[i]);
    }
    std::copy(e.context[i].begin(), e.context[i].end(), e.x[i].begin());
    e.x[i][d.d_c + (values[i] ? 1 : 0)] = 1.0;
  }

  e.sum_x.assign(dx, 0.0);
  for (const auto& x : e.x) k::axpy(1.0, x, e.sum_x);
  const double eps = p.epsilon();
  e.z.assign(n, e.sum_x);
  e.x_star.assign(n, std::vector<double>(d.d_a, 0.0));
  e.scores.assign(n, 0.0);
  double norm2 = 0.0;
  const auto& agg_b = p[ParamGroup::AggBias];
  for (std::size_t i = 0; i < n; ++i) {
    k::axpy(eps, e.x[i], e.z[i]);
    auto& xs = e.x_star[i];
    std::copy(agg_b.begin(), agg_b.end(), xs.begin());
    k::gemv(p[ParamGroup::AggWeight], d.d_a, dx, e.z[i], xs);
    for (auto& v : xs) v = std::tanh(v);
    require_finite(xs, "aggregation");
    norm2 += k::dot(xs, xs);
    e.scores[i] = k::dot(p[ParamGroup::Attention], xs);
  }
  e.x_star_norm = std::sqrt(norm2);
  e.weights = e.scores;
  softmax_inplace(e.weights);
  require_finite(e.weights, "attention");

  e.s.assign(dx, 0.0);
  for (std::size_t i = 0; i < n; ++i) k::axpy(e.weights[i], e.x[i], e.s);
  e.hidden_pre = p[ParamGroup::HiddenBias];
  k::gemv(p[ParamGroup::HiddenWeight], d.d_h, dx, e.s, e.hidden_pre);
  e.hidden = e.hidden_pre;
  for (auto& v : e.hidden) v = v > 0.0 ? v : 0.0;
  e.logits = p[ParamGroup::OutputBias];
  k::gemv(p[ParamGroup::OutputWeight], d.classes, d.d_h, e.hidden, e.logits);
  require_finite(e.logits, "prediction");
  e.probs = e.logits;
  softmax_inplace(e.probs);
}

double cross_entropy(const StatementEncoding& e, int label) {
  const double m = *std::max_element(e.logits.begin(), e.logits.end());
  double z = 0.0;
  for (double l : e.logits) z += std::exp(l - m);
  return m + std::log(z) - e.logits[label];
}

// Accumulates parameter gradients for one sample; path-embedding gradients go
// to the cache and are pushed through the LSTM once per batch.
void backward(const ModelParams& p, const Forward& fw, int label, double ce_coef, double reg_coef, bool reg_active,
              PathCache& cache, ModelParams& g) {
  const auto& d = p.dims;
  const auto& e = fw.enc;
  const std::size_t n = e.x.size();
  const int dx = d.d_x();

  std::vector<double> dlogits(d.classes);
  for (int c = 0; c < d.classes; ++c) dlogits[c] = ce_coef * (e.probs[c] - (c == label ? 1.0 : 0.0));
  k::ger(g[ParamGroup::OutputWeight], d.classes, d.d_h, dlogits, e.hidden);
  k::axpy(1.0, dlogits, g[ParamGroup::OutputBias]);
  std::vector<double> dhidden(d.d_h, 0.0);
  k::gemv_t(p[ParamGroup::OutputWeight], d.classes, d.d_h, dlogits, dhidden);
  for (int j = 0; j < d.d_h; ++j)
    if (e.hidden_pre[j] <= 0.0) dhidden[j] = 0.0;
  k::ger(g[ParamGroup::HiddenWeight], d.d_h, dx, dhidden, e.s);
  k::axpy(1.0, dhidden, g[ParamGroup::HiddenBias]);
  std::vector<double> ds(dx, 0.0);
  k::gemv_t(p[ParamGroup::HiddenWeight], d.d_h, dx, dhidden, ds);

  std::vector<std::vector<double>> dxv(n, std::vector<double>(dx, 0.0));
  std::vector<double> dw(n);
  double wdw = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dw[i] = k::dot(ds, e.x[i]);
    wdw += e.weights[i] * dw[i];
    k::axpy(e.weights[i], ds, dxv[i]);
  }
  const double norm = e.x_star_norm;
  const double reg_scale = reg_active ? -reg_coef / (norm * norm * norm) : 0.0;
  const double eps = p.epsilon();
  std::vector<double> dsum(dx, 0.0);
  std::vector<double> du(d.d_a);
  std::vector<double> dz(dx);
  double deps = 0.0;
  auto& gatt = g[ParamGroup::Attention];
  for (std::size_t i = 0; i < n; ++i) {
    const double dscore = e.weights[i] * (dw[i] - wdw);
    const auto& xs = e.x_star[i];
    k::axpy(dscore, xs, gatt);
    for (int j = 0; j < d.d_a; ++j) {
      const double dxs = dscore * p[ParamGroup::Attention][j] + reg_scale * xs[j];
      du[j] = dxs * (1.0 - xs[j] * xs[j]);
    }
    k::ger(g[ParamGroup::AggWeight], d.d_a, dx, du, e.z[i]);
    k::axpy(1.0, du, g[ParamGroup::AggBias]);
    std::fill(dz.begin(), dz.end(), 0.0);
    k::gemv_t(p[ParamGroup::AggWeight], d.d_a, dx, du, dz);
    k::axpy(1.0, dz, dsum);
    deps += k::dot(dz, e.x[i]);
    k::axpy(eps, dz, dxv[i]);
  }
  g[ParamGroup::SkipEpsilon][0] += deps;
  for (std::size_t i = 0; i < n; ++i) {
    k::axpy(1.0, dsum, dxv[i]);
    const std::span<const double> dctx(dxv[i].data(), d.d_c);
    for (int s : fw.slots[i]) k::axpy(1.0, dctx, cache.grad(s));
  }
}

LossResult run_batch(const ModelParams& p, const FeatureSet& f, std::span<const Sample* const> batch,
                     const LossConfig& cfg, ModelParams* grads) {
  if (batch.empty()) throw ModelError("empty batch");
  PathCache cache(p, f);
  std::vector<Forward> fw(batch.size());
  std::vector<double> ce(batch.size());
  LossResult r;
  double denom = 0.0;
  double ce_num = 0.0;
  double reg_sum = 0.0;
  const double n = static_cast<double>(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Sample& s = *batch[b];
    forward(p, f.statements.at(s.shape), s.values, cache, fw[b]);
    ce[b] = cross_entropy(fw[b].enc, s.label);
    const double w = s.label ? cfg.w1 : cfg.w0;
    denom += w;
    ce_num += (cfg.mode == LossMode::WeightedMean ? w : 1.0) * ce[b];
    const double norm = fw[b].enc.x_star_norm;
    if (norm < cfg.norm_floor) ++r.clamped;
    reg_sum += 1.0 / std::max(norm, cfg.norm_floor);
  }
  r.ce_term = ce_num / denom;
  r.reg_term = cfg.alpha / n * reg_sum;
  r.loss = r.ce_term + r.reg_term;
  if (r.clamped > 0) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true))
      std::cerr << "warning: ||X*|| below " << cfg.norm_floor << " clamped in the regularizer\n";
  }
  if (!std::isfinite(r.loss)) throw ModelError("non-finite value in loss layer");
  if (grads) {
    if (!(grads->dims == p.dims) || grads->size() != p.size()) *grads = ModelParams::zeros(p.dims);
    grads->set_zero();
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const Sample& s = *batch[b];
      const double w = s.label ? cfg.w1 : cfg.w0;
      const double ce_coef = (cfg.mode == LossMode::WeightedMean ? w : 1.0) / denom;
      const bool reg_active = fw[b].enc.x_star_norm >= cfg.norm_floor;
      backward(p, fw[b], s.label, ce_coef, cfg.alpha / n, reg_active, cache, *grads);
    }
    cache.backward(*grads);
    if (!grads->all_finite()) throw ModelError("non-finite value in gradient computation");
  }
  return r;
}

}  // namespace

std::vector<double> embed_path(const ModelParams& params, std::span<const int> ids) {
  LstmTape tape;
  lstm_forward(params, ids, tape);
  const auto out = tape.output(params.dims.d_c);
  return {out.begin(), out.end()};
}

StatementEncoding encode_statement(const ModelParams& params, const FeatureSet& features, int shape,
                                   std::span<const Bit> values) {
  PathCache cache(params, features);
  Forward fw;
  forward(params, features.statements.at(shape), values, cache, fw);
  return std::move(fw.enc);
}

namespace {
Prediction to_prediction(StatementEncoding&& e) {
  Prediction pr;
  pr.probs = std::move(e.probs);
  pr.weights = std::move(e.weights);
  pr.predicted = static_cast<int>(std::max_element(pr.probs.begin(), pr.probs.end()) - pr.probs.begin());
  return pr;
}
}  // namespace

Prediction predict(const ModelParams& params, const FeatureSet& features, int shape, std::span<const Bit> values) {
  return to_prediction(encode_statement(params, features, shape, values));
}

struct PathEncoderCache::Impl {
  const ModelParams& params;
  const FeatureSet& features;
  PathCache cache;
  Forward fw;
};

PathEncoderCache::PathEncoderCache(const ModelParams& params, const FeatureSet& features)
    : impl_(new Impl{params, features, PathCache(params, features), {}}) {}

PathEncoderCache::~PathEncoderCache() = default;

Prediction PathEncoderCache::predict(int shape, std::span<const Bit> values) {
  forward(impl_->params, impl_->features.statements.at(shape), values, impl_->cache, impl_->fw);
  return to_prediction(std::move(impl_->fw.enc));
}

Prediction predict(const ModelParams& params, const Statement& statement, std::span<const Bit> values) {
  if (statement.rhs_operands.empty())
    throw ModelError("constant assignment " + statement.id.str() + " has no operands to attend to");
  FeatureSet f;
  const int shape = f.add(statement);
  return predict(params, f, shape, values);
}

LossResult batch_loss(const ModelParams& params, const FeatureSet& features, std::span<const Sample* const> batch,
                      const LossConfig& config) {
  return run_batch(params, features, batch, config, nullptr);
}

LossResult loss_and_gradients(const ModelParams& params, const FeatureSet& features,
                              std::span<const Sample* const> batch, const LossConfig& config, ModelParams& grads) {
  return run_batch(params, features, batch, config, &grads);
}

}  // namespace attnloc
