#include <cmath>

#include "attnloc/model.hpp"
#include "attnloc/rng.hpp"

namespace attnloc {

namespace {
constexpr std::array<std::string_view, kParamGroupCount> kGroupNames = {
    "token_embedding", "lstm_input",    "lstm_recurrent", "lstm_bias",     "agg_weight",    "agg_bias",
    "skip_epsilon",    "attention",     "hidden_weight",  "hidden_bias",   "output_weight", "output_bias",
};

std::array<std::size_t, kParamGroupCount> group_sizes(const ModelDims& d) {
  const std::size_t g4 = 4 * static_cast<std::size_t>(d.d_c);
  return {
      static_cast<std::size_t>(d.vocab * d.d_n),
      g4 * d.d_n,
      g4 * d.d_c,
      g4,
      static_cast<std::size_t>(d.d_a * d.d_x()),
      static_cast<std::size_t>(d.d_a),
      1,
      static_cast<std::size_t>(d.d_a),
      static_cast<std::size_t>(d.d_h * d.d_x()),
      static_cast<std::size_t>(d.d_h),
      static_cast<std::size_t>(d.classes * d.d_h),
      static_cast<std::size_t>(d.classes),
  };
}
}  // namespace

std::string_view param_group_name(ParamGroup g) { return kGroupNames[static_cast<int>(g)]; }

ModelParams ModelParams::zeros(const ModelDims& dims) {
  ModelParams p;
  p.dims = dims;
  const auto sizes = group_sizes(dims);
  for (int i = 0; i < kParamGroupCount; ++i) p.groups[i].assign(sizes[i], 0.0);
  return p;
}

ModelParams ModelParams::initialize(const ModelDims& dims, std::uint64_t seed) {
  ModelParams p = zeros(dims);
  Rng rng(seed);
  auto fill_uniform = [&](ParamGroup g, double bound) {
    for (auto& v : p[g]) v = rng.uniform(-bound, bound);
  };
  for (auto& v : p[ParamGroup::TokenEmbedding]) v = rng.normal();
  const double lstm_bound = 1.0 / std::sqrt(static_cast<double>(dims.d_c));
  fill_uniform(ParamGroup::LstmInput, lstm_bound);
  fill_uniform(ParamGroup::LstmRecurrent, lstm_bound);
  fill_uniform(ParamGroup::LstmBias, lstm_bound);
  const double x_bound = 1.0 / std::sqrt(static_cast<double>(dims.d_x()));
  fill_uniform(ParamGroup::AggWeight, x_bound);
  fill_uniform(ParamGroup::AggBias, x_bound);
  p[ParamGroup::SkipEpsilon][0] = 1.0;
  fill_uniform(ParamGroup::Attention, 1.0 / std::sqrt(static_cast<double>(dims.d_a)));
  fill_uniform(ParamGroup::HiddenWeight, x_bound);
  fill_uniform(ParamGroup::HiddenBias, x_bound);
  const double h_bound = 1.0 / std::sqrt(static_cast<double>(dims.d_h));
  fill_uniform(ParamGroup::OutputWeight, h_bound);
  fill_uniform(ParamGroup::OutputBias, h_bound);
  return p;
}

std::size_t ModelParams::size() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

bool ModelParams::all_finite() const {
  for (const auto& g : groups)
    for (double v : g)
      if (!std::isfinite(v)) return false;
  return true;
}

void ModelParams::set_zero() {
  for (auto& g : groups) std::fill(g.begin(), g.end(), 0.0);
}

int PathTable::intern(const std::vector<int>& ids) {
  auto [it, inserted] = index.emplace(ids, static_cast<int>(paths.size()));
  if (inserted) paths.push_back(ids);
  return it->second;
}

int FeatureSet::add(const Statement& s, const Vocabulary& vocab) {
  std::vector<std::vector<std::vector<int>>> encoded;
  for (const auto& ctx : extract_contexts(s)) {
    std::vector<std::vector<int>> ops;
    for (const auto& p : ctx.paths) ops.push_back(encode_path(p, vocab));
    encoded.push_back(std::move(ops));
  }
  if (auto it = shape_index_.find(encoded); it != shape_index_.end()) return it->second;
  StatementFeatures f;
  for (const auto& ops : encoded) {
    std::vector<int> idx;
    for (const auto& p : ops) idx.push_back(paths.intern(p));
    f.operand_paths.push_back(std::move(idx));
  }
  const int id = static_cast<int>(statements.size());
  statements.push_back(std::move(f));
  shape_index_.emplace(std::move(encoded), id);
  return id;
}

}  // namespace attnloc
