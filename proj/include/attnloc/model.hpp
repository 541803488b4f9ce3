#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "attnloc/context.hpp"
#include "attnloc/frontend.hpp"
#include "attnloc/sim.hpp"

namespace attnloc {

struct ModelDims {
  int vocab = kNodeKindCount + 1;
  int d_n = 8;    // token embedding
  int d_c = 16;   // path / context embedding (LSTM hidden size)
  int d_v = 2;    // one-hot operand value
  int d_a = 32;   // updated operand embedding / attention vector
  int d_h = 16;   // hidden width of the prediction MLP
  int classes = 2;

  int d_x() const { return d_c + d_v; }
  bool operator==(const ModelDims&) const = default;
};

// Parameter groups in checkpoint order. Matrices are row-major.
enum class ParamGroup : int {
  TokenEmbedding,  // vocab x d_n
  LstmInput,       // 4*d_c x d_n, gate blocks i, f, g, o
  LstmRecurrent,   // 4*d_c x d_c
  LstmBias,        // 4*d_c
  AggWeight,       // d_a x d_x        (theta1, followed by tanh)
  AggBias,         // d_a
  SkipEpsilon,     // 1
  Attention,       // d_a
  HiddenWeight,    // d_h x d_x        (theta2 layer 1, followed by ReLU)
  HiddenBias,      // d_h
  OutputWeight,    // classes x d_h    (theta2 layer 2 -> logits)
  OutputBias,      // classes
};
inline constexpr int kParamGroupCount = 12;

std::string_view param_group_name(ParamGroup g);

struct ModelParams {
  ModelDims dims;
  std::array<std::vector<double>, kParamGroupCount> groups;

  static ModelParams zeros(const ModelDims& dims);
  // epsilon = 1; attention ~ U(+-1/sqrt(d_a)); dense and recurrent weights
  // ~ U(+-1/sqrt(fan_in)); token table ~ N(0, 1).
  static ModelParams initialize(const ModelDims& dims, std::uint64_t seed);

  std::vector<double>& operator[](ParamGroup g) { return groups[static_cast<int>(g)]; }
  const std::vector<double>& operator[](ParamGroup g) const { return groups[static_cast<int>(g)]; }
  double epsilon() const { return (*this)[ParamGroup::SkipEpsilon][0]; }

  std::size_t size() const;
  bool all_finite() const;
  void set_zero();
  bool operator==(const ModelParams&) const = default;
};

// Interned encoded paths, shared by every statement of a dataset.
struct PathTable {
  std::vector<std::vector<int>> paths;
  std::map<std::vector<int>, int> index;

  int intern(const std::vector<int>& ids);
};

// Per operand occurrence: indices into a PathTable.
struct StatementFeatures {
  std::vector<std::vector<int>> operand_paths;

  std::size_t operand_count() const { return operand_paths.size(); }
  bool operator==(const StatementFeatures&) const = default;
};

struct FeatureSet {
  PathTable paths;
  std::vector<StatementFeatures> statements;

  // Encodes a statement's contexts; identical shapes share one entry.
  int add(const Statement& s, const Vocabulary& vocab = Vocabulary::standard());

 private:
  std::map<std::vector<std::vector<std::vector<int>>>, int> shape_index_;
};

// Forward artifacts for one statement execution.
struct StatementEncoding {
  std::vector<std::vector<double>> path_embeddings;  // [operand] -> one d_c block per path
  std::vector<std::vector<double>> context;           // c_i
  std::vector<std::vector<double>> x;                 // x_i = (c_i || v_i)
  std::vector<double> sum_x;                          // sum_j x_j
  std::vector<std::vector<double>> z;                 // sum_x + eps * x_i
  std::vector<std::vector<double>> x_star;            // tanh(theta1 z_i)
  std::vector<double> scores;                         // <a, x*_i>
  std::vector<double> weights;                        // softmax(scores)
  std::vector<double> s;                              // sum_i w_i x_i
  std::vector<double> hidden_pre;
  std::vector<double> hidden;
  std::vector<double> logits;
  std::vector<double> probs;
  double x_star_norm = 0.0;  // Frobenius
};

struct Prediction {
  std::vector<double> probs;
  std::vector<double> weights;
  int predicted = 0;
};

// Final LSTM hidden state over the token embeddings of a nonempty id path.
std::vector<double> embed_path(const ModelParams& params, std::span<const int> ids);

StatementEncoding encode_statement(const ModelParams& params, const FeatureSet& features, int shape,
                                   std::span<const Bit> values);
Prediction predict(const ModelParams& params, const FeatureSet& features, int shape, std::span<const Bit> values);

// Path embeddings computed on first use and kept for later predictions with
// the same parameters and feature set. Both must outlive the cache.
class PathEncoderCache {
 public:
  PathEncoderCache(const ModelParams& params, const FeatureSet& features);
  ~PathEncoderCache();
  PathEncoderCache(const PathEncoderCache&) = delete;
  PathEncoderCache& operator=(const PathEncoderCache&) = delete;

  Prediction predict(int shape, std::span<const Bit> values);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};
// Convenience for one-off predictions; throws for constant assignments.
Prediction predict(const ModelParams& params, const Statement& statement, std::span<const Bit> values);

enum class LossMode : std::uint8_t {
  WeightedMean,  // sum w_y CE / sum w_y
  AsPrinted,     // sum CE / sum w_y
};

struct LossConfig {
  double alpha = 0.10;
  double w0 = 1.0;
  double w1 = 1.0;
  LossMode mode = LossMode::WeightedMean;
  double norm_floor = 1e-8;
};

struct Sample {
  int shape = 0;
  std::vector<Bit> values;
  Bit label = 0;
};

struct LossResult {
  double loss = 0.0;
  double ce_term = 0.0;
  double reg_term = 0.0;
  int clamped = 0;  // samples whose ||X*|| hit the floor
};

LossResult batch_loss(const ModelParams& params, const FeatureSet& features, std::span<const Sample* const> batch,
                      const LossConfig& config);
// Exact reverse-mode gradients of batch_loss. `grads` is overwritten.
LossResult loss_and_gradients(const ModelParams& params, const FeatureSet& features,
                              std::span<const Sample* const> batch, const LossConfig& config, ModelParams& grads);

// Versioned JSON checkpoint.
struct Checkpoint {
  ModelParams params;
  LossConfig loss;
  std::string notes;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace attnloc
