#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "attnloc/model.hpp"

namespace attnloc {

struct TrainConfig {
  double lr = 1e-3;
  double weight_decay = 1e-5;
  int batch_size = 64;
  int epochs = 20;
  double alpha = 0.10;
  std::uint64_t seed = 1;
  bool reproducible = true;
  int patience = 5;  // epochs without holdout improvement before stopping; 0 disables
  LossMode loss_mode = LossMode::WeightedMean;
  ModelDims dims;

  void validate() const;
};

struct OptimizerState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  ModelParams m;
  ModelParams v;

  static OptimizerState for_params(const ModelParams& params);
};

// Adam with decoupled weight decay: theta <- theta * (1 - lr * wd) before the
// moment update is applied. Throws ModelError on a non-finite gradient.
void adam_step(ModelParams& params, const ModelParams& grads, OptimizerState& state, double lr, double weight_decay);

struct DatasetSample {
  int design = 0;
  int cycle = 0;
  StatementId statement;
  Sample sample;
  // Per operand: index of the sample in this dataset that produced its value
  // within the same cycle, or -1 when the value comes from an input, a
  // register, or a constant assignment.
  std::vector<int> producers;
};

struct Dataset {
  FeatureSet features;
  std::vector<DatasetSample> samples;
  std::vector<std::string> designs;

  std::array<std::size_t, 2> label_counts() const;
  std::vector<const Sample*> sample_pointers() const;
};

// One sample per executed statement instance with at least one operand;
// operand values are the trace's ground truth.
void add_trace(Dataset& dataset, const Design& design, const Trace& trace);
// Simulates each design on its own random stimulus derived from seed.
Dataset build_dataset(const std::vector<Design>& designs, int cycles, std::uint64_t seed);

// Inverse label frequencies normalized to mean 1; both 1 if a class is absent.
std::array<double, 2> class_weights(const std::array<std::size_t, 2>& counts);

struct PredictorMetrics {
  std::size_t count = 0;
  double accuracy = 0.0;
  std::array<double, 2> precision{};
  std::array<double, 2> recall{};
  std::array<std::array<std::size_t, 2>, 2> confusion{};  // [actual][predicted]
};

// Metrics from (actual, predicted) label pairs.
PredictorMetrics tally_metrics(const std::vector<std::pair<int, int>>& outcomes);

// With chained = true, operands produced earlier in the same cycle take the
// model's own predictions instead of the trace values.
PredictorMetrics evaluate_predictor(const ModelParams& params, const Dataset& holdout, bool chained = false);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double holdout_accuracy = -1.0;  // negative when no holdout was given
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochStats> curve;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochStats&)>;

TrainResult train(const Dataset& train_set, const Dataset* holdout, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

void write_loss_curve_csv(const std::vector<EpochStats>& curve, std::ostream& os);

// Design-level split: the first round(n * train_fraction) designs train.
std::pair<std::vector<Design>, std::vector<Design>> split_designs(const std::vector<Design>& designs,
                                                                  double train_fraction);

}  // namespace attnloc
