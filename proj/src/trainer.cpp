#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "attnloc/rng.hpp"
#include "attnloc/trainer.hpp"

namespace attnloc {

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw Error("learning rate must be positive");
  if (!(weight_decay > 0.0)) throw Error("weight decay must be positive");
  if (batch_size < 1) throw Error("batch size must be at least 1");
  if (epochs < 1) throw Error("epochs must be at least 1");
  if (!(alpha >= 0.0)) throw Error("alpha must be non-negative");
  if (patience < 0) throw Error("patience must be non-negative");
}

OptimizerState OptimizerState::for_params(const ModelParams& params) {
  OptimizerState s;
  s.m = ModelParams::zeros(params.dims);
  s.v = ModelParams::zeros(params.dims);
  return s;
}

void adam_step(ModelParams& params, const ModelParams& grads, OptimizerState& state, double lr, double weight_decay) {
  if (!(grads.dims == params.dims) || grads.size() != params.size()) throw ModelError("gradient shape mismatch");
  if (state.m.size() != params.size()) state = OptimizerState::for_params(params);
  if (!grads.all_finite()) throw ModelError("non-finite gradient passed to the optimizer");
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const double decay = 1.0 - lr * weight_decay;
  for (int g = 0; g < kParamGroupCount; ++g) {
    auto& p = params.groups[g];
    const auto& gr = grads.groups[g];
    auto& m = state.m.groups[g];
    auto& v = state.v.groups[g];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * gr[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * gr[i] * gr[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] = p[i] * decay - lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

std::array<std::size_t, 2> Dataset::label_counts() const {
  std::array<std::size_t, 2> c{};
  for (const auto& s : samples) ++c[s.sample.label ? 1 : 0];
  return c;
}

std::vector<const Sample*> Dataset::sample_pointers() const {
  std::vector<const Sample*> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(&s.sample);
  return out;
}

void add_trace(Dataset& dataset, const Design& design, const Trace& trace) {
  const int design_index = static_cast<int>(dataset.designs.size());
  dataset.designs.push_back(design.name);
  std::map<StatementId, int> shapes;
  for (const Statement* s : design.statements())
    if (!s->rhs_operands.empty()) shapes[s->id] = dataset.features.add(*s);

  std::map<std::string, int> producer;  // variable -> sample index, current cycle
  int cycle = -1;
  for (const auto& e : trace.executions) {
    if (e.cycle != cycle) {
      producer.clear();
      cycle = e.cycle;
    }
    const Statement* st = design.find_statement(e.statement);
    if (!st) throw Error("trace references unknown statement " + e.statement.str());
    if (st->rhs_operands.empty()) {
      producer.erase(st->lhs);
      continue;
    }
    DatasetSample ds;
    ds.design = design_index;
    ds.cycle = trace.first_cycle + e.cycle;
    ds.statement = e.statement;
    ds.sample.shape = shapes.at(e.statement);
    ds.sample.values = e.operand_values;
    ds.sample.label = e.lhs_value;
    for (const auto& op : st->rhs_operands) {
      auto it = producer.find(op);
      ds.producers.push_back(it == producer.end() ? -1 : it->second);
    }
    const int index = static_cast<int>(dataset.samples.size());
    dataset.samples.push_back(std::move(ds));
    // Nonblocking writes are not visible within the cycle.
    if (e.arm >= 0) producer[st->lhs] = index;
  }
}

Dataset build_dataset(const std::vector<Design>& designs, int cycles, std::uint64_t seed) {
  Dataset d;
  for (std::size_t i = 0; i < designs.size(); ++i) {
    const auto stim = generate_testbench(designs[i], cycles, mix_seed(seed, i));
    add_trace(d, designs[i], simulate(designs[i], stim));
  }
  if (d.samples.empty()) throw Error("empty dataset: no executed statement has an operand");
  return d;
}

std::array<double, 2> class_weights(const std::array<std::size_t, 2>& counts) {
  if (counts[0] == 0 || counts[1] == 0) return {1.0, 1.0};
  const double inv0 = 1.0 / static_cast<double>(counts[0]);
  const double inv1 = 1.0 / static_cast<double>(counts[1]);
  const double mean = 0.5 * (inv0 + inv1);
  return {inv0 / mean, inv1 / mean};
}

PredictorMetrics tally_metrics(const std::vector<std::pair<int, int>>& outcomes) {
  PredictorMetrics m;
  m.count = outcomes.size();
  std::size_t correct = 0;
  for (const auto& [actual, predicted] : outcomes) {
    ++m.confusion[actual][predicted];
    correct += actual == predicted;
  }
  m.accuracy = m.count ? static_cast<double>(correct) / static_cast<double>(m.count) : 0.0;
  for (int c = 0; c < 2; ++c) {
    const std::size_t tp = m.confusion[c][c];
    const std::size_t predicted = m.confusion[0][c] + m.confusion[1][c];
    const std::size_t actual = m.confusion[c][0] + m.confusion[c][1];
    m.precision[c] = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall[c] = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
  }
  return m;
}

PredictorMetrics evaluate_predictor(const ModelParams& params, const Dataset& holdout, bool chained) {
  if (holdout.samples.empty()) throw Error("empty holdout set");
  PathEncoderCache cache(params, holdout.features);
  std::vector<int> predicted(holdout.samples.size());
  std::vector<std::pair<int, int>> outcomes;
  outcomes.reserve(holdout.samples.size());
  std::vector<Bit> values;
  for (std::size_t i = 0; i < holdout.samples.size(); ++i) {
    const auto& s = holdout.samples[i];
    values = s.sample.values;
    if (chained)
      for (std::size_t k = 0; k < values.size(); ++k)
        if (s.producers[k] >= 0) values[k] = static_cast<Bit>(predicted[s.producers[k]]);
    predicted[i] = cache.predict(s.sample.shape, values).predicted;
    outcomes.emplace_back(s.sample.label, predicted[i]);
  }
  return tally_metrics(outcomes);
}

TrainResult train(const Dataset& train_set, const Dataset* holdout, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.samples.empty()) throw Error("empty training set");
  const auto weights = class_weights(train_set.label_counts());
  LossConfig loss;
  loss.alpha = config.alpha;
  loss.w0 = weights[0];
  loss.w1 = weights[1];
  loss.mode = config.loss_mode;

  ModelParams params = ModelParams::initialize(config.dims, mix_seed(config.seed, 0));
  ModelParams grads = ModelParams::zeros(config.dims);
  OptimizerState opt = OptimizerState::for_params(params);
  const auto all = train_set.sample_pointers();
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<const Sample*> batch;

  TrainResult result;
  double best = -1.0;
  int stale = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng(mix_seed(config.seed, 1000 + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order.begin(), order.end());
    double total = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(all[order[i]]);
      LossResult r;
      try {
        r = loss_and_gradients(params, train_set.features, batch, loss, grads);
      } catch (const ModelError& e) {
        throw ModelError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                         std::to_string(start / config.batch_size) + ": " + e.what());
      }
      adam_step(params, grads, opt, config.lr, config.weight_decay);
      total += r.loss * static_cast<double>(batch.size());
      seen += batch.size();
    }
    EpochStats st;
    st.epoch = epoch;
    st.train_loss = total / static_cast<double>(seen);
    if (!std::isfinite(st.train_loss)) throw ModelError("training loss is not finite at epoch " + std::to_string(epoch));
    if (holdout) st.holdout_accuracy = evaluate_predictor(params, *holdout).accuracy;
    result.curve.push_back(st);
    if (on_epoch) on_epoch(st);
    if (holdout && config.patience > 0) {
      if (st.holdout_accuracy > best) {
        best = st.holdout_accuracy;
        stale = 0;
      } else if (++stale >= config.patience) {
        result.stopped_early = true;
        break;
      }
    }
  }
  result.checkpoint.params = std::move(params);
  result.checkpoint.loss = loss;
  result.checkpoint.notes = "trained " + std::to_string(result.curve.size()) + " epochs, seed " +
                            std::to_string(config.seed);
  return result;
}

void write_loss_curve_csv(const std::vector<EpochStats>& curve, std::ostream& os) {
  os << "epoch,train_loss,holdout_acc\n";
  for (const auto& e : curve) {
    os << e.epoch << ',' << e.train_loss << ',';
    if (e.holdout_accuracy >= 0.0) os << e.holdout_accuracy;
    os << '\n';
  }
}

std::pair<std::vector<Design>, std::vector<Design>> split_designs(const std::vector<Design>& designs,
                                                                  double train_fraction) {
  const auto n = static_cast<std::size_t>(std::llround(static_cast<double>(designs.size()) * train_fraction));
  std::pair<std::vector<Design>, std::vector<Design>> out;
  for (std::size_t i = 0; i < designs.size(); ++i) (i < n ? out.first : out.second).push_back(designs[i]);
  return out;
}

}  // namespace attnloc
