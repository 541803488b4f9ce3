#include <fstream>
#include <sstream>

#include <json.hpp>

#include "attnloc/model.hpp"

namespace attnloc {

namespace {
constexpr const char* kFormat = "attnloc-checkpoint";
constexpr int kVersion = 1;

using json = nlohmann::ordered_json;

json dims_json(const ModelDims& d) {
  return {{"vocab", d.vocab}, {"d_n", d.d_n}, {"d_c", d.d_c}, {"d_v", d.d_v},
          {"d_a", d.d_a},     {"d_h", d.d_h}, {"classes", d.classes}};
}
}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  const auto& vocab = Vocabulary::standard();
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["dims"] = dims_json(ckpt.params.dims);
  j["architecture"] = {
      {"path_encoder", "lstm, gates i f g o, zero initial state, final hidden state"},
      {"operand_embedding", "x_i = concat(sum of path embeddings, one_hot(value))"},
      {"aggregation", "x*_i = tanh(W (sum_j x_j + epsilon x_i) + b)"},
      {"attention", "w = softmax(a . x*_i), s = sum_i w_i x_i"},
      {"predictor", "relu dense then linear to class logits, softmax"},
  };
  j["vocabulary"] = {{"tokens", vocab.tokens()}, {"hash", vocab.hash()}};
  j["loss"] = {{"alpha", ckpt.loss.alpha},
               {"w0", ckpt.loss.w0},
               {"w1", ckpt.loss.w1},
               {"mode", ckpt.loss.mode == LossMode::WeightedMean ? "weighted_mean" : "as_printed"},
               {"norm_floor", ckpt.loss.norm_floor}};
  j["notes"] = ckpt.notes;
  json params = json::object();
  for (int g = 0; g < kParamGroupCount; ++g)
    params[std::string(param_group_name(static_cast<ParamGroup>(g)))] = ckpt.params.groups[g];
  j["params"] = std::move(params);
  return j.dump(1);
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed checkpoint: ") + e.what());
  }
  try {
    if (j.value("format", "") != kFormat) throw ModelError("not an attnloc checkpoint");
    const int version = j.at("version").get<int>();
    if (version != kVersion) throw ModelError("unsupported checkpoint version " + std::to_string(version));
    const auto& jd = j.at("dims");
    ModelDims d;
    d.vocab = jd.at("vocab");
    d.d_n = jd.at("d_n");
    d.d_c = jd.at("d_c");
    d.d_v = jd.at("d_v");
    d.d_a = jd.at("d_a");
    d.d_h = jd.at("d_h");
    d.classes = jd.at("classes");
    const auto& vocab = Vocabulary::standard();
    if (d.vocab != vocab.size()) throw ModelError("checkpoint vocabulary size does not match");
    if (d.d_v != 2 || d.classes != 2) throw ModelError("checkpoint dimensions do not match the model");
    const std::string hash = j.at("vocabulary").at("hash");
    if (hash != vocab.hash()) throw ModelError("checkpoint vocabulary hash " + hash + " does not match " + vocab.hash());

    Checkpoint c;
    c.params = ModelParams::zeros(d);
    const auto& jp = j.at("params");
    for (int g = 0; g < kParamGroupCount; ++g) {
      const std::string name(param_group_name(static_cast<ParamGroup>(g)));
      auto values = jp.at(name).get<std::vector<double>>();
      if (values.size() != c.params.groups[g].size())
        throw ModelError("checkpoint group " + name + " has " + std::to_string(values.size()) + " values, expected " +
                         std::to_string(c.params.groups[g].size()));
      c.params.groups[g] = std::move(values);
    }
    if (!c.params.all_finite()) throw ModelError("checkpoint contains non-finite parameters");
    if (j.contains("loss")) {
      const auto& jl = j["loss"];
      c.loss.alpha = jl.value("alpha", c.loss.alpha);
      c.loss.w0 = jl.value("w0", c.loss.w0);
      c.loss.w1 = jl.value("w1", c.loss.w1);
      c.loss.mode = jl.value("mode", std::string("weighted_mean")) == "as_printed" ? LossMode::AsPrinted
                                                                                  : LossMode::WeightedMean;
      c.loss.norm_floor = jl.value("norm_floor", c.loss.norm_floor);
    }
    c.notes = j.value("notes", "");
    return c;
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write checkpoint '" + path + "'");
  os << checkpoint_to_json(ckpt) << '\n';
  if (!os) throw Error("cannot write checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot read checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace attnloc
