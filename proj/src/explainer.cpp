#include <algorithm>
#include <cmath>
#include <iostream>

#include <json.hpp>

#include "attnloc/explainer.hpp"
#include "attnloc/rng.hpp"

namespace attnloc {

namespace {
constexpr std::string_view kScenarioNames[] = {"absent", "only_passing", "only_failing", "both"};
}

std::string_view scenario_name(Scenario s) { return kScenarioNames[static_cast<int>(s)]; }

Scenario classify_presence(bool in_failing, bool in_passing) {
  if (in_failing) return in_passing ? Scenario::Both : Scenario::OnlyFailing;
  return in_passing ? Scenario::OnlyPassing : Scenario::Absent;
}

AttentionModel::AttentionModel(const ModelParams& params, const Design& design) : params_(params) {
  for (const Statement* s : design.statements())
    if (!s->rhs_operands.empty()) shapes_[s->id] = features_.add(*s);
  cache_ = std::make_unique<PathEncoderCache>(params_, features_);
}

AttentionModel::~AttentionModel() = default;

Prediction AttentionModel::predict(const StatementId& id, std::span<const Bit> operand_values) {
  auto it = shapes_.find(id);
  if (it == shapes_.end()) throw ModelError("statement " + id.str() + " has no operands to attend to");
  return cache_->predict(it->second, operand_values);
}

std::vector<double> AttentionModel::weights(const StatementId& id, std::span<const Bit> operand_values) {
  if (!shapes_.count(id)) return {};
  return predict(id, operand_values).weights;
}

AttentionMap attention_map(const Trace& trace, const DynamicSlice& slice, AttentionModel& model, int trace_id) {
  AttentionMap m;
  m.trace = trace_id;
  for (const auto& e : trace.executions) {
    if (!slice.contains(e.statement)) continue;
    auto w = model.weights(e.statement, e.operand_values);
    if (w.empty()) continue;  // constant assignment
    m.entries[e.statement].push_back(std::move(w));
  }
  return m;
}

AggregatedMap aggregate_maps(const std::vector<AttentionMap>& maps, MapSide side) {
  AggregatedMap out;
  out.side = side;
  for (const auto& m : maps) {
    for (const auto& [id, instances] : m.entries) {
      auto& e = out.entries[id];
      for (const auto& w : instances) {
        if (e.mean.empty()) e.mean.assign(w.size(), 0.0);
        if (e.mean.size() != w.size()) throw Error("attention width mismatch for statement " + id.str());
        for (std::size_t i = 0; i < w.size(); ++i) e.mean[i] += w[i];
        ++e.count;
      }
    }
  }
  for (auto it = out.entries.begin(); it != out.entries.end();) {
    if (it->second.count == 0) {
      it = out.entries.erase(it);
      continue;
    }
    for (auto& v : it->second.mean) v /= static_cast<double>(it->second.count);
    ++it;
  }
  return out;
}

double suspiciousness(const std::vector<double>& f, const std::vector<double>& c) {
  if (f.size() != c.size())
    throw Error("suspiciousness: weight vectors differ in length (" + std::to_string(f.size()) + " vs " +
                std::to_string(c.size()) + ")");
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) d += std::abs(f[i] - c[i]);
  return std::clamp(d / 2.0, 0.0, 1.0);
}

Heatmap build_heatmap(const AggregatedMap& failing, const AggregatedMap& passing, const std::string& target,
                      double threshold) {
  Heatmap h;
  h.target = target;
  h.threshold = threshold;
  for (const auto& [id, f] : failing.entries) {
    auto c = passing.entries.find(id);
    HeatmapEntry e;
    e.scenario = classify_presence(true, c != passing.entries.end());
    e.f_weights = f.mean;
    if (e.scenario == Scenario::OnlyFailing) {
      e.score = 1.0;
    } else {
      e.score = suspiciousness(f.mean, c->second.mean);
      if (e.score < threshold) continue;
      e.c_weights = c->second.mean;
    }
    h.entries.emplace(id, std::move(e));
  }
  return h;
}

std::optional<int> Localization::rank_of(const StatementId& id) const {
  for (const auto& r : ranking)
    if (r.id == id) return r.rank;
  return std::nullopt;
}

std::vector<RankedStatement> combine_heatmaps(const std::vector<Heatmap>& runs) {
  std::map<StatementId, RankedStatement> best;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& [id, e] : runs[r].entries) {
      auto it = best.find(id);
      if (it == best.end() || e.score > it->second.entry.score) best[id] = {id, e, 0, static_cast<int>(r)};
    }
  }
  std::vector<RankedStatement> out;
  for (auto& [id, r] : best) out.push_back(std::move(r));
  std::stable_sort(out.begin(), out.end(), [](const RankedStatement& a, const RankedStatement& b) {
    if (a.entry.score != b.entry.score) return a.entry.score > b.entry.score;
    return a.id < b.id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

Localization localize(const Design& golden, const Design& mutant, const std::string& target, const ModelParams& params,
                      const LocalizeConfig& config) {
  if (config.runs < 1) throw Error("localize needs at least one run");
  if (config.cycles < 1 || config.window < 1) throw Error("cycles and window must be at least 1");
  if (!mutant.find_signal(target) || !golden.find_signal(target)) throw Error("unknown target '" + target + "'");
  if (golden.inputs() != mutant.inputs()) throw Error("golden and mutant designs have different inputs");

  const Simulator gsim(golden);
  const Simulator msim(mutant);
  const Cdfg cdfg = build_cdfg(mutant);
  const DependenceSet deps = dependence_set(build_vdg(mutant), target);
  AttentionModel model(params, mutant);

  Localization loc;
  loc.target = target;
  loc.threshold = config.threshold;
  loc.config = config;
  std::vector<Heatmap> heatmaps;
  std::vector<int> heatmap_run;
  std::vector<AttentionMap> all_failing, all_passing;
  int trace_id = 0;
  for (int r = 0; r < config.runs; ++r) {
    const auto stim = generate_testbench(mutant, config.cycles, mix_seed(config.seed, static_cast<std::uint64_t>(r)));
    const Trace gt = gsim.run(stim);
    const Trace mt = msim.run(stim);
    std::vector<AttentionMap> failing, passing;
    for (int begin = 0; begin < config.cycles; begin += config.window) {
      const int end = std::min(config.cycles, begin + config.window);
      Trace mw = mt.window(begin, end);
      mw.label = classify_trace(mw, gt.window(begin, end), target);
      const DynamicSlice slice = dynamic_slice(cdfg, deps, mw);
      auto map = attention_map(mw, slice, model, trace_id++);
      (mw.label == TraceLabel::Failure ? failing : passing).push_back(std::move(map));
    }
    loc.failing_windows += static_cast<int>(failing.size());
    loc.passing_windows += static_cast<int>(passing.size());
    if (!config.pooled && !failing.empty()) {
      heatmaps.push_back(build_heatmap(aggregate_maps(failing, MapSide::Failing),
                                       aggregate_maps(passing, MapSide::Passing), target, config.threshold));
      heatmap_run.push_back(r);
    }
    all_failing.insert(all_failing.end(), failing.begin(), failing.end());
    all_passing.insert(all_passing.end(), passing.begin(), passing.end());
  }
  if (loc.failing_windows == 0)
    throw NotObservableError("bug not observable at '" + target + "' in " + std::to_string(config.runs) + " runs of " +
                             std::to_string(config.cycles) + " cycles");
  loc.passing = aggregate_maps(all_passing, MapSide::Passing);
  if (config.pooled) {
    heatmaps.push_back(build_heatmap(aggregate_maps(all_failing, MapSide::Failing), loc.passing, target,
                                     config.threshold));
  }
  loc.ranking = combine_heatmaps(heatmaps);
  for (auto& r : loc.ranking) r.run = config.pooled ? -1 : heatmap_run[r.run];
  return loc;
}

std::string localization_to_json(const Localization& loc, const Design& design) {
  using json = nlohmann::ordered_json;
  json j;
  j["target"] = loc.target;
  j["threshold"] = loc.threshold;
  j["config"] = {{"runs", loc.config.runs},     {"cycles", loc.config.cycles}, {"window", loc.config.window},
                 {"pooled", loc.config.pooled}, {"seed", loc.config.seed}};
  j["failing_windows"] = loc.failing_windows;
  j["passing_windows"] = loc.passing_windows;
  j["statements"] = json::array();
  for (const auto& r : loc.ranking) {
    const Statement* s = design.find_statement(r.id);
    if (!s) throw Error("localization references unknown statement " + r.id.str());
    json e;
    e["id"] = r.id.str();
    e["scenario"] = scenario_name(r.entry.scenario);
    e["score"] = r.entry.score;
    e["f_weights"] = r.entry.f_weights;
    e["c_weights"] = r.entry.c_weights ? json(*r.entry.c_weights) : json(nullptr);
    e["rank"] = r.rank;
    e["run"] = r.run;
    e["operands"] = s->rhs_operands;
    e["text"] = print_statement(*s);
    j["statements"].push_back(std::move(e));
  }
  j["passing"] = json::array();
  for (const auto& [id, e] : loc.passing.entries)
    j["passing"].push_back({{"id", id.str()}, {"mean", e.mean}, {"count", e.count}});
  return j.dump(1);
}

Localization localization_from_json(const std::string& text) {
  using json = nlohmann::ordered_json;
  try {
    const json j = json::parse(text);
    Localization loc;
    loc.target = j.at("target");
    loc.threshold = j.at("threshold");
    if (j.contains("config")) {
      const auto& c = j["config"];
      loc.config.runs = c.value("runs", loc.config.runs);
      loc.config.cycles = c.value("cycles", loc.config.cycles);
      loc.config.window = c.value("window", loc.config.window);
      loc.config.pooled = c.value("pooled", loc.config.pooled);
      loc.config.seed = c.value("seed", loc.config.seed);
    }
    loc.config.threshold = loc.threshold;
    loc.failing_windows = j.value("failing_windows", 0);
    loc.passing_windows = j.value("passing_windows", 0);
    auto parse_id = [](const std::string& s) {
      auto id = StatementId::parse(s);
      if (!id) throw Error("bad statement id '" + s + "'");
      return *id;
    };
    for (const auto& e : j.at("statements")) {
      RankedStatement r;
      r.id = parse_id(e.at("id"));
      const std::string sc = e.at("scenario");
      const auto* it = std::find(std::begin(kScenarioNames), std::end(kScenarioNames), sc);
      if (it == std::end(kScenarioNames)) throw Error("unknown scenario '" + sc + "'");
      r.entry.scenario = static_cast<Scenario>(it - std::begin(kScenarioNames));
      r.entry.score = e.at("score");
      r.entry.f_weights = e.at("f_weights").get<std::vector<double>>();
      if (!e.at("c_weights").is_null()) r.entry.c_weights = e["c_weights"].get<std::vector<double>>();
      r.rank = e.at("rank");
      r.run = e.value("run", 0);
      loc.ranking.push_back(std::move(r));
    }
    loc.passing.side = MapSide::Passing;
    if (j.contains("passing"))
      for (const auto& e : j["passing"])
        loc.passing.entries[parse_id(e.at("id"))] = {e.at("mean").get<std::vector<double>>(), e.at("count")};
    return loc;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed localization JSON: ") + e.what());
  }
}

}  // namespace attnloc
