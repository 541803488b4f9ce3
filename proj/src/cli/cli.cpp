#include "attnloc/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <json.hpp>

#include "attnloc/campaign.hpp"
#include "attnloc/report.hpp"
#include "attnloc/rvdg.hpp"
#include "attnloc/trainer.hpp"

namespace attnloc {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string hash_hex(std::string_view text) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(text);
  return os.str();
}

// Seeds, resolved flags and input digests of one invocation. Contains no
// timestamps or absolute paths so reruns produce the same bytes.
struct RunManifest {
  json j;
  explicit RunManifest(const std::string& command, const std::vector<std::string>& args) {
    j["tool"] = "attnloc";
    j["command"] = command;
    j["args"] = args;
    j["flags"] = json::object();
    j["seeds"] = json::object();
    j["inputs"] = json::object();
  }
  template <typename T>
  void flag(const std::string& k, const T& v) { j["flags"][k] = v; }
  void seed(const std::string& k, std::uint64_t v) { j["seeds"][k] = v; }
  void input(const std::string& path, std::string_view content) { j["inputs"][path] = "fnv1a:" + hash_hex(content); }
  void write(const fs::path& path) const { write_file(path, j.dump(1) + "\n"); }
};

fs::path manifest_path(const std::string& override_path, const fs::path& primary) {
  if (!override_path.empty()) return override_path;
  return fs::path(primary.string() + ".run.json");
}

struct NamedDesign {
  std::string name;
  std::string source;
  Design design;
  std::string target;  // optional, from a design manifest
};

// Accepts `.v` files and design manifests written by `rvdg`.
std::vector<NamedDesign> load_designs(const std::vector<std::string>& paths, RunManifest& run) {
  std::vector<NamedDesign> out;
  for (const auto& p : paths) {
    const std::string text = read_file(p);
    run.input(p, text);
    if (fs::path(p).extension() != ".json") {
      NamedDesign d{fs::path(p).stem().string(), text, parse_design(text), ""};
      out.push_back(std::move(d));
      continue;
    }
    json m;
    try {
      m = json::parse(text);
    } catch (const json::exception& e) {
      throw Error("malformed design manifest '" + p + "': " + e.what());
    }
    if (m.value("format", "") != "attnloc-designs") throw Error("'" + p + "' is not a design manifest");
    const fs::path dir = fs::path(p).parent_path();
    for (const auto& e : m.at("designs")) {
      const std::string file = (dir / e.at("file").get<std::string>()).string();
      const std::string src = read_file(file);
      run.input(file, src);
      NamedDesign d{e.at("name").get<std::string>(), src, parse_design(src), e.value("target", "")};
      out.push_back(std::move(d));
    }
  }
  if (out.empty()) throw Error("no designs given");
  return out;
}

LossMode parse_loss_mode(const std::string& s) {
  if (s == "weighted_mean") return LossMode::WeightedMean;
  if (s == "as_printed") return LossMode::AsPrinted;
  throw Error("unknown loss mode '" + s + "'");
}

void print_metrics(std::ostream& out, const PredictorMetrics& m) {
  out << std::fixed << std::setprecision(4) << "samples " << m.count << "\naccuracy " << m.accuracy << "\nprecision "
      << m.precision[0] << ' ' << m.precision[1] << "\nrecall " << m.recall[0] << ' ' << m.recall[1] << '\n';
  out.unsetf(std::ios::floatfield);
}

json metrics_json(const PredictorMetrics& m) {
  return {{"samples", m.count}, {"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}};
}

// ---- subcommands ----

struct RvdgOpts {
  int count = 10;
  std::uint64_t seed = 1;
  std::string out = "designs";
  bool fixed = false;
  RvdgConfig cfg;
};

int cmd_rvdg(const RvdgOpts& o, RunManifest& run, const std::string& manifest_override, std::ostream& out) {
  if (o.count < 1) throw Error("--count must be at least 1");
  std::vector<GeneratedDesign> designs;
  if (o.fixed) {
    for (int i = 0; i < o.count; ++i) {
      GeneratedDesign g;
      g.config = o.cfg;
      g.config.seed = mix_seed(o.seed, static_cast<std::uint64_t>(i)) >> 16;
      g.source = generate_design(g.config);
      g.design = parse_design(g.source);
      designs.push_back(std::move(g));
    }
  } else {
    designs = generate_corpus(o.count, o.seed);
  }
  const fs::path dir = o.out;
  json m{{"format", "attnloc-designs"}, {"version", 1}, {"seed", o.seed}, {"designs", json::array()}};
  for (const auto& g : designs) {
    const std::string file = g.design.name + ".v";
    write_file(dir / file, g.source);
    m["designs"].push_back({{"name", g.design.name}, {"file", file}, {"config", json::parse(config_to_json(g.config))}});
  }
  write_file(dir / "designs.json", m.dump(1) + "\n");
  run.seed("corpus", o.seed);
  run.flag("count", o.count);
  run.flag("fixed", o.fixed);
  if (o.fixed) run.flag("config", json::parse(config_to_json(o.cfg)));
  run.write(manifest_path(manifest_override, dir / "designs.json"));
  out << "wrote " << designs.size() << " designs to " << dir.string() << '\n';
  return 0;
}

struct SimulateOpts {
  std::string design;
  int cycles = 64;
  std::uint64_t seed = 1;
  std::string out;
  std::string dot_vdg;
  std::string dot_cdfg;
};

int cmd_simulate(const SimulateOpts& o, RunManifest& run, const std::string& manifest_override, std::ostream& out) {
  if (o.cycles < 1) throw Error("--cycles must be at least 1");
  const std::string src = read_file(o.design);
  run.input(o.design, src);
  const Design d = parse_design(src);
  const Trace t = simulate(d, generate_testbench(d, o.cycles, o.seed));
  std::ostringstream ss;
  write_trace_jsonl(d, t, ss);
  if (o.out.empty()) {
    out << ss.str();
  } else {
    write_file(o.out, ss.str());
  }
  if (!o.dot_vdg.empty()) write_file(o.dot_vdg, build_vdg(d).to_dot());
  if (!o.dot_cdfg.empty()) write_file(o.dot_cdfg, build_cdfg(d).to_dot());
  run.seed("stimulus", o.seed);
  run.flag("cycles", o.cycles);
  if (!o.out.empty() || !manifest_override.empty()) run.write(manifest_path(manifest_override, o.out));
  return 0;
}

struct TrainOpts {
  std::vector<std::string> designs;
  int cycles = 64;
  double holdout = 0.2;
  std::string out = "checkpoint.json";
  std::string curve;
  std::string loss_mode = "weighted_mean";
  TrainConfig cfg;
};

int cmd_train(const TrainOpts& o, RunManifest& run, const std::string& manifest_override, std::ostream& out) {
  if (o.holdout < 0.0 || o.holdout >= 1.0) throw Error("--holdout must be in [0, 1)");
  TrainConfig cfg = o.cfg;
  cfg.loss_mode = parse_loss_mode(o.loss_mode);
  cfg.validate();
  if (const fs::path dir = fs::path(o.out).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::vector<Design> designs;
  for (auto& d : load_designs(o.designs, run)) designs.push_back(std::move(d.design));
  const auto [train_designs, holdout_designs] = split_designs(designs, 1.0 - o.holdout);
  if (train_designs.empty()) throw Error("no training designs after the holdout split");
  const Dataset train_set = build_dataset(train_designs, o.cycles, mix_seed(cfg.seed, 11));
  std::optional<Dataset> holdout;
  if (!holdout_designs.empty()) holdout = build_dataset(holdout_designs, o.cycles, mix_seed(cfg.seed, 12));
  out << "training on " << train_set.samples.size() << " samples from " << train_designs.size() << " designs";
  if (holdout) out << ", holdout " << holdout->samples.size() << " samples";
  out << '\n';
  const auto result = train(train_set, holdout ? &*holdout : nullptr, cfg, [&](const EpochStats& e) {
    out << "epoch " << e.epoch << " loss " << std::setprecision(6) << e.train_loss;
    if (e.holdout_accuracy >= 0) out << " holdout_acc " << e.holdout_accuracy;
    out << '\n';
  });
  save_checkpoint(result.checkpoint, o.out);
  const std::string curve = o.curve.empty() ? fs::path(o.out).replace_extension(".loss.csv").string() : o.curve;
  std::ostringstream csv;
  write_loss_curve_csv(result.curve, csv);
  write_file(curve, csv.str());
  if (holdout) print_metrics(out, evaluate_predictor(result.checkpoint.params, *holdout));
  run.seed("train", cfg.seed);
  run.flag("cycles", o.cycles);
  run.flag("holdout", o.holdout);
  run.flag("lr", cfg.lr);
  run.flag("weight_decay", cfg.weight_decay);
  run.flag("alpha", cfg.alpha);
  run.flag("batch_size", cfg.batch_size);
  run.flag("epochs", cfg.epochs);
  run.flag("patience", cfg.patience);
  run.flag("loss_mode", o.loss_mode);
  run.flag("reproducible", cfg.reproducible);
  run.write(manifest_path(manifest_override, o.out));
  return 0;
}

struct EvalOpts {
  std::vector<std::string> designs;
  std::string checkpoint;
  int cycles = 64;
  std::uint64_t seed = 1;
  bool chained = false;
  std::string json_out;
};

int cmd_eval(const EvalOpts& o, RunManifest& run, const std::string& manifest_override, std::ostream& out) {
  const std::string ck = read_file(o.checkpoint);
  run.input(o.checkpoint, ck);
  const Checkpoint ckpt = checkpoint_from_json(ck);
  std::vector<Design> designs;
  for (auto& d : load_designs(o.designs, run)) designs.push_back(std::move(d.design));
  const Dataset ds = build_dataset(designs, o.cycles, o.seed);
  const auto m = evaluate_predictor(ckpt.params, ds, o.chained);
  print_metrics(out, m);
  run.seed("stimulus", o.seed);
  run.flag("cycles", o.cycles);
  run.flag("chained", o.chained);
  if (!o.json_out.empty()) write_file(o.json_out, metrics_json(m).dump(1) + "\n");
  if (!o.json_out.empty() || !manifest_override.empty()) run.write(manifest_path(manifest_override, o.json_out));
  return 0;
}

struct InjectOpts {
  std::string design;
  std::string target;
  int index = -1;
  std::string kind;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_inject(const InjectOpts& o, RunManifest& run, const std::string& manifest_override, std::ostream& out) {
  const std::string src = read_file(o.design);
  run.input(o.design, src);
  const Design d = parse_design(src);
  const auto all = enumerate_mutations(d, o.target, dependence_set(build_vdg(d), o.target));
  if (o.index < 0 && o.kind.empty()) {
    for (std::size_t i = 0; i < all.size(); ++i)
      out << i << '\t' << mutation_kind_name(all[i].kind) << '\t' << all[i].describe() << '\n';
    return 0;
  }
  const Mutation* chosen = nullptr;
  if (o.index >= 0) {
    if (o.index >= static_cast<int>(all.size()))
      throw Error("mutation index " + std::to_string(o.index) + " out of range (" + std::to_string(all.size()) +
                  " candidates)");
    chosen = &all[o.index];
  } else {
    const MutationKind k = mutation_kind_from_name(o.kind);
    std::vector<const Mutation*> pool;
    for (const auto& m : all)
      if (m.kind == k) pool.push_back(&m);
    if (pool.empty()) throw Error("no " + o.kind + " mutation applies to the slice of " + o.target);
    Rng rng(o.seed);
    chosen = pool[rng.below(pool.size())];
  }
  const std::string mutant = pretty_print(apply_mutation(d, *chosen));
  if (o.out.empty()) {
    out << mutant;
  } else {
    write_file(o.out, mutant);
    out << chosen->describe() << '\n';
  }
  run.seed("pick", o.seed);
  run.flag("target", o.target);
  run.flag("index", o.index);
  run.flag("kind", o.kind);
  run.j["mutation"] = {{"kind", mutation_kind_name(chosen->kind)},
                       {"statement", chosen->statement.str()},
                       {"site", chosen->site},
                       {"original", chosen->original},
                       {"replacement", chosen->replacement}};
  if (!o.out.empty() || !manifest_override.empty()) run.write(manifest_path(manifest_override, o.out));
  return 0;
}

void record_localize_flags(RunManifest& run, const LocalizeConfig& c) {
  run.seed("localize", c.seed);
  run.flag("runs", c.runs);
  run.flag("cycles", c.cycles);
  run.flag("window", c.window);
  run.flag("threshold", c.threshold);
  run.flag("pooled", c.pooled);
}

void validate(const LocalizeConfig& c) {
  if (c.runs < 1) throw Error("--runs must be at least 1");
  if (c.cycles < 1) throw Error("--cycles must be at least 1");
  if (c.window < 1) throw Error("--window must be at least 1");
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw Error("--threshold must be in [0, 1]");
}

struct LocalizeOpts {
  std::string golden;
  std::string mutant;
  std::string target;
  std::string checkpoint;
  LocalizeConfig cfg;
  std::string json_out;
  std::string html_out;
  bool ansi = false;
};

int cmd_localize(const LocalizeOpts& o, RunManifest& run, const std::string& manifest_override, std::ostream& out) {
  validate(o.cfg);
  const std::string gsrc = read_file(o.golden);
  const std::string msrc = read_file(o.mutant);
  const std::string ck = read_file(o.checkpoint);
  run.input(o.golden, gsrc);
  run.input(o.mutant, msrc);
  run.input(o.checkpoint, ck);
  const Design golden = parse_design(gsrc);
  const Design mutant = parse_design(msrc);
  const Checkpoint ckpt = checkpoint_from_json(ck);
  const Localization loc = localize(golden, mutant, o.target, ckpt.params, o.cfg);
  const std::string text = localization_to_json(loc, mutant);
  if (!o.json_out.empty()) write_file(o.json_out, text + "\n");
  if (!o.html_out.empty()) write_file(o.html_out, render_html(loc, msrc, text));
  if (o.ansi) {
    out << render_ansi(loc, msrc, text);
  } else {
    for (const auto& r : loc.ranking)
      out << '#' << r.rank << ' ' << r.id.str() << ' ' << std::fixed << std::setprecision(3) << r.entry.score << ' '
          << scenario_name(r.entry.scenario) << '\n';
    if (loc.ranking.empty())
      out << "no suspicious statements above threshold " << std::fixed << std::setprecision(2) << loc.threshold << '\n';
    out.unsetf(std::ios::floatfield);
  }
  run.flag("target", o.target);
  record_localize_flags(run, o.cfg);
  const std::string primary = !o.json_out.empty() ? o.json_out : o.html_out;
  if (!primary.empty() || !manifest_override.empty()) run.write(manifest_path(manifest_override, primary));
  return 0;
}

struct CampaignOpts {
  std::vector<std::string> designs;
  std::string checkpoint;
  std::string out = "campaign";
  CampaignConfig cfg;
};

int cmd_campaign(const CampaignOpts& o, RunManifest& run, const std::string& manifest_override, std::ostream& out) {
  validate(o.cfg.localize);
  if (o.cfg.observability_stimuli < 1 || o.cfg.observability_cycles < 1)
    throw Error("observability stimuli and cycles must be at least 1");
  const std::string ck = read_file(o.checkpoint);
  run.input(o.checkpoint, ck);
  const Checkpoint ckpt = checkpoint_from_json(ck);
  std::vector<CampaignDesign> designs;
  for (auto& d : load_designs(o.designs, run)) {
    // Normalized so that statement ids match the printed mutants.
    CampaignDesign cd{d.name, parse_design(pretty_print(d.design)), d.target};
    if (cd.target.empty()) cd.target = pick_target(cd.design);
    designs.push_back(std::move(cd));
  }
  const auto plan = plan_mutants(designs, o.cfg.seed);
  if (plan.empty()) throw Error("no mutation applies to any design");
  const auto results = run_campaign(designs, plan, ckpt.params, o.cfg);

  // Sequential merge: per-mutant files first, then the joined outputs.
  const fs::path dir = o.out;
  std::string records;
  std::vector<CampaignRecord> recs;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const Design mutant = apply_mutation(designs[plan[i].design].design, plan[i].mutation);
    const std::string msrc = pretty_print(mutant);
    write_file(dir / "mutants" / (r.record.mutant_id + ".v"), msrc);
    const std::string line = record_to_json(r.record);
    write_file(dir / "records" / (r.record.mutant_id + ".json"), line + "\n");
    if (r.localization) {
      // Ids in the localization refer to the printed mutant.
      const std::string text = localization_to_json(*r.localization, parse_design(msrc));
      write_file(dir / "localizations" / (r.record.mutant_id + ".json"), text + "\n");
    }
    records += line + "\n";
    recs.push_back(r.record);
  }
  const auto report = compute_coverage(recs);
  write_file(dir / "records.jsonl", records);
  write_file(dir / "coverage.json", coverage_to_json(report) + "\n");
  const std::string table = coverage_table(report);
  write_file(dir / "coverage.txt", table);
  out << table;
  run.seed("campaign", o.cfg.seed);
  run.flag("threads", o.cfg.threads);
  run.flag("observability_stimuli", o.cfg.observability_stimuli);
  run.flag("observability_cycles", o.cfg.observability_cycles);
  record_localize_flags(run, o.cfg.localize);
  run.write(manifest_path(manifest_override, dir / "campaign"));
  return 0;
}

struct ReportOpts {
  std::string localization;
  std::string design;
  std::string html_out;
  bool ansi = false;
};

int cmd_report(const ReportOpts& o, RunManifest& run, const std::string& manifest_override, std::ostream& out) {
  const std::string text = read_file(o.localization);
  const std::string src = read_file(o.design);
  run.input(o.localization, text);
  run.input(o.design, src);
  // Trailing newline from the writer is not part of the hashed JSON.
  std::string_view body = text;
  while (!body.empty() && body.back() == '\n') body.remove_suffix(1);
  const Localization loc = localization_from_json(std::string(body));
  if (!o.html_out.empty()) write_file(o.html_out, render_html(loc, src, body));
  if (o.ansi || o.html_out.empty()) out << render_ansi(loc, src, body);
  if (!o.html_out.empty() || !manifest_override.empty()) run.write(manifest_path(manifest_override, o.html_out));
  return 0;
}

void add_localize_options(CLI::App* c, LocalizeConfig& l) {
  c->add_option("--runs", l.runs, "independent simulation runs")->capture_default_str();
  c->add_option("--cycles", l.cycles, "cycles per run")->capture_default_str();
  c->add_option("--window", l.window, "cycles per labeled window")->capture_default_str();
  c->add_option("--threshold", l.threshold, "suspiciousness threshold")->capture_default_str();
  c->add_flag("--pooled", l.pooled, "aggregate all windows of all runs before scoring");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"RTL bug localization with attention-based statement models", "attnloc"};
  app.require_subcommand(1);
  std::string manifest_override;
  app.add_option("--run-manifest", manifest_override, "where to write the run manifest (default: next to the output)");

  RvdgOpts rvdg;
  auto* c_rvdg = app.add_subcommand("rvdg", "generate random synthetic designs");
  c_rvdg->add_option("--count", rvdg.count)->capture_default_str();
  c_rvdg->add_option("--seed", rvdg.seed)->capture_default_str();
  c_rvdg->add_option("--out", rvdg.out, "output directory")->capture_default_str();
  c_rvdg->add_flag("--fixed", rvdg.fixed, "use the shape options below instead of sampling a shape per design");
  c_rvdg->add_option("--inputs", rvdg.cfg.n_inputs)->capture_default_str();
  c_rvdg->add_option("--state-bits", rvdg.cfg.n_state_bits)->capture_default_str();
  c_rvdg->add_option("--outputs", rvdg.cfg.n_outputs)->capture_default_str();
  c_rvdg->add_option("--branches", rvdg.cfg.n_branches)->capture_default_str();
  c_rvdg->add_option("--max-operands", rvdg.cfg.max_operands)->capture_default_str();
  c_rvdg->add_option("--max-operators", rvdg.cfg.max_operators)->capture_default_str();
  c_rvdg->add_option("--statements-per-branch", rvdg.cfg.statements_per_branch)->capture_default_str();
  c_rvdg->add_option("--negation-probability", rvdg.cfg.negation_probability)->capture_default_str();
  c_rvdg->add_option("--reuse-probability", rvdg.cfg.reuse_probability)->capture_default_str();

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "simulate a design on a random stimulus and dump the trace");
  c_sim->add_option("--design", sim.design)->required();
  c_sim->add_option("--cycles", sim.cycles)->capture_default_str();
  c_sim->add_option("--seed", sim.seed)->capture_default_str();
  c_sim->add_option("--out", sim.out, "trace .jsonl (default: standard output)");
  c_sim->add_option("--dot-vdg", sim.dot_vdg, "write the variable dependence graph as DOT");
  c_sim->add_option("--dot-cdfg", sim.dot_cdfg, "write the control/data flow graph as DOT");

  TrainOpts tr;
  auto* c_train = app.add_subcommand("train", "train the statement model");
  c_train->add_option("--designs", tr.designs, ".v files or design manifests")->required();
  c_train->add_option("--cycles", tr.cycles)->capture_default_str();
  c_train->add_option("--holdout", tr.holdout, "fraction of designs held out")->capture_default_str();
  c_train->add_option("--out", tr.out, "checkpoint path")->capture_default_str();
  c_train->add_option("--curve", tr.curve, "loss curve CSV (default: <out>.loss.csv)");
  c_train->add_option("--lr", tr.cfg.lr)->capture_default_str();
  c_train->add_option("--weight-decay", tr.cfg.weight_decay)->capture_default_str();
  c_train->add_option("--alpha", tr.cfg.alpha)->capture_default_str();
  c_train->add_option("--batch-size", tr.cfg.batch_size)->capture_default_str();
  c_train->add_option("--epochs", tr.cfg.epochs)->capture_default_str();
  c_train->add_option("--patience", tr.cfg.patience)->capture_default_str();
  c_train->add_option("--seed", tr.cfg.seed)->capture_default_str();
  c_train->add_option("--loss-mode", tr.loss_mode, "weighted_mean or as_printed")->capture_default_str();
  c_train->add_flag("--reproducible,!--no-reproducible", tr.cfg.reproducible)->capture_default_str();

  EvalOpts ev;
  auto* c_eval = app.add_subcommand("eval-predictor", "measure predictor accuracy on designs");
  c_eval->add_option("--designs", ev.designs)->required();
  c_eval->add_option("--checkpoint", ev.checkpoint)->required();
  c_eval->add_option("--cycles", ev.cycles)->capture_default_str();
  c_eval->add_option("--seed", ev.seed)->capture_default_str();
  c_eval->add_flag("--chained", ev.chained, "feed predictions of earlier statements forward");
  c_eval->add_option("--json", ev.json_out);

  InjectOpts inj;
  auto* c_inj = app.add_subcommand("inject", "list or apply mutations in the slice of a target");
  c_inj->add_option("--design", inj.design)->required();
  c_inj->add_option("--target", inj.target)->required();
  auto* o_index = c_inj->add_option("--index", inj.index, "apply the listed mutation with this index");
  c_inj->add_option("--kind", inj.kind, "apply a random mutation of this kind")->excludes(o_index);
  c_inj->add_option("--seed", inj.seed)->capture_default_str();
  c_inj->add_option("--out", inj.out, "mutant .v (default: standard output)");

  LocalizeOpts loc;
  auto* c_loc = app.add_subcommand("localize", "rank suspicious statements of a buggy design");
  c_loc->add_option("--golden", loc.golden)->required();
  c_loc->add_option("--mutant", loc.mutant)->required();
  c_loc->add_option("--target", loc.target)->required();
  c_loc->add_option("--checkpoint", loc.checkpoint)->required();
  add_localize_options(c_loc, loc.cfg);
  c_loc->add_option("--seed", loc.cfg.seed)->capture_default_str();
  c_loc->add_option("--json", loc.json_out);
  c_loc->add_option("--html", loc.html_out);
  c_loc->add_flag("--ansi", loc.ansi, "print the colored listing");

  CampaignOpts camp;
  camp.cfg.threads = default_threads();
  auto* c_camp = app.add_subcommand("campaign", "inject, localize and score mutants over many designs");
  c_camp->add_option("--designs", camp.designs)->required();
  c_camp->add_option("--checkpoint", camp.checkpoint)->required();
  c_camp->add_option("--out", camp.out, "output directory")->capture_default_str();
  c_camp->add_option("--seed", camp.cfg.seed)->capture_default_str();
  c_camp->add_option("--threads", camp.cfg.threads, "worker threads (env ATTNLOC_THREADS)")->capture_default_str();
  c_camp->add_option("--stimuli", camp.cfg.observability_stimuli, "observability stimuli")->capture_default_str();
  c_camp->add_option("--stimulus-cycles", camp.cfg.observability_cycles)->capture_default_str();
  add_localize_options(c_camp, camp.cfg.localize);

  ReportOpts rep;
  auto* c_rep = app.add_subcommand("report", "render a localization as HTML or colored text");
  c_rep->add_option("--localization", rep.localization)->required();
  c_rep->add_option("--design", rep.design, "the design the localization was computed on")->required();
  c_rep->add_option("--html", rep.html_out);
  c_rep->add_flag("--ansi", rep.ansi);

  if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    err << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return 2;
  }

  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  const std::string name = app.get_subcommands().front()->get_name();
  RunManifest run(name, args);
  try {
    if (*c_rvdg) return cmd_rvdg(rvdg, run, manifest_override, out);
    if (*c_sim) return cmd_simulate(sim, run, manifest_override, out);
    if (*c_train) return cmd_train(tr, run, manifest_override, out);
    if (*c_eval) return cmd_eval(ev, run, manifest_override, out);
    if (*c_inj) return cmd_inject(inj, run, manifest_override, out);
    if (*c_loc) return cmd_localize(loc, run, manifest_override, out);
    if (*c_camp) return cmd_campaign(camp, run, manifest_override, out);
    if (*c_rep) return cmd_report(rep, run, manifest_override, out);
  } catch (const ParseError& e) {
    err << "error: " << e.diagnostic().format() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace attnloc
