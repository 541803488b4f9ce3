#include <atomic>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "attnloc/campaign.hpp"
#include "attnloc/rng.hpp"

namespace attnloc {

std::string pick_target(const Design& design) {
  const Vdg vdg = build_vdg(design);
  std::string best;
  std::size_t best_size = 0;
  for (const auto& o : design.outputs()) {
    const auto size = dependence_set(vdg, o).members.size();
    if (best.empty() || size > best_size) {
      best = o;
      best_size = size;
    }
  }
  if (best.empty()) throw Error("design '" + design.name + "' has no outputs");
  return best;
}

std::vector<PlannedMutant> plan_mutants(const std::vector<CampaignDesign>& designs, std::uint64_t seed) {
  std::vector<PlannedMutant> plan;
  for (std::size_t d = 0; d < designs.size(); ++d) {
    const auto& cd = designs[d];
    const auto deps = dependence_set(build_vdg(cd.design), cd.target);
    const auto all = enumerate_mutations(cd.design, cd.target, deps);
    Rng rng(mix_seed(seed, d));
    for (auto kind : {MutationKind::Negation, MutationKind::OperationSubstitution, MutationKind::VariableMisuse}) {
      std::vector<const Mutation*> pool;
      for (const auto& m : all)
        if (m.kind == kind) pool.push_back(&m);
      if (pool.empty()) continue;
      PlannedMutant p;
      p.design = static_cast<int>(d);
      p.mutation = *pool[rng.below(pool.size())];
      p.id = cd.name + "_" + std::string(mutation_kind_name(kind));
      plan.push_back(std::move(p));
    }
  }
  return plan;
}

MutantOutcome run_mutant(const CampaignDesign& golden, const PlannedMutant& planned, const ModelParams& params,
                         const CampaignConfig& config) {
  MutantOutcome out;
  auto& r = out.record;
  r.mutant_id = planned.id;
  r.design = golden.name;
  r.mutation = planned.mutation;
  r.target = golden.target;
  const Design mutant = apply_mutation(golden.design, planned.mutation);
  const std::uint64_t seed = mix_seed(config.seed, fnv1a(planned.id));
  const auto stimuli =
      random_stimuli(golden.design, config.observability_stimuli, config.observability_cycles, seed);
  r.observable = check_observability(golden.design, mutant, golden.target, stimuli).observable;
  if (!r.observable) return out;
  LocalizeConfig lc = config.localize;
  lc.seed = seed;
  try {
    out.localization = localize(golden.design, mutant, golden.target, params, lc);
  } catch (const NotObservableError&) {
    return out;  // observable, but no failing window in the localization runs
  }
  r.heatmap_size = static_cast<int>(out.localization->ranking.size());
  r.rank = out.localization->rank_of(planned.mutation.statement);
  r.localized = r.rank == 1;
  return out;
}

std::vector<MutantOutcome> run_campaign(const std::vector<CampaignDesign>& designs,
                                        const std::vector<PlannedMutant>& plan, const ModelParams& params,
                                        const CampaignConfig& config) {
  std::vector<MutantOutcome> results(plan.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < plan.size();) {
      try {
        results[i] = run_mutant(designs.at(plan[i].design), plan[i], params, config);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(plan.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::optional<double> CoverageRow::coverage() const {
  if (observable == 0) return std::nullopt;
  return 100.0 * static_cast<double>(localized) / static_cast<double>(observable);
}

CoverageReport compute_coverage(const std::vector<CampaignRecord>& records) {
  if (records.empty()) throw Error("coverage needs at least one campaign record");
  CoverageReport rep;
  rep.overall.design = "overall";
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  double baseline = 0.0;
  auto add = [](CoverageRow& row, const CampaignRecord& r) {
    ++row.injected;
    ++row.injected_by_kind[static_cast<int>(r.mutation.kind)];
    row.observable += r.observable;
    row.localized += r.observable && r.localized;
  };
  for (const auto& r : records) {
    if (r.localized && !r.observable) throw Error("record " + r.mutant_id + " is localized but not observable");
    auto [it, inserted] = index.emplace(std::make_pair(r.design, r.target), rep.rows.size());
    if (inserted) rep.rows.push_back({r.design, r.target});
    add(rep.rows[it->second], r);
    add(rep.overall, r);
    if (r.observable && r.heatmap_size > 0) baseline += 1.0 / r.heatmap_size;
  }
  rep.random_baseline = rep.overall.observable ? baseline / rep.overall.observable : 0.0;
  return rep;
}

std::string format_coverage(std::optional<double> percent) {
  if (!percent) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << *percent << '%';
  return os.str();
}

std::string coverage_table(const CoverageReport& rep) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "design" << std::setw(10) << "target" << std::right << std::setw(5) << "neg"
     << std::setw(5) << "op" << std::setw(5) << "var" << std::setw(6) << "inj" << std::setw(6) << "obs" << std::setw(6)
     << "loc" << std::setw(10) << "top-1" << '\n';
  auto row = [&](const CoverageRow& r) {
    os << std::left << std::setw(28) << r.design << std::setw(10) << r.target << std::right << std::setw(5)
       << r.injected_by_kind[0] << std::setw(5) << r.injected_by_kind[1] << std::setw(5) << r.injected_by_kind[2]
       << std::setw(6) << r.injected << std::setw(6) << r.observable << std::setw(6) << r.localized << std::setw(10)
       << format_coverage(r.coverage()) << '\n';
  };
  for (const auto& r : rep.rows) row(r);
  row(rep.overall);
  os << "random-guess baseline: " << format_coverage(100.0 * rep.random_baseline) << '\n';
  return os.str();
}

namespace {
nlohmann::ordered_json row_json(const CoverageRow& r) {
  const auto c = r.coverage();
  return {{"design", r.design},
          {"target", r.target},
          {"injected", r.injected},
          {"negation", r.injected_by_kind[0]},
          {"operation_substitution", r.injected_by_kind[1]},
          {"variable_misuse", r.injected_by_kind[2]},
          {"observable", r.observable},
          {"localized", r.localized},
          {"coverage", c ? nlohmann::ordered_json(*c) : nlohmann::ordered_json("n/a")}};
}
}  // namespace

std::string coverage_to_json(const CoverageReport& rep) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) j["rows"].push_back(row_json(r));
  j["overall"] = row_json(rep.overall);
  j["random_baseline"] = rep.random_baseline;
  return j.dump(1);
}

std::string record_to_json(const CampaignRecord& r) {
  nlohmann::ordered_json j{{"mutant_id", r.mutant_id},
                           {"design", r.design},
                           {"target", r.target},
                           {"mutation",
                            {{"kind", mutation_kind_name(r.mutation.kind)},
                             {"statement", r.mutation.statement.str()},
                             {"site", r.mutation.site},
                             {"original", r.mutation.original},
                             {"replacement", r.mutation.replacement}}},
                           {"observable", r.observable},
                           {"localized", r.localized},
                           {"rank", r.rank ? nlohmann::ordered_json(*r.rank) : nlohmann::ordered_json(nullptr)},
                           {"heatmap_size", r.heatmap_size}};
  return j.dump();
}

CampaignRecord record_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    CampaignRecord r;
    r.mutant_id = j.at("mutant_id");
    r.design = j.at("design");
    r.target = j.at("target");
    const auto& m = j.at("mutation");
    r.mutation.kind = mutation_kind_from_name(m.at("kind").get<std::string>());
    const auto id = StatementId::parse(m.at("statement").get<std::string>());
    if (!id) throw Error("bad statement id in campaign record");
    r.mutation.statement = *id;
    r.mutation.site = m.at("site");
    r.mutation.original = m.at("original");
    r.mutation.replacement = m.at("replacement");
    r.observable = j.at("observable");
    r.localized = j.at("localized");
    if (!j.at("rank").is_null()) r.rank = j["rank"].get<int>();
    r.heatmap_size = j.value("heatmap_size", 0);
    return r;
  } catch (const nlohmann::ordered_json::exception& e) {
    throw Error(std::string("malformed campaign record: ") + e.what());
  }
}

int default_threads() {
  if (const char* env = std::getenv("ATTNLOC_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace attnloc
