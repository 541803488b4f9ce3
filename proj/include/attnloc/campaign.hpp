#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attnloc/explainer.hpp"
#include "attnloc/mutator.hpp"

namespace attnloc {

struct CampaignConfig {
  int observability_stimuli = kDefaultObservabilityStimuli;
  int observability_cycles = 64;
  LocalizeConfig localize;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct CampaignDesign {
  std::string name;
  Design design;
  std::string target;
};

struct PlannedMutant {
  std::string id;
  int design = 0;  // index into the campaign's designs
  Mutation mutation;
};

// One mutation of each kind per design, drawn uniformly from the enumeration
// for the design's target. Kinds with no candidate are skipped.
std::vector<PlannedMutant> plan_mutants(const std::vector<CampaignDesign>& designs, std::uint64_t seed);

// First output of the design whose dependence set is largest.
std::string pick_target(const Design& design);

struct MutantOutcome {
  CampaignRecord record;
  std::optional<Localization> localization;
};

MutantOutcome run_mutant(const CampaignDesign& golden, const PlannedMutant& planned, const ModelParams& params,
                         const CampaignConfig& config);

// Runs every mutant on `config.threads` workers; results keep plan order.
std::vector<MutantOutcome> run_campaign(const std::vector<CampaignDesign>& designs,
                                        const std::vector<PlannedMutant>& plan, const ModelParams& params,
                                        const CampaignConfig& config);

struct CoverageRow {
  std::string design;
  std::string target;
  std::array<int, 3> injected_by_kind{};
  int injected = 0;
  int observable = 0;
  int localized = 0;

  std::optional<double> coverage() const;  // percent; nullopt when nothing is observable
};

struct CoverageReport {
  std::vector<CoverageRow> rows;  // first-appearance order of (design, target)
  CoverageRow overall;
  // Mean over observable mutants of 1 / |H_t| (0 for an empty heatmap).
  double random_baseline = 0.0;
};

CoverageReport compute_coverage(const std::vector<CampaignRecord>& records);

std::string format_coverage(std::optional<double> percent);  // "82.5%" or "n/a"
std::string coverage_table(const CoverageReport& report);   // plain-text table
std::string coverage_to_json(const CoverageReport& report);

std::string record_to_json(const CampaignRecord& record);
CampaignRecord record_from_json(const std::string& text);

// Default worker count: ATTNLOC_THREADS if set, else hardware concurrency.
int default_threads();

}  // namespace attnloc
