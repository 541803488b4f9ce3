#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "attnloc/model.hpp"
#include "attnloc/slicer.hpp"

namespace attnloc {

// Per-trace attention record: every executed instance of a slice statement.
struct AttentionMap {
  int trace = 0;
  std::map<StatementId, std::vector<std::vector<double>>> entries;
};

enum class MapSide : std::uint8_t { Failing, Passing };

struct AggregatedEntry {
  std::vector<double> mean;
  std::size_t count = 0;
};

struct AggregatedMap {
  MapSide side = MapSide::Failing;
  std::map<StatementId, AggregatedEntry> entries;
};

// Presence of a statement in the failing / passing aggregate.
enum class Scenario : std::uint8_t {
  Absent,         // in neither map
  OnlyPassing,    // not suspicious
  OnlyFailing,    // suspicious, score 1
  Both,           // suspicious iff the distance reaches the threshold
};

std::string_view scenario_name(Scenario s);
Scenario classify_presence(bool in_failing, bool in_passing);

struct HeatmapEntry {
  Scenario scenario = Scenario::OnlyFailing;
  double score = 0.0;
  std::vector<double> f_weights;
  std::optional<std::vector<double>> c_weights;
};

struct Heatmap {
  std::string target;
  double threshold = 0.10;
  std::map<StatementId, HeatmapEntry> entries;
};

inline constexpr double kDefaultThreshold = 0.10;

// Attention weights for statements of one design under fixed parameters.
// Path embeddings are cached across calls.
class AttentionModel {
 public:
  AttentionModel(const ModelParams& params, const Design& design);
  ~AttentionModel();

  // Empty for constant assignments.
  std::vector<double> weights(const StatementId& id, std::span<const Bit> operand_values);
  Prediction predict(const StatementId& id, std::span<const Bit> operand_values);

 private:
  const ModelParams& params_;
  FeatureSet features_;
  std::map<StatementId, int> shapes_;
  std::unique_ptr<PathEncoderCache> cache_;
};

AttentionMap attention_map(const Trace& trace, const DynamicSlice& slice, AttentionModel& model, int trace_id = 0);

AggregatedMap aggregate_maps(const std::vector<AttentionMap>& maps, MapSide side);

// ||f - c||_1 / 2; throws on a length mismatch.
double suspiciousness(const std::vector<double>& f, const std::vector<double>& c);

Heatmap build_heatmap(const AggregatedMap& failing, const AggregatedMap& passing, const std::string& target,
                      double threshold = kDefaultThreshold);

struct LocalizeConfig {
  int runs = 5;
  int cycles = 64;
  int window = 1;  // cycles per labeled sub-trace
  double threshold = kDefaultThreshold;
  bool pooled = false;  // one F/C aggregation across all runs
  std::uint64_t seed = 1;
};

struct RankedStatement {
  StatementId id;
  HeatmapEntry entry;
  int rank = 0;
  int run = 0;  // run whose heatmap supplied the score (-1 when pooled)
};

struct Localization {
  std::string target;
  double threshold = kDefaultThreshold;
  std::vector<RankedStatement> ranking;  // score descending, then id ascending
  AggregatedMap passing;                 // all passing windows across runs
  int failing_windows = 0;
  int passing_windows = 0;
  LocalizeConfig config;

  std::optional<int> rank_of(const StatementId& id) const;
};

// Combines per-run heatmaps by per-statement max score (first run wins ties).
std::vector<RankedStatement> combine_heatmaps(const std::vector<Heatmap>& runs);

// Throws NotObservableError when no window of any run fails.
Localization localize(const Design& golden, const Design& mutant, const std::string& target, const ModelParams& params,
                      const LocalizeConfig& config = {});

std::string localization_to_json(const Localization& loc, const Design& design);
Localization localization_from_json(const std::string& text);

}  // namespace attnloc
