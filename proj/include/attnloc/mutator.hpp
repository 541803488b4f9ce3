#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attnloc/graphs.hpp"
#include "attnloc/sim.hpp"

namespace attnloc {

enum class MutationKind : std::uint8_t { Negation, OperationSubstitution, VariableMisuse };

std::string_view mutation_kind_name(MutationKind k);
MutationKind mutation_kind_from_name(std::string_view name);

// Sites: Negation and VariableMisuse address an RHS operand occurrence
// (left-to-right index); OperationSubstitution addresses a binary operator
// (pre-order index over And/Or/Xor nodes of the RHS).
struct Mutation {
  MutationKind kind = MutationKind::Negation;
  StatementId statement;
  int site = 0;
  // Negation: "a" -> "~a" inserts, "~a" -> "a" removes.
  // OperationSubstitution: "&" / "|" / "^".
  // VariableMisuse: identifier names.
  std::string original;
  std::string replacement;

  std::string describe() const;
  bool operator==(const Mutation&) const = default;
};

// Variables readable at a statement without reading a value from a later
// point of the same cycle: inputs, state registers, and earlier LHSs of the
// same arm. Clocked statements may read any variable.
std::vector<std::string> in_scope_variables(const Design& design, const StatementId& id);

std::vector<Mutation> enumerate_mutations(const Design& design, const std::string& target, const DependenceSet& deps);

// Throws Error when the mutation no longer matches the design.
Design apply_mutation(const Design& design, const Mutation& mutation);

struct ObservabilityResult {
  bool observable = false;
  std::vector<TraceLabel> labels;  // one per stimulus
  std::vector<Trace> golden_traces;
  std::vector<Trace> mutant_traces;
};

ObservabilityResult check_observability(const Design& golden, const Design& mutant, const std::string& target,
                                        const std::vector<InputVectorSequence>& stimuli);

// K stimuli of `cycles` cycles each, seeded by mix_seed(seed, k).
std::vector<InputVectorSequence> random_stimuli(const Design& design, int count, int cycles, std::uint64_t seed);

inline constexpr int kDefaultObservabilityStimuli = 20;

struct CampaignRecord {
  std::string mutant_id;
  std::string design;
  Mutation mutation;
  std::string target;
  bool observable = false;
  bool localized = false;
  std::optional<int> rank;  // rank of the mutated statement in H_t, if present
  int heatmap_size = 0;
};

}  // namespace attnloc
