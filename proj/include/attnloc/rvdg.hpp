#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attnloc/frontend.hpp"
#include "attnloc/rng.hpp"

namespace attnloc {

// Template: state registers s<k> updated from next-state regs ns<k> in the
// clocked block; a combinational if / else-if / else chain whose arms compare
// the state vector to constants (plus an optional input conjunct). Every arm
// assigns `statements_per_branch` temporaries t<k>, then every output, then
// every next-state register.
struct RvdgConfig {
  int n_inputs = 3;
  int n_state_bits = 2;
  int n_outputs = 2;
  int n_branches = 3;  // arms including the final else
  int max_operands = 3;
  int max_operators = 3;  // binary operators per statement
  int statements_per_branch = 3;
  double negation_probability = 0.3;
  double reuse_probability = 0.5;
  std::uint64_t seed = 1;

  // Throws Error for infeasible settings.
  void validate() const;
  bool operator==(const RvdgConfig&) const = default;
};

// Normalized (pretty-printed) Verilog source.
std::string generate_design(const RvdgConfig& config);

// Config with counts drawn from the ranges used for the training corpus.
RvdgConfig sample_config(std::uint64_t seed);

struct GeneratedDesign {
  RvdgConfig config;
  std::string source;
  Design design;
};

// count designs with configs sample_config(mix_seed(seed, i)).
std::vector<GeneratedDesign> generate_corpus(int count, std::uint64_t seed);

std::string config_to_json(const RvdgConfig& config);

}  // namespace attnloc
