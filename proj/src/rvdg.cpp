#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "attnloc/rvdg.hpp"

namespace attnloc {

void RvdgConfig::validate() const {
  if (n_inputs < 1 || n_state_bits < 1 || n_outputs < 1 || n_branches < 1 || statements_per_branch < 1)
    throw Error("rvdg: every count must be at least 1");
  if (max_operands < 2) throw Error("rvdg: max_operands must be at least 2");
  if (max_operators < 1) throw Error("rvdg: max_operators must be at least 1");
  if (n_state_bits > 16) throw Error("rvdg: at most 16 state bits");
  if (!(negation_probability >= 0.0 && negation_probability <= 1.0) ||
      !(reuse_probability >= 0.0 && reuse_probability <= 1.0))
    throw Error("rvdg: probabilities must lie in [0, 1]");
}

namespace {

std::string name(const char* prefix, int k) { return prefix + std::to_string(k); }

class Generator {
 public:
  explicit Generator(const RvdgConfig& c) : c_(c), rng_(c.seed) {}

  std::string run() {
    std::ostringstream os;
    std::vector<std::string> ports{"clk"};
    for (int i = 0; i < c_.n_inputs; ++i) ports.push_back(name("in", i));
    for (int i = 0; i < c_.n_outputs; ++i) ports.push_back(name("out", i));
    os << "module rvdg_" << c_.seed << "(";
    for (std::size_t i = 0; i < ports.size(); ++i) os << (i ? ", " : "") << ports[i];
    os << ");\n  input clk;\n";
    for (int i = 0; i < c_.n_inputs; ++i) os << "  input " << name("in", i) << ";\n";
    for (int i = 0; i < c_.n_outputs; ++i) os << "  output reg " << name("out", i) << ";\n";
    for (int i = 0; i < c_.n_state_bits; ++i) os << "  reg " << name("s", i) << ";\n";
    for (int i = 0; i < c_.n_state_bits; ++i) os << "  reg " << name("ns", i) << ";\n";
    for (int i = 0; i < c_.statements_per_branch; ++i) os << "  reg " << name("t", i) << ";\n";
    os << "  always @(posedge clk) begin\n";
    for (int i = 0; i < c_.n_state_bits; ++i) os << "    " << name("s", i) << " <= " << name("ns", i) << ";\n";
    os << "  end\n  always @(*) begin\n";
    const int states = 1 << c_.n_state_bits;
    for (int k = 0; k < c_.n_branches; ++k) {
      const bool last = k + 1 == c_.n_branches;
      if (k == 0) {
        os << "    if (" << guard(k, states) << ") begin\n";
      } else if (!last) {
        os << "    end else if (" << guard(k, states) << ") begin\n";
      } else if (c_.n_branches > 1) {
        os << "    end else begin\n";
      } else {
        os << "    begin\n";
      }
      arm(os);
    }
    os << "    end\n  end\nendmodule\n";
    return os.str();
  }

 private:
  std::string guard(int k, int states) {
    const int value = k % states;
    std::string g;
    for (int b = 0; b < c_.n_state_bits; ++b) {
      if (b) g += " && ";
      g += "(" + name("s", b) + " == 1'b" + ((value >> b) & 1 ? "1" : "0") + ")";
    }
    // Arms past the enumerable state values need an input conjunct to be
    // reachable at all.
    if (k >= states || rng_.bernoulli(0.5)) {
      g += " && ";
      if (rng_.bernoulli(0.5)) g += "!";
      g += name("in", static_cast<int>(rng_.below(c_.n_inputs)));
    }
    return g;
  }

  void arm(std::ostringstream& os) {
    std::vector<std::string> base;
    for (int i = 0; i < c_.n_inputs; ++i) base.push_back(name("in", i));
    for (int i = 0; i < c_.n_state_bits; ++i) base.push_back(name("s", i));
    std::vector<std::string> defined;
    int emitted = 0;
    auto emit = [&](const std::string& lhs) {
      const bool reuse = emitted > 0 && !defined.empty() && rng_.bernoulli(c_.reuse_probability);
      os << "      " << lhs << " = " << expression(base, defined, reuse) << ";\n";
      ++emitted;
    };
    for (int i = 0; i < c_.statements_per_branch; ++i) {
      emit(name("t", i));
      defined.push_back(name("t", i));
    }
    for (int i = 0; i < c_.n_outputs; ++i) emit(name("out", i));
    for (int i = 0; i < c_.n_state_bits; ++i) emit(name("ns", i));
  }

  std::string expression(const std::vector<std::string>& base, const std::vector<std::string>& defined, bool reuse) {
    const int max_n = std::min(c_.max_operands, c_.max_operators + 1);
    const int n = 2 + static_cast<int>(rng_.below(static_cast<std::uint64_t>(max_n - 1)));
    std::vector<std::string> pool = base;
    pool.insert(pool.end(), defined.begin(), defined.end());
    std::vector<std::string> leaves;
    if (reuse) leaves.push_back(defined[rng_.below(defined.size())]);
    while (static_cast<int>(leaves.size()) < n) {
      std::vector<std::string> fresh;
      for (const auto& v : pool)
        if (std::find(leaves.begin(), leaves.end(), v) == leaves.end()) fresh.push_back(v);
      const auto& from = fresh.empty() ? pool : fresh;
      leaves.push_back(from[rng_.below(from.size())]);
    }
    rng_.shuffle(leaves.begin(), leaves.end());
    for (auto& l : leaves)
      if (rng_.bernoulli(c_.negation_probability)) l = "~" + l;
    return tree(leaves, 0, leaves.size());
  }

  std::string tree(const std::vector<std::string>& leaves, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return leaves[lo];
    const std::size_t mid = lo + 1 + rng_.below(hi - lo - 1);
    static constexpr const char* kOps[] = {" & ", " | ", " ^ "};
    return "(" + tree(leaves, lo, mid) + kOps[rng_.below(3)] + tree(leaves, mid, hi) + ")";
  }

  const RvdgConfig& c_;
  Rng rng_;
};

}  // namespace

std::string generate_design(const RvdgConfig& config) {
  config.validate();
  return pretty_print(parse_design(Generator(config).run()));
}

RvdgConfig sample_config(std::uint64_t seed) {
  Rng rng(seed);
  RvdgConfig c;
  c.n_inputs = 2 + static_cast<int>(rng.below(3));
  c.n_state_bits = 1 + static_cast<int>(rng.below(2));
  c.n_outputs = 1 + static_cast<int>(rng.below(2));
  c.n_branches = 2 + static_cast<int>(rng.below(3));
  c.max_operands = 2 + static_cast<int>(rng.below(3));
  c.max_operators = c.max_operands - 1;
  c.statements_per_branch = 2 + static_cast<int>(rng.below(3));
  c.seed = rng.next() >> 16;
  return c;
}

std::vector<GeneratedDesign> generate_corpus(int count, std::uint64_t seed) {
  std::vector<GeneratedDesign> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    GeneratedDesign g;
    g.config = sample_config(mix_seed(seed, static_cast<std::uint64_t>(i)));
    g.source = generate_design(g.config);
    g.design = parse_design(g.source);
    out.push_back(std::move(g));
  }
  return out;
}

std::string config_to_json(const RvdgConfig& c) {
  nlohmann::ordered_json j{{"seed", c.seed},
                           {"n_inputs", c.n_inputs},
                           {"n_state_bits", c.n_state_bits},
                           {"n_outputs", c.n_outputs},
                           {"n_branches", c.n_branches},
                           {"max_operands", c.max_operands},
                           {"max_operators", c.max_operators},
                           {"statements_per_branch", c.statements_per_branch},
                           {"negation_probability", c.negation_probability},
                           {"reuse_probability", c.reuse_probability}};
  return j.dump();
}

}  // namespace attnloc
