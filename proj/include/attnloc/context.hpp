#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attnloc/frontend.hpp"

namespace attnloc {

using AstPath = std::vector<NodeKind>;

// Node-kind token <-> integer id. Id 0 is the padding token; node kinds map
// to 1..9 in declaration order.
class Vocabulary {
 public:
  static const Vocabulary& standard();

  static constexpr int kPadding = 0;
  int size() const { return kNodeKindCount + 1; }
  int id(NodeKind k) const { return static_cast<int>(k) + 1; }
  int id(std::string_view token) const;  // throws on unknown tokens
  NodeKind kind(int id) const;           // throws on padding / out of range
  std::vector<std::string> tokens() const;
  // FNV-1a over the token list; stored in checkpoints.
  std::string hash() const;
};

struct OperandContext {
  int operand = 0;  // RHS occurrence index
  std::vector<AstPath> paths;  // one per other leaf, left-to-right leaf order
};

// One context per RHS occurrence. Paths exclude both leaf endpoints and carry
// no direction markers.
std::vector<OperandContext> extract_contexts(const Statement& statement);

std::vector<int> encode_path(const AstPath& path, const Vocabulary& vocab);
std::vector<int> encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab);
AstPath decode_path(std::span<const int> ids, const Vocabulary& vocab);

}  // namespace attnloc
