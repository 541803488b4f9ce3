#include <algorithm>

#include "attnloc/context.hpp"

namespace attnloc {

const Vocabulary& Vocabulary::standard() {
  static const Vocabulary v;
  return v;
}

int Vocabulary::id(std::string_view token) const {
  if (token == "<pad>") return kPadding;
  auto k = node_kind_from_name(token);
  if (!k) throw Error("unknown vocabulary token '" + std::string(token) + "'");
  return id(*k);
}

NodeKind Vocabulary::kind(int id) const {
  if (id <= 0 || id >= size()) throw Error("token id " + std::to_string(id) + " is not a node kind");
  return static_cast<NodeKind>(id - 1);
}

std::vector<std::string> Vocabulary::tokens() const {
  std::vector<std::string> t{"<pad>"};
  for (int i = 0; i < kNodeKindCount; ++i) t.emplace_back(node_kind_name(static_cast<NodeKind>(i)));
  return t;
}

std::string Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens()) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = hex[h & 0xf];
  return out;
}

namespace {

void leaf_chains(const AstNode& n, std::vector<const AstNode*>& chain, std::vector<std::vector<const AstNode*>>& out) {
  chain.push_back(&n);
  if (n.kind == NodeKind::Identifier) {
    out.push_back(chain);
  } else {
    for (const auto& c : n.children) leaf_chains(c, chain, out);
  }
  chain.pop_back();
}

}  // namespace

std::vector<OperandContext> extract_contexts(const Statement& statement) {
  const AstNode& root = statement.ast;
  if (root.children.size() != 2 || root.children[0].kind != NodeKind::Lvalue ||
      root.children[1].kind != NodeKind::Rvalue)
    throw Error("malformed statement AST at " + statement.id.str());
  // Root-to-leaf chains; leaf 0 is the LHS, then RHS occurrences in order.
  std::vector<const AstNode*> chain;
  std::vector<std::vector<const AstNode*>> chains;
  leaf_chains(root, chain, chains);
  if (chains.size() != statement.leaf_count())
    throw Error("malformed statement AST at " + statement.id.str() + ": leaf count mismatch");

  std::vector<OperandContext> out;
  for (std::size_t i = 1; i < chains.size(); ++i) {
    OperandContext ctx;
    ctx.operand = static_cast<int>(i - 1);
    const auto& a = chains[i];
    for (std::size_t j = 0; j < chains.size(); ++j) {
      if (j == i) continue;
      const auto& b = chains[j];
      std::size_t common = 0;
      while (common < a.size() && common < b.size() && a[common] == b[common]) ++common;
      const std::size_t lca = common - 1;
      AstPath p;
      for (std::size_t k = a.size() - 2; k > lca; --k) p.push_back(a[k]->kind);
      p.push_back(a[lca]->kind);
      for (std::size_t k = lca + 1; k + 1 < b.size(); ++k) p.push_back(b[k]->kind);
      ctx.paths.push_back(std::move(p));
    }
    out.push_back(std::move(ctx));
  }
  return out;
}

std::vector<int> encode_path(const AstPath& path, const Vocabulary& vocab) {
  if (path.empty()) throw Error("cannot encode an empty path");
  std::vector<int> ids;
  ids.reserve(path.size());
  for (auto k : path) ids.push_back(vocab.id(k));
  return ids;
}

std::vector<int> encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  if (tokens.empty()) throw Error("cannot encode an empty path");
  std::vector<int> ids;
  for (const auto& t : tokens) {
    const int id = vocab.id(t);
    if (id == Vocabulary::kPadding) throw Error("padding token inside a path");
    ids.push_back(id);
  }
  return ids;
}

AstPath decode_path(std::span<const int> ids, const Vocabulary& vocab) {
  AstPath p;
  for (int id : ids) p.push_back(vocab.kind(id));
  return p;
}

}  // namespace attnloc
