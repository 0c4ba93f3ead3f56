#pragma once

// Minimal indentation-based YAML subset: block maps, block lists of maps,
// inline string lists, quoted/plain scalars, '#' comments. Exactly what the
// domain-card schema needs; not a general YAML implementation.

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace bench::yaml {

struct Node;
using NodePtr = std::shared_ptr<Node>;

struct Node {
  enum class Kind { scalar, map, list } kind = Kind::scalar;
  std::string scalar;
  bool quoted = false;  // scalar came from a quoted literal
  std::vector<std::pair<std::string, NodePtr>> entries;  // map, in document order
  std::vector<NodePtr> items;                            // list
  int line = 0;

  const Node* find(const std::string& key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return v.get();
    return nullptr;
  }
};

// Throws bench::Error(Errc::card_format) with a line reference on failure.
NodePtr parse(const std::string& text);

// Emission helpers used by the card serializer.
std::string quote(const std::string& s);

}  // namespace bench::yaml
