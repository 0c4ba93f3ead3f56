#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bench/types.hpp"

namespace bench {

// Stage-1 knowledge anchor for generation: topic ontology, per-topic
// glossary, and a few sample snippets per topic.
struct DomainCard {
  struct Meta {
    std::string dataset;
    std::int64_t total_items = 0;
    bool text = false;
    bool multimodal = false;
    bool existing_images = false;
  };
  struct OntologyEntry {
    std::string super_parent;
    std::vector<std::string> mid_level_parents;
  };
  struct GlossaryEntry {
    std::string super_parent;
    std::vector<std::string> typical_terms;  // frequency-ranked, capped
  };
  struct SampleExample {
    std::string item_id;
    std::string question;
  };
  struct SampleEntry {
    std::string super_parent;
    std::vector<SampleExample> examples;
  };

  Meta meta;
  std::vector<OntologyEntry> ontology;
  std::vector<GlossaryEntry> glossary;
  std::vector<SampleEntry> samples;

  bool operator==(const DomainCard&) const;
};

inline constexpr size_t kGlossaryCap = 20;
inline constexpr size_t kSamplesCap = 3;
inline constexpr size_t kSampleSnippetChars = 200;

// Topic oracle: maps a seed item to its super_parent label.
using TopicLabeler = std::function<std::string(const Item&)>;

// Groups by the item's own super_parent field (seeds that carry labels).
TopicLabeler field_labeler();

// Deterministic keyword matcher over a configured term -> label map; the
// label with most term hits in the stem wins, ties broken lexicographically.
// Items matching nothing fall back to their own super_parent field, or
// "general" when that is empty too.
TopicLabeler keyword_labeler(std::map<std::string, std::string> term_to_label);

// Throws EmptySeed on an empty seed list. Output depends only on the seed
// items and labeler outputs.
DomainCard build_card(const std::vector<Item>& seed_items, const TopicLabeler& labeler);

// Deterministic normal form: folded labels, duplicates merged, everything
// sorted; idempotent.
DomainCard canonicalize_card(const DomainCard& card);

// YAML per the released card layout. parse_card throws CardFormatError with
// a line/field reference; round-trips canonical cards byte-identically.
std::string serialize_card(const DomainCard& card);
DomainCard parse_card(const std::string& yaml_text);

}  // namespace bench
