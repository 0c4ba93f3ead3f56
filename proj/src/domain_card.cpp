#include "bench/domain_card.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "bench/error.hpp"
#include "bench/util.hpp"
#include "yaml_mini.hpp"

namespace bench {

bool DomainCard::operator==(const DomainCard& o) const {
  return serialize_card(*this) == serialize_card(o);
}

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kStop = {
      "the", "and", "for", "that", "with", "which", "what", "when",
      "where", "how", "why", "who", "whose", "this", "these", "those",
      "are", "is", "was", "were", "has", "have", "had", "can", "does",
      "not", "from", "into", "its", "their", "your", "you", "they",
      "following", "correct", "true", "false", "most", "best", "all",
      "one", "two", "than", "each", "will", "would", "should", "about",
  };
  return kStop;
}

std::vector<std::string> stem_tokens(const std::string& stem) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : stem) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  std::erase_if(out, [](const std::string& t) {
    return t.size() < 3 || stopwords().count(t) ||
           std::all_of(t.begin(), t.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  });
  return out;
}

std::string snippet(const std::string& stem) {
  if (stem.size() <= kSampleSnippetChars) return stem;
  return stem.substr(0, kSampleSnippetChars);
}

}  // namespace

TopicLabeler field_labeler() {
  return [](const Item& it) {
    return it.super_parent.empty() ? std::string("general") : it.super_parent;
  };
}

TopicLabeler keyword_labeler(std::map<std::string, std::string> term_to_label) {
  return [table = std::move(term_to_label)](const Item& it) -> std::string {
    std::map<std::string, int> hits;
    for (const auto& tok : stem_tokens(it.question_stem)) {
      auto found = table.find(tok);
      if (found != table.end()) hits[found->second]++;
    }
    if (hits.empty()) return it.super_parent.empty() ? std::string("general") : it.super_parent;
    auto best = hits.begin();
    for (auto i = hits.begin(); i != hits.end(); ++i)
      if (i->second > best->second) best = i;  // map order breaks ties lexicographically
    return best->first;
  };
}

DomainCard build_card(const std::vector<Item>& seed_items, const TopicLabeler& labeler) {
  if (seed_items.empty()) throw Error(Errc::empty_seed, "no seed items");

  struct LabelAgg {
    std::map<std::string, std::int64_t> term_freq;
    std::set<std::string> mid_levels;
    std::vector<DomainCard::SampleExample> samples;
  };
  std::map<std::string, LabelAgg> agg;  // label -> aggregate, sorted

  DomainCard card;
  card.meta.total_items = static_cast<std::int64_t>(seed_items.size());
  for (const auto& it : seed_items) {
    if (it.modality == "multimodal") card.meta.multimodal = true;
    else card.meta.text = true;
    if (it.uses_visual) card.meta.existing_images = true;
    if (card.meta.dataset.empty()) card.meta.dataset = it.source_dataset;

    std::string label = labeler(it);
    LabelAgg& a = agg[label];
    for (const auto& tok : stem_tokens(it.question_stem)) a.term_freq[tok]++;
    if (!it.subdomain.empty()) a.mid_levels.insert(it.subdomain);
    if (a.samples.size() < kSamplesCap)
      a.samples.push_back({it.id, snippet(it.question_stem)});
  }

  for (const auto& [label, a] : agg) {
    DomainCard::OntologyEntry oe;
    oe.super_parent = label;
    oe.mid_level_parents.assign(a.mid_levels.begin(), a.mid_levels.end());
    card.ontology.push_back(std::move(oe));

    // frequency-ranked terms, ties lexicographic, capped
    std::vector<std::pair<std::string, std::int64_t>> ranked(a.term_freq.begin(),
                                                             a.term_freq.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    DomainCard::GlossaryEntry ge;
    ge.super_parent = label;
    for (const auto& [term, freq] : ranked) {
      (void)freq;
      if (ge.typical_terms.size() >= kGlossaryCap) break;
      ge.typical_terms.push_back(term);
    }
    card.glossary.push_back(std::move(ge));

    DomainCard::SampleEntry se;
    se.super_parent = label;
    se.examples = a.samples;
    card.samples.push_back(std::move(se));
  }
  return card;
}

DomainCard canonicalize_card(const DomainCard& card) {
  // Merges must be commutative: ranked elements keep their best source rank
  // and ties break on the element itself, so entry order cannot leak through.
  struct Merged {
    std::vector<std::string> mid_levels;
    std::map<std::string, size_t> term_rank;                       // term -> min rank
    std::map<std::string, std::pair<size_t, std::string>> examples;  // id -> (rank, text)
  };
  std::map<std::string, Merged> merged;  // folded label -> merged content

  auto slot = [&](const std::string& raw) -> Merged& {
    std::string k = fold_label(raw);
    return merged[k.empty() ? "general" : k];
  };

  for (const auto& oe : card.ontology) {
    Merged& m = slot(oe.super_parent);
    for (const auto& mid : oe.mid_level_parents) {
      std::string f = fold_label(mid);
      if (!f.empty()) m.mid_levels.push_back(f);
    }
  }
  for (const auto& ge : card.glossary) {
    Merged& m = slot(ge.super_parent);
    for (size_t rank = 0; rank < ge.typical_terms.size(); ++rank) {
      std::string f = fold_label(ge.typical_terms[rank]);
      if (f.empty()) continue;
      auto it = m.term_rank.find(f);
      if (it == m.term_rank.end() || rank < it->second) m.term_rank[f] = rank;
    }
  }
  for (const auto& se : card.samples) {
    Merged& m = slot(se.super_parent);
    for (size_t rank = 0; rank < se.examples.size(); ++rank) {
      const auto& ex = se.examples[rank];
      auto it = m.examples.find(ex.item_id);
      if (it == m.examples.end() || rank < it->second.first)
        m.examples[ex.item_id] = {rank, snippet(ex.question)};
    }
  }

  DomainCard out;
  out.meta = card.meta;
  for (auto& [label, m] : merged) {
    DomainCard::OntologyEntry oe;
    oe.super_parent = label;
    std::sort(m.mid_levels.begin(), m.mid_levels.end());
    m.mid_levels.erase(std::unique(m.mid_levels.begin(), m.mid_levels.end()),
                       m.mid_levels.end());
    oe.mid_level_parents = m.mid_levels;
    out.ontology.push_back(std::move(oe));

    std::vector<std::pair<size_t, std::string>> ranked_terms;
    for (const auto& [term, rank] : m.term_rank) ranked_terms.emplace_back(rank, term);
    std::sort(ranked_terms.begin(), ranked_terms.end());
    DomainCard::GlossaryEntry ge;
    ge.super_parent = label;
    for (const auto& [rank, term] : ranked_terms) {
      (void)rank;
      if (ge.typical_terms.size() >= kGlossaryCap) break;
      ge.typical_terms.push_back(term);
    }
    out.glossary.push_back(std::move(ge));

    std::vector<std::pair<std::pair<size_t, std::string>, std::string>> ranked_ex;
    for (const auto& [id, rank_text] : m.examples)
      ranked_ex.push_back({{rank_text.first, id}, rank_text.second});
    std::sort(ranked_ex.begin(), ranked_ex.end());
    DomainCard::SampleEntry se;
    se.super_parent = label;
    for (const auto& [rank_id, text] : ranked_ex) {
      if (se.examples.size() >= kSamplesCap) break;
      se.examples.push_back({rank_id.second, text});
    }
    out.samples.push_back(std::move(se));
  }
  return out;
}

// --- serialization ------------------------------------------------------------

namespace {

void emit_str_list(std::string& out, const std::vector<std::string>& xs) {
  out += "[";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += yaml::quote(xs[i]);
  }
  out += "]";
}

}  // namespace

std::string serialize_card(const DomainCard& card) {
  std::string out;
  out += "meta:\n";
  out += "  dataset: " + yaml::quote(card.meta.dataset) + "\n";
  out += "  total_items: " + std::to_string(card.meta.total_items) + "\n";
  out += "  modality:\n";
  out += std::string("    text: ") + (card.meta.text ? "true" : "false") + "\n";
  out += std::string("    multimodal: ") + (card.meta.multimodal ? "true" : "false") + "\n";
  out += std::string("    existing_images: ") +
         (card.meta.existing_images ? "true" : "false") + "\n";
  out += "\nontology:";
  if (card.ontology.empty()) out += " []";
  out += "\n";
  for (const auto& oe : card.ontology) {
    out += "  - super_parent: " + yaml::quote(oe.super_parent) + "\n";
    out += "    mid_level_parents:";
    if (oe.mid_level_parents.empty()) {
      out += " []\n";
    } else {
      out += "\n";
      for (const auto& mid : oe.mid_level_parents)
        out += "      - label: " + yaml::quote(mid) + "\n";
    }
  }
  out += "\nglossary:";
  if (card.glossary.empty()) out += " []";
  out += "\n";
  for (const auto& ge : card.glossary) {
    out += "  - super_parent: " + yaml::quote(ge.super_parent) + "\n";
    out += "    typical_terms: ";
    emit_str_list(out, ge.typical_terms);
    out += "\n";
  }
  out += "\nsamples:";
  if (card.samples.empty()) out += " []";
  out += "\n";
  for (const auto& se : card.samples) {
    out += "  - super_parent: " + yaml::quote(se.super_parent) + "\n";
    out += "    examples:";
    if (se.examples.empty()) {
      out += " []\n";
    } else {
      out += "\n";
      for (const auto& ex : se.examples) {
        out += "      - item_id: " + yaml::quote(ex.item_id) + "\n";
        out += "        question: " + yaml::quote(ex.question) + "\n";
      }
    }
  }
  return out;
}

namespace {

[[noreturn]] void field_fail(const yaml::Node* ctx, const std::string& field) {
  throw Error(Errc::card_format,
              "line " + std::to_string(ctx ? ctx->line : 0) + ": missing or invalid '" +
                  field + "'");
}

std::string need_scalar(const yaml::Node* map, const std::string& field) {
  const yaml::Node* n = map->find(field);
  if (!n || n->kind != yaml::Node::Kind::scalar) field_fail(map, field);
  return n->scalar;
}

bool need_bool(const yaml::Node* map, const std::string& field) {
  std::string s = to_lower(need_scalar(map, field));
  if (s == "true") return true;
  if (s == "false") return false;
  field_fail(map, field);
}

std::int64_t need_int(const yaml::Node* map, const std::string& field) {
  std::string s = need_scalar(map, field);
  try {
    size_t used = 0;
    std::int64_t v = std::stoll(s, &used);
    if (used != s.size()) field_fail(map, field);
    return v;
  } catch (const std::exception&) {
    field_fail(map, field);
  }
}

}  // namespace

DomainCard parse_card(const std::string& yaml_text) {
  yaml::NodePtr root = yaml::parse(yaml_text);
  if (root->kind != yaml::Node::Kind::map)
    throw Error(Errc::card_format, "document root must be a mapping");

  const yaml::Node* meta = root->find("meta");
  if (!meta || meta->kind != yaml::Node::Kind::map)
    throw Error(Errc::card_format, "missing 'meta' section");
  const yaml::Node* ontology = root->find("ontology");
  if (!ontology)
    throw Error(Errc::card_format, "missing 'ontology' section");

  DomainCard card;
  card.meta.dataset = need_scalar(meta, "dataset");
  card.meta.total_items = need_int(meta, "total_items");
  const yaml::Node* modality = meta->find("modality");
  if (!modality || modality->kind != yaml::Node::Kind::map) field_fail(meta, "modality");
  card.meta.text = need_bool(modality, "text");
  card.meta.multimodal = need_bool(modality, "multimodal");
  card.meta.existing_images = need_bool(modality, "existing_images");

  if (ontology->kind == yaml::Node::Kind::list) {
    for (const auto& entry : ontology->items) {
      if (entry->kind != yaml::Node::Kind::map) field_fail(entry.get(), "super_parent");
      DomainCard::OntologyEntry oe;
      oe.super_parent = need_scalar(entry.get(), "super_parent");
      const yaml::Node* mids = entry->find("mid_level_parents");
      if (mids && mids->kind == yaml::Node::Kind::list) {
        for (const auto& mid : mids->items) {
          if (mid->kind == yaml::Node::Kind::map)
            oe.mid_level_parents.push_back(need_scalar(mid.get(), "label"));
          else if (mid->kind == yaml::Node::Kind::scalar)
            oe.mid_level_parents.push_back(mid->scalar);
        }
      }
      card.ontology.push_back(std::move(oe));
    }
  } else if (!(ontology->kind == yaml::Node::Kind::scalar && ontology->scalar.empty())) {
    throw Error(Errc::card_format, "'ontology' must be a list");
  }

  if (const yaml::Node* glossary = root->find("glossary");
      glossary && glossary->kind == yaml::Node::Kind::list) {
    for (const auto& entry : glossary->items) {
      if (entry->kind != yaml::Node::Kind::map) field_fail(entry.get(), "super_parent");
      DomainCard::GlossaryEntry ge;
      ge.super_parent = need_scalar(entry.get(), "super_parent");
      const yaml::Node* terms = entry->find("typical_terms");
      if (terms && terms->kind == yaml::Node::Kind::list)
        for (const auto& t : terms->items)
          if (t->kind == yaml::Node::Kind::scalar) ge.typical_terms.push_back(t->scalar);
      card.glossary.push_back(std::move(ge));
    }
  }

  if (const yaml::Node* samples = root->find("samples");
      samples && samples->kind == yaml::Node::Kind::list) {
    for (const auto& entry : samples->items) {
      if (entry->kind != yaml::Node::Kind::map) field_fail(entry.get(), "super_parent");
      DomainCard::SampleEntry se;
      se.super_parent = need_scalar(entry.get(), "super_parent");
      const yaml::Node* examples = entry->find("examples");
      if (examples && examples->kind == yaml::Node::Kind::list) {
        for (const auto& ex : examples->items) {
          if (ex->kind != yaml::Node::Kind::map) field_fail(ex.get(), "item_id");
          se.examples.push_back(
              {need_scalar(ex.get(), "item_id"), need_scalar(ex.get(), "question")});
        }
      }
      card.samples.push_back(std::move(se));
    }
  }

  // invariant checks
  std::set<std::string> labels;
  for (const auto& oe : card.ontology)
    if (!labels.insert(oe.super_parent).second)
      throw Error(Errc::card_format, "duplicate super_parent '" + oe.super_parent + "'");
  for (const auto& ge : card.glossary)
    if (!labels.count(ge.super_parent))
      throw Error(Errc::card_format,
                  "glossary super_parent '" + ge.super_parent + "' not in ontology");
  for (const auto& se : card.samples)
    if (!labels.count(se.super_parent))
      throw Error(Errc::card_format,
                  "samples super_parent '" + se.super_parent + "' not in ontology");
  return card;
}

}  // namespace bench
