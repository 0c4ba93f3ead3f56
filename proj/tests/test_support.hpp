#pragma once

// Shared helpers for the test binaries: fixture paths and a hand-rolled
// generator for schema-valid items.

#include <cstdlib>
#include <filesystem>
#include <string>

#include "bench/types.hpp"
#include "bench/util.hpp"
#include "bench/validate.hpp"

namespace testsup {

inline std::filesystem::path fixture(const std::string& name) {
  const char* dir = std::getenv("BENCH_FIXTURES");
  if (dir) return std::filesystem::path(dir) / name;
  return std::filesystem::path("tests/fixtures") / name;
}

// Deterministic generator of schema-valid items across all five formats.
inline bench::Item random_valid_item(const bench::KeyedRng& rng, int n, int total,
                                     const std::string& prefix = "gen") {
  using bench::Item;
  std::string key = "item:" + std::to_string(n);
  Item it;
  it.id = bench::make_item_id(prefix, n + 1, total);
  it.designer_model = "designer-" + std::to_string(rng.pick(key + ":d", 4));
  it.source_dataset = "propset";
  it.super_parent = "topic-" + std::to_string(rng.pick(key + ":sp", 5));
  it.subdomain = "sub-" + std::to_string(rng.pick(key + ":sd", 3));
  it.design_type = rng.pick(key + ":adv", 4) == 0 ? "adversarial" : "standard";
  it.modality = "text";
  it.language = "en";
  it.declared_difficulty = "L" + std::to_string(1 + rng.pick(key + ":L", 5));
  it.estimated_time_sec = 20 + static_cast<int>(rng.pick(key + ":t", 100));
  it.uses_visual = false;
  it.answer_explanation = "Explanation " + std::to_string(rng.raw(key + ":ex") % 100000) +
                          " with enough detail.";
  it.question_stem = "Probe " + std::to_string(rng.raw(key + ":stem") % 1000000) +
                     " about " + it.super_parent + "?";

  switch (rng.pick(key + ":qt", 5)) {
    case 0: {
      it.question_type = "mcq_single";
      int n_opts = 4 + static_cast<int>(rng.pick(key + ":no", 2));
      for (int o = 0; o < n_opts; ++o) it.options.push_back("option " + std::to_string(o));
      it.answer = std::string(1, static_cast<char>('A' + rng.pick(key + ":g", n_opts)));
      break;
    }
    case 1: {
      it.question_type = "mcq_multi";
      int n_opts = 4 + static_cast<int>(rng.pick(key + ":no", 2));
      for (int o = 0; o < n_opts; ++o) it.options.push_back("option " + std::to_string(o));
      int first = static_cast<int>(rng.pick(key + ":g1", n_opts));
      int second = (first + 1 + static_cast<int>(rng.pick(key + ":g2", n_opts - 1))) % n_opts;
      bench::ojson arr = bench::ojson::array();
      arr.push_back(std::string(1, static_cast<char>('A' + std::min(first, second))));
      arr.push_back(std::string(1, static_cast<char>('A' + std::max(first, second))));
      it.answer = arr;
      break;
    }
    case 2:
      it.question_type = "open_ended";
      it.answer = std::to_string(1 + rng.pick(key + ":num", 40)) + "/" +
                  std::to_string(2 + rng.pick(key + ":den", 9));
      break;
    case 3:
      it.question_type = "structured";
      it.answer = "1. alpha 2. beta " + std::to_string(rng.raw(key + ":s") % 1000);
      break;
    default:
      it.question_type = "judgment";
      it.answer = rng.pick(key + ":b", 2) == 0 ? "true" : "false";
      break;
  }
  return it;
}

}  // namespace testsup
