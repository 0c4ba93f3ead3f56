#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bench/scoring.hpp"
#include "bench/types.hpp"

namespace bench {

enum class DynamicDecision { clean, not_well_posed, gold_incorrect, ambiguous };
const char* to_string(DynamicDecision d);
std::optional<DynamicDecision> parse_dynamic_decision(const std::string& s);

struct CoreDecision {
  std::string item_id;
  bool in_core = false;
  ItemStatus item_status;
  std::optional<DynamicDecision> dynamic_decision;
  std::vector<std::string> reasons;  // nonempty whenever in_core is false

  ojson to_json() const;
};

// Pass-2 quality judge over one item. Samples the two most-disagreeing panel
// answers (one correct, one incorrect when available); fewer than two usable
// answers defaults to clean with a low-evidence reason. Re-asks once before
// raising JudgeProtocolError.
struct DynamicPassResult {
  DynamicDecision decision = DynamicDecision::clean;
  std::string reason;
};
DynamicPassResult dynamic_quality_pass(const Item& item,
                                       const std::vector<ScoreRecord>& records,
                                       const JudgeFn& judge);

// Core membership: statically clean-or-suspect, scorable by someone, and not
// dynamically flagged. Every exclusion carries at least one reason.
std::vector<CoreDecision> build_core(
    const std::vector<Item>& suite, const std::vector<ItemStatus>& statuses,
    const std::vector<std::optional<DynamicDecision>>& decisions,
    const std::vector<ScoreRecord>& records);

// 1 - core/suite. Throws DomainError when the suite is empty or core > suite.
double noncore_rate(std::int64_t suite_size, std::int64_t core_size);

ojson core_manifest(const std::vector<CoreDecision>& decisions);

}  // namespace bench
