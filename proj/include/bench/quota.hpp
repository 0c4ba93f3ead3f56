#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bench/domain_card.hpp"
#include "bench/types.hpp"

namespace bench {

// Quota axes in tie-break priority order: intent, difficulty, format,
// coverage; within an axis ties break lexicographically.
enum class QuotaAxis { intent, difficulty, format, coverage };

struct QuotaSpec {
  int total = 0;
  std::map<std::string, int> intent_targets;
  std::map<std::string, int> difficulty_targets;
  std::map<std::string, int> format_targets;
  std::map<std::string, int> coverage_targets;
  std::string language;
  std::string modality_directives;

  const std::map<std::string, int>& axis(QuotaAxis a) const;
  ojson to_json() const;
  static QuotaSpec from_json(const json& j);
};

struct QuotaConfig {
  std::map<std::string, double> intent_fractions = {{"standard", 0.75},
                                                    {"adversarial", 0.25}};
  std::map<std::string, double> difficulty_fractions = {
      {"L1", 0.14}, {"L2", 0.24}, {"L3", 0.32}, {"L4", 0.20}, {"L5", 0.10}};
  std::map<std::string, double> format_fractions = {{"mcq_single", 0.55},
                                                    {"mcq_multi", 0.10},
                                                    {"open_ended", 0.20},
                                                    {"structured", 0.10},
                                                    {"judgment", 0.05}};
};

// Integer targets via largest-remainder apportionment (ties: lexicographic
// key order). Throws InfeasibleQuota when the card has more super_parents
// than total; DomainError when a fraction set does not sum to 1 +- 1e-9.
QuotaSpec derive_quota(const DomainCard& card, const QuotaConfig& config, int total);

// Exposed for reuse and direct testing.
std::map<std::string, int> largest_remainder(const std::map<std::string, double>& weights,
                                             int total);

struct AxisReport {
  std::map<std::string, int> deficit;  // max(0, target - realized)
  std::map<std::string, int> surplus;  // max(0, realized - target)
  std::map<std::string, int> realized;
  int deficit_total() const;
};

struct DeficitReport {
  AxisReport intent, difficulty, format, coverage;
  bool satisfied = false;

  const AxisReport& axis(QuotaAxis a) const;
  int max_axis_deficit() const;
  ojson to_json() const;
};

// Items must already be statically valid; the caller filters broken ones.
DeficitReport compute_deficit(const QuotaSpec& spec, const std::vector<Item>& realized);

struct BatchPlan {
  int batch_index = 0;
  int size = 0;
  std::map<std::string, int> intent_request, difficulty_request, format_request,
      coverage_request;
  int id_start = 0, id_end = 0;  // inclusive, 1-based
  std::string language;             // copied from the quota spec
  std::string modality_directives;  // copied from the quota spec
  std::string system_prompt, user_prompt;

  const std::map<std::string, int>& axis(QuotaAxis a) const;
};

// Rolling designer-yield estimate; a designer that under-delivers makes
// later batches over-request so the loop still converges inside its batch
// budget.
struct PlannerState {
  int requested_total = 0;
  int accepted_total = 0;
  int batch_count = 0;
  int zero_progress_streak = 0;

  double yield() const {
    if (requested_total == 0) return 1.0;
    double y = static_cast<double>(accepted_total) / requested_total;
    return std::min(1.0, std::max(0.25, y));
  }
};

// nullopt iff deficit.satisfied. Otherwise a plan sized
// min(batch_cap, ceil(max axis deficit / yield)), each axis allocated
// unit-greedily to the largest remaining deficits.
std::optional<BatchPlan> plan_next_batch(const QuotaSpec& spec, const DeficitReport& deficit,
                                         int batch_cap, int id_cursor,
                                         const PlannerState& state = {});

}  // namespace bench
