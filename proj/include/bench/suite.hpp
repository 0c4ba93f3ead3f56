#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bench/quota.hpp"
#include "bench/templates.hpp"
#include "bench/types.hpp"
#include "bench/validate.hpp"

namespace bench {

struct BatchParse {
  std::vector<Item> accepted;                         // structurally loadable items
  std::vector<std::pair<int, std::string>> rejects;   // (element index, reason); -1 = batch-level
  bool suspect = false;  // fences / surrounding prose were stripped
};

// Extracts the outermost JSON array from raw designer output, tolerating
// markdown fences and surrounding prose at suspect level. Elements that do
// not load as items become rejects; a count mismatch versus the plan is a
// batch-level reject. Throws UnparseableBatch when no array is recoverable.
BatchParse parse_designer_batch(const std::string& raw, const BatchPlan& expected);

// Text-in/text-out designer invocation; the loop stays backend-agnostic.
using DesignerFn = std::function<std::string(const RequestPair&, const BatchPlan&)>;

struct BatchRecord {
  int batch_index = 0;
  int requested = 0;
  int accepted = 0;       // statically valid (clean/suspect) items
  int broken = 0;         // kept in the suite but not counted toward quota
  int rejected = 0;       // unrecoverable elements
  DeficitReport deficit_after;
};

struct SuiteResult {
  std::vector<Item> items;          // all kept items, canonical sequential ids
  std::vector<ItemStatus> statuses; // parallel to items
  QuotaSpec spec;
  bool satisfied = false;
  std::vector<BatchRecord> history;
  std::string abort_reason;         // nonempty when the loop gave up
};

struct LoopOptions {
  int batch_cap = 30;
  int max_zero_progress = 10;  // consecutive no-progress batches before aborting
  int max_batches = 1000;      // hard stop
};

// Deficit-driven generation: plan, request, parse, validate, re-key ids,
// repeat until every axis deficit is zero. Over-delivery is kept; deficits
// clamp at zero.
SuiteResult run_generation_loop(const DomainCard& card, const QuotaSpec& spec,
                                const ModelId& designer, const PromptTemplates& templates,
                                const std::string& id_prefix, const DesignerFn& designer_fn,
                                const LoopOptions& options = {});

ojson suite_quota_report(const SuiteResult& result);

}  // namespace bench
