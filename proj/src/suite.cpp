#include "bench/suite.hpp"

#include <algorithm>

#include "bench/error.hpp"
#include "bench/util.hpp"

namespace bench {

namespace {

// Strip ```...``` fences; returns true when something was removed.
bool strip_fences(std::string& text) {
  size_t open = text.find("```");
  if (open == std::string::npos) return false;
  size_t body = text.find('\n', open);
  if (body == std::string::npos) return false;
  size_t close = text.find("```", body);
  if (close == std::string::npos) return false;
  text = text.substr(body + 1, close - body - 1);
  return true;
}

std::optional<json> try_array(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (!j.is_discarded() && j.is_array()) return j;
  return std::nullopt;
}

}  // namespace

BatchParse parse_designer_batch(const std::string& raw, const BatchPlan& expected) {
  BatchParse out;
  std::string text = trim(raw);

  std::optional<json> arr = try_array(text);
  if (!arr) {
    std::string fenced = text;
    if (strip_fences(fenced)) {
      arr = try_array(trim(fenced));
      if (arr) out.suspect = true;
    }
  }
  if (!arr) {
    // last resort: outermost bracket span
    size_t first = text.find('[');
    size_t last = text.rfind(']');
    if (first != std::string::npos && last != std::string::npos && last > first) {
      arr = try_array(text.substr(first, last - first + 1));
      if (arr) out.suspect = true;
    }
  }
  if (!arr) throw Error(Errc::unparseable_batch, "no JSON array recoverable from output");

  int index = 0;
  for (const auto& el : *arr) {
    try {
      out.accepted.push_back(item_from_json(el));
    } catch (const Error& e) {
      out.rejects.emplace_back(index, e.what());
    }
    ++index;
  }
  if (static_cast<int>(arr->size()) != expected.size)
    out.rejects.emplace_back(-1, "count mismatch: got " + std::to_string(arr->size()) +
                                     ", requested " + std::to_string(expected.size));
  return out;
}

SuiteResult run_generation_loop(const DomainCard& card, const QuotaSpec& spec,
                                const ModelId& designer, const PromptTemplates& templates,
                                const std::string& id_prefix, const DesignerFn& designer_fn,
                                const LoopOptions& options) {
  SuiteResult result;
  result.spec = spec;
  PlannerState state;
  std::vector<Item> quota_items;  // statically valid subset driving deficits

  while (state.batch_count < options.max_batches) {
    DeficitReport deficit = compute_deficit(spec, quota_items);
    auto plan = plan_next_batch(spec, deficit, options.batch_cap,
                                static_cast<int>(result.items.size()), state);
    if (!plan) {
      result.satisfied = true;
      break;
    }
    RequestPair prompts =
        assemble_generation_request(card, *plan, designer, templates, id_prefix);
    plan->system_prompt = prompts.system;
    plan->user_prompt = prompts.user;

    std::string raw = designer_fn(prompts, *plan);
    BatchParse parsed;
    try {
      parsed = parse_designer_batch(raw, *plan);
    } catch (const Error& e) {
      if (e.code() != Errc::unparseable_batch) throw;
      parsed.rejects.emplace_back(-1, e.what());
    }

    BatchRecord record;
    record.batch_index = state.batch_count;
    record.requested = plan->size;
    record.rejected = static_cast<int>(parsed.rejects.size());

    for (Item item : parsed.accepted) {
      // canonical sequential id regardless of what the designer claimed
      item.id = make_item_id(id_prefix, static_cast<int>(result.items.size()) + 1, spec.total);
      Item fixed = canonicalize_item(item);
      ItemStatus status = validate_item_static(fixed);
      if (status.status == StaticStatus::broken_static) {
        record.broken++;
      } else {
        record.accepted++;
        quota_items.push_back(fixed);
      }
      result.items.push_back(std::move(fixed));
      result.statuses.push_back(std::move(status));
    }

    state.requested_total += plan->size;
    state.accepted_total += record.accepted;
    state.batch_count++;
    record.deficit_after = compute_deficit(spec, quota_items);
    result.history.push_back(record);

    if (record.accepted == 0)
      state.zero_progress_streak++;
    else
      state.zero_progress_streak = 0;
    if (state.zero_progress_streak >= options.max_zero_progress) {
      result.abort_reason = "no progress in " + std::to_string(state.zero_progress_streak) +
                            " consecutive batches";
      break;
    }
    if (record.deficit_after.satisfied) {
      result.satisfied = true;
      break;
    }
  }
  if (!result.satisfied && result.abort_reason.empty() &&
      state.batch_count >= options.max_batches)
    result.abort_reason = "batch budget exhausted";
  return result;
}

ojson suite_quota_report(const SuiteResult& result) {
  ojson j;
  j["targets"] = result.spec.to_json();
  std::vector<Item> valid;
  for (size_t i = 0; i < result.items.size(); ++i)
    if (result.statuses[i].status != StaticStatus::broken_static)
      valid.push_back(result.items[i]);
  j["final_deficit"] = compute_deficit(result.spec, valid).to_json();
  j["satisfied"] = result.satisfied;
  j["total_items"] = result.items.size();
  j["statically_valid"] = valid.size();
  ojson batches = ojson::array();
  for (const auto& rec : result.history) {
    ojson b;
    b["batch_index"] = rec.batch_index;
    b["requested"] = rec.requested;
    b["accepted"] = rec.accepted;
    b["broken"] = rec.broken;
    b["rejected"] = rec.rejected;
    b["deficit_after"] = rec.deficit_after.to_json();
    batches.push_back(b);
  }
  j["batches"] = batches;
  if (!result.abort_reason.empty()) j["abort_reason"] = result.abort_reason;
  return j;
}

}  // namespace bench
