#pragma once

#include <string>
#include <vector>

#include "bench/types.hpp"

namespace bench {

// Static schema gate. Pure: identical input yields identical status.
// clean            — every invariant holds as-is.
// suspect_static   — recoverable deviations only (answer casing/whitespace,
//                    unsorted letter sets, explanation 5-9 chars, stray
//                    visual_instruction); canonicalize_item repairs these.
// broken_static    — hard schema failure; flags carry schema_violation.
ItemStatus validate_item_static(const Item& item);

// Normalizes the recoverable deviations validate_item_static tolerates:
// uppercased trimmed answer letters, sorted mcq_multi letter sets, trimmed
// text answers, lowered judgment booleans, dropped stray visual_instruction.
// Broken items are returned unchanged.
Item canonicalize_item(const Item& item);

struct IdViolation {
  enum class Kind { gap, duplicate, foreign } kind;
  std::string detail;  // e.g. "gap at p_q002"
};

// Expects exactly prefix_q001..prefix_qNNN, zero-padded to 3 digits (4 when
// the suite exceeds 999 items). One descriptor per gap/duplicate/foreign id.
std::vector<IdViolation> verify_id_sequence(const std::vector<Item>& items,
                                            const std::string& prefix);

// prefix_q007 style id for a 1-based index; pads to 3 digits, 4 when
// total > 999.
std::string make_item_id(const std::string& prefix, int index, int total);

}  // namespace bench
