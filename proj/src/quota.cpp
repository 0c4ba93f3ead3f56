#include "bench/quota.hpp"

#include <algorithm>
#include <cmath>

#include "bench/error.hpp"

namespace bench {

const std::map<std::string, int>& QuotaSpec::axis(QuotaAxis a) const {
  switch (a) {
    case QuotaAxis::intent: return intent_targets;
    case QuotaAxis::difficulty: return difficulty_targets;
    case QuotaAxis::format: return format_targets;
    case QuotaAxis::coverage: return coverage_targets;
  }
  return intent_targets;
}

const AxisReport& DeficitReport::axis(QuotaAxis a) const {
  switch (a) {
    case QuotaAxis::intent: return intent;
    case QuotaAxis::difficulty: return difficulty;
    case QuotaAxis::format: return format;
    case QuotaAxis::coverage: return coverage;
  }
  return intent;
}

const std::map<std::string, int>& BatchPlan::axis(QuotaAxis a) const {
  switch (a) {
    case QuotaAxis::intent: return intent_request;
    case QuotaAxis::difficulty: return difficulty_request;
    case QuotaAxis::format: return format_request;
    case QuotaAxis::coverage: return coverage_request;
  }
  return intent_request;
}

int AxisReport::deficit_total() const {
  int sum = 0;
  for (const auto& [k, v] : deficit) sum += v;
  return sum;
}

int DeficitReport::max_axis_deficit() const {
  return std::max({intent.deficit_total(), difficulty.deficit_total(),
                   format.deficit_total(), coverage.deficit_total()});
}

namespace {

ojson map_to_json(const std::map<std::string, int>& m) {
  ojson j = ojson::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

std::map<std::string, int> map_from_json(const json& j) {
  std::map<std::string, int> m;
  for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = it.value().get<int>();
  return m;
}

}  // namespace

ojson QuotaSpec::to_json() const {
  ojson j;
  j["total"] = total;
  j["intent_targets"] = map_to_json(intent_targets);
  j["difficulty_targets"] = map_to_json(difficulty_targets);
  j["format_targets"] = map_to_json(format_targets);
  j["coverage_targets"] = map_to_json(coverage_targets);
  j["language"] = language;
  j["modality_directives"] = modality_directives;
  return j;
}

QuotaSpec QuotaSpec::from_json(const json& j) {
  QuotaSpec s;
  s.total = j.at("total").get<int>();
  s.intent_targets = map_from_json(j.at("intent_targets"));
  s.difficulty_targets = map_from_json(j.at("difficulty_targets"));
  s.format_targets = map_from_json(j.at("format_targets"));
  s.coverage_targets = map_from_json(j.at("coverage_targets"));
  s.language = j.at("language").get<std::string>();
  s.modality_directives = j.at("modality_directives").get<std::string>();
  return s;
}

ojson DeficitReport::to_json() const {
  auto axis_json = [](const AxisReport& a) {
    ojson j;
    j["deficit"] = map_to_json(a.deficit);
    j["surplus"] = map_to_json(a.surplus);
    j["realized"] = map_to_json(a.realized);
    return j;
  };
  ojson j;
  j["intent"] = axis_json(intent);
  j["difficulty"] = axis_json(difficulty);
  j["format"] = axis_json(format);
  j["coverage"] = axis_json(coverage);
  j["satisfied"] = satisfied;
  return j;
}

std::map<std::string, int> largest_remainder(const std::map<std::string, double>& weights,
                                             int total) {
  double wsum = 0;
  for (const auto& [k, w] : weights) {
    if (w < 0) throw Error(Errc::domain_error, "negative weight for '" + k + "'");
    wsum += w;
  }
  if (wsum <= 0) throw Error(Errc::domain_error, "weights sum to zero");

  std::map<std::string, int> out;
  std::vector<std::pair<std::string, double>> remainders;
  int assigned = 0;
  for (const auto& [k, w] : weights) {
    double exact = static_cast<double>(total) * w / wsum;
    int fl = static_cast<int>(std::floor(exact));
    out[k] = fl;
    assigned += fl;
    remainders.emplace_back(k, exact - fl);
  }
  // stable sort keeps lexicographic order among equal remainders
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (int i = 0; i < total - assigned; ++i) out[remainders[i % remainders.size()].first]++;
  return out;
}

QuotaSpec derive_quota(const DomainCard& card, const QuotaConfig& config, int total) {
  if (total <= 0) throw Error(Errc::domain_error, "total must be positive");
  auto check_unit = [](const std::map<std::string, double>& f, const char* which) {
    double s = 0;
    for (const auto& [k, v] : f) {
      (void)k;
      s += v;
    }
    if (std::fabs(s - 1.0) > 1e-9)
      throw Error(Errc::domain_error, std::string(which) + " fractions sum to " +
                                          std::to_string(s) + ", expected 1");
  };
  check_unit(config.intent_fractions, "intent");
  check_unit(config.difficulty_fractions, "difficulty");
  check_unit(config.format_fractions, "format");

  QuotaSpec spec;
  spec.total = total;
  spec.intent_targets = largest_remainder(config.intent_fractions, total);
  spec.difficulty_targets = largest_remainder(config.difficulty_fractions, total);
  spec.format_targets = largest_remainder(config.format_fractions, total);

  if (card.ontology.empty())
    throw Error(Errc::infeasible_quota, "card has no super_parents");
  if (static_cast<int>(card.ontology.size()) > total)
    throw Error(Errc::infeasible_quota,
                std::to_string(card.ontology.size()) + " super_parents exceed total " +
                    std::to_string(total));

  // Seed mass proxy: recorded sample count per label (the card carries no
  // fuller per-label census).
  std::map<std::string, double> mass;
  std::map<std::string, size_t> sample_count;
  for (const auto& se : card.samples) sample_count[se.super_parent] = se.examples.size();
  for (const auto& oe : card.ontology) {
    auto it = sample_count.find(oe.super_parent);
    mass[oe.super_parent] =
        static_cast<double>(it == sample_count.end() ? 0 : std::max<size_t>(1, it->second));
    if (mass[oe.super_parent] == 0) mass[oe.super_parent] = 1;
  }
  spec.coverage_targets = largest_remainder(mass, total);

  // minimum 1 per super_parent: bump zeros, shaving from the largest cells
  for (auto& [label, count] : spec.coverage_targets) {
    while (count == 0) {
      auto donor = spec.coverage_targets.begin();
      for (auto it = spec.coverage_targets.begin(); it != spec.coverage_targets.end(); ++it)
        if (it->second > donor->second) donor = it;
      if (donor->second <= 1)
        throw Error(Errc::infeasible_quota, "cannot give every super_parent one item");
      donor->second--;
      count++;
    }
  }

  // language / modality directives come from the variant; the caller fills them
  return spec;
}

DeficitReport compute_deficit(const QuotaSpec& spec, const std::vector<Item>& realized) {
  auto tally = [&](QuotaAxis axis) {
    AxisReport rep;
    const auto& targets = spec.axis(axis);
    for (const auto& [k, v] : targets) {
      (void)v;
      rep.realized[k] = 0;
    }
    for (const auto& it : realized) {
      std::string key;
      switch (axis) {
        case QuotaAxis::intent: key = it.design_type; break;
        case QuotaAxis::difficulty: key = it.declared_difficulty; break;
        case QuotaAxis::format: key = it.question_type; break;
        case QuotaAxis::coverage: key = it.super_parent; break;
      }
      rep.realized[key]++;
    }
    for (const auto& [k, got] : rep.realized) {
      auto t = targets.find(k);
      int target = t == targets.end() ? 0 : t->second;
      rep.deficit[k] = std::max(0, target - got);
      rep.surplus[k] = std::max(0, got - target);
    }
    return rep;
  };

  DeficitReport rep;
  rep.intent = tally(QuotaAxis::intent);
  rep.difficulty = tally(QuotaAxis::difficulty);
  rep.format = tally(QuotaAxis::format);
  rep.coverage = tally(QuotaAxis::coverage);
  rep.satisfied = rep.max_axis_deficit() == 0;
  return rep;
}

namespace {

// Unit-greedy allocation: hand out `size` units one at a time to the cell
// with the largest remaining deficit (ties lexicographic). Over-requests
// spread across the most-deficient cells first.
std::map<std::string, int> allocate_axis(const std::map<std::string, int>& deficit,
                                         int size) {
  std::map<std::string, int> request;
  std::map<std::string, int> remaining = deficit;
  if (remaining.empty()) return request;
  for (const auto& [k, v] : remaining) {
    (void)v;
    request[k] = 0;
  }
  for (int u = 0; u < size; ++u) {
    auto best = remaining.begin();
    for (auto it = remaining.begin(); it != remaining.end(); ++it)
      if (it->second > best->second) best = it;
    request[best->first]++;
    best->second--;
  }
  std::erase_if(request, [](const auto& kv) { return kv.second == 0; });
  return request;
}

}  // namespace

std::optional<BatchPlan> plan_next_batch(const QuotaSpec& spec, const DeficitReport& deficit,
                                         int batch_cap, int id_cursor,
                                         const PlannerState& state) {
  if (deficit.satisfied) return std::nullopt;
  if (batch_cap <= 0) throw Error(Errc::domain_error, "batch_cap must be positive");

  int need = deficit.max_axis_deficit();
  double yield = state.yield();
  int size = static_cast<int>(std::ceil(static_cast<double>(need) / yield));
  // Under-delivering designers also waste units through placement: a dropped
  // or mislabeled item can land on exactly the cell that still has a deficit.
  // Once under-delivery is on record, close-out batches carry a real margin;
  // surplus is kept by policy, so the cost is only a few extra items.
  if (yield < 1.0) size = std::max(size + 3, 2 * need);
  size = std::max(std::min(batch_cap, size), 1);

  BatchPlan plan;
  plan.batch_index = state.batch_count;
  plan.size = size;
  // A satisfied axis still needs a consistent request sum; it asks for the
  // spec mix instead of chasing deficits.
  auto request_for = [&](QuotaAxis a) {
    const AxisReport& rep = deficit.axis(a);
    if (rep.deficit_total() > 0) return allocate_axis(rep.deficit, size);
    std::map<std::string, double> mix;
    for (const auto& [k, v] : spec.axis(a)) mix[k] = static_cast<double>(std::max(v, 0));
    return largest_remainder(mix, size);
  };
  plan.intent_request = request_for(QuotaAxis::intent);
  plan.difficulty_request = request_for(QuotaAxis::difficulty);
  plan.format_request = request_for(QuotaAxis::format);
  plan.coverage_request = request_for(QuotaAxis::coverage);
  plan.language = spec.language;
  plan.modality_directives = spec.modality_directives;
  plan.id_start = id_cursor + 1;
  plan.id_end = id_cursor + size;
  return plan;
}

}  // namespace bench
