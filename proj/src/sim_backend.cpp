#include "bench/sim_backend.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "bench/det_math.hpp"
#include "bench/error.hpp"
#include "bench/util.hpp"
#include "bench/validate.hpp"

namespace bench {

std::string SimPanelSpec::family_of(const std::string& model_name) const {
  if (auto it = families.find(model_name); it != families.end()) return it->second;
  const auto& builtin = builtin_family_table();
  if (auto it = builtin.find(model_name); it != builtin.end()) return it->second;
  return model_name;  // unknown models form their own family
}

SimBackend::SimBackend(SimPanelSpec spec, SimDesignerConfig designer)
    : spec_(std::move(spec)), designer_(designer) {}

namespace {

// Exact evenly-spread selection: floor((i+1)f) > floor(i f) marks ~f*n of n.
bool spread_hit(int i, double fraction) {
  if (fraction <= 0) return false;
  if (fraction >= 1) return true;
  auto fl = [&](double x) { return static_cast<long long>(std::floor(x)); };
  return fl((i + 1) * fraction) > fl(i * fraction);
}

std::string letters_to_array(const std::vector<char>& letters) {
  ojson arr = ojson::array();
  for (char c : letters) arr.push_back(std::string(1, c));
  return arr.dump();
}

std::vector<char> gold_letters(const Item& item) {
  std::vector<char> out;
  if (item.answer.is_string()) {
    std::string s = item.answer.get<std::string>();
    if (s.size() == 1) out.push_back(s[0]);
  } else if (item.answer.is_array()) {
    for (const auto& el : item.answer)
      if (el.is_string() && el.get<std::string>().size() == 1)
        out.push_back(el.get<std::string>()[0]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// token set for the crude judge similarity
std::set<std::string> word_set(const std::string& s) {
  std::set<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else if (!cur.empty()) {
      out.insert(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(cur);
  return out;
}

}  // namespace

double SimBackend::item_difficulty_param(const Item& item) const {
  if (auto it = spec_.overrides.find(item.id); it != spec_.overrides.end())
    return it->second.difficulty;
  double base = 0.0;
  if (auto it = spec_.difficulty_by_tier.find(item.declared_difficulty);
      it != spec_.difficulty_by_tier.end())
    base = it->second;
  KeyedRng rng(spec_.seed);
  double jitter = (2.0 * rng.uniform("b:" + item.question_stem) - 1.0) * spec_.difficulty_jitter;
  double b = base + jitter;
  if (item.design_type == "adversarial") b += spec_.adversarial_difficulty_shift;
  return b;
}

double SimBackend::item_discrimination_param(const Item& item) const {
  if (auto it = spec_.overrides.find(item.id); it != spec_.overrides.end())
    return it->second.discrimination;
  return spec_.default_discrimination;
}

bool SimBackend::planted_dynamic_bad(const std::string& stem) const {
  if (designer_.dynamic_bad_fraction <= 0) return false;
  KeyedRng rng(spec_.seed);
  return rng.uniform("dynbad:" + stem) < designer_.dynamic_bad_fraction;
}

double SimBackend::correct_probability(const ModelId& answerer, const Item& item) const {
  double theta;
  if (auto it = spec_.abilities.find(answerer.name); it != spec_.abilities.end()) {
    theta = it->second;
  } else {
    KeyedRng rng(spec_.seed);
    theta = rng.uniform("theta:" + answerer.name) - 0.5;
  }
  double a = item_discrimination_param(item);
  double b = item_difficulty_param(item);
  double logit = a * (theta - b);
  std::string answerer_family = spec_.family_of(answerer.name);
  if (answerer_family == spec_.family_of(item.designer_model)) {
    if (auto it = spec_.family_affinity.find(answerer_family);
        it != spec_.family_affinity.end())
      logit += it->second;
  }
  return detmath::sigmoid(logit);
}

std::string SimBackend::simulate_response(const ModelId& answerer, const Item& item) const {
  KeyedRng rng(spec_.seed);
  std::string key = "resp:" + answerer.name + ":" + item.id + ":" + item.question_stem;
  bool correct = rng.uniform(key) < correct_probability(answerer, item);
  auto qt = item.qtype();

  auto wrap_boilerplate = [&](const std::string& payload) {
    if (rng.uniform("boiler:" + key) < designer_.mcq_boilerplate_fraction)
      return "The answer is " + payload + ".";
    return payload;
  };

  if (qt == QuestionType::mcq_single) {
    auto gold = gold_letters(item);
    char g = gold.empty() ? 'A' : gold[0];
    char pick = g;
    if (!correct) {
      int n = static_cast<int>(item.options.size());
      int offset = 1 + static_cast<int>(rng.pick("alt:" + key, std::max(1, n - 1)));
      pick = static_cast<char>('A' + ((g - 'A') + offset) % std::max(2, n));
    }
    return wrap_boilerplate(std::string(1, pick));
  }
  if (qt == QuestionType::mcq_multi) {
    auto gold = gold_letters(item);
    if (!correct && !item.options.empty()) {
      // flip one letter's membership
      int n = static_cast<int>(item.options.size());
      char flip = static_cast<char>('A' + rng.pick("flip:" + key, n));
      auto at = std::find(gold.begin(), gold.end(), flip);
      if (at != gold.end() && gold.size() > 1)
        gold.erase(at);
      else if (at == gold.end())
        gold.insert(std::lower_bound(gold.begin(), gold.end(), flip), flip);
      else
        gold[0] = gold[0] == 'A' ? 'B' : 'A';
    }
    return letters_to_array(gold);
  }
  if (qt == QuestionType::judgment) {
    std::string g = to_lower(trim(item.answer.is_string() ? item.answer.get<std::string>()
                                                          : "true"));
    bool truth = (g == "true" || g == "yes");
    if (!correct) truth = !truth;
    return wrap_boilerplate(truth ? "true" : "false");
  }

  // open_ended / structured
  std::string gold = item.answer.is_string() ? item.answer.get<std::string>() : item.answer.dump();
  if (correct) {
    // numeric golds sometimes come back in an equivalent surface form
    auto slash = gold.find('/');
    if (slash != std::string::npos && slash > 0) {
      char* end = nullptr;
      double num = std::strtod(gold.c_str(), &end);
      double den = std::strtod(gold.c_str() + slash + 1, nullptr);
      if (end == gold.c_str() + slash && den != 0) {
        int form = static_cast<int>(rng.pick("form:" + key, 3));
        if (form == 1) {
          double v = num / den;
          double scaled = v * 10000.0;
          if (std::fabs(scaled - std::floor(scaled + 0.5)) < 1e-12) {
            // exact short decimal
            std::ostringstream os;
            os << v;
            return os.str();
          }
        } else if (form == 2) {
          return "(" + gold.substr(0, slash) + ")/(" + gold.substr(slash + 1) + ")";
        }
      }
    }
    return gold;
  }
  // wrong answers: perturb numerics, replace prose
  char* end = nullptr;
  std::strtod(gold.c_str(), &end);
  if (end != gold.c_str() && end == gold.c_str() + gold.size())
    return gold + "1";  // wrong number, still numeric
  if (gold.find('/') != std::string::npos) {
    return std::to_string(1 + rng.pick("wrongnum:" + key, 8)) + "/" +
           std::to_string(9 + rng.pick("wrongden:" + key, 7));
  }
  return "an unrelated statement about a different topic";
}

// --- designer ------------------------------------------------------------------

namespace {

struct CellPlan {
  std::vector<std::string> intents, difficulties, formats, coverages;
};

std::vector<std::string> expand_cells(const json& counts) {
  std::vector<std::string> out;
  if (!counts.is_object()) return out;
  for (auto it = counts.begin(); it != counts.end(); ++it)
    for (int i = 0; i < it.value().get<int>(); ++i) out.push_back(it.key());
  return out;
}

std::string decimal_if_exact(int num, int den) {
  // exact short decimal when den divides a small power of ten
  for (int k = 1; k <= 4; ++k) {
    long long scale = 1;
    for (int i = 0; i < k; ++i) scale *= 10;
    if ((scale * num) % den == 0) {
      long long whole = scale * num / den;
      std::string digits = std::to_string(whole);
      while (static_cast<int>(digits.size()) <= k) digits.insert(digits.begin(), '0');
      std::string out = digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
      while (out.back() == '0') out.pop_back();
      if (out.back() == '.') out.pop_back();
      return out;
    }
  }
  return "";
}

}  // namespace

std::string SimBackend::simulate_designer_batch(const ojson& ctx) const {
  int size = ctx.at("size").get<int>();
  int id_start = ctx.at("id_start").get<int>();
  std::string prefix = ctx.at("id_prefix").get<std::string>();
  std::string dataset = ctx.at("dataset").get<std::string>();
  std::string designer = ctx.at("designer").get<std::string>();
  std::string language = ctx.value("language", "en");
  std::string modality = ctx.value("modality", "text");
  bool visual_primed = ctx.value("condition", "") == std::string("visualprimed");

  CellPlan cells;
  cells.intents = expand_cells(ctx.at("intent_request"));
  cells.difficulties = expand_cells(ctx.at("difficulty_request"));
  cells.formats = expand_cells(ctx.at("format_request"));
  cells.coverages = expand_cells(ctx.at("coverage_request"));

  KeyedRng rng(spec_.seed);
  ojson arr = ojson::array();
  int emitted = 0;
  for (int i = 0; i < size; ++i) {
    if (spread_hit(i, designer_.drop_fraction)) continue;

    auto cell = [&](const std::vector<std::string>& xs, const char* fallback) {
      return xs.empty() ? std::string(fallback) : xs[i % xs.size()];
    };
    std::string intent = cell(cells.intents, "standard");
    std::string difficulty = cell(cells.difficulties, "L3");
    std::string format = cell(cells.formats, "mcq_single");
    std::string coverage = cell(cells.coverages, "general");

    if (spread_hit(emitted, designer_.difficulty_mislabel_fraction)) {
      int tier = difficulty.size() == 2 ? difficulty[1] - '1' : 2;
      difficulty = std::string("L") + static_cast<char>('1' + (tier + 1) % 5);
    }

    int number = id_start + i;
    std::string salt = std::to_string(
        rng.raw("stem:" + prefix + ":" + std::to_string(number)) % 100000000ull);

    Item it;
    it.id = make_item_id(prefix, number, std::max(number, 999));
    it.designer_model = designer;
    it.source_dataset = dataset;
    it.super_parent = coverage;
    it.subdomain = coverage + " basics";
    it.design_type = intent;
    it.modality = modality;
    it.language = language;
    it.question_type = format;
    it.declared_difficulty = difficulty;
    it.estimated_time_sec = 30 + 20 * (difficulty.size() == 2 ? difficulty[1] - '1' : 2);
    it.uses_visual = visual_primed && rng.pick("vis:" + salt, 3) == 0;
    if (it.uses_visual)
      it.visual_instruction = "Refer to the described diagram for " + salt + ".";
    it.answer_explanation = "Synthetic rationale " + salt + " for grading.";

    std::string stem_core = "[" + salt + "] " + coverage + " probe " + std::to_string(number);
    if (format == "mcq_single") {
      it.question_stem = "Which option matches " + stem_core + "?";
      int n_options = 4;
      for (int o = 0; o < n_options; ++o)
        it.options.push_back("Candidate " + std::to_string(o + 1) + " for " + salt);
      char gold = static_cast<char>('A' + rng.pick("gold:" + salt, n_options));
      it.answer = std::string(1, gold);
    } else if (format == "mcq_multi") {
      it.question_stem = "Select every property that holds for " + stem_core + ".";
      int n_options = 4 + static_cast<int>(rng.pick("opts:" + salt, 2));
      for (int o = 0; o < n_options; ++o)
        it.options.push_back("Property " + std::to_string(o + 1) + " of " + salt);
      int first = static_cast<int>(rng.pick("g1:" + salt, n_options));
      int second = (first + 1 + static_cast<int>(rng.pick("g2:" + salt, n_options - 1))) %
                   n_options;
      std::vector<char> gold = {static_cast<char>('A' + std::min(first, second)),
                                static_cast<char>('A' + std::max(first, second))};
      ojson ans = ojson::array();
      for (char c : gold) ans.push_back(std::string(1, c));
      it.answer = ans;
    } else if (format == "judgment") {
      it.question_stem = "True or false: " + stem_core + " behaves as documented.";
      it.answer = rng.pick("bool:" + salt, 2) == 0 ? "true" : "false";
    } else {  // open_ended / structured
      bool numeric = rng.uniform("numopen:" + salt) < designer_.numeric_open_fraction;
      if (numeric) {
        int num = 1 + static_cast<int>(rng.pick("num:" + salt, 9));
        int den = 2 + static_cast<int>(rng.pick("den:" + salt, 7));
        it.question_stem = "Compute the ratio described by " + stem_core + ".";
        std::string dec = decimal_if_exact(num, den);
        // sometimes state the gold as decimal, sometimes as a fraction
        if (!dec.empty() && rng.pick("goldform:" + salt, 2) == 0)
          it.answer = dec;
        else
          it.answer = std::to_string(num) + "/" + std::to_string(den);
      } else {
        it.question_stem = "Briefly explain the key property of " + stem_core + ".";
        it.answer = "the " + coverage + " invariant " + salt + " holds under composition";
      }
      if (format == "structured")
        it.question_stem += " Answer as a single numbered list line.";
    }

    ojson row = item_to_json(it);
    if (spread_hit(emitted, designer_.schema_break_fraction)) {
      // classic failure shape: list answer where a string is required
      if (format == "mcq_single")
        row["answer"] = ojson::array({row["answer"]});
      else
        row["answer"] = 12345;
    }
    arr.push_back(row);
    ++emitted;
  }
  return arr.dump();
}

// --- judges ---------------------------------------------------------------------

std::string SimBackend::simulate_answer_judgment(const ojson& ctx) const {
  std::string stem = ctx.at("stem").get<std::string>();
  std::string gold = ctx.at("gold").get<std::string>();
  std::string answer = ctx.at("answer").get<std::string>();

  ojson out;
  if (planted_dynamic_bad(stem)) {
    out["label"] = "broken_item";
    out["score"] = 0.0;
    out["missing"] = ojson::array();
    out["errors"] = ojson::array({"gold reference does not match the stem"});
    return out.dump();
  }

  auto gw = word_set(gold);
  auto aw = word_set(answer);
  size_t common = 0;
  for (const auto& w : aw)
    if (gw.count(w)) ++common;
  double denom = static_cast<double>(std::max(gw.size(), aw.size()));
  double overlap = denom == 0 ? 0.0 : static_cast<double>(common) / denom;

  if (to_lower(trim(gold)) == to_lower(trim(answer)) || overlap >= 0.99) {
    out["label"] = "correct";
    out["score"] = 0.95;
    out["missing"] = ojson::array();
    out["errors"] = ojson::array();
  } else if (overlap >= 0.5) {
    out["label"] = "partially_correct";
    out["score"] = 0.6;
    out["missing"] = ojson::array({"some supporting detail"});
    out["errors"] = ojson::array();
  } else {
    out["label"] = "incorrect";
    out["score"] = 0.1;
    out["missing"] = ojson::array();
    out["errors"] = ojson::array({"core concept absent"});
  }
  return out.dump();
}

std::string SimBackend::simulate_quality_decision(const ojson& ctx) const {
  std::string stem = ctx.at("stem").get<std::string>();
  ojson out;
  if (planted_dynamic_bad(stem)) {
    KeyedRng rng(spec_.seed);
    static const char* kBad[] = {"not_well_posed", "gold_incorrect", "ambiguous"};
    out["decision"] = kBad[rng.pick("baddecision:" + stem, 3)];
  } else {
    out["decision"] = "clean";
  }
  return out.dump();
}

CompletionResult SimBackend::complete(const CompletionRequest& req) {
  if (req.sim_context.is_null())
    throw Error(Errc::config_error, "simulated backend requires sim_context");
  std::string kind = req.sim_context.value("kind", "");
  CompletionResult res;
  if (req.role == Role::designer || kind == "designer") {
    res.text = simulate_designer_batch(req.sim_context);
  } else if (kind == "answer_item") {
    Item item = item_from_json(req.sim_context.at("item"));
    res.text = simulate_response(req.model, item);
  } else if (kind == "answer_judge") {
    res.text = simulate_answer_judgment(req.sim_context);
  } else if (kind == "quality") {
    res.text = simulate_quality_decision(req.sim_context);
  } else {
    throw Error(Errc::config_error, "sim_context kind '" + kind + "' not recognized");
  }
  return res;
}

ojson sim_answer_context(const Item& item) {
  ojson j;
  j["kind"] = "answer_item";
  j["item"] = item_to_json(item);
  return j;
}

ojson sim_judge_context(const Item& item, const std::string& model_answer) {
  ojson j;
  j["kind"] = "answer_judge";
  j["stem"] = item.question_stem;
  j["gold"] = item.answer.is_string() ? item.answer.get<std::string>() : item.answer.dump();
  j["answer"] = model_answer;
  return j;
}

ojson sim_quality_context(const Item& item) {
  ojson j;
  j["kind"] = "quality";
  j["stem"] = item.question_stem;
  return j;
}

ojson sim_designer_context(const ojson& plan_json, const std::string& id_prefix,
                           const std::string& designer_name, const std::string& dataset) {
  ojson j = plan_json;
  j["kind"] = "designer";
  j["id_prefix"] = id_prefix;
  j["designer"] = designer_name;
  j["dataset"] = dataset;
  return j;
}

}  // namespace bench
