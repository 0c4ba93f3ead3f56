#include <algorithm>
#include <set>

#include "bench/analytics.hpp"
#include "bench/error.hpp"

namespace bench {

std::optional<size_t> ResponseMatrix::answerer_index(const std::string& name) const {
  auto it = std::lower_bound(answerers.begin(), answerers.end(), name);
  if (it == answerers.end() || *it != name) return std::nullopt;
  return static_cast<size_t>(it - answerers.begin());
}

std::optional<size_t> ResponseMatrix::designer_index(const std::string& name) const {
  auto it = std::lower_bound(designers.begin(), designers.end(), name);
  if (it == designers.end() || *it != name) return std::nullopt;
  return static_cast<size_t>(it - designers.begin());
}

ResponseMatrix build_matrix(const VariantId& variant, const std::vector<Item>& suite,
                            const std::vector<CoreDecision>& core,
                            const std::vector<ScoreRecord>& records) {
  ResponseMatrix m;
  m.variant = variant;

  std::set<std::string> answerer_set, designer_set;
  for (const auto& r : records) answerer_set.insert(r.answerer);
  for (const auto& it : suite) designer_set.insert(it.designer_model);
  m.answerers.assign(answerer_set.begin(), answerer_set.end());
  m.designers.assign(designer_set.begin(), designer_set.end());

  std::map<std::string, bool> in_core;
  for (const auto& d : core) in_core[d.item_id] = d.in_core;

  // item rows sorted by id
  std::map<std::string, size_t> row_of;
  for (const auto& it : suite) {
    if (row_of.count(it.id)) continue;
    row_of.emplace(it.id, 0);
  }
  {
    size_t ix = 0;
    for (auto& [id, slot] : row_of) slot = ix++;
  }
  m.items.resize(row_of.size());
  for (const auto& it : suite) {
    ItemRow& row = m.items[row_of.at(it.id)];
    row.item_id = it.id;
    row.designer = it.designer_model;
    row.design_type = it.design_type;
    row.question_type = it.question_type;
    row.declared_difficulty = it.declared_difficulty;
    row.super_parent = it.super_parent;
    auto flag = in_core.find(it.id);
    row.in_core = flag != in_core.end() && flag->second;
    row.hard.assign(m.answerers.size(), std::nullopt);
    row.final.assign(m.answerers.size(), std::nullopt);
  }
  for (const auto& r : records) {
    auto row_it = row_of.find(r.item_id);
    auto a_ix = m.answerer_index(r.answerer);
    if (row_it == row_of.end() || !a_ix) continue;
    ItemRow& row = m.items[row_it->second];
    if (r.hard) row.hard[*a_ix] = *r.hard;
    if (r.final) row.final[*a_ix] = *r.final;
  }

  size_t na = m.answerers.size(), nd = m.designers.size();
  m.cell_mean.assign(na, std::vector<double>(nd, 0.0));
  m.cell_support.assign(na, std::vector<int>(nd, 0));

  // Each cell folds its items in id order; cells are independent, so the
  // parallel schedule cannot perturb results.
  std::vector<std::vector<const ItemRow*>> by_designer(nd);
  for (const auto& row : m.items) {
    if (!row.in_core) continue;
    if (auto d_ix = m.designer_index(row.designer)) by_designer[*d_ix].push_back(&row);
  }
#pragma omp parallel for collapse(2) schedule(static)
  for (size_t a = 0; a < na; ++a) {
    for (size_t d = 0; d < nd; ++d) {
      double sum = 0;
      int n = 0;
      for (const ItemRow* row : by_designer[d]) {
        if (row->final[a]) {
          sum += *row->final[a];
          ++n;
        }
      }
      m.cell_support[a][d] = n;
      m.cell_mean[a][d] = n > 0 ? sum / n : 0.0;
    }
  }
  return m;
}

ojson ResponseMatrix::to_json() const {
  ojson j;
  j["variant"] = variant_to_json(variant);
  j["answerers"] = answerers;
  j["designers"] = designers;
  j["cell_mean"] = cell_mean;
  j["cell_support"] = cell_support;
  ojson rows = ojson::array();
  for (const auto& row : items) {
    ojson r;
    r["item_id"] = row.item_id;
    r["designer"] = row.designer;
    r["design_type"] = row.design_type;
    r["question_type"] = row.question_type;
    r["declared_difficulty"] = row.declared_difficulty;
    r["super_parent"] = row.super_parent;
    r["in_core"] = row.in_core;
    ojson hard = ojson::array(), fin = ojson::array();
    for (size_t a = 0; a < answerers.size(); ++a) {
      hard.push_back(row.hard[a] ? ojson(*row.hard[a]) : ojson(nullptr));
      fin.push_back(row.final[a] ? ojson(*row.final[a]) : ojson(nullptr));
    }
    r["hard"] = hard;
    r["final"] = fin;
    rows.push_back(r);
  }
  j["items"] = rows;
  return j;
}

ResponseMatrix ResponseMatrix::from_json(const json& j) {
  ResponseMatrix m;
  m.variant = variant_from_json(j.at("variant"));
  m.answerers = j.at("answerers").get<std::vector<std::string>>();
  m.designers = j.at("designers").get<std::vector<std::string>>();
  m.cell_mean = j.at("cell_mean").get<std::vector<std::vector<double>>>();
  m.cell_support = j.at("cell_support").get<std::vector<std::vector<int>>>();
  for (const auto& r : j.at("items")) {
    ItemRow row;
    row.item_id = r.at("item_id").get<std::string>();
    row.designer = r.at("designer").get<std::string>();
    row.design_type = r.at("design_type").get<std::string>();
    row.question_type = r.at("question_type").get<std::string>();
    row.declared_difficulty = r.at("declared_difficulty").get<std::string>();
    row.super_parent = r.at("super_parent").get<std::string>();
    row.in_core = r.at("in_core").get<bool>();
    for (const auto& h : r.at("hard"))
      row.hard.push_back(h.is_null() ? std::optional<int>() : std::optional<int>(h.get<int>()));
    for (const auto& f : r.at("final"))
      row.final.push_back(f.is_null() ? std::optional<double>()
                                      : std::optional<double>(f.get<double>()));
    m.items.push_back(std::move(row));
  }
  return m;
}

}  // namespace bench
