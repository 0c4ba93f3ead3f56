#include "bench/reference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bench/util.hpp"

namespace bench::ref {

double pearson_naive(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  double cov = sxy / n - (sx / n) * (sy / n);
  double vx = sxx / n - (sx / n) * (sx / n);
  double vy = syy / n - (sy / n) * (sy / n);
  return cov / std::sqrt(vx * vy);
}

std::optional<double> point_biserial_naive(
    const std::vector<std::vector<std::optional<int>>>& hard_by_item, size_t item_index) {
  size_t n_answerers = hard_by_item.empty() ? 0 : hard_by_item[0].size();
  std::vector<double> total(n_answerers, 0.0);
  for (const auto& row : hard_by_item)
    for (size_t a = 0; a < n_answerers; ++a)
      if (row[a]) total[a] += *row[a];

  std::vector<double> c, rest;
  for (size_t a = 0; a < n_answerers; ++a) {
    if (!hard_by_item[item_index][a]) continue;
    c.push_back(static_cast<double>(*hard_by_item[item_index][a]));
    rest.push_back(total[a] - *hard_by_item[item_index][a]);
  }
  if (c.size() < 3) return std::nullopt;
  auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
  };
  if (constant(c) || constant(rest)) return std::nullopt;
  return pearson_naive(c, rest);
}

double tau_b_naive(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  long long s = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      double a = (x[i] < x[j]) ? -1 : (x[i] > x[j] ? 1 : 0);
      double b = (y[i] < y[j]) ? -1 : (y[i] > y[j] ? 1 : 0);
      s += static_cast<long long>(a * b);
    }
  }
  auto tie_pairs = [](const std::vector<double>& v) {
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    long long pairs = 0;
    size_t i = 0;
    while (i < sorted.size()) {
      size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      long long t = static_cast<long long>(j - i + 1);
      pairs += t * (t - 1) / 2;
      i = j + 1;
    }
    return pairs;
  };
  long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  long long n1 = tie_pairs(x), n2 = tie_pairs(y);
  double denom = std::sqrt(static_cast<double>(n0 - n1)) *
                 std::sqrt(static_cast<double>(n0 - n2));
  if (denom == 0) return 0.0;
  return static_cast<double>(s) / denom;
}

double l1_naive(const std::vector<double>& p, const std::vector<double>& q) {
  double out = 0;
  for (size_t i = 0; i < p.size(); ++i) out += std::fabs(p[i] - q[i]);
  return out;
}

double js_naive(const std::vector<double>& p, const std::vector<double>& q) {
  auto kl = [](const std::vector<double>& a, const std::vector<double>& b) {
    double out = 0;
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i] > 0 && b[i] > 0) out += a[i] * (std::log(a[i]) - std::log(b[i])) / std::log(2.0);
    return out;
  };
  std::vector<double> m(p.size());
  for (size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * kl(p, m) + 0.5 * kl(q, m);
}

double spearman_naive(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (size_t j = 0; j < v.size(); ++j) {
        if (v[j] < v[i]) ++less;
        if (v[j] == v[i]) ++equal;
      }
      r[i] = less + (equal + 1.0) / 2.0;  // average rank, 1-based
    }
    return r;
  };
  return pearson_naive(ranks(x), ranks(y));
}

std::optional<double> alpha_naive(const std::vector<std::vector<std::optional<int>>>& labels,
                                  AlphaDistance distance) {
  // gather pairable values per unit
  size_t n_items = 0;
  for (const auto& rater : labels) n_items = std::max(n_items, rater.size());
  std::vector<std::vector<int>> units;
  std::vector<int> pooled;
  for (size_t u = 0; u < n_items; ++u) {
    std::vector<int> vals;
    for (const auto& rater : labels)
      if (u < rater.size() && rater[u]) vals.push_back(*rater[u]);
    if (vals.size() >= 2) {
      units.push_back(vals);
      for (int v : vals) pooled.push_back(v);
    }
  }
  if (pooled.empty()) return std::nullopt;

  int max_cat = *std::max_element(pooled.begin(), pooled.end());
  std::vector<double> margin(static_cast<size_t>(max_cat) + 1, 0.0);
  // margins built the same way the coincidence matrix would weight them
  for (const auto& vals : units)
    for (int v : vals) margin[v] += 1.0;  // each pairable value contributes once

  auto delta = [&](int c, int d) -> double {
    if (c == d) return 0.0;
    if (distance == AlphaDistance::nominal) return 1.0;
    int lo = std::min(c, d), hi = std::max(c, d);
    double cum = 0;
    for (int g = lo; g <= hi; ++g) cum += margin[g];
    double v = cum - (margin[lo] + margin[hi]) / 2.0;
    return v * v;
  };

  double n = static_cast<double>(pooled.size());
  double d_o = 0;
  for (const auto& vals : units) {
    double m = static_cast<double>(vals.size());
    for (size_t i = 0; i < vals.size(); ++i)
      for (size_t j = 0; j < vals.size(); ++j)
        if (i != j) d_o += delta(vals[i], vals[j]) / (m - 1.0);
  }
  d_o /= n;

  double d_e = 0;
  for (size_t i = 0; i < pooled.size(); ++i)
    for (size_t j = 0; j < pooled.size(); ++j)
      if (i != j) d_e += delta(pooled[i], pooled[j]);
  d_e /= n * (n - 1.0);
  if (d_e == 0) return std::nullopt;
  return 1.0 - d_o / d_e;
}

std::map<std::string, std::optional<double>> delta_fam_naive(
    const ResponseMatrix& matrix, const std::map<std::string, std::string>& family) {
  auto fam = [&](const std::string& name) {
    auto it = family.find(name);
    return it == family.end() ? name : it->second;
  };
  std::map<std::string, std::optional<double>> out;
  for (size_t a = 0; a < matrix.answerers.size(); ++a) {
    std::vector<double> own, other;
    for (size_t d = 0; d < matrix.designers.size(); ++d) {
      auto cell = matrix.cell(a, d);
      if (!cell) continue;
      if (fam(matrix.answerers[a]) == fam(matrix.designers[d]))
        own.push_back(*cell);
      else
        other.push_back(*cell);
    }
    if (own.empty() || other.empty()) {
      out[matrix.answerers[a]] = std::nullopt;
      continue;
    }
    double so = 0, st = 0;
    for (double v : own) so += v;
    for (double v : other) st += v;
    out[matrix.answerers[a]] = so / own.size() - st / other.size();
  }
  return out;
}

ResponseMatrix build_matrix_serial(const VariantId& variant, const std::vector<Item>& suite,
                                   const std::vector<CoreDecision>& core,
                                   const std::vector<ScoreRecord>& records) {
  // same contract as build_matrix, with the plainest possible loops
  ResponseMatrix m;
  m.variant = variant;
  std::set<std::string> answerer_set, designer_set;
  for (const auto& r : records) answerer_set.insert(r.answerer);
  for (const auto& it : suite) designer_set.insert(it.designer_model);
  m.answerers.assign(answerer_set.begin(), answerer_set.end());
  m.designers.assign(designer_set.begin(), designer_set.end());

  std::set<std::string> core_ids;
  for (const auto& d : core)
    if (d.in_core) core_ids.insert(d.item_id);

  std::map<std::string, ItemRow> rows;
  for (const auto& it : suite) {
    ItemRow row;
    row.item_id = it.id;
    row.designer = it.designer_model;
    row.design_type = it.design_type;
    row.question_type = it.question_type;
    row.declared_difficulty = it.declared_difficulty;
    row.super_parent = it.super_parent;
    row.in_core = core_ids.count(it.id) > 0;
    row.hard.assign(m.answerers.size(), std::nullopt);
    row.final.assign(m.answerers.size(), std::nullopt);
    rows.emplace(it.id, std::move(row));
  }
  for (const auto& r : records) {
    auto row = rows.find(r.item_id);
    if (row == rows.end()) continue;
    auto a = std::find(m.answerers.begin(), m.answerers.end(), r.answerer);
    if (a == m.answerers.end()) continue;
    size_t a_ix = static_cast<size_t>(a - m.answerers.begin());
    if (r.hard) row->second.hard[a_ix] = *r.hard;
    if (r.final) row->second.final[a_ix] = *r.final;
  }
  for (auto& [id, row] : rows) m.items.push_back(std::move(row));

  m.cell_mean.assign(m.answerers.size(), std::vector<double>(m.designers.size(), 0.0));
  m.cell_support.assign(m.answerers.size(), std::vector<int>(m.designers.size(), 0));
  for (size_t a = 0; a < m.answerers.size(); ++a) {
    for (size_t d = 0; d < m.designers.size(); ++d) {
      double sum = 0;
      int n = 0;
      for (const auto& row : m.items) {
        if (!row.in_core || row.designer != m.designers[d]) continue;
        if (row.final[a]) {
          sum += *row.final[a];
          ++n;
        }
      }
      m.cell_support[a][d] = n;
      m.cell_mean[a][d] = n > 0 ? sum / n : 0.0;
    }
  }
  return m;
}

TauResult tau_preservation_serial(const ResponseMatrix& matrix, const std::string& designer,
                                  const std::vector<std::string>& reference_ranking,
                                  int bootstrap_b, std::uint64_t seed) {
  auto d_ix = matrix.designer_index(designer);
  std::vector<size_t> common;
  std::vector<double> ref_scores;
  for (size_t a = 0; a < matrix.answerers.size(); ++a) {
    auto pos = std::find(reference_ranking.begin(), reference_ranking.end(),
                         matrix.answerers[a]);
    if (pos == reference_ranking.end() || !matrix.cell(a, *d_ix)) continue;
    common.push_back(a);
    ref_scores.push_back(
        static_cast<double>(reference_ranking.size() - (pos - reference_ranking.begin())));
  }

  std::vector<double> induced;
  for (size_t a : common) induced.push_back(*matrix.cell(a, *d_ix));

  TauResult res;
  res.tau = tau_b_naive(induced, ref_scores);

  std::vector<const ItemRow*> rows;
  for (const auto& row : matrix.items)
    if (row.in_core && row.designer == designer) rows.push_back(&row);
  res.n_items = static_cast<int>(rows.size());
  if (rows.empty() || bootstrap_b <= 0) {
    res.ci_lo = res.ci_hi = res.tau;
    return res;
  }

  KeyedRng rng(seed);
  std::string tag = "boot:" + matrix.variant.key() + ":" + designer;
  std::vector<double> taus;
  std::vector<size_t> picks(rows.size());
  for (int b = 0; b < bootstrap_b; ++b) {
    for (size_t k = 0; k < rows.size(); ++k)
      picks[k] = rng.pick(tag, rows.size(), static_cast<std::uint64_t>(b) * rows.size() + k);
    std::vector<double> means;
    for (size_t c = 0; c < common.size(); ++c) {
      double sum = 0;
      int n = 0;
      for (size_t pick : picks) {
        if (rows[pick]->final[common[c]]) {
          sum += *rows[pick]->final[common[c]];
          ++n;
        }
      }
      means.push_back(n > 0 ? sum / n : 0.0);
    }
    taus.push_back(tau_b_naive(means, ref_scores));
  }
  std::sort(taus.begin(), taus.end());
  auto quantile = [&](double q) {
    double idx = q * (bootstrap_b - 1);
    return taus[static_cast<size_t>(idx + 0.5)];
  };
  res.ci_lo = quantile(0.025);
  res.ci_hi = quantile(0.975);
  return res;
}

}  // namespace bench::ref
