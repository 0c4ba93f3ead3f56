#include <algorithm>
#include <cmath>
#include <numeric>

#include "bench/analytics.hpp"
#include "bench/error.hpp"
#include "bench/util.hpp"

namespace bench {

// --- item psychometrics ----------------------------------------------------------

double item_difficulty(const ItemRow& row) {
  double sum = 0;
  int n = 0;
  for (const auto& h : row.hard) {
    if (h) {
      sum += *h;
      ++n;
    }
  }
  if (n == 0) throw Error(Errc::no_hard_scores, "item " + row.item_id);
  return sum / n;
}

std::vector<std::vector<std::optional<double>>> rest_scores(
    const std::vector<const ItemRow*>& rows, size_t answerer_count) {
  // answerer totals over the designer's hard-scored items
  std::vector<double> totals(answerer_count, 0.0);
  std::vector<int> counts(answerer_count, 0);
  for (const ItemRow* row : rows) {
    for (size_t a = 0; a < answerer_count; ++a) {
      if (row->hard[a]) {
        totals[a] += *row->hard[a];
        counts[a]++;
      }
    }
  }
  std::vector<std::vector<std::optional<double>>> rest(
      rows.size(), std::vector<std::optional<double>>(answerer_count));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t a = 0; a < answerer_count; ++a) {
      if (rows[i]->hard[a]) rest[i][a] = totals[a] - *rows[i]->hard[a];
    }
  }
  return rest;
}

DiscriminationResult item_discrimination(const ItemRow& row,
                                         const std::vector<std::optional<double>>& rest) {
  DiscriminationResult res;
  std::vector<double> c, t;
  for (size_t a = 0; a < row.hard.size(); ++a) {
    if (row.hard[a] && a < rest.size() && rest[a]) {
      c.push_back(static_cast<double>(*row.hard[a]));
      t.push_back(*rest[a]);
    }
  }
  res.n = static_cast<int>(c.size());
  if (res.n < 3) {
    res.degenerate = true;
    return res;
  }
  double n = static_cast<double>(c.size());
  double mc = std::accumulate(c.begin(), c.end(), 0.0) / n;
  double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  double cov = 0, vc = 0, vt = 0;
  for (size_t i = 0; i < c.size(); ++i) {
    cov += (c[i] - mc) * (t[i] - mt);
    vc += (c[i] - mc) * (c[i] - mc);
    vt += (t[i] - mt) * (t[i] - mt);
  }
  if (vc == 0 || vt == 0) {
    res.degenerate = true;
    return res;
  }
  res.r = cov / std::sqrt(vc * vt);
  return res;
}

// --- leaderboard --------------------------------------------------------------------

ojson LeaderboardRow::to_json() const {
  ojson j;
  j["designer"] = designer;
  j["broken_pct"] = broken_pct;
  j["mean_discrimination"] = mean_discrimination;
  j["neg_discr_pct"] = neg_discr_pct;
  j["mean_p_correct"] = mean_p_correct;
  j["core_count"] = core_count;
  j["degenerate_items"] = degenerate_items;
  return j;
}

std::vector<LeaderboardRow> designer_summary(
    const std::vector<ResponseMatrix>& matrices,
    const std::map<std::string, DesignerCounts>& counts) {
  struct Agg {
    double discr_sum = 0;
    std::int64_t discr_n = 0;
    std::int64_t neg_n = 0;
    std::int64_t discr_universe = 0;  // all core items with a computable row
    double p_sum = 0;
    std::int64_t p_n = 0;
    std::int64_t degenerate = 0;
    std::int64_t core = 0;
  };
  std::map<std::string, Agg> agg;

  for (const auto& m : matrices) {
    for (size_t d = 0; d < m.designers.size(); ++d) {
      std::vector<const ItemRow*> rows;
      for (const auto& row : m.items)
        if (row.in_core && row.designer == m.designers[d]) rows.push_back(&row);
      Agg& a = agg[m.designers[d]];
      a.core += static_cast<std::int64_t>(rows.size());
      auto rest = rest_scores(rows, m.answerers.size());
      for (size_t i = 0; i < rows.size(); ++i) {
        bool has_hard =
            std::any_of(rows[i]->hard.begin(), rows[i]->hard.end(),
                        [](const std::optional<int>& h) { return h.has_value(); });
        if (has_hard) {
          a.p_sum += item_difficulty(*rows[i]);
          a.p_n++;
        }
        DiscriminationResult r = item_discrimination(*rows[i], rest[i]);
        if (r.n > 0 || has_hard) a.discr_universe++;
        if (r.degenerate) {
          a.degenerate++;
        } else if (r.r) {
          a.discr_sum += *r.r;
          a.discr_n++;
          if (*r.r < 0) a.neg_n++;
        }
      }
    }
  }

  std::vector<LeaderboardRow> rows;
  for (const auto& [designer, a] : agg) {
    LeaderboardRow row;
    row.designer = designer;
    auto c = counts.find(designer);
    if (c != counts.end() && c->second.items > 0)
      row.broken_pct = 100.0 * (1.0 - static_cast<double>(c->second.core) /
                                          static_cast<double>(c->second.items));
    row.mean_discrimination = a.discr_n > 0 ? a.discr_sum / a.discr_n : 0.0;
    row.neg_discr_pct =
        a.discr_universe > 0 ? 100.0 * static_cast<double>(a.neg_n) / a.discr_universe : 0.0;
    row.mean_p_correct = a.p_n > 0 ? a.p_sum / a.p_n : 0.0;
    row.core_count = c != counts.end() ? c->second.core : a.core;
    row.degenerate_items = a.degenerate;
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const LeaderboardRow& x, const LeaderboardRow& y) {
    if (x.mean_discrimination != y.mean_discrimination)
      return x.mean_discrimination > y.mean_discrimination;
    return x.designer < y.designer;
  });
  return rows;
}

// --- rank statistics ------------------------------------------------------------------

double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  if (n != y.size() || n < 2) throw Error(Errc::domain_error, "tau-b needs paired n >= 2");
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0 && dy == 0) {
        ++ties_x;
        ++ties_y;
      } else if (dx == 0) {
        ++ties_x;
      } else if (dy == 0) {
        ++ties_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  double denom = std::sqrt(static_cast<double>(n0 - ties_x)) *
                 std::sqrt(static_cast<double>(n0 - ties_y));
  if (denom == 0) return 0.0;
  return static_cast<double>(concordant - discordant) / denom;
}

namespace {

// reference ranking -> descending pseudo-scores
std::vector<double> ranking_scores(const std::vector<std::string>& ranking,
                                   const std::vector<std::string>& answerers) {
  std::map<std::string, double> pos;
  for (size_t i = 0; i < ranking.size(); ++i)
    pos[ranking[i]] = static_cast<double>(ranking.size() - i);
  std::vector<double> out;
  out.reserve(answerers.size());
  for (const auto& a : answerers) {
    auto it = pos.find(a);
    out.push_back(it == pos.end() ? 0.0 : it->second);
  }
  return out;
}

}  // namespace

TauResult kendall_tau_preservation(const ResponseMatrix& matrix, const std::string& designer,
                                   const std::vector<std::string>& reference_ranking,
                                   int bootstrap_b, std::uint64_t seed) {
  auto d_ix = matrix.designer_index(designer);
  if (!d_ix) throw Error(Errc::domain_error, "designer '" + designer + "' not in matrix");

  // answerers present in the reference and with a defined cell
  std::vector<size_t> common;
  std::vector<std::string> names;
  for (size_t a = 0; a < matrix.answerers.size(); ++a) {
    bool in_ref = std::find(reference_ranking.begin(), reference_ranking.end(),
                            matrix.answerers[a]) != reference_ranking.end();
    if (in_ref && matrix.cell(a, *d_ix)) {
      common.push_back(a);
      names.push_back(matrix.answerers[a]);
    }
  }
  if (common.size() < 2)
    throw Error(Errc::domain_error, "fewer than 2 answerers ranked on both sides");

  std::vector<double> ref_scores = ranking_scores(reference_ranking, names);
  std::vector<double> induced;
  induced.reserve(common.size());
  for (size_t a : common) induced.push_back(*matrix.cell(a, *d_ix));

  TauResult res;
  res.tau = kendall_tau_b(induced, ref_scores);

  // designer's core items for the item-level bootstrap
  std::vector<const ItemRow*> rows;
  for (const auto& row : matrix.items)
    if (row.in_core && row.designer == designer) rows.push_back(&row);
  res.n_items = static_cast<int>(rows.size());
  if (rows.empty() || bootstrap_b <= 0) {
    res.ci_lo = res.ci_hi = res.tau;
    return res;
  }

  std::vector<double> taus(bootstrap_b, 0.0);
  KeyedRng rng(seed);
  std::string tag = "boot:" + matrix.variant.key() + ":" + designer;
#pragma omp parallel for schedule(static)
  for (int b = 0; b < bootstrap_b; ++b) {
    std::vector<double> sums(common.size(), 0.0);
    std::vector<int> ns(common.size(), 0);
    for (size_t k = 0; k < rows.size(); ++k) {
      size_t pick = rng.pick(tag, rows.size(),
                             static_cast<std::uint64_t>(b) * rows.size() + k);
      const ItemRow* row = rows[pick];
      for (size_t c = 0; c < common.size(); ++c) {
        if (row->final[common[c]]) {
          sums[c] += *row->final[common[c]];
          ns[c]++;
        }
      }
    }
    std::vector<double> means(common.size(), 0.0);
    for (size_t c = 0; c < common.size(); ++c)
      means[c] = ns[c] > 0 ? sums[c] / ns[c] : 0.0;
    taus[b] = kendall_tau_b(means, ref_scores);
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

std::vector<std::string> consensus_reference(const std::vector<ResponseMatrix>& matrices,
                                             const std::optional<std::string>& held_out) {
  std::map<std::string, std::pair<double, int>> acc;  // answerer -> (sum of cells, n)
  for (const auto& m : matrices) {
    for (size_t a = 0; a < m.answerers.size(); ++a) {
      for (size_t d = 0; d < m.designers.size(); ++d) {
        if (held_out && m.designers[d] == *held_out) continue;
        if (auto cell = m.cell(a, d)) {
          auto& slot = acc[m.answerers[a]];
          slot.first += *cell;
          slot.second++;
        }
      }
    }
  }
  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& [name, sum_n] : acc)
    if (sum_n.second > 0) ranked.emplace_back(name, sum_n.first / sum_n.second);
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  std::vector<std::string> out;
  for (const auto& [name, mean] : ranked) {
    (void)mean;
    out.push_back(name);
  }
  return out;
}

// --- alignment -----------------------------------------------------------------------

Divergence alignment_divergence(const std::map<std::string, double>& target,
                                const std::map<std::string, double>& realized) {
  if (target.size() != realized.size())
    throw Error(Errc::domain_error, "distribution supports differ");
  double sum_p = 0, sum_q = 0;
  for (const auto& [k, p] : target) {
    if (!realized.count(k)) throw Error(Errc::domain_error, "support mismatch at '" + k + "'");
    sum_p += p;
    sum_q += realized.at(k);
  }
  if (std::fabs(sum_p - 1.0) > 1e-9 || std::fabs(sum_q - 1.0) > 1e-9)
    throw Error(Errc::domain_error, "distributions must sum to 1");

  Divergence out;
  double js = 0;
  for (const auto& [k, p] : target) {
    double q = realized.at(k);
    out.l1 += std::fabs(p - q);
    double m = 0.5 * (p + q);
    if (p > 0) js += 0.5 * p * std::log2(p / m);
    if (q > 0) js += 0.5 * q * std::log2(q / m);
  }
  out.js = js;
  return out;
}

namespace {

std::vector<double> tie_averaged_ranks(const std::vector<double>& v) {
  size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double cov = 0, vx = 0, vy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  if (vx == 0 || vy == 0) throw Error(Errc::domain_error, "zero variance in correlation");
  return cov / std::sqrt(vx * vy);
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(Errc::domain_error, "spearman needs paired n >= 2");
  return pearson(tie_averaged_ranks(x), tie_averaged_ranks(y));
}

std::optional<double> declared_difficulty_alignment(const ResponseMatrix& matrix,
                                                    const std::string& designer) {
  std::vector<double> tier, hardness;
  for (const auto& row : matrix.items) {
    if (!row.in_core || row.designer != designer) continue;
    auto d = parse_difficulty(row.declared_difficulty);
    if (!d) continue;
    bool has_hard = std::any_of(row.hard.begin(), row.hard.end(),
                                [](const std::optional<int>& h) { return h.has_value(); });
    if (!has_hard) continue;
    tier.push_back(static_cast<double>(static_cast<int>(*d)) + 1.0);
    hardness.push_back(1.0 - item_difficulty(row));
  }
  if (tier.size() < 2) return std::nullopt;
  try {
    return spearman(tier, hardness);
  } catch (const Error&) {
    return std::nullopt;  // constant tiers or constant hardness
  }
}

// --- interaction effects ------------------------------------------------------------

ojson FamilyBias::to_json() const {
  ojson j;
  ojson per_ans = ojson::object();
  for (const auto& [name, delta] : per_answerer_delta)
    per_ans[name] = delta ? ojson(*delta) : ojson(nullptr);
  j["per_answerer_delta"] = per_ans;
  ojson fam = ojson::object();
  for (const auto& [name, row] : per_family) {
    ojson r;
    r["acc_own"] = row.acc_own;
    r["acc_other"] = row.acc_other;
    r["delta_pp"] = row.delta_pp;
    r["n_own"] = row.n_own;
    r["n_other"] = row.n_other;
    fam[name] = r;
  }
  j["per_family"] = fam;
  ojson fm = ojson::object();
  for (const auto& [af, row] : family_matrix) {
    ojson r = ojson::object();
    for (const auto& [df, acc] : row) r[df] = acc;
    fm[af] = r;
  }
  j["family_matrix"] = fm;
  return j;
}

FamilyBias family_advantage(const ResponseMatrix& matrix, const FamilyOf& family_of) {
  FamilyBias out;
  struct Pool {
    double sum = 0;
    std::int64_t n = 0;
  };
  std::map<std::string, Pool> fam_own, fam_other;
  std::map<std::string, std::map<std::string, Pool>> fam_matrix;

  for (size_t a = 0; a < matrix.answerers.size(); ++a) {
    const std::string answerer = matrix.answerers[a];
    std::string a_fam = family_of(answerer);
    double own_sum = 0, other_sum = 0;
    int own_n = 0, other_n = 0;
    for (size_t d = 0; d < matrix.designers.size(); ++d) {
      auto cell = matrix.cell(a, d);
      if (!cell) continue;
      std::string d_fam = family_of(matrix.designers[d]);
      int support = matrix.cell_support[a][d];
      Pool& cellpool = fam_matrix[a_fam][d_fam];
      cellpool.sum += *cell * support;
      cellpool.n += support;
      if (d_fam == a_fam) {
        own_sum += *cell;
        own_n++;
        fam_own[a_fam].sum += *cell * support;
        fam_own[a_fam].n += support;
      } else {
        other_sum += *cell;
        other_n++;
        fam_other[a_fam].sum += *cell * support;
        fam_other[a_fam].n += support;
      }
    }
    if (own_n > 0 && other_n > 0)
      out.per_answerer_delta[answerer] = own_sum / own_n - other_sum / other_n;
    else
      out.per_answerer_delta[answerer] = std::nullopt;  // NoOwnFamilyDesigner
  }

  for (const auto& [fam, own] : fam_own) {
    auto other = fam_other.find(fam);
    if (own.n == 0 || other == fam_other.end() || other->second.n == 0) continue;
    FamilyBias::FamilyRow row;
    row.acc_own = own.sum / own.n;
    row.acc_other = other->second.sum / other->second.n;
    row.delta_pp = 100.0 * (row.acc_own - row.acc_other);
    row.n_own = own.n;
    row.n_other = other->second.n;
    out.per_family[fam] = row;
  }
  for (const auto& [af, cols] : fam_matrix)
    for (const auto& [df, pool] : cols)
      if (pool.n > 0) out.family_matrix[af][df] = pool.sum / pool.n;
  return out;
}

std::vector<std::string> strong_panel(const ResponseMatrix& matrix, int k) {
  std::vector<std::pair<std::string, double>> pooled;
  for (size_t a = 0; a < matrix.answerers.size(); ++a) {
    double sum = 0;
    std::int64_t n = 0;
    for (size_t d = 0; d < matrix.designers.size(); ++d) {
      if (matrix.cell_support[a][d] > 0) {
        sum += matrix.cell_mean[a][d] * matrix.cell_support[a][d];
        n += matrix.cell_support[a][d];
      }
    }
    if (n > 0) pooled.emplace_back(matrix.answerers[a], sum / static_cast<double>(n));
  }
  std::sort(pooled.begin(), pooled.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  std::vector<std::string> out;
  for (int i = 0; i < k && i < static_cast<int>(pooled.size()); ++i)
    out.push_back(pooled[i].first);
  return out;
}

std::map<std::string, std::optional<double>> adversarial_effect(const ResponseMatrix& matrix,
                                                                int strong_k) {
  std::vector<std::string> panel = strong_panel(matrix, strong_k);
  std::vector<size_t> panel_ix;
  for (const auto& name : panel)
    if (auto ix = matrix.answerer_index(name)) panel_ix.push_back(*ix);

  std::map<std::string, std::optional<double>> out;
  for (const auto& designer : matrix.designers) {
    double std_sum = 0, adv_sum = 0;
    std::int64_t std_n = 0, adv_n = 0;
    for (const auto& row : matrix.items) {
      if (!row.in_core || row.designer != designer) continue;
      bool adversarial = row.design_type == "adversarial";
      for (size_t a : panel_ix) {
        if (!row.hard[a]) continue;
        if (adversarial) {
          adv_sum += *row.hard[a];
          adv_n++;
        } else {
          std_sum += *row.hard[a];
          std_n++;
        }
      }
    }
    if (std_n == 0 || adv_n == 0) {
      out[designer] = std::nullopt;  // EmptySubset
    } else {
      out[designer] = std_sum / std_n - adv_sum / adv_n;
    }
  }
  return out;
}

// --- DQI ------------------------------------------------------------------------------

StrengthDesignReport strength_vs_design(const std::vector<LeaderboardRow>& leaderboard,
                                        const std::map<std::string, double>& answerer_accuracy) {
  if (leaderboard.size() < 2)
    throw Error(Errc::degenerate_cohort, "need at least 2 designers");

  auto zscores = [&](auto&& get, const char* what) {
    double n = static_cast<double>(leaderboard.size());
    double mean = 0;
    for (const auto& row : leaderboard) mean += get(row);
    mean /= n;
    double var = 0;
    for (const auto& row : leaderboard) {
      double d = get(row) - mean;
      var += d * d;
    }
    var /= n;  // population variance over the cohort
    if (var == 0)
      throw Error(Errc::degenerate_cohort, std::string("zero variance in ") + what);
    double sd = std::sqrt(var);
    std::vector<double> z;
    for (const auto& row : leaderboard) z.push_back((get(row) - mean) / sd);
    return z;
  };

  auto z_discr =
      zscores([](const LeaderboardRow& r) { return r.mean_discrimination; }, "discrimination");
  auto z_broken = zscores([](const LeaderboardRow& r) { return r.broken_pct; }, "broken rate");
  auto z_neg =
      zscores([](const LeaderboardRow& r) { return r.neg_discr_pct; }, "negative rate");

  StrengthDesignReport out;
  for (size_t i = 0; i < leaderboard.size(); ++i) {
    DqiRow row;
    row.designer = leaderboard[i].designer;
    row.z_discrimination = z_discr[i];
    row.z_broken = z_broken[i];
    row.z_negative = z_neg[i];
    row.dqi = z_discr[i] - z_broken[i] - z_neg[i];
    out.dqi.push_back(row);
  }
  std::sort(out.dqi.begin(), out.dqi.end(), [](const DqiRow& x, const DqiRow& y) {
    if (x.dqi != y.dqi) return x.dqi > y.dqi;
    return x.designer < y.designer;
  });

  std::vector<double> strength, dqi;
  for (const auto& row : out.dqi) {
    auto acc = answerer_accuracy.find(row.designer);
    if (acc == answerer_accuracy.end()) continue;
    strength.push_back(acc->second);
    dqi.push_back(row.dqi);
  }
  if (strength.size() >= 3) out.spearman_rho = spearman(strength, dqi);
  return out;
}

// --- agreement -----------------------------------------------------------------------

std::optional<double> krippendorff_alpha(
    const std::vector<std::vector<std::optional<int>>>& labels, AlphaDistance distance) {
  if (labels.size() < 2) throw Error(Errc::domain_error, "need at least 2 raters");
  size_t n_items = 0;
  for (const auto& rater : labels) n_items = std::max(n_items, rater.size());

  int max_cat = 0;
  for (const auto& rater : labels)
    for (const auto& l : rater)
      if (l) max_cat = std::max(max_cat, *l);
  size_t k = static_cast<size_t>(max_cat) + 1;

  // coincidence matrix over pairable values
  std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
  bool any_pair = false;
  for (size_t u = 0; u < n_items; ++u) {
    std::vector<int> vals;
    for (const auto& rater : labels)
      if (u < rater.size() && rater[u]) vals.push_back(*rater[u]);
    size_t m = vals.size();
    if (m < 2) continue;
    any_pair = true;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j)
        if (i != j) o[vals[i]][vals[j]] += 1.0 / static_cast<double>(m - 1);
  }
  if (!any_pair) throw Error(Errc::domain_error, "no item has 2+ labels");

  std::vector<double> margin(k, 0.0);
  double n = 0;
  for (size_t c = 0; c < k; ++c) {
    for (size_t d = 0; d < k; ++d) margin[c] += o[c][d];
    n += margin[c];
  }

  auto delta = [&](size_t c, size_t d) -> double {
    if (c == d) return 0.0;
    if (distance == AlphaDistance::nominal) return 1.0;
    // ordinal: squared cumulative margin between the two categories
    size_t lo = std::min(c, d), hi = std::max(c, d);
    double cum = 0;
    for (size_t g = lo; g <= hi; ++g) cum += margin[g];
    double v = cum - (margin[lo] + margin[hi]) / 2.0;
    return v * v;
  };

  double d_o = 0, d_e = 0;
  for (size_t c = 0; c < k; ++c) {
    for (size_t d = 0; d < k; ++d) {
      if (c == d) continue;
      d_o += o[c][d] * delta(c, d);
      d_e += margin[c] * margin[d] * delta(c, d);
    }
  }
  if (n <= 1) return std::nullopt;
  d_o /= n;
  d_e /= n * (n - 1);
  if (d_e == 0) return std::nullopt;  // no variation: alpha undefined
  return 1.0 - d_o / d_e;
}

double observed_agreement(const std::vector<std::optional<int>>& a,
                          const std::vector<std::optional<int>>& b) {
  size_t n = std::min(a.size(), b.size());
  std::int64_t both = 0, equal = 0;
  for (size_t i = 0; i < n; ++i) {
    if (a[i] && b[i]) {
      ++both;
      if (*a[i] == *b[i]) ++equal;
    }
  }
  if (both == 0) return 0.0;
  return static_cast<double>(equal) / static_cast<double>(both);
}

}  // namespace bench
