#include <cmath>
#include <cstdio>

#include "bench/error.hpp"
#include "bench/pipeline.hpp"
#include "bench/util.hpp"

namespace bench {

namespace {

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string svg_header(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " +
         std::to_string(h) + "\">\n<style>text{font-family:monospace;font-size:11px}</style>\n";
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string text_at(double x, double y, const std::string& s, const char* anchor = "start") {
  return "<text x=\"" + fmt(x, 1) + "\" y=\"" + fmt(y, 1) + "\" text-anchor=\"" + anchor +
         "\">" + esc(s) + "</text>\n";
}

// blue->red ramp for accuracy cells
std::string cell_color(double v) {
  double t = std::clamp(v, 0.0, 1.0);
  int r = static_cast<int>(40 + 180 * t);
  int g = static_cast<int>(60 + 120 * (1.0 - std::fabs(t - 0.5) * 2.0));
  int b = static_cast<int>(220 - 180 * t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string heatmap_svg(const json& family_matrix) {
  std::vector<std::string> ans_fams, des_fams;
  for (auto it = family_matrix.begin(); it != family_matrix.end(); ++it) {
    ans_fams.push_back(it.key());
    for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
      if (std::find(des_fams.begin(), des_fams.end(), jt.key()) == des_fams.end())
        des_fams.push_back(jt.key());
    }
  }
  std::sort(des_fams.begin(), des_fams.end());

  const int cell = 46, left = 110, top = 60;
  int w = left + cell * static_cast<int>(des_fams.size()) + 20;
  int h = top + cell * static_cast<int>(ans_fams.size()) + 30;
  std::string out = svg_header(w, h);
  out += "<!-- data: answerer_family,designer_family,accuracy\n";
  for (const auto& af : ans_fams)
    for (const auto& df : des_fams)
      if (family_matrix.at(af).contains(df))
        out += af + "," + df + "," + fmt(family_matrix.at(af).at(df).get<double>()) + "\n";
  out += "-->\n";
  out += text_at(left, 20, "family-level designer x answerer accuracy");
  for (size_t d = 0; d < des_fams.size(); ++d)
    out += text_at(left + cell * d + cell / 2.0, top - 8, des_fams[d], "middle");
  for (size_t a = 0; a < ans_fams.size(); ++a) {
    out += text_at(left - 8, top + cell * a + cell / 2.0 + 4, ans_fams[a], "end");
    for (size_t d = 0; d < des_fams.size(); ++d) {
      if (!family_matrix.at(ans_fams[a]).contains(des_fams[d])) continue;
      double v = family_matrix.at(ans_fams[a]).at(des_fams[d]).get<double>();
      out += "<rect x=\"" + fmt(left + cell * d, 1) + "\" y=\"" + fmt(top + cell * a, 1) +
             "\" width=\"" + std::to_string(cell - 2) + "\" height=\"" +
             std::to_string(cell - 2) + "\" fill=\"" + cell_color(v) + "\"/>\n";
      out += text_at(left + cell * d + cell / 2.0 - 1, top + cell * a + cell / 2.0 + 4,
                     fmt(v, 2), "middle");
    }
  }
  out += "</svg>\n";
  return out;
}

std::string tradeoff_svg(const json& leaderboard) {
  const int w = 520, h = 360, left = 60, bottom = 300, top = 40, right = 480;
  double max_broken = 1.0, max_discr = 0.05;
  for (const auto& row : leaderboard) {
    max_broken = std::max(max_broken, row.at("broken_pct").get<double>());
    max_discr = std::max(max_discr, row.at("mean_discrimination").get<double>());
  }
  auto x_of = [&](double broken) {
    return left + (right - left) * (broken / (max_broken * 1.1));
  };
  auto y_of = [&](double discr) {
    return bottom - (bottom - top) * (discr / (max_discr * 1.1));
  };
  std::string out = svg_header(w, h);
  out += "<!-- data: designer,broken_pct,mean_discrimination\n";
  for (const auto& row : leaderboard)
    out += row.at("designer").get<std::string>() + "," +
           fmt(row.at("broken_pct").get<double>()) + "," +
           fmt(row.at("mean_discrimination").get<double>()) + "\n";
  out += "-->\n";
  out += text_at(left, 20, "validity vs discrimination (per designer)");
  out += "<line x1=\"" + fmt(left, 1) + "\" y1=\"" + fmt(bottom, 1) + "\" x2=\"" +
         fmt(right, 1) + "\" y2=\"" + fmt(bottom, 1) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + fmt(left, 1) + "\" y1=\"" + fmt(bottom, 1) + "\" x2=\"" +
         fmt(left, 1) + "\" y2=\"" + fmt(top, 1) + "\" stroke=\"black\"/>\n";
  out += text_at((left + right) / 2.0, bottom + 30, "broken% (non-core rate)", "middle");
  out += text_at(left - 40, top - 10, "mean discrimination");
  for (const auto& row : leaderboard) {
    double x = x_of(row.at("broken_pct").get<double>());
    double y = y_of(row.at("mean_discrimination").get<double>());
    out += "<circle cx=\"" + fmt(x, 1) + "\" cy=\"" + fmt(y, 1) +
           "\" r=\"4\" fill=\"#3366cc\"/>\n";
    out += text_at(x + 6, y - 4, row.at("designer").get<std::string>());
  }
  out += "</svg>\n";
  return out;
}

std::string tau_bars_svg(const std::string& variant, const json& taus) {
  std::vector<std::pair<std::string, json>> rows;
  for (auto it = taus.begin(); it != taus.end(); ++it)
    if (!it.value().is_null()) rows.emplace_back(it.key(), it.value());
  const int bar_w = 44, gap = 26, left = 70, base = 260, top = 40;
  int w = left + static_cast<int>(rows.size()) * (bar_w + gap) + 30;
  int h = base + 80;
  std::string out = svg_header(w, h);
  out += "<!-- data: designer,tau,ci_lo,ci_hi\n";
  for (const auto& [name, t] : rows)
    out += name + "," + fmt(t.at("tau").get<double>()) + "," +
           fmt(t.at("ci_lo").get<double>()) + "," + fmt(t.at("ci_hi").get<double>()) + "\n";
  out += "-->\n";
  out += text_at(left, 20, "ranking preservation (kendall tau), " + variant);
  auto y_of = [&](double tau) { return base - (base - top) * ((tau + 1.0) / 2.0); };
  out += "<line x1=\"" + fmt(left - 10, 1) + "\" y1=\"" + fmt(y_of(0), 1) + "\" x2=\"" +
         fmt(w - 20, 1) + "\" y2=\"" + fmt(y_of(0), 1) +
         "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    double tau = rows[i].second.at("tau").get<double>();
    double lo = rows[i].second.at("ci_lo").get<double>();
    double hi = rows[i].second.at("ci_hi").get<double>();
    double x = left + static_cast<double>(i) * (bar_w + gap);
    double y0 = y_of(0), y1 = y_of(tau);
    out += "<rect x=\"" + fmt(x, 1) + "\" y=\"" + fmt(std::min(y0, y1), 1) + "\" width=\"" +
           std::to_string(bar_w) + "\" height=\"" + fmt(std::fabs(y0 - y1), 1) +
           "\" fill=\"#66aa66\"/>\n";
    out += "<line x1=\"" + fmt(x + bar_w / 2.0, 1) + "\" y1=\"" + fmt(y_of(lo), 1) +
           "\" x2=\"" + fmt(x + bar_w / 2.0, 1) + "\" y2=\"" + fmt(y_of(hi), 1) +
           "\" stroke=\"black\"/>\n";
    out += text_at(x + bar_w / 2.0, base + 16, rows[i].first, "middle");
    out += text_at(x + bar_w / 2.0, std::min(y0, y1) - 4, fmt(tau, 2), "middle");
  }
  out += "</svg>\n";
  return out;
}

}  // namespace

void Pipeline::stage_report() {
  std::vector<std::filesystem::path> inputs = {metrics_path()};
  std::string digest = files_digest(inputs);
  if (stage_done("report", digest)) return;

  json metrics = json::parse(read_file(metrics_path()));
  auto report_dir = run_dir_ / "report";
  std::vector<std::filesystem::path> outputs;

  // leaderboard csv
  {
    std::string csv =
        "designer,broken_pct,mean_discrimination,neg_discr_pct,mean_p_correct,core_count\n";
    for (const auto& row : metrics.at("leaderboard")) {
      csv += row.at("designer").get<std::string>() + "," +
             fmt(row.at("broken_pct").get<double>(), 2) + "," +
             fmt(row.at("mean_discrimination").get<double>(), 4) + "," +
             fmt(row.at("neg_discr_pct").get<double>(), 2) + "," +
             fmt(row.at("mean_p_correct").get<double>(), 4) + "," +
             std::to_string(row.at("core_count").get<std::int64_t>()) + "\n";
    }
    write_file(report_dir / "leaderboard.csv", csv);
    outputs.push_back(report_dir / "leaderboard.csv");
  }

  // family bias + tau csvs per variant
  {
    std::string fam_csv = "variant,family,acc_own,acc_other,delta_pp,n_own,n_other\n";
    std::string tau_csv = "variant,designer,tau,ci_lo,ci_hi,n_items\n";
    for (auto it = metrics.at("per_variant").begin(); it != metrics.at("per_variant").end();
         ++it) {
      const json& section = it.value();
      const json& fams = section.at("family_bias").at("per_family");
      for (auto f = fams.begin(); f != fams.end(); ++f) {
        fam_csv += it.key() + "," + f.key() + "," +
                   fmt(f.value().at("acc_own").get<double>()) + "," +
                   fmt(f.value().at("acc_other").get<double>()) + "," +
                   fmt(f.value().at("delta_pp").get<double>(), 2) + "," +
                   std::to_string(f.value().at("n_own").get<std::int64_t>()) + "," +
                   std::to_string(f.value().at("n_other").get<std::int64_t>()) + "\n";
      }
      const json& taus = section.at("kendall_tau");
      for (auto t = taus.begin(); t != taus.end(); ++t) {
        if (t.value().is_null()) continue;
        tau_csv += it.key() + "," + t.key() + "," + fmt(t.value().at("tau").get<double>()) +
                   "," + fmt(t.value().at("ci_lo").get<double>()) + "," +
                   fmt(t.value().at("ci_hi").get<double>()) + "," +
                   std::to_string(t.value().at("n_items").get<int>()) + "\n";
      }
    }
    write_file(report_dir / "family_bias.csv", fam_csv);
    write_file(report_dir / "kendall_tau.csv", tau_csv);
    outputs.push_back(report_dir / "family_bias.csv");
    outputs.push_back(report_dir / "kendall_tau.csv");
  }

  // inter-rater agreement table, when an audit was supplied
  if (metrics.contains("agreement")) {
    std::string csv = "label,scale,alpha,observed_agreement\n";
    const json& agreement = metrics["agreement"];
    for (auto it = agreement.begin(); it != agreement.end(); ++it) {
      csv += it.key() + "," + it.value().at("scale").get<std::string>() + ",";
      csv += it.value().at("alpha").is_null() ? "NA" : fmt(it.value()["alpha"].get<double>());
      csv += ",";
      csv += it.value().contains("observed_agreement")
                 ? fmt(it.value()["observed_agreement"].get<double>())
                 : std::string("NA");
      csv += "\n";
    }
    write_file(report_dir / "agreement.csv", csv);
    outputs.push_back(report_dir / "agreement.csv");
  }

  // figures
  write_file(report_dir / "tradeoff.svg", tradeoff_svg(metrics.at("leaderboard")));
  outputs.push_back(report_dir / "tradeoff.svg");
  for (auto it = metrics.at("per_variant").begin(); it != metrics.at("per_variant").end();
       ++it) {
    write_file(report_dir / ("heatmap_" + it.key() + ".svg"),
               heatmap_svg(it.value().at("family_bias").at("family_matrix")));
    write_file(report_dir / ("tau_" + it.key() + ".svg"),
               tau_bars_svg(it.key(), it.value().at("kendall_tau")));
    outputs.push_back(report_dir / ("heatmap_" + it.key() + ".svg"));
    outputs.push_back(report_dir / ("tau_" + it.key() + ".svg"));
  }

  mark_done("report", digest, outputs);
}

}  // namespace bench
