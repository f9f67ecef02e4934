#include "mfs/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace mfs {
namespace {

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  // NaN runs sort last so a single divergent seed does not poison the median.
  std::sort(values.begin(), values.end(), [](double a, double b) {
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a < b;
  });
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SummaryRow> summarize(const std::vector<RunResult>& results) {
  using Key = std::tuple<std::string, std::string, int, int, int>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> rows;
  std::vector<std::array<std::vector<double>, 3>> samples;
  for (const auto& r : results) {
    const Key key{r.subset, r.output, static_cast<int>(r.pairing), static_cast<int>(r.method), r.budget};
    auto [it, inserted] = index.try_emplace(key, rows.size());
    if (inserted) {
      SummaryRow s;
      s.subset = r.subset;
      s.output = r.output;
      s.pairing = r.pairing;
      s.method = r.method;
      s.budget = r.budget;
      s.allocation = r.allocation;
      rows.push_back(s);
      samples.emplace_back();
    }
    auto& bucket = samples[it->second];
    bucket[0].push_back(r.rmse);
    bucket[1].push_back(r.r2);
    bucket[2].push_back(r.wall_time_s);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rmse = median(samples[i][0]);
    rows[i].r2 = median(samples[i][1]);
    rows[i].wall_time_s = median(samples[i][2]);
    rows[i].seeds = static_cast<int>(samples[i][0].size());
  }
  return rows;
}

std::string render_markdown(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "# Cost study\n\nMedians over seeds.\n";
  std::string current;
  for (const auto& r : rows) {
    const std::string group = r.subset + "|" + r.output + "|" + std::string(to_string(r.pairing));
    if (group != current) {
      current = group;
      out << "\n## Inputs: " << r.subset << ", output: " << r.output << ", pairing: "
          << to_string(r.pairing) << "\n\n";
      out << "| Method | Budget | n_LF | n_MF | n_HF | RMSE | R² | Time (s) |\n";
      out << "|---|---|---|---|---|---|---|---|\n";
    }
    out << "| " << to_string(r.method) << " | " << r.budget << " | " << r.allocation.n_lf << " | "
        << r.allocation.n_mf << " | " << r.allocation.n_hf << " | " << fixed(r.rmse, 4) << " | "
        << fixed(r.r2, 4) << " | " << fixed(r.wall_time_s, 2) << " |\n";
  }
  return out.str();
}

std::string render_svg(const std::vector<SummaryRow>& rows) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 150, kTop = 30, kBottom = 50;
  double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
  double ymin = bmin, ymax = -bmin;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : rows) {
    if (!std::isfinite(r.rmse)) continue;
    const std::string name = std::string(to_string(r.method)) + " " + std::string(to_string(r.pairing));
    series[name].emplace_back(r.budget, r.rmse);
    bmin = std::min(bmin, double(r.budget));
    bmax = std::max(bmax, double(r.budget));
    ymin = std::min(ymin, r.rmse);
    ymax = std::max(ymax, r.rmse);
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (series.empty()) {
    out << "<text x=\"20\" y=\"30\">no finite results</text>\n</svg>\n";
    return out.str();
  }
  if (bmax == bmin) bmax = bmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double b) { return kLeft + (b - bmin) / (bmax - bmin) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\""
      << kTop + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + ph
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">Total budget</text>\n";
  out << "<text x=\"15\" y=\"" << kTop + ph / 2 << "\" transform=\"rotate(-90 15 " << kTop + ph / 2
      << ")\" text-anchor=\"middle\">Median RMSE</text>\n";
  for (const auto& r : rows) {
    out << "<text x=\"" << px(r.budget) << "\" y=\"" << kTop + ph + 15 << "\" text-anchor=\"middle\">"
        << r.budget << "</text>\n";
  }
  out << "<text x=\"" << kLeft - 5 << "\" y=\"" << py(ymax) + 4 << "\" text-anchor=\"end\">" << fixed(ymax, 3) << "</text>\n";
  out << "<text x=\"" << kLeft - 5 << "\" y=\"" << py(ymin) + 4 << "\" text-anchor=\"end\">" << fixed(ymin, 3) << "</text>\n";
  std::size_t k = 0;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* color = kPalette[k % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [b, y] : pts) out << px(b) << ',' << py(y) << ' ';
    out << "\"/>\n";
    const double ly = kTop + 15.0 * static_cast<double>(k);
    out << "<rect x=\"" << kLeft + pw + 10 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"10\" fill=\""
        << color << "\"/>\n<text x=\"" << kLeft + pw + 25 << "\" y=\"" << ly + 1 << "\">" << name << "</text>\n";
    ++k;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace mfs
