#include "diraclab/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "diraclab/errors.hpp"
#include "json.hpp"

namespace diraclab {

double loglog_slope(const std::vector<double>& hbars, const std::vector<double>& values) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < hbars.size() && i < values.size(); ++i)
    if (hbars[i] > 0 && values[i] > 0) {
      xs.push_back(std::log(hbars[i]));
      ys.push_back(std::log(values[i]));
    }
  if (xs.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return den > 0 ? num / den : 0.0;
}

double loglog_slope(const SweepReport& rep, const std::string& column) {
  std::vector<double> h, v;
  for (const auto& r : rep.rows)
    if (r.valid && r.values.count(column)) {
      h.push_back(r.hbar);
      v.push_back(r.values.at(column));
    }
  return loglog_slope(h, v);
}

bool strictly_decreasing(const SweepReport& rep, const std::string& column) {
  double prev = 0.0;
  bool first = true;
  for (const auto& r : rep.rows) {
    if (!r.valid || !r.values.count(column)) continue;
    const double v = r.values.at(column);
    if (!first && !(v < prev)) return false;
    prev = v;
    first = false;
  }
  return !first;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + tmp);
    out << content;
    if (!out) throw IoFailure("write failed for " + tmp);
  }
  fs::rename(tmp, p);
}

std::string to_csv(const SweepReport& rep) {
  std::ostringstream os;
  os.precision(15);
  os << "N,hbar,valid";
  for (const auto& c : rep.columns) os << "," << c;
  os << "\n";
  for (const auto& r : rep.rows) {
    os << r.N << "," << r.hbar << "," << (r.valid ? 1 : 0);
    for (const auto& c : rep.columns) {
      os << ",";
      auto it = r.values.find(c);
      if (it != r.values.end()) os << it->second;
    }
    os << "\n";
  }
  return os.str();
}

std::string to_json_summary(const SweepReport& rep) {
  nlohmann::json j;
  j["diagnostic"] = rep.diagnostic;
  j["scenario"] = rep.scenario;
  j["summary"] = rep.summary;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  j["all_passed"] = rep.all_passed();
  j["notes"] = rep.notes;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json row;
    row["N"] = r.N;
    row["hbar"] = r.hbar;
    row["valid"] = r.valid;
    for (const auto& [k, v] : r.values) row[k] = v;
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j.dump(2);
}

std::string to_svg(const SweepReport& rep, const std::string& column) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rep.rows)
    if (r.valid && r.values.count(column) && r.values.at(column) > 0 && r.hbar > 0)
      pts.push_back({std::log10(r.hbar), std::log10(r.values.at(column))});

  const int W = 640, H = 420, ml = 70, mr = 20, mt = 30, mb = 50;
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<rect width='" << W << "' height='" << H << "' fill='white'/>\n";
  os << "<text x='" << W / 2 << "' y='18' text-anchor='middle' font-size='14'>"
     << rep.scenario << " / " << rep.diagnostic << " : " << column << "</text>\n";
  if (pts.size() >= 2) {
    double x0 = pts[0].first, x1 = pts[0].first, y0 = pts[0].second, y1 = pts[0].second;
    for (auto& [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
    if (x1 - x0 < 1e-12) x1 = x0 + 1;
    if (y1 - y0 < 1e-12) y1 = y0 + 1;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
    os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
       << "' stroke='black'/>\n";
    os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
       << "' stroke='black'/>\n";
    os << "<text x='" << W / 2 << "' y='" << H - 12
       << "' text-anchor='middle' font-size='12'>log10 hbar</text>\n";
    os << "<polyline fill='none' stroke='#2060c0' stroke-width='2' points='";
    for (auto& [x, y] : pts) os << px(x) << "," << py(y) << " ";
    os << "'/>\n";
    for (auto& [x, y] : pts)
      os << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='4' fill='#2060c0'/>\n";
    const double slope = loglog_slope(rep, column);
    std::ostringstream lab;
    lab.precision(3);
    lab << "fitted slope = " << slope;
    os << "<text x='" << ml + 12 << "' y='" << mt + 16 << "' font-size='13' fill='#c03020'>"
       << lab.str() << "</text>\n";
  } else {
    os << "<text x='" << W / 2 << "' y='" << H / 2
       << "' text-anchor='middle' font-size='13'>insufficient positive data</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void export_report(const SweepReport& rep, const std::string& out_dir,
                   const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  const std::string base =
      (fs::path(out_dir) / (rep.scenario + "_" + rep.diagnostic)).string();
  for (const auto& f : formats) {
    if (f == "csv") {
      atomic_write(base + ".csv", to_csv(rep));
    } else if (f == "json") {
      atomic_write(base + ".json", to_json_summary(rep));
    } else if (f == "svg") {
      const std::string col = rep.summary.count("svg_column")
                                  ? rep.columns[static_cast<int>(rep.summary.at("svg_column"))]
                                  : (rep.columns.empty() ? "" : rep.columns.front());
      atomic_write(base + ".svg", to_svg(rep, col));
    } else {
      throw ConfigInvalid("unknown export format " + f);
    }
  }
}

}  // namespace diraclab
