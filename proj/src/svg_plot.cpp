#include "tsmm/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "tsmm/errors.hpp"

namespace tsmm {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMarginL = 70.0;
constexpr double kMarginR = 30.0;
constexpr double kMarginT = 30.0;
constexpr double kMarginB = 60.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (first) {
      csv.header = fields;
      first = false;
    } else {
      csv.rows.push_back(fields);
    }
  }
  return csv;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string svg_open() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
}

std::string axis_lines() {
  std::string s;
  s += "<line x1=\"" + fmt(kMarginL) + "\" y1=\"" + fmt(kHeight - kMarginB) + "\" x2=\"" +
       fmt(kWidth - kMarginR) + "\" y2=\"" + fmt(kHeight - kMarginB) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(kMarginL) + "\" y1=\"" + fmt(kMarginT) + "\" x2=\"" + fmt(kMarginL) +
       "\" y2=\"" + fmt(kHeight - kMarginB) + "\" stroke=\"black\"/>\n";
  return s;
}

std::string text_at(double x, double y, const std::string& t, const std::string& anchor) {
  return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"12\" text-anchor=\"" +
         anchor + "\">" + t + "</text>\n";
}

std::string render_trace(const Csv& csv) {
  std::vector<double> ks, res;
  for (const auto& row : csv.rows) {
    ks.push_back(std::stod(row[0]));
    res.push_back(std::max(std::stod(row[1]), 1e-300));
  }
  double kmin = ks.front(), kmax = ks.back();
  if (kmax == kmin) kmax = kmin + 1.0;
  double lmin = 1e300, lmax = -1e300;
  for (double r : res) {
    lmin = std::min(lmin, std::log10(r));
    lmax = std::max(lmax, std::log10(r));
  }
  if (lmax - lmin < 1e-12) {
    lmin -= 1.0;
    lmax += 1.0;
  }
  auto px = [&](double k) {
    return kMarginL + (k - kmin) / (kmax - kmin) * (kWidth - kMarginL - kMarginR);
  };
  auto py = [&](double r) {
    const double l = std::log10(r);
    return kHeight - kMarginB - (l - lmin) / (lmax - lmin) * (kHeight - kMarginT - kMarginB);
  };

  std::string s = svg_open() + axis_lines();
  std::string pts;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i) pts += " ";
    pts += fmt(px(ks[i])) + "," + fmt(py(res[i]));
  }
  s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + kColors[0] +
       "\" stroke-width=\"1.5\"/>\n";
  // a few log-scale ticks
  for (int l = static_cast<int>(std::ceil(lmin)); l <= static_cast<int>(std::floor(lmax)); ++l) {
    const double y = py(std::pow(10.0, l));
    s += "<line x1=\"" + fmt(kMarginL - 4) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kMarginL) +
         "\" y2=\"" + fmt(y) + "\" stroke=\"black\"/>\n";
    s += text_at(kMarginL - 8, y + 4, "1e" + std::to_string(l), "end");
  }
  s += text_at((kMarginL + kWidth - kMarginR) / 2, kHeight - 20, "iteration k", "middle");
  s += text_at(20, kMarginT - 10, "Res.val", "start");
  s += "</svg>\n";
  return s;
}

struct Group {
  std::string box;
  double n = 0.0;
  std::vector<double> values;
};

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

std::string render_grouped(const std::vector<std::string>& boxes, const std::vector<double>& ns,
                           const std::map<std::pair<std::string, double>, Group>& groups,
                           bool whiskers_are_std) {
  double vmin = 1e300, vmax = -1e300;
  for (const auto& [key, g] : groups) {
    for (double v : g.values) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  if (vmax - vmin < 1e-12) {
    vmin -= 1.0;
    vmax += 1.0;
  }
  const double pad = 0.1 * (vmax - vmin);
  vmin -= pad;
  vmax += pad;

  auto py = [&](double v) {
    return kHeight - kMarginB - (v - vmin) / (vmax - vmin) * (kHeight - kMarginT - kMarginB);
  };
  const double slot = (kWidth - kMarginL - kMarginR) / static_cast<double>(ns.size());

  std::string s = svg_open() + axis_lines();
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    const double xc = kMarginL + slot * (static_cast<double>(ni) + 0.5);
    s += "<line x1=\"" + fmt(xc) + "\" y1=\"" + fmt(kHeight - kMarginB) + "\" x2=\"" + fmt(xc) +
         "\" y2=\"" + fmt(kHeight - kMarginB + 5) + "\" stroke=\"black\"/>\n";
    s += text_at(xc, kHeight - kMarginB + 20, "N=" + fmt(ns[ni]), "middle");

    for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
      auto it = groups.find({boxes[bi], ns[ni]});
      if (it == groups.end()) continue;
      const std::vector<double>& vals = it->second.values;
      const std::string color = kColors[bi % 6];
      const double off = boxes.size() > 1
                             ? (static_cast<double>(bi) - 0.5 * (boxes.size() - 1.0)) * 18.0
                             : 0.0;
      const double x = xc + off;
      if (whiskers_are_std) {
        // vals = {mean, std}
        const double m = vals[0];
        const double sd = vals.size() > 1 ? vals[1] : 0.0;
        s += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(py(m - sd)) + "\" x2=\"" + fmt(x) +
             "\" y2=\"" + fmt(py(m + sd)) + "\" stroke=\"" + color + "\"/>\n";
        s += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(py(m)) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
      } else {
        const double q1 = quantile(vals, 0.25);
        const double q2 = quantile(vals, 0.5);
        const double q3 = quantile(vals, 0.75);
        const double lo = quantile(vals, 0.0);
        const double hi = quantile(vals, 1.0);
        s += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(py(lo)) + "\" x2=\"" + fmt(x) +
             "\" y2=\"" + fmt(py(hi)) + "\" stroke=\"" + color + "\"/>\n";
        s += "<rect x=\"" + fmt(x - 7) + "\" y=\"" + fmt(py(q3)) + "\" width=\"14\" height=\"" +
             fmt(std::max(0.5, py(q1) - py(q3))) + "\" fill=\"none\" stroke=\"" + color +
             "\"/>\n";
        s += "<line x1=\"" + fmt(x - 7) + "\" y1=\"" + fmt(py(q2)) + "\" x2=\"" + fmt(x + 7) +
             "\" y2=\"" + fmt(py(q2)) + "\" stroke=\"" + color + "\"/>\n";
      }
    }
  }
  for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
    s += text_at(kWidth - kMarginR - 10,
                 kMarginT + 14.0 * static_cast<double>(bi) + 4, boxes[bi], "end");
  }
  s += "</svg>\n";
  return s;
}

std::string render_exp2_runs(const Csv& csv) {
  std::map<std::pair<std::string, double>, Group> groups;
  std::vector<std::string> boxes;
  std::vector<double> ns;
  for (const auto& row : csv.rows) {
    const std::string box = row[0];
    const double n = std::stod(row[1]);
    auto& g = groups[{box, n}];
    g.box = box;
    g.n = n;
    g.values.push_back(std::stod(row[3]));
    if (std::find(boxes.begin(), boxes.end(), box) == boxes.end()) boxes.push_back(box);
    if (std::find(ns.begin(), ns.end(), n) == ns.end()) ns.push_back(n);
  }
  std::sort(ns.begin(), ns.end());
  return render_grouped(boxes, ns, groups, /*whiskers_are_std=*/false);
}

std::string render_exp2_summary(const Csv& csv) {
  std::map<std::pair<std::string, double>, Group> groups;
  std::vector<std::string> boxes;
  std::vector<double> ns;
  for (const auto& row : csv.rows) {
    const std::string box = row[0];
    const double n = std::stod(row[1]);
    auto& g = groups[{box, n}];
    g.box = box;
    g.n = n;
    g.values = {std::stod(row[2]), std::stod(row[3])};
    if (std::find(boxes.begin(), boxes.end(), box) == boxes.end()) boxes.push_back(box);
    if (std::find(ns.begin(), ns.end(), n) == ns.end()) ns.push_back(n);
  }
  std::sort(ns.begin(), ns.end());
  return render_grouped(boxes, ns, groups, /*whiskers_are_std=*/true);
}

}  // namespace

std::string render_plot_from_csv_text(const std::string& csv_text) {
  const Csv csv = parse_csv(csv_text);
  if (csv.header.empty() || csv.rows.empty()) {
    throw SchemaMismatch("emit_plot: empty CSV body");
  }
  const std::string header = [&] {
    std::string h;
    for (std::size_t i = 0; i < csv.header.size(); ++i) {
      if (i) h += ",";
      h += csv.header[i];
    }
    return h;
  }();
  if (header == "k,resval,delta,objective,newton_iters") return render_trace(csv);
  if (header == "box,N,instance,objective_at_final,psi_inner_max") return render_exp2_runs(csv);
  if (header ==
      "box,N,mean_objective,std_objective,mean_psi_inner_max,std_psi_inner_max") {
    return render_exp2_summary(csv);
  }
  throw SchemaMismatch("emit_plot: unknown CSV header: " + header);
}

void emit_plot(const std::string& csv_path, const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) throw SchemaMismatch("emit_plot: cannot open " + csv_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string svg = render_plot_from_csv_text(buf.str());
  std::ofstream out(out_path);
  out << svg;
}

}  // namespace tsmm
