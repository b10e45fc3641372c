#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fbhcli {

namespace {

std::vector<std::vector<double>> read_table(const std::string& path,
                                            std::vector<std::string>& header) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty CSV " + path);
  header.clear();
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) header.push_back(cell);
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        throw std::runtime_error("malformed CSV cell '" + cell + "' in " + path);
      }
    }
    if (row.size() != header.size())
      throw std::runtime_error("ragged CSV row in " + path);
    rows.push_back(std::move(row));
  }
  return rows;
}

int column(const std::vector<std::string>& header, const std::string& name,
           const std::string& path) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw std::runtime_error("CSV " + path + " is missing column '" + name + "'");
  return (int)(it - header.begin());
}

std::string heat_color(double t) {
  // dark blue -> red ramp
  t = std::clamp(t, 0.0, 1.0);
  int r = (int)(255 * t);
  int g = (int)(64 * (1 - std::abs(2 * t - 1)));
  int b = (int)(255 * (1 - t));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

void svg_heatmap(const std::string& csv_path, const std::string& svg_path) {
  std::vector<std::string> header;
  auto rows = read_table(csv_path, header);
  int cx = column(header, "x", csv_path);
  int cy = column(header, "y", csv_path);
  int ce = column(header, "e", csv_path);
  if (rows.empty()) throw std::runtime_error("heatmap: no data rows in " + csv_path);

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300, emax = 0.0;
  std::set<double> xs;
  for (auto& r : rows) {
    x0 = std::min(x0, r[cx]); x1 = std::max(x1, r[cx]);
    y0 = std::min(y0, r[cy]); y1 = std::max(y1, r[cy]);
    emax = std::max(emax, r[ce]);
    xs.insert(r[cx]);
  }
  double h = xs.size() > 1 ? (x1 - x0) / (double)(xs.size() - 1) : 1.0;
  const double W = 640.0;
  double sc = W / (x1 - x0 + h);
  double H = (y1 - y0 + h) * sc;

  std::ofstream os(svg_path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << (int)W << "' height='" << (int)H
     << "' viewBox='0 0 " << W << " " << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='#10101a'/>\n";
  for (auto& r : rows) {
    double t = emax > 0 ? std::sqrt(r[ce] / emax) : 0.0;  // sqrt ramp: necks visible
    double px = (r[cx] - x0) * sc;
    double py = (y1 - r[cy]) * sc;
    os << "<rect x='" << px << "' y='" << py << "' width='" << h * sc + 0.5 << "' height='"
       << h * sc + 0.5 << "' fill='" << heat_color(t) << "'/>\n";
  }
  os << "</svg>\n";
}

void svg_neck_lines(const std::string& csv_path, const std::string& svg_path) {
  std::vector<std::string> header;
  auto rows = read_table(csv_path, header);
  int cm = column(header, "m", csv_path);
  int cR = column(header, "R", csv_path);
  int ce = column(header, "energy", csv_path);
  if (rows.empty()) throw std::runtime_error("neck plot: no data rows in " + csv_path);

  std::map<double, std::vector<std::pair<double, double>>> lines;  // m -> (R, energy)
  double Rmax = 0.0, emax = 0.0;
  for (auto& r : rows) {
    lines[r[cm]].push_back({r[cR], r[ce]});
    Rmax = std::max(Rmax, r[cR]);
    emax = std::max(emax, r[ce]);
  }
  if (emax <= 0) emax = 1.0;
  const double W = 560, H = 360, ml = 50, mb = 30;
  auto px = [&](double R) { return ml + (W - ml - 10) * R / Rmax; };
  auto py = [&](double e) { return H - mb - (H - mb - 10) * e / emax; };

  std::ofstream os(svg_path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - 10 << "' y2='" << H - mb
     << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << ml << "' y2='10' stroke='black'/>\n";
  os << "<text x='" << W / 2 << "' y='" << H - 8 << "' font-size='12'>R</text>\n";
  os << "<text x='8' y='20' font-size='12'>annulus energy</text>\n";
  const char* colors[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#f39c12", "#16a085"};
  int li = 0;
  for (auto& [m, pts] : lines) {
    auto sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    os << "<polyline fill='none' stroke='" << colors[li % 6] << "' stroke-width='1.5' points='";
    for (auto& [R, e] : sorted) os << px(R) << "," << py(e) << " ";
    os << "'/>\n";
    os << "<text x='" << W - 70 << "' y='" << 20 + 14 * li << "' font-size='11' fill='"
       << colors[li % 6] << "'>m = " << m << "</text>\n";
    ++li;
  }
  os << "</svg>\n";
}

void svg_boundary_measure(const std::string& csv_path, const std::vector<double>& atom_x,
                          const std::vector<double>& atom_w, const std::string& svg_path) {
  std::vector<std::string> header;
  auto rows = read_table(csv_path, header);
  int cx = column(header, "x", csv_path);
  int cd = column(header, "density", csv_path);
  if (rows.empty()) throw std::runtime_error("boundary plot: no data rows in " + csv_path);

  double x0 = 1e300, x1 = -1e300, dmax = 1e-12;
  for (auto& r : rows) {
    x0 = std::min(x0, r[cx]);
    x1 = std::max(x1, r[cx]);
    dmax = std::max(dmax, std::abs(r[cd]));
  }
  const double W = 560, H = 280, ml = 50, mb = 30;
  auto px = [&](double x) { return ml + (W - ml - 10) * (x - x0) / (x1 - x0); };
  auto py = [&](double d) { return H - mb - (H - mb - 10) * std::abs(d) / dmax; };

  std::ofstream os(svg_path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - 10 << "' y2='" << H - mb
     << "' stroke='black'/>\n";
  os << "<text x='" << W / 2 << "' y='" << H - 8 << "' font-size='12'>x on I</text>\n";
  os << "<text x='8' y='20' font-size='12'>u . d_nu u</text>\n";
  os << "<polyline fill='none' stroke='#2980b9' stroke-width='1.5' points='";
  for (auto& r : rows) os << px(r[cx]) << "," << py(r[cd]) << " ";
  os << "'/>\n";
  double wmax = 1e-12;
  for (double w : atom_w) wmax = std::max(wmax, std::abs(w));
  for (std::size_t i = 0; i < atom_x.size(); ++i) {
    double rad = 4 + 8 * std::abs(atom_w.size() > i ? atom_w[i] : 0.0) / wmax;
    os << "<circle cx='" << px(atom_x[i]) << "' cy='" << H - mb << "' r='" << rad
       << "' fill='none' stroke='#c0392b' stroke-width='2'/>\n";
  }
  os << "</svg>\n";
}

}  // namespace fbhcli
