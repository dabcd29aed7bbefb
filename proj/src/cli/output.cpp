#include "oam/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "oam/cli/config.hpp"
#include "oam/errors.hpp"

namespace oam::cli {
namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t k = 0; k < columns.size(); ++k)
    if (columns[k] == name) return data[k];
  throw ConfigError("no column '" + name + "'");
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  for (const auto& col : table.data) {
    if (col.size() != table.rows()) throw NumericError("CSV columns differ in length");
  }
  auto out = open_out(path, std::ios::out | std::ios::binary);
  for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << table.columns[k];
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t k = 0; k < table.data.size(); ++k) out << (k ? "," : "") << format_double(table.data[k][r]);
    out << '\n';
  }
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty CSV");
  t.columns = split(line, ',');
  t.data.assign(t.columns.size(), {});
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size()) throw ConfigError(path.string() + ":" + std::to_string(n) + ": wrong cell count");
    for (std::size_t k = 0; k < cells.size(); ++k) t.data[k].push_back(parse_double(cells[k], t.columns[k]));
  }
  return t;
}

void write_grid_csv(const std::filesystem::path& path, const Eigen::ArrayXXd& values) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) out << (i ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
}

Eigen::ArrayXXd read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    for (const auto& cell : split(line, ',')) r.push_back(parse_double(cell, path.string()));
    if (!rows.empty() && r.size() != rows.front().size()) throw ConfigError(path.string() + ": ragged grid");
    rows.push_back(std::move(r));
  }
  Eigen::ArrayXXd v(rows.empty() ? 0 : rows.front().size(), rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t i = 0; i < rows[j].size(); ++i) v(i, j) = rows[j][i];
  return v;
}

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec, const std::vector<Series>& series) {
  const double W = 640, H = 420, left = 70, right = 20, top = 40, bottom = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  for (double m : spec.vertical_markers) x0 = std::min(x0, m), x1 = std::max(x1, m);
  if (!(x1 > x0)) x1 = x0 + 1;
  y0 = std::min(y0, 0.0);
  if (!(y1 > y0)) y1 = y0 + 1;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };

  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(spec.title)
      << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
      << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    char bx[32], by[32];
    std::snprintf(bx, sizeof bx, "%.3g", xv);
    std::snprintf(by, sizeof by, "%.3g", yv);
    out << "<text x=\"" << px(xv) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\" font-size=\"11\">" << bx
        << "</text>\n"
        << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << by
        << "</text>\n";
  }
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << xml_escape(spec.x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << H / 2 << ")\">" << xml_escape(spec.y_label) << "</text>\n";
  for (double m : spec.vertical_markers) {
    out << "<line x1=\"" << px(m) << "\" x2=\"" << px(m) << "\" y1=\"" << top << "\" y2=\"" << H - bottom
        << "\" stroke=\"grey\" stroke-dasharray=\"5,4\"/>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = colours[s % 5];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[s].x.size() && k < series[s].y.size(); ++k)
      out << px(series[s].x[k]) << ',' << py(series[s].y[k]) << ' ';
    out << "\"/>\n";
    if (!series[s].label.empty()) {
      out << "<text x=\"" << W - right - 8 << "\" y=\"" << top + 16 + 15 * s << "\" text-anchor=\"end\" font-size=\"12\" fill=\""
          << colour << "\">" << xml_escape(series[s].label) << "</text>\n";
    }
  }
  out << "</svg>\n";
}

void write_pgm(const std::filesystem::path& path, const Eigen::ArrayXXd& values) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  const double peak = values.size() ? values.maxCoeff() : 0.0;
  out << "P5\n" << values.rows() << ' ' << values.cols() << "\n255\n";
  for (Eigen::Index j = values.cols() - 1; j >= 0; --j)
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const double v = peak > 0 ? std::clamp(values(i, j) / peak, 0.0, 1.0) : 0.0;
      out.put(static_cast<char>(std::lround(255 * v)));
    }
}

void write_phase_ppm(const std::filesystem::path& path, const Eigen::ArrayXXd& phase) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << "P6\n" << phase.rows() << ' ' << phase.cols() << "\n255\n";
  for (Eigen::Index j = phase.cols() - 1; j >= 0; --j)
    for (Eigen::Index i = 0; i < phase.rows(); ++i) {
      const double t = phase(i, j);
      for (double shift : {0.0, 2 * M_PI / 3, 4 * M_PI / 3}) {
        out.put(static_cast<char>(std::lround(127.5 * (1 + std::cos(t - shift)))));
      }
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << text;
}

}  // namespace oam::cli
