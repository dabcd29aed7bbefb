#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

namespace oam::cli {

// 17 significant digits: reading the text back gives the same double.
std::string format_double(double v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // one vector per column

  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
  const std::vector<double>& column(const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

// Row j holds y index j; column i holds x index i.
void write_grid_csv(const std::filesystem::path& path, const Eigen::ArrayXXd& values);
Eigen::ArrayXXd read_grid_csv(const std::filesystem::path& path);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> vertical_markers;
};

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec, const std::vector<Series>& series);

// 8-bit grey map scaled to the maximum value.
void write_pgm(const std::filesystem::path& path, const Eigen::ArrayXXd& values);
// Phase in radians on a cyclic colour wheel.
void write_phase_ppm(const std::filesystem::path& path, const Eigen::ArrayXXd& phase);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace oam::cli
