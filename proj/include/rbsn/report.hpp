#pragma once

#include <limits>
#include <string>
#include <vector>

#include "rbsn/homogenize.hpp"
#include "rbsn/io.hpp"

namespace rbsn {

struct Series
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  // scatter instead of polyline
};

struct Panel
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    double y_min = std::numeric_limits<double>::quiet_NaN();  // NaN: fit to data
    double y_max = std::numeric_limits<double>::quiet_NaN();
};

/// Standalone SVG with the panels side by side. Non-finite points are
/// skipped. Throws std::invalid_argument for an empty panel list or series.
std::string emit_svg(const std::vector<Panel>& panels);

/// Long-format table: panel, series, x, y.
CsvTable panels_csv(const std::vector<Panel>& panels);

/// nu and E/E0 against alpha on [0, 3], one curve per mode and gamma.
std::vector<Panel> figure_alpha_curves(const std::vector<double>& gammas, int points = 121);
/// nu against gamma on [0, pi], one panel per mode, one curve per alpha.
std::vector<Panel> figure_gamma_curves(const std::vector<double>& alphas, int points = 181);
/// nu against I2 on [-1, 1], one panel per mode, one curve per alpha.
std::vector<Panel> figure_i2_curves(const std::vector<double>& alphas, int points = 201);

/// Numeric and predicted nu and E/E0 of sweep rows grouped by kind.
std::vector<Panel> sweep_panels(const std::vector<SweepRow>& rows);
CsvTable sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace rbsn
