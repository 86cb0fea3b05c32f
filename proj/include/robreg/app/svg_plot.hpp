#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "robreg/app/csv.hpp"

namespace robreg::app {

enum class PlotMetric { est_error, excess_risk };

struct PlotOptions {
    PlotMetric y = PlotMetric::est_error;
    bool logx = true;
    bool logy = true;
};

/// One algorithm's mean curve with a 95% band.
struct Curve {
    std::string label;
    std::vector<double> x;
    std::vector<double> mean;
    std::vector<double> lower;
    std::vector<double> upper;
};

struct ChartText {
    std::string title;
    std::string x_label;
    std::string y_label;
};

/// Static SVG 1.1 line chart. Output bytes depend only on the inputs.
std::string render_svg(const std::vector<Curve>& curves, const ChartText& text, bool logx, bool logy);

struct PlotFile {
    double alpha = 0.0;
    std::string path;
    std::string svg;
    std::size_t curves = 0;
};

/// One chart per alpha value, one curve per algorithm, x = T. A single alpha writes to
/// `out_path`; several alphas write to "<stem>_alpha<alpha><ext>".
std::vector<PlotFile> build_plots(const std::vector<ResultRow>& rows, const std::string& out_path,
                                  const PlotOptions& options);

} // namespace robreg::app
