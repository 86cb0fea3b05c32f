#include "robreg/app/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "robreg/evaluation.hpp"

namespace robreg::app {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;
    double pixel_lo = 0.0;
    double pixel_hi = 1.0;

    double transform(double v) const { return log ? std::log10(v) : v; }
    double to_pixel(double v) const {
        const double t = (transform(v) - lo) / (hi - lo);
        return pixel_lo + t * (pixel_hi - pixel_lo);
    }
    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
        } else {
            for (int i = 0; i <= 5; ++i) out.push_back(lo + (hi - lo) * i / 5.0);
        }
        return out;
    }
};

Axis make_axis(double min_v, double max_v, bool log, double pixel_lo, double pixel_hi) {
    Axis a;
    a.log = log;
    a.pixel_lo = pixel_lo;
    a.pixel_hi = pixel_hi;
    double lo = log ? std::log10(min_v) : min_v;
    double hi = log ? std::log10(max_v) : max_v;
    if (!(hi > lo)) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        lo -= pad;
        hi += pad;
    }
    if (log) {
        lo = std::floor(lo);
        hi = std::ceil(hi);
        if (hi == lo) hi = lo + 1.0;
    }
    a.lo = lo;
    a.hi = hi;
    return a;
}

} // namespace

std::string render_svg(const std::vector<Curve>& curves, const ChartText& text, bool logx, bool logy) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    double smallest_positive = xmin;
    for (const auto& c : curves) {
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            if (!logx || c.x[i] > 0.0) {
                xmin = std::min(xmin, c.x[i]);
                xmax = std::max(xmax, c.x[i]);
            }
            for (double v : {c.mean[i], c.lower[i], c.upper[i]}) {
                if (v > 0.0) smallest_positive = std::min(smallest_positive, v);
            }
        }
    }
    if (!std::isfinite(smallest_positive)) smallest_positive = 1.0;
    const double y_floor = logy ? smallest_positive : -std::numeric_limits<double>::infinity();
    auto clamp_y = [&](double v) { return logy ? std::max(v, y_floor) : v; };
    for (const auto& c : curves) {
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            for (double v : {c.mean[i], c.lower[i], c.upper[i]}) {
                if (!std::isfinite(v)) continue;
                ymin = std::min(ymin, clamp_y(v));
                ymax = std::max(ymax, clamp_y(v));
            }
        }
    }
    if (!std::isfinite(xmin)) xmin = xmax = 1.0;
    if (!std::isfinite(ymin)) ymin = ymax = 1.0;

    const Axis xa = make_axis(xmin, xmax, logx, kLeft, kWidth - kRight);
    const Axis ya = make_axis(ymin, ymax, logy, kHeight - kBottom, kTop);

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kWidth) << "\" height=\""
        << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" fill=\"#ffffff\"/>\n";
    svg << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << escape(text.title) << "</text>\n";

    // Grid and ticks.
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    for (double t : xa.ticks()) {
        const double px = xa.to_pixel(t);
        svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px) << "\" y2=\""
            << num(kHeight - kBottom) << "\" stroke=\"#e0e0e0\"/>\n";
        svg << "<text x=\"" << num(px) << "\" y=\"" << num(kHeight - kBottom + 16)
            << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    for (double t : ya.ticks()) {
        const double py = ya.to_pixel(t);
        svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kWidth - kRight)
            << "\" y2=\"" << num(py) << "\" stroke=\"#e0e0e0\"/>\n";
        svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
            << tick_label(t) << "</text>\n";
    }
    svg << "</g>\n";
    svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kWidth - kRight - kLeft)
        << "\" height=\"" << num(kHeight - kBottom - kTop) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    svg << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(text.x_label)
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << num((kTop + kHeight - kBottom) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
        << num((kTop + kHeight - kBottom) / 2) << ")\">" << escape(text.y_label) << "</text>\n";

    for (std::size_t k = 0; k < curves.size(); ++k) {
        const Curve& c = curves[k];
        const char* color = kPalette[k % std::size(kPalette)];
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            if ((!logx || c.x[i] > 0.0) && std::isfinite(c.mean[i]) && (!logy || c.mean[i] > 0.0)) idx.push_back(i);
        }
        if (idx.empty()) continue;

        svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
        for (std::size_t i : idx) {
            const double hi = std::isfinite(c.upper[i]) ? c.upper[i] : c.mean[i];
            svg << num(xa.to_pixel(c.x[i])) << ',' << num(ya.to_pixel(clamp_y(hi))) << ' ';
        }
        for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
            const double lo = std::isfinite(c.lower[*it]) ? c.lower[*it] : c.mean[*it];
            svg << num(xa.to_pixel(c.x[*it])) << ',' << num(ya.to_pixel(clamp_y(lo))) << ' ';
        }
        svg << "\"/>\n";

        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t n = 0; n < idx.size(); ++n) {
            const std::size_t i = idx[n];
            svg << (n ? " " : "") << num(xa.to_pixel(c.x[i])) << ',' << num(ya.to_pixel(c.mean[i]));
        }
        svg << "\"/>\n";
        for (std::size_t i : idx) {
            svg << "<circle cx=\"" << num(xa.to_pixel(c.x[i])) << "\" cy=\"" << num(ya.to_pixel(c.mean[i]))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }

        const double ly = kTop + 12 + 20.0 * static_cast<double>(k);
        const double lx = kWidth - kRight + 14;
        svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 22) << "\" y2=\""
            << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(c.label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<PlotFile> build_plots(const std::vector<ResultRow>& rows, const std::string& out_path,
                                  const PlotOptions& options) {
    std::set<double> alphas;
    for (const auto& r : rows) alphas.insert(r.alpha);

    const auto points = [&] {
        std::vector<ResultRow> sorted = rows;
        std::stable_sort(sorted.begin(), sorted.end(), [](const ResultRow& a, const ResultRow& b) { return a.T < b.T; });
        return sorted;
    }();

    const std::filesystem::path base(out_path);
    std::vector<PlotFile> files;
    for (double alpha : alphas) {
        std::vector<MetricPoint> metric;
        for (const auto& r : points) {
            if (r.alpha == alpha) {
                metric.push_back({r.algorithm, r.alpha, r.T, r.seed, r.est_error, r.excess_risk, r.excess_risk_se, 0});
            }
        }
        // Curves keep first-appearance order of labels in the input file.
        std::vector<std::string> labels;
        for (const auto& r : rows) {
            if (r.alpha == alpha && std::find(labels.begin(), labels.end(), r.algorithm) == labels.end()) {
                labels.push_back(r.algorithm);
            }
        }
        std::map<std::string, Curve> by_label;
        for (const auto& g : aggregate_runs(metric)) {
            const MeanCi& ci = options.y == PlotMetric::est_error ? g.est_error : g.excess_risk;
            Curve& c = by_label[g.algorithm];
            c.label = g.algorithm;
            c.x.push_back(static_cast<double>(g.T));
            c.mean.push_back(ci.mean);
            c.lower.push_back(ci.defined ? ci.mean - ci.half_width : ci.mean);
            c.upper.push_back(ci.defined ? ci.mean + ci.half_width : ci.mean);
        }
        std::vector<Curve> curves;
        for (const auto& l : labels) curves.push_back(std::move(by_label[l]));

        PlotFile f;
        f.alpha = alpha;
        f.curves = curves.size();
        char alpha_text[32];
        std::snprintf(alpha_text, sizeof alpha_text, "%g", alpha);
        if (alphas.size() == 1) {
            f.path = out_path;
        } else {
            f.path = (base.parent_path() / (base.stem().string() + "_alpha" + alpha_text + base.extension().string()))
                         .string();
        }
        ChartText text;
        text.title = std::string("Results for alpha = ") + alpha_text;
        text.x_label = "T (samples)";
        text.y_label = options.y == PlotMetric::est_error ? "mean ||w - w*||^2" : "mean excess risk";
        f.svg = render_svg(curves, text, options.logx, options.logy);
        files.push_back(std::move(f));
    }
    return files;
}

} // namespace robreg::app
