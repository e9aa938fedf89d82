#include "mivkit/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mivkit/text_util.hpp"

namespace mivkit {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMarginL = 70.0;
constexpr double kMarginR = 20.0;
constexpr double kMarginT = 40.0;
constexpr double kMarginB = 50.0;

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Scale {
    double lo = 0.0, hi = 1.0, out_lo = 0.0, out_hi = 1.0;
    double operator()(double v) const {
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

void header(std::ostringstream& svg, const std::string& title) {
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << px(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
}

void frame(std::ostringstream& svg) {
    svg << "<rect x=\"" << px(kMarginL) << "\" y=\"" << px(kMarginT) << "\" width=\""
        << px(kWidth - kMarginL - kMarginR) << "\" height=\"" << px(kHeight - kMarginT - kMarginB)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                     const std::string& dash) {
    std::ostringstream out;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (!dash.empty()) out << " stroke-dasharray=\"" << dash << "\"";
    out << " points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
        if (i) out << " ";
        out << px(pts[i].first) << "," << px(pts[i].second);
    }
    out << "\"/>\n";
    return out.str();
}

}  // namespace

std::string curve_overlay_svg(const DeviceCurve& reference, const DeviceCurve& fitted,
                              const std::string& title, bool log_y, int* suppressed) {
    if (reference.samples.empty()) throw std::invalid_argument("curve plot: empty data");
    int omitted = 0;
    auto transform = [&](const DeviceCurve& c) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : c.samples) {
            if (log_y) {
                if (!(s.value > 0.0)) {
                    ++omitted;
                    continue;
                }
                pts.emplace_back(s.sweep_v, std::log10(s.value));
            } else {
                pts.emplace_back(s.sweep_v, s.value);
            }
        }
        return pts;
    };
    const auto ref_pts = transform(reference);
    const auto fit_pts = transform(fitted);
    if (ref_pts.empty()) throw std::invalid_argument("curve plot: no plottable samples");

    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const auto& pts : {ref_pts, fit_pts})
        for (const auto& [x, y] : pts) {
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    if (xhi == xlo) xhi = xlo + 1.0;
    if (yhi == ylo) yhi = ylo + 1.0;
    const Scale sx{xlo, xhi, kMarginL, kWidth - kMarginR};
    const Scale sy{ylo, yhi, kHeight - kMarginB, kMarginT};

    std::ostringstream svg;
    header(svg, title);
    if (log_y) svg << "<!-- omitted-nonpositive:" << omitted << " -->\n";
    frame(svg);
    for (int t = 0; t <= 4; ++t) {
        const double fx = xlo + (xhi - xlo) * t / 4.0;
        const double fy = ylo + (yhi - ylo) * t / 4.0;
        svg << "<text x=\"" << px(sx(fx)) << "\" y=\"" << px(kHeight - kMarginB + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << tick_label(fx) << "</text>\n";
        svg << "<text x=\"" << px(kMarginL - 6) << "\" y=\"" << px(sy(fy) + 3)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << tick_label(log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }

    auto project = [&](const std::vector<std::pair<double, double>>& pts) {
        std::vector<std::pair<double, double>> out;
        out.reserve(pts.size());
        for (const auto& [x, y] : pts) out.emplace_back(sx(x), sy(y));
        return out;
    };
    svg << polyline(project(ref_pts), "#1f77b4", "");
    svg << polyline(project(fit_pts), "#d62728", "6,3");
    svg << "<text x=\"" << px(kWidth - kMarginR - 10) << "\" y=\"" << px(kMarginT + 16)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#1f77b4\">"
        << "reference</text>\n";
    svg << "<text x=\"" << px(kWidth - kMarginR - 10) << "\" y=\"" << px(kMarginT + 32)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">"
        << "fitted</text>\n";
    svg << "</svg>\n";
    if (suppressed) *suppressed = omitted;
    return svg.str();
}

std::vector<std::string> write_curve_plots(const CharacterizationSet& reference,
                                           const ModelParams& fitted, const ModelConstants& consts,
                                           const std::string& out_dir) {
    std::vector<std::string> files;
    auto emit = [&](const DeviceCurve& ref, const std::string& stem, bool log_y) {
        const DeviceCurve fit = model_curve_like(fitted, consts, ref);
        const std::string name = stem + (log_y ? "_log" : "_lin") + ".svg";
        write_file_atomic(out_dir + "/" + name,
                          curve_overlay_svg(ref, fit, stem + (log_y ? " (log)" : ""), log_y));
        files.push_back(name);
    };
    for (const auto& curve : reference.curves) {
        std::string stem = to_string(curve.kind);
        if (curve.kind == CurveKind::idvd) stem += "_vgs" + format_double(curve.fixed_bias);
        std::transform(stem.begin(), stem.end(), stem.begin(), ::tolower);
        emit(curve, stem, false);
        if (curve.kind == CurveKind::idvg_low || curve.kind == CurveKind::idvg_high)
            emit(curve, stem, true);
    }
    return files;
}

std::string ppa_bar_svg(const PpaReport& report, PpaMetric metric) {
    if (report.rows.empty()) throw std::invalid_argument("ppa plot: empty report");
    auto value_of = [&](const PpaRow& r) {
        switch (metric) {
            case PpaMetric::delay: return r.delay_s;
            case PpaMetric::power: return r.power_w;
            case PpaMetric::area: return r.cell_area_nm2;
        }
        return 0.0;
    };
    const char* title = metric == PpaMetric::delay   ? "average delay (s)"
                        : metric == PpaMetric::power ? "average power (W)"
                                                     : "cell layout area (nm2)";
    // stable cell order: first appearance in the report
    std::vector<std::string> cells;
    for (const auto& r : report.rows)
        if (std::find(cells.begin(), cells.end(), r.cell) == cells.end()) cells.push_back(r.cell);
    std::vector<Variant> variants;
    for (const auto& r : report.rows)
        if (std::find(variants.begin(), variants.end(), r.variant) == variants.end())
            variants.push_back(r.variant);

    double vmax = 0.0;
    for (const auto& r : report.rows) vmax = std::max(vmax, value_of(r));
    if (vmax <= 0.0) vmax = 1.0;

    const double plot_w = kWidth - kMarginL - kMarginR;
    const double plot_h = kHeight - kMarginT - kMarginB;
    const double group_w = plot_w / static_cast<double>(cells.size());
    const double bar_w = group_w * 0.8 / static_cast<double>(variants.size());
    const char* colors[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52"};

    std::ostringstream svg;
    header(svg, title);
    frame(svg);
    for (int t = 0; t <= 4; ++t) {
        const double fy = vmax * t / 4.0;
        const double y = kHeight - kMarginB - plot_h * t / 4.0;
        svg << "<text x=\"" << px(kMarginL - 6) << "\" y=\"" << px(y + 3)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << tick_label(fy) << "</text>\n";
    }
    for (size_t c = 0; c < cells.size(); ++c) {
        const double gx = kMarginL + group_w * static_cast<double>(c) + group_w * 0.1;
        for (size_t v = 0; v < variants.size(); ++v) {
            double value = 0.0;
            for (const auto& r : report.rows)
                if (r.cell == cells[c] && r.variant == variants[v]) value = value_of(r);
            const double h = plot_h * value / vmax;
            svg << "<rect class=\"bar\" x=\"" << px(gx + bar_w * static_cast<double>(v)) << "\" y=\""
                << px(kHeight - kMarginB - h) << "\" width=\"" << px(bar_w) << "\" height=\""
                << px(h) << "\" fill=\"" << colors[v % 4] << "\"/>\n";
        }
        svg << "<text x=\"" << px(gx + group_w * 0.4) << "\" y=\"" << px(kHeight - kMarginB + 14)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"7\">" << cells[c]
            << "</text>\n";
    }
    for (size_t v = 0; v < variants.size(); ++v) {
        svg << "<rect x=\"" << px(kMarginL + 8 + 92.0 * static_cast<double>(v)) << "\" y=\""
            << px(kMarginT + 6) << "\" width=\"10\" height=\"10\" fill=\"" << colors[v % 4]
            << "\"/>\n";
        svg << "<text x=\"" << px(kMarginL + 22 + 92.0 * static_cast<double>(v)) << "\" y=\""
            << px(kMarginT + 15) << "\" font-family=\"sans-serif\" font-size=\"10\">"
            << to_string(variants[v]) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<std::string> write_ppa_plots(const PpaReport& report, const std::string& out_dir) {
    std::vector<std::string> files;
    const std::pair<PpaMetric, const char*> charts[] = {{PpaMetric::delay, "ppa_delay.svg"},
                                                        {PpaMetric::power, "ppa_power.svg"},
                                                        {PpaMetric::area, "ppa_area.svg"}};
    for (const auto& [metric, name] : charts) {
        write_file_atomic(out_dir + "/" + std::string(name), ppa_bar_svg(report, metric));
        files.push_back(name);
    }
    return files;
}

}  // namespace mivkit
