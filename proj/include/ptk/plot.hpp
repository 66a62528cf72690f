// Plot emission: minimal SVG writers (line plots, scatters, ROC curves,
// confusion matrices) and 8-bit PGM export for scaleograms. Everything is
// plain XML/bytes with no external dependencies.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ptk/cwt.hpp"
#include "ptk/errors.hpp"
#include "ptk/evalmetrics.hpp"
#include "ptk/io.hpp"

namespace ptk::plot {

namespace detail {

constexpr double kWidth = 640.0, kHeight = 480.0;
constexpr double kMarginLeft = 60.0, kMarginRight = 20.0;
constexpr double kMarginTop = 30.0, kMarginBottom = 50.0;

inline std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
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

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

struct Mapper {
    double x_lo, x_hi, y_lo, y_hi;

    double x(double v) const {
        const double span = x_hi - x_lo;
        const double t = span == 0.0 ? 0.5 : (v - x_lo) / span;
        return kMarginLeft + t * (kWidth - kMarginLeft - kMarginRight);
    }
    double y(double v) const {
        const double span = y_hi - y_lo;
        const double t = span == 0.0 ? 0.5 : (v - y_lo) / span;
        return kHeight - kMarginBottom - t * (kHeight - kMarginTop - kMarginBottom);
    }
};

inline const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

inline void open_svg(std::ofstream& out, const std::string& title) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(title) << "</text>\n";
}

inline void axes(std::ofstream& out, const Mapper& m, const std::string& x_label,
                 const std::string& y_label) {
    out << "<line x1=\"" << m.x(m.x_lo) << "\" y1=\"" << m.y(m.y_lo) << "\" x2=\"" << m.x(m.x_hi)
        << "\" y2=\"" << m.y(m.y_lo) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << m.x(m.x_lo) << "\" y1=\"" << m.y(m.y_lo) << "\" x2=\"" << m.x(m.x_lo)
        << "\" y2=\"" << m.y(m.y_hi) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (kWidth / 2) << "\" y=\"" << (kHeight - 10)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(x_label) << "</text>\n";
    out << "<text x=\"15\" y=\"" << (kHeight / 2)
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 "
        << (kHeight / 2) << ")\">" << escape(y_label) << "</text>\n";
    // numeric range ticks
    out << "<text x=\"" << m.x(m.x_lo) << "\" y=\"" << (m.y(m.y_lo) + 15)
        << "\" font-size=\"10\">" << num(m.x_lo) << "</text>\n";
    out << "<text x=\"" << m.x(m.x_hi) << "\" y=\"" << (m.y(m.y_lo) + 15)
        << "\" text-anchor=\"end\" font-size=\"10\">" << num(m.x_hi) << "</text>\n";
    out << "<text x=\"" << (m.x(m.x_lo) - 5) << "\" y=\"" << m.y(m.y_lo)
        << "\" text-anchor=\"end\" font-size=\"10\">" << num(m.y_lo) << "</text>\n";
    out << "<text x=\"" << (m.x(m.x_lo) - 5) << "\" y=\"" << (m.y(m.y_hi) + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << num(m.y_hi) << "</text>\n";
}

} // namespace detail

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

inline void svg_line_plot(const std::filesystem::path& path, const std::vector<Series>& series,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
    if (series.empty()) throw EmptyInput("svg_line_plot: no series");
    double x_lo = series[0].x.empty() ? 0.0 : series[0].x[0], x_hi = x_lo;
    double y_lo = series[0].y.empty() ? 0.0 : series[0].y[0], y_hi = y_lo;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw ShapeMismatch("series x/y length mismatch");
        for (const double v : s.x) {
            x_lo = std::min(x_lo, v);
            x_hi = std::max(x_hi, v);
        }
        for (const double v : s.y) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    const detail::Mapper m{x_lo, x_hi, y_lo, y_hi};
    auto out = io::detail::open_out(path);
    detail::open_svg(out, title);
    detail::axes(out, m, x_label, y_label);
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        if (s.x.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << detail::kPalette[si % 8]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << detail::num(m.x(s.x[i])) << ',' << detail::num(m.y(s.y[i])) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << (detail::kWidth - detail::kMarginRight - 5) << "\" y=\""
            << (detail::kMarginTop + 14.0 * static_cast<double>(si + 1))
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << detail::kPalette[si % 8]
            << "\">" << detail::escape(s.name) << "</text>\n";
    }
    out << "</svg>\n";
}

struct ScatterPoint {
    double x = 0.0, y = 0.0;
    double shade = 0.0; // 0..1, used to color progression
    std::string label;
};

inline void svg_scatter(const std::filesystem::path& path,
                        const std::vector<ScatterPoint>& points, const std::string& title,
                        const std::string& x_label, const std::string& y_label,
                        bool label_points = false) {
    if (points.empty()) throw EmptyInput("svg_scatter: no points");
    double x_lo = points[0].x, x_hi = points[0].x, y_lo = points[0].y, y_hi = points[0].y;
    for (const auto& p : points) {
        x_lo = std::min(x_lo, p.x);
        x_hi = std::max(x_hi, p.x);
        y_lo = std::min(y_lo, p.y);
        y_hi = std::max(y_hi, p.y);
    }
    const detail::Mapper m{x_lo, x_hi, y_lo, y_hi};
    auto out = io::detail::open_out(path);
    detail::open_svg(out, title);
    detail::axes(out, m, x_label, y_label);
    for (const auto& p : points) {
        const int blue = static_cast<int>(std::clamp(p.shade, 0.0, 1.0) * 200.0);
        out << "<circle cx=\"" << detail::num(m.x(p.x)) << "\" cy=\"" << detail::num(m.y(p.y))
            << "\" r=\"3\" fill=\"rgb(" << (55 + blue) << "," << (80 + blue / 4) << ","
            << (160 - blue / 2) << ")\"/>\n";
        if (label_points && !p.label.empty())
            out << "<text x=\"" << detail::num(m.x(p.x) + 5) << "\" y=\""
                << detail::num(m.y(p.y) - 5) << "\" font-size=\"9\">" << detail::escape(p.label)
                << "</text>\n";
    }
    out << "</svg>\n";
}

// Two-component PCA view of a unit's life; later cycles get lighter
// colors so advancing degradation reads left to right.
inline void svg_pca_scatter(const std::filesystem::path& path,
                            const std::vector<std::vector<double>>& projected,
                            const std::string& title = "PCA degradation view") {
    if (projected.empty() || projected.front().size() < 2)
        throw EmptyInput("svg_pca_scatter needs >= 2 projected components");
    std::vector<ScatterPoint> points;
    points.reserve(projected.size());
    for (std::size_t i = 0; i < projected.size(); ++i)
        points.push_back({projected[i][0], projected[i][1],
                          double(i) / double(std::max<std::size_t>(projected.size() - 1, 1)),
                          ""});
    svg_scatter(path, points, title, "PC1", "PC2", false);
}

// ROC plot with the chance diagonal.
inline void svg_roc(const std::filesystem::path& path, const RocCurve& curve, double auc) {
    const detail::Mapper m{0.0, 1.0, 0.0, 1.0};
    auto out = io::detail::open_out(path);
    char title[64];
    std::snprintf(title, sizeof title, "ROC curve (AUC = %.4f)", auc);
    detail::open_svg(out, title);
    detail::axes(out, m, "FPR", "TPR");
    out << "<line x1=\"" << m.x(0) << "\" y1=\"" << m.y(0) << "\" x2=\"" << m.x(1) << "\" y2=\""
        << m.y(1) << "\" stroke=\"#aaaaaa\" stroke-dasharray=\"4 3\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
    for (const auto& [fpr, tpr] : curve.points)
        out << detail::num(m.x(fpr)) << ',' << detail::num(m.y(tpr)) << ' ';
    out << "\"/>\n</svg>\n";
}

inline void svg_confusion(const std::filesystem::path& path, const ConfusionMatrix& matrix) {
    const std::size_t k = matrix.classes;
    if (k == 0) throw EmptyInput("svg_confusion: empty matrix");
    std::int64_t max_count = 1;
    for (const auto c : matrix.counts) max_count = std::max(max_count, c);

    const double cell = std::min((detail::kWidth - 120.0) / double(k),
                                 (detail::kHeight - 120.0) / double(k));
    auto out = io::detail::open_out(path);
    detail::open_svg(out, "Confusion matrix (rows = actual, columns = predicted)");
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t p = 0; p < k; ++p) {
            const double x = 100.0 + double(p) * cell;
            const double y = 60.0 + double(a) * cell;
            const double frac = double(matrix.at(a, p)) / double(max_count);
            const int shade = 255 - static_cast<int>(frac * 200.0);
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
                << cell << "\" fill=\"rgb(" << shade << "," << shade << ",255)\" stroke=\"#888\"/>\n";
            out << "<text x=\"" << (x + cell / 2) << "\" y=\"" << (y + cell / 2 + 4)
                << "\" text-anchor=\"middle\" font-size=\"" << std::max(8.0, cell / 4) << "\">"
                << matrix.at(a, p) << "</text>\n";
        }
        out << "<text x=\"90\" y=\"" << (60.0 + double(a) * cell + cell / 2)
            << "\" text-anchor=\"end\" font-size=\"11\">" << a << "</text>\n";
        out << "<text x=\"" << (100.0 + double(a) * cell + cell / 2)
            << "\" y=\"55\" text-anchor=\"middle\" font-size=\"11\">" << a << "</text>\n";
    }
    out << "</svg>\n";
}

// P5 (binary) PGM, one row per scale, min-max scaled to 8 bits, plus a
// sidecar CSV listing the scale of each row.
inline void save_scaleogram_pgm(const std::filesystem::path& path, const Scaleogram& s) {
    if (s.magnitudes.empty()) throw EmptyInput("save_scaleogram_pgm: empty scaleogram");
    double lo = s.magnitudes[0], hi = s.magnitudes[0];
    for (const double v : s.magnitudes) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;

    auto out = io::detail::open_out(path, true);
    out << "P5\n" << s.width() << " " << s.height() << "\n255\n";
    for (std::size_t i = 0; i < s.magnitudes.size(); ++i) {
        const auto byte =
            static_cast<unsigned char>(std::lround((s.magnitudes[i] - lo) / span * 255.0));
        out.write(reinterpret_cast<const char*>(&byte), 1);
    }

    std::filesystem::path sidecar = path;
    sidecar += ".scales.csv";
    auto side = io::detail::open_out(sidecar);
    side << "row,scale\n";
    for (std::size_t i = 0; i < s.scales.size(); ++i)
        side << i << ',' << io::detail::format_double(s.scales[i]) << "\n";
}

} // namespace ptk::plot
