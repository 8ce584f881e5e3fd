#include "potlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace potlab::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    Bounds b;
    [[nodiscard]] double px(double x) const {
        const double span = b.xmax - b.xmin;
        return kLeft + (span > 0 ? (x - b.xmin) / span : 0.5) * (kWidth - kLeft - kRight);
    }
    [[nodiscard]] double py(double y) const {
        const double span = b.ymax - b.ymin;
        return kHeight - kBottom - (span > 0 ? (y - b.ymin) / span : 0.5) * (kHeight - kTop - kBottom);
    }
};

void header(std::ostringstream& os, const std::string& title, const Frame& f, const std::string& ylabel_prefix) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
       << "\" viewBox=\"0 0 " << fmt(kWidth) << ' ' << fmt(kHeight) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"14\">" << escape(title) << "</text>\n";
    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom;
    const double y1 = kTop;
    os << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(y0)
       << "\"/>\n";
    os << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(y1)
       << "\"/>\n";
    os << "</g>\n";
    os << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"10\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.b.xmin + (f.b.xmax - f.b.xmin) * i / 4.0;
        const double yv = f.b.ymin + (f.b.ymax - f.b.ymin) * i / 4.0;
        os << "<text x=\"" << fmt(f.px(xv)) << "\" y=\"" << fmt(y0 + 16) << "\" text-anchor=\"middle\">"
           << fmt_label(xv) << "</text>\n";
        os << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(f.py(yv) + 3) << "\" text-anchor=\"end\">"
           << ylabel_prefix << fmt_label(yv) << "</text>\n";
    }
    os << "</g>\n";
}

void legend(std::ostringstream& os, const std::vector<std::pair<std::string, std::string>>& entries) {
    double y = kTop + 10;
    for (const auto& [label, color] : entries) {
        if (label.empty()) continue;
        os << "<text x=\"" << fmt(kWidth - kRight - 4) << "\" y=\"" << fmt(y)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << escape(color) << "\">"
           << escape(label) << "</text>\n";
        y += 14;
    }
}

}  // namespace

std::string scatter(const std::string& title, const std::vector<PointSeries>& series, const Bounds& bounds) {
    std::ostringstream os;
    const Frame f{bounds};
    header(os, title, f, "");
    std::vector<std::pair<std::string, std::string>> entries;
    for (const PointSeries& s : series) {
        os << "<g class=\"series\" fill=\"" << escape(s.color) << "\">\n";
        for (const auto& [x, y] : s.points) {
            os << "<circle cx=\"" << fmt(f.px(x)) << "\" cy=\"" << fmt(f.py(y)) << "\" r=\"2.5\"/>\n";
        }
        os << "</g>\n";
        entries.emplace_back(s.label, s.color);
    }
    legend(os, entries);
    os << "</svg>\n";
    return os.str();
}

std::string line_chart(const std::string& title, const std::vector<LineSeries>& series, bool log_y) {
    std::vector<std::vector<std::pair<double, double>>> mapped;
    Bounds b{0.0, 1.0, 0.0, 1.0};
    bool first = true;
    for (const LineSeries& s : series) {
        std::vector<std::pair<double, double>> pts;
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            double y = s.y[i];
            if (log_y) {
                if (!(std::abs(y) > 0.0) || !std::isfinite(y)) continue;
                y = std::log10(std::abs(y));
            }
            if (!std::isfinite(y) || !std::isfinite(s.x[i])) continue;
            pts.emplace_back(s.x[i], y);
            if (first) {
                b = {s.x[i], s.x[i], y, y};
                first = false;
            }
            b.xmin = std::min(b.xmin, s.x[i]);
            b.xmax = std::max(b.xmax, s.x[i]);
            b.ymin = std::min(b.ymin, y);
            b.ymax = std::max(b.ymax, y);
        }
        mapped.push_back(std::move(pts));
    }
    if (b.xmax == b.xmin) {
        b.xmin -= 1.0;
        b.xmax += 1.0;
    }
    if (b.ymax == b.ymin) {
        b.ymin -= 1.0;
        b.ymax += 1.0;
    }
    std::ostringstream os;
    const Frame f{b};
    header(os, title, f, log_y ? "1e" : "");
    std::vector<std::pair<std::string, std::string>> entries;
    for (size_t k = 0; k < series.size(); ++k) {
        os << "<polyline fill=\"none\" stroke=\"" << escape(series[k].color) << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < mapped[k].size(); ++i) {
            if (i > 0) os << ' ';
            os << fmt(f.px(mapped[k][i].first)) << ',' << fmt(f.py(mapped[k][i].second));
        }
        os << "\"/>\n";
        entries.emplace_back(series[k].label, series[k].color);
    }
    legend(os, entries);
    os << "</svg>\n";
    return os.str();
}

}  // namespace potlab::svg
