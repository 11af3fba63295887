#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cptseg/core.hpp"
#include "cptseg/types.hpp"

namespace cptseg::svg {

namespace detail {

constexpr int width = 960;
constexpr int height = 540;
constexpr int margin = 48;

struct Scale {
    double x0, x1, y0, y1;

    double sx(double x) const {
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin);
    }
    double sy(double y) const {
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin);
    }
};

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline void open_chart(std::ostringstream& os, const std::string& title) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
       << title << "</text>\n";
}

inline void frame(std::ostringstream& os) {
    os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
       << "\" height=\"" << height - 2 * margin
       << "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
}

inline void polyline(std::ostringstream& os, const Scale& sc, const TimeSeries& x) {
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    for (int i = 1; i <= x.n(); ++i) {
        if (i > 1) os << " ";
        os << num(sc.sx(i)) << "," << num(sc.sy(x.value(i)));
    }
    os << "\"/>\n";
}

} // namespace detail

/// Segmentation chart: the series polyline, a dotted vertical line per
/// changepoint, and per-region mean lines with a mean +/- 1.96 sd band.
inline std::string segmentation_chart(const SegmentationResult& result,
                                      const std::string& title = "segmentation") {
    const TimeSeries& x = result.model.data;
    const auto table = tidy(result.model);

    double lo = x.values()[0], hi = x.values()[0];
    for (double v : x.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (const auto& row : table.rows) {
        if (row.num_obs > 1) {
            lo = std::min(lo, row.mean - 1.96 * row.sd);
            hi = std::max(hi, row.mean + 1.96 * row.sd);
        }
    }
    if (hi <= lo) hi = lo + 1.0;
    const detail::Scale sc{1.0, static_cast<double>(std::max(2, x.n())), lo, hi};

    std::ostringstream os;
    detail::open_chart(os, title);

    for (const auto& row : table.rows) {
        if (row.num_obs <= 1) continue;
        const double x0 = sc.sx(row.begin), x1 = sc.sx(std::min(row.end, static_cast<double>(x.n())));
        const double top = sc.sy(row.mean + 1.96 * row.sd);
        const double bottom = sc.sy(row.mean - 1.96 * row.sd);
        os << "<rect class=\"band\" x=\"" << detail::num(x0) << "\" y=\"" << detail::num(top)
           << "\" width=\"" << detail::num(x1 - x0) << "\" height=\"" << detail::num(bottom - top)
           << "\" fill=\"red\" opacity=\"0.12\"/>\n";
    }
    detail::polyline(os, sc, x);
    for (const auto& row : table.rows) {
        const double x0 = sc.sx(row.begin), x1 = sc.sx(std::min(row.end, static_cast<double>(x.n())));
        const double y = sc.sy(row.mean);
        os << "<line class=\"region-mean\" x1=\"" << detail::num(x0) << "\" y1=\"" << detail::num(y)
           << "\" x2=\"" << detail::num(x1) << "\" y2=\"" << detail::num(y)
           << "\" stroke=\"red\" stroke-width=\"1.5\"/>\n";
    }
    for (int t : result.model.tau.tau()) {
        const double xx = sc.sx(t);
        os << "<line class=\"changepoint\" x1=\"" << detail::num(xx) << "\" y1=\""
           << detail::margin << "\" x2=\"" << detail::num(xx) << "\" y2=\""
           << detail::height - detail::margin
           << "\" stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"4,3\"/>\n";
    }
    detail::frame(os);
    os << "</svg>\n";
    return os.str();
}

/// Comparison chart: the series with one rug row of changepoint ticks per
/// method below it.
inline std::string rug_chart(const TimeSeries& x,
                             const std::vector<std::pair<std::string, std::vector<int>>>& methods,
                             const std::string& title = "comparison") {
    double lo = x.values()[0], hi = x.values()[0];
    for (double v : x.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= lo) hi = lo + 1.0;
    const int rug_rows = static_cast<int>(methods.size());
    const int rug_band = 22 * rug_rows;
    const detail::Scale sc{1.0, static_cast<double>(std::max(2, x.n())), lo, hi};

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::width << "\" height=\""
       << detail::height + rug_band << "\" viewBox=\"0 0 " << detail::width << " "
       << detail::height + rug_band << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << detail::width << "\" height=\""
       << detail::height + rug_band << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << detail::margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
       << title << "</text>\n";
    detail::polyline(os, sc, x);
    detail::frame(os);

    int row = 0;
    for (const auto& [name, tau] : methods) {
        const int y0 = detail::height + 22 * row;
        os << "<text x=\"4\" y=\"" << y0 + 14
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << name << "</text>\n";
        for (int t : tau) {
            const double xx = sc.sx(t);
            os << "<line class=\"rug\" x1=\"" << detail::num(xx) << "\" y1=\"" << y0 + 4
               << "\" x2=\"" << detail::num(xx) << "\" y2=\"" << y0 + 18
               << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
        }
        ++row;
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace cptseg::svg
