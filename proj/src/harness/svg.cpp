#include "rfedit/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rfedit/errors.hpp"

namespace rfedit::harness {

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v == 0.0 ? 0.0 : v);  // no "-0.000000"
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

std::string style_attrs(const SvgStyle& s) {
    std::string out = " stroke=\"" + escape(s.stroke) + "\" stroke-width=\"" + num(s.width) + "\" fill=\"" +
                      escape(s.fill) + "\"";
    if (s.dashed)
        out += " stroke-dasharray=\"6,4\"";
    return out;
}

bool finite(const Point2& p) { return std::isfinite(p[0]) && std::isfinite(p[1]); }

}  // namespace

SvgPlot::SvgPlot(double width, double height) : m_width(width), m_height(height) {
    if (!(width > 0.0 && height > 0.0))
        throw DomainError("plot size must be positive");
}

void SvgPlot::add_polyline(std::vector<Point2> points, SvgStyle style) {
    if (!std::all_of(points.begin(), points.end(), finite))
        throw DomainError("polyline has a non-finite vertex");
    m_elements.push_back({Kind::polyline, std::move(points), 0.0, 0.0, std::move(style)});
}

void SvgPlot::add_ellipse(Point2 center, double rx, double ry, SvgStyle style) {
    if (!finite(center) || !(rx >= 0.0) || !(ry >= 0.0))
        throw DomainError("ellipse needs a finite centre and non-negative radii");
    m_elements.push_back({Kind::ellipse, {center}, rx, ry, std::move(style)});
}

void SvgPlot::add_marker(Point2 at, SvgStyle style) {
    if (!finite(at))
        throw DomainError("marker position is not finite");
    m_elements.push_back({Kind::marker, {at}, 0.0, 0.0, std::move(style)});
}

std::string SvgPlot::render() const {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    auto extend = [&](double x, double y, double rx, double ry) {
        x_lo = std::min(x_lo, x - rx);
        x_hi = std::max(x_hi, x + rx);
        y_lo = std::min(y_lo, y - ry);
        y_hi = std::max(y_hi, y + ry);
    };
    for (const auto& e : m_elements) {
        for (const auto& p : e.points)
            extend(p[0], p[1], e.rx, e.ry);
    }
    if (m_elements.empty() || !(x_lo <= x_hi)) {
        x_lo = y_lo = -1.0;
        x_hi = y_hi = 1.0;
    }
    if (x_hi - x_lo < 1e-12) {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    if (y_hi - y_lo < 1e-12) {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    const double pad_x = 0.05 * (x_hi - x_lo), pad_y = 0.05 * (y_hi - y_lo);
    x_lo -= pad_x;
    x_hi += pad_x;
    y_lo -= pad_y;
    y_hi += pad_y;

    const double margin = 40.0;
    const double sx = (m_width - 2 * margin) / (x_hi - x_lo);
    const double sy = (m_height - 2 * margin) / (y_hi - y_lo);
    auto px = [&](double x) { return margin + (x - x_lo) * sx; };
    auto py = [&](double y) { return m_height - margin - (y - y_lo) * sy; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(m_width) + "\" height=\"" + num(m_height) +
           "\" viewBox=\"0 0 " + num(m_width) + " " + num(m_height) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(m_width) + "\" height=\"" + num(m_height) + "\" fill=\"#ffffff\"/>\n";
    if (!m_title.empty())
        out += "<title>" + escape(m_title) + "</title>\n";

    // Axes: the frame, plus the zero lines when they fall inside the view.
    out += "<g id=\"axes\" stroke=\"#888888\" stroke-width=\"1\" fill=\"none\">\n";
    out += "<rect x=\"" + num(margin) + "\" y=\"" + num(margin) + "\" width=\"" + num(m_width - 2 * margin) +
           "\" height=\"" + num(m_height - 2 * margin) + "\"/>\n";
    if (x_lo < 0.0 && x_hi > 0.0)
        out += "<line x1=\"" + num(px(0.0)) + "\" y1=\"" + num(margin) + "\" x2=\"" + num(px(0.0)) + "\" y2=\"" +
               num(m_height - margin) + "\"/>\n";
    if (y_lo < 0.0 && y_hi > 0.0)
        out += "<line x1=\"" + num(margin) + "\" y1=\"" + num(py(0.0)) + "\" x2=\"" + num(m_width - margin) +
               "\" y2=\"" + num(py(0.0)) + "\"/>\n";
    out += "</g>\n";
    out += "<g id=\"ticks\" font-family=\"monospace\" font-size=\"10\" fill=\"#444444\">\n";
    out += "<text x=\"" + num(margin) + "\" y=\"" + num(m_height - margin + 14) + "\">" + num(x_lo) + "</text>\n";
    out += "<text x=\"" + num(m_width - margin) + "\" y=\"" + num(m_height - margin + 14) +
           "\" text-anchor=\"end\">" + num(x_hi) + "</text>\n";
    out += "<text x=\"" + num(margin - 4) + "\" y=\"" + num(m_height - margin) + "\" text-anchor=\"end\">" +
           num(y_lo) + "</text>\n";
    out += "<text x=\"" + num(margin - 4) + "\" y=\"" + num(margin + 10) + "\" text-anchor=\"end\">" + num(y_hi) +
           "</text>\n";
    out += "</g>\n";

    out += "<g id=\"data\">\n";
    for (const auto& e : m_elements) {
        switch (e.kind) {
        case Kind::polyline: {
            out += "<polyline points=\"";
            for (std::size_t i = 0; i < e.points.size(); ++i) {
                if (i > 0)
                    out += " ";
                out += num(px(e.points[i][0])) + "," + num(py(e.points[i][1]));
            }
            out += "\"" + style_attrs(e.style) + "/>\n";
            break;
        }
        case Kind::ellipse:
            out += "<ellipse cx=\"" + num(px(e.points[0][0])) + "\" cy=\"" + num(py(e.points[0][1])) + "\" rx=\"" +
                   num(e.rx * sx) + "\" ry=\"" + num(e.ry * sy) + "\"" + style_attrs(e.style) + "/>\n";
            break;
        case Kind::marker:
            out += "<circle cx=\"" + num(px(e.points[0][0])) + "\" cy=\"" + num(py(e.points[0][1])) +
                   "\" r=\"3.000000\"" + style_attrs(e.style) + "/>\n";
            break;
        }
    }
    out += "</g>\n</svg>\n";
    return out;
}

}  // namespace rfedit::harness
