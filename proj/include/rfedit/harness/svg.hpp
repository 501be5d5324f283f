#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace rfedit::harness {

using Point2 = std::array<double, 2>;

struct SvgStyle {
    std::string stroke = "#000000";
    double width = 1.0;
    bool dashed = false;
    std::string fill = "none";
};

/// Minimal 2-D plot writer. Elements render in insertion order and every number is printed
/// with a fixed format, so equal inputs give byte-identical documents.
class SvgPlot {
public:
    explicit SvgPlot(double width = 640.0, double height = 480.0);

    void set_title(std::string title) { m_title = std::move(title); }
    void add_polyline(std::vector<Point2> points, SvgStyle style);
    /// Axis-aligned ellipse with radii in data units.
    void add_ellipse(Point2 center, double rx, double ry, SvgStyle style);
    /// Dot of fixed pixel radius.
    void add_marker(Point2 at, SvgStyle style);

    std::size_t size() const noexcept { return m_elements.size(); }

    /// Data bounds padded by 5%; [-1, 1] on both axes when nothing was added.
    std::string render() const;

private:
    enum class Kind { polyline, ellipse, marker };
    struct Element {
        Kind kind;
        std::vector<Point2> points;  // polyline vertices, or the centre
        double rx = 0.0;
        double ry = 0.0;
        SvgStyle style;
    };

    double m_width;
    double m_height;
    std::string m_title;
    std::vector<Element> m_elements;
};

}  // namespace rfedit::harness
