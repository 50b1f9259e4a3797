#pragma once

#include <string>
#include <vector>

#include "funcmod/dataset.hpp"

namespace funcmod {

// Minimal standalone SVG line/scatter plot, enough for prediction overlays.
class SvgPlot {
public:
    SvgPlot(int width = 720, int height = 440);

    void set_title(const std::string& title);
    void set_axis_labels(const std::string& x_label, const std::string& y_label);
    void add_line(const std::vector<SeriesPoint>& points, const std::string& color,
                  const std::string& label, double stroke_width = 1.5);
    void add_scatter(const std::vector<SeriesPoint>& points, const std::string& color,
                     const std::string& label, double radius = 2.5);

    std::string render() const;
    void save(const std::string& path) const;

private:
    struct Series {
        std::vector<SeriesPoint> points;
        std::string color;
        std::string label;
        double size = 1.5;
        bool scatter = false;
    };
    int width_, height_;
    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

} // namespace funcmod
