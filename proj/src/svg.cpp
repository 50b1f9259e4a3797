#include "funcmod/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "funcmod/csv.hpp"
#include "funcmod/errors.hpp"

namespace funcmod {

SvgPlot::SvgPlot(int width, int height) : width_(width), height_(height) {}

void SvgPlot::set_title(const std::string& title) { title_ = title; }

void SvgPlot::set_axis_labels(const std::string& x_label, const std::string& y_label) {
    x_label_ = x_label;
    y_label_ = y_label;
}

void SvgPlot::add_line(const std::vector<SeriesPoint>& points, const std::string& color,
                       const std::string& label, double stroke_width) {
    series_.push_back({points, color, label, stroke_width, false});
}

void SvgPlot::add_scatter(const std::vector<SeriesPoint>& points, const std::string& color,
                          const std::string& label, double radius) {
    series_.push_back({points, color, label, radius, true});
}

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

// round value to a "nice" tick step
double nice_step(double span) {
    if (span <= 0) return 1.0;
    double raw = span / 6.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step = norm < 1.5 ? 1.0 : (norm < 3.5 ? 2.0 : (norm < 7.5 ? 5.0 : 10.0));
    return step * mag;
}

} // namespace

std::string SvgPlot::render() const {
    const double ml = 62, mr = 16, mt = title_.empty() ? 16 : 34, mb = 44;
    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
    double lo_y = lo_x, hi_y = -lo_x;
    for (const auto& s : series_) {
        for (const auto& p : s.points) {
            lo_x = std::min(lo_x, p.x);
            hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_y = std::max(hi_y, p.y);
        }
    }
    if (!(lo_x < hi_x)) { lo_x -= 0.5; hi_x += 0.5; }
    if (!(lo_y < hi_y)) { lo_y -= 0.5; hi_y += 0.5; }
    double pad_y = 0.05 * (hi_y - lo_y);
    lo_y -= pad_y;
    hi_y += pad_y;

    double pw = width_ - ml - mr, ph = height_ - mt - mb;
    auto sx = [&](double x) { return ml + (x - lo_x) / (hi_x - lo_x) * pw; };
    auto sy = [&](double y) { return mt + ph - (y - lo_y) / (hi_y - lo_y) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
        << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title_.empty())
        out << "<text x=\"" << width_ / 2 << "\" y=\"20\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"14\">" << title_ << "</text>\n";

    // axes + ticks
    out << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#333\">\n";
    double step_x = nice_step(hi_x - lo_x);
    for (double t = std::ceil(lo_x / step_x) * step_x; t <= hi_x + 1e-9; t += step_x) {
        out << "<line x1=\"" << fmt(sx(t)) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(sx(t))
            << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#eee\"/>\n";
        out << "<text x=\"" << fmt(sx(t)) << "\" y=\"" << fmt(mt + ph + 14)
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    double step_y = nice_step(hi_y - lo_y);
    for (double t = std::ceil(lo_y / step_y) * step_y; t <= hi_y + 1e-9; t += step_y) {
        out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(sy(t)) << "\" x2=\"" << fmt(ml + pw)
            << "\" y2=\"" << fmt(sy(t)) << "\" stroke=\"#eee\"/>\n";
        out << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(sy(t) + 3)
            << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    out << "</g>\n";
    out << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
        << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#777\"/>\n";

    for (const auto& s : series_) {
        if (s.scatter) {
            out << "<g fill=\"" << s.color << "\">\n";
            for (const auto& p : s.points)
                out << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.y)) << "\" r=\""
                    << fmt(s.size) << "\"/>\n";
            out << "</g>\n";
        } else if (!s.points.empty()) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
                << fmt(s.size) << "\" points=\"";
            for (const auto& p : s.points) out << fmt(sx(p.x)) << "," << fmt(sy(p.y)) << " ";
            out << "\"/>\n";
        }
    }

    // legend
    double ly = mt + 12;
    out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (const auto& s : series_) {
        if (s.label.empty()) continue;
        out << "<rect x=\"" << fmt(ml + 8) << "\" y=\"" << fmt(ly - 8)
            << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
        out << "<text x=\"" << fmt(ml + 22) << "\" y=\"" << fmt(ly + 1) << "\">" << s.label
            << "</text>\n";
        ly += 15;
    }
    out << "</g>\n";

    if (!x_label_.empty())
        out << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(height_ - 8)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label_
            << "</text>\n";
    if (!y_label_.empty())
        out << "<text x=\"14\" y=\"" << fmt(mt + ph / 2)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            << "transform=\"rotate(-90 14 " << fmt(mt + ph / 2) << ")\">" << y_label_
            << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

void SvgPlot::save(const std::string& path) const { write_file_atomic(path, render()); }

} // namespace funcmod
