#include "topoclass/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace topoclass::svg {

namespace {

constexpr std::array<const char*, 8> kPalette{"#440154", "#fde725", "#21918c", "#e6550d",
                                              "#3b528b", "#5ec962", "#c51b8a", "#636363"};

struct Rgb {
    double r, g, b;
};
constexpr std::array<Rgb, 5> kRamp{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
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

}  // namespace

std::string label_color(std::size_t label) { return kPalette[label % kPalette.size()]; }

std::string ramp_color(double t) {
    if (!std::isfinite(t)) t = 0.0;
    t = std::clamp(t, 0.0, 1.0) * static_cast<double>(kRamp.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(t), kRamp.size() - 2);
    const double f = t - static_cast<double>(i);
    auto mix = [&](double a, double b) { return static_cast<int>(std::lround(a + f * (b - a))); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(kRamp[i].r, kRamp[i + 1].r),
                  mix(kRamp[i].g, kRamp[i + 1].g), mix(kRamp[i].b, kRamp[i + 1].b));
    return buf;
}

std::string render(const Scene& scene) {
    constexpr double kMargin = 12.0;
    const double header = 22.0 + 14.0 * static_cast<double>(scene.annotations.size());

    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
    double lo_y = lo_x, hi_y = -lo_x;
    double max_radius = 0.0;
    auto grow = [&](double x, double y) {
        lo_x = std::min(lo_x, x);
        hi_x = std::max(hi_x, x);
        lo_y = std::min(lo_y, y);
        hi_y = std::max(hi_y, y);
    };
    for (const auto& c : scene.cells) {
        grow(c.x0, c.y0);
        grow(c.x1, c.y1);
    }
    for (const auto& m : scene.marks) {
        grow(m.x, m.y);
        max_radius = std::max(max_radius, m.radius);
    }
    if (!std::isfinite(lo_x)) lo_x = hi_x = lo_y = hi_y = 0.0;
    // Degenerate extents (a collapsed cloud) are widened so the point lands mid-plot.
    const double span_x = std::max(hi_x - lo_x, 1e-9);
    const double span_y = std::max(hi_y - lo_y, 1e-9);

    const double pad = kMargin + max_radius;
    const double avail_w = std::max(1.0, scene.width - 2.0 * pad);
    const double avail_h = std::max(1.0, scene.height - header - 2.0 * pad);
    const double scale = std::min(avail_w / span_x, avail_h / span_y);
    const double off_x = pad + 0.5 * (avail_w - scale * span_x);
    const double off_y = header + pad + 0.5 * (avail_h - scale * span_y);
    auto px = [&](double x) { return off_x + (x - lo_x) * scale; };
    auto py = [&](double y) { return off_y + (hi_y - y) * scale; };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(scene.width) << "\" height=\""
        << num(scene.height) << "\" viewBox=\"0 0 " << num(scene.width) << ' ' << num(scene.height)
        << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(scene.width) << "\" height=\"" << num(scene.height)
        << "\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"" << num(kMargin) << "\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape(scene.title) << "</text>\n";
    for (std::size_t i = 0; i < scene.annotations.size(); ++i) {
        out << "<text x=\"" << num(kMargin) << "\" y=\"" << num(30.0 + 14.0 * static_cast<double>(i))
            << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#444444\">" << escape(scene.annotations[i])
            << "</text>\n";
    }
    if (!scene.cells.empty()) {
        out << "<g shape-rendering=\"crispEdges\">\n";
        for (const auto& c : scene.cells) {
            const double x = px(std::min(c.x0, c.x1));
            const double y = py(std::max(c.y0, c.y1));
            out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
                << num(std::abs(c.x1 - c.x0) * scale) << "\" height=\"" << num(std::abs(c.y1 - c.y0) * scale)
                << "\" fill=\"" << c.color << "\"/>\n";
        }
        out << "</g>\n";
    }
    out << "<g stroke=\"#000000\" stroke-width=\"0.3\" fill-opacity=\"0.85\">\n";
    for (const auto& m : scene.marks) {
        out << "<circle cx=\"" << num(px(m.x)) << "\" cy=\"" << num(py(m.y)) << "\" r=\"" << num(m.radius)
            << "\" fill=\"" << m.color << "\"/>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

Scene scatter(const std::vector<Vector>& points, const std::vector<std::size_t>& labels, std::string title) {
    Scene scene;
    scene.title = std::move(title);
    double lo_z = std::numeric_limits<double>::infinity(), hi_z = -lo_z;
    for (const auto& p : points)
        if (p.size() >= 3) {
            lo_z = std::min(lo_z, p[2]);
            hi_z = std::max(hi_z, p[2]);
        }
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        Mark m;
        m.x = p.empty() ? 0.0 : p[0];
        m.y = p.size() >= 2 ? p[1] : 0.0;
        m.radius = 2.5;
        if (p.size() >= 3) {
            const double t = hi_z > lo_z ? (p[2] - lo_z) / (hi_z - lo_z) : 0.5;
            m.radius = 1.5 + 3.0 * t;
        }
        m.color = label_color(i < labels.size() ? labels[i] : 0);
        scene.marks.push_back(std::move(m));
    }
    return scene;
}

}  // namespace topoclass::svg
