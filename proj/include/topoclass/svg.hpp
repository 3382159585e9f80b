#pragma once

#include <string>
#include <vector>

#include "topoclass/numerics.hpp"

namespace topoclass::svg {

struct Mark {
    double x = 0.0;  // data coordinates
    double y = 0.0;
    double radius = 3.0;  // pixels
    std::string color;
};

// Axis-aligned filled cell in data coordinates (heat maps).
struct Cell {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    std::string color;
};

struct Scene {
    double width = 480.0;
    double height = 480.0;
    std::string title;
    std::vector<std::string> annotations;  // drawn as lines of text under the title
    std::vector<Cell> cells;
    std::vector<Mark> marks;
};

// Colour for class `label`; stable across calls and stages.
std::string label_color(std::size_t label);
// Sequential colour for t in [0, 1] (clamped).
std::string ramp_color(double t);

// Autoscales all cells and marks into the drawing area (aspect ratio kept,
// y up) and returns a standalone SVG document.
std::string render(const Scene& scene);

// Scatter of 1-, 2- or 3-D points coloured by label. 3-D points are drawn
// orthographically on (x, y) with the mark radius encoding z.
Scene scatter(const std::vector<Vector>& points, const std::vector<std::size_t>& labels,
              std::string title);

}  // namespace topoclass::svg
