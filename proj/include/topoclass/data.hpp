#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "topoclass/numerics.hpp"

namespace topoclass {

// Finite sample of topologically labeled data: points in R^dim, each with a
// class index in [0, class_count).
struct LabeledPointCloud {
    std::size_t dim = 0;
    std::size_t class_count = 0;
    std::vector<Vector> points;
    std::vector<std::size_t> labels;

    std::size_t size() const noexcept { return points.size(); }

    // Points belonging to class c, in original order.
    std::vector<Vector> class_points(std::size_t c) const;
    // Per-class point lists, indexed by class.
    std::vector<std::vector<Vector>> by_class() const;

    friend bool operator==(const LabeledPointCloud&, const LabeledPointCloud&) = default;
};

// Throws SchemaError describing the first broken invariant: empty cloud,
// length mismatch, wrong point dimension, non-finite coordinate, label out of
// range, or a class with no points.
void validate(const LabeledPointCloud& cloud);

// Two-class ball/shell geometry. Class 0 fills the ball ||x|| <= inner_max_radius;
// class 1 fills the shell outer_min_radius <= ||x|| <= outer_max_radius.
struct ShellSpec {
    std::size_t dim = 2;
    double inner_max_radius = 0.9;
    double outer_min_radius = 1.0;
    double outer_max_radius = 2.0;
    std::size_t samples_per_class = 500;
    std::uint64_t seed = 0;
};

// Radial band [min_radius, max_radius] holding one class.
struct RadialBand {
    double min_radius = 0.0;
    double max_radius = 0.0;
};

// Uniform samples from nested radial bands, class i drawn from bands[i]. Bands
// must be non-empty, strictly increasing and pairwise disjoint. Sampling is
// rejection from the enclosing cube, so norms respect the bands exactly; a
// zero-thickness band is sampled on its sphere directly.
LabeledPointCloud gen_concentric(std::size_t dim, const std::vector<RadialBand>& bands,
                                 std::size_t samples_per_class, std::uint64_t seed);

LabeledPointCloud gen_shells(const ShellSpec& spec);

// gen_shells with dim 2 and radii 0.9 / [1, 2].
LabeledPointCloud gen_annulus2d(std::size_t samples_per_class, std::uint64_t seed);

// Bands for `classes` nested classes continuing the ball/shell pattern: class 0
// is the inner ball, class j >= 1 is the outer shell shifted outward by
// (j - 1) * (outer_max - inner_max).
std::vector<RadialBand> shell_bands(const ShellSpec& spec, std::size_t classes);

nlohmann::json cloud_to_json(const LabeledPointCloud& cloud);
// Throws SchemaError when the document has the wrong shape or breaks an
// invariant.
LabeledPointCloud cloud_from_json(const nlohmann::json& doc);

void save_cloud(const LabeledPointCloud& cloud, const std::filesystem::path& path);
// Throws ParseError (with line/column) on malformed JSON, SchemaError on
// invariant violations, and Error when the file cannot be opened.
LabeledPointCloud load_cloud(const std::filesystem::path& path);

// CSV with header x0,...,x{dim-1},label.
std::string cloud_to_csv(const LabeledPointCloud& cloud);

}  // namespace topoclass
