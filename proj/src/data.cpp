#include "topoclass/data.hpp"

#include <cmath>
#include <sstream>

#include "topoclass/io.hpp"

namespace topoclass {

std::vector<Vector> LabeledPointCloud::class_points(std::size_t c) const {
    std::vector<Vector> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (labels[i] == c) out.push_back(points[i]);
    return out;
}

std::vector<std::vector<Vector>> LabeledPointCloud::by_class() const {
    std::vector<std::vector<Vector>> out(class_count);
    for (std::size_t i = 0; i < points.size(); ++i) out.at(labels[i]).push_back(points[i]);
    return out;
}

void validate(const LabeledPointCloud& cloud) {
    if (cloud.points.empty()) throw SchemaError("cloud has no points");
    if (cloud.dim == 0) throw SchemaError("cloud dimension must be positive");
    if (cloud.points.size() != cloud.labels.size()) {
        throw SchemaError("cloud has " + std::to_string(cloud.points.size()) + " points but " +
                          std::to_string(cloud.labels.size()) + " labels");
    }
    if (cloud.class_count == 0) throw SchemaError("class_count must be positive");
    std::vector<bool> seen(cloud.class_count, false);
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        if (cloud.points[i].size() != cloud.dim) {
            throw SchemaError("point " + std::to_string(i) + " has dimension " +
                              std::to_string(cloud.points[i].size()) + ", expected " +
                              std::to_string(cloud.dim));
        }
        if (!all_finite(cloud.points[i]))
            throw SchemaError("point " + std::to_string(i) + " has a non-finite coordinate");
        if (cloud.labels[i] >= cloud.class_count) {
            throw SchemaError("label " + std::to_string(cloud.labels[i]) + " of point " +
                              std::to_string(i) + " is not below class_count " +
                              std::to_string(cloud.class_count));
        }
        seen[cloud.labels[i]] = true;
    }
    for (std::size_t c = 0; c < seen.size(); ++c)
        if (!seen[c]) throw SchemaError("class " + std::to_string(c) + " has no points");
}

LabeledPointCloud gen_concentric(std::size_t dim, const std::vector<RadialBand>& bands,
                                 std::size_t samples_per_class, std::uint64_t seed) {
    if (dim == 0) throw SpecError("dimension must be positive");
    if (samples_per_class == 0) throw SpecError("samples_per_class must be positive");
    if (bands.empty()) throw SpecError("at least one radial band is required");
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const auto& b = bands[i];
        if (!std::isfinite(b.min_radius) || !std::isfinite(b.max_radius) || b.min_radius < 0.0 ||
            b.max_radius <= 0.0 || b.min_radius > b.max_radius) {
            throw SpecError("band " + std::to_string(i) + " is not a valid radius interval");
        }
        if (i > 0 && !(bands[i - 1].max_radius < b.min_radius))
            throw SpecError("bands " + std::to_string(i - 1) + " and " + std::to_string(i) +
                            " overlap or are out of order");
    }

    Rng rng(seed);
    LabeledPointCloud cloud;
    cloud.dim = dim;
    cloud.class_count = bands.size();
    cloud.points.reserve(bands.size() * samples_per_class);
    cloud.labels.reserve(bands.size() * samples_per_class);
    Vector x(dim);
    for (std::size_t c = 0; c < bands.size(); ++c) {
        const double lo = bands[c].min_radius;
        const double hi = bands[c].max_radius;
        for (std::size_t s = 0; s < samples_per_class;) {
            if (lo == hi) {
                // Zero-thickness shell: the cube hits the sphere with probability 0,
                // so scale a Gaussian direction (uniform on the sphere) instead.
                for (double& xi : x) xi = rng.normal();
                const double r = norm(x);
                if (r == 0.0) continue;
                for (double& xi : x) xi *= hi / r;
            } else {
                for (double& xi : x) xi = rng.uniform(-hi, hi);
                const double r = norm(x);
                if (r < lo || r > hi) continue;
            }
            cloud.points.push_back(x);
            cloud.labels.push_back(c);
            ++s;
        }
    }
    return cloud;
}

LabeledPointCloud gen_shells(const ShellSpec& spec) {
    if (!(0.0 < spec.inner_max_radius && spec.inner_max_radius < spec.outer_min_radius &&
          spec.outer_min_radius <= spec.outer_max_radius)) {
        throw SpecError("shell radii must satisfy 0 < inner_max < outer_min <= outer_max");
    }
    return gen_concentric(spec.dim, shell_bands(spec, 2), spec.samples_per_class, spec.seed);
}

LabeledPointCloud gen_annulus2d(std::size_t samples_per_class, std::uint64_t seed) {
    ShellSpec spec;
    spec.samples_per_class = samples_per_class;
    spec.seed = seed;
    return gen_shells(spec);
}

std::vector<RadialBand> shell_bands(const ShellSpec& spec, std::size_t classes) {
    std::vector<RadialBand> bands;
    bands.push_back({0.0, spec.inner_max_radius});
    const double step = spec.outer_max_radius - spec.inner_max_radius;
    for (std::size_t j = 1; j < classes; ++j) {
        const double shift = static_cast<double>(j - 1) * step;
        bands.push_back({spec.outer_min_radius + shift, spec.outer_max_radius + shift});
    }
    return bands;
}

nlohmann::json cloud_to_json(const LabeledPointCloud& cloud) {
    nlohmann::json doc;
    doc["dim"] = cloud.dim;
    doc["class_count"] = cloud.class_count;
    doc["points"] = cloud.points;
    doc["labels"] = cloud.labels;
    return doc;
}

namespace {

template <class T>
T require(const nlohmann::json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw SchemaError(std::string("field '") + key + "' has the wrong type");
    }
}

}  // namespace

LabeledPointCloud cloud_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaError("dataset must be a JSON object");
    for (const char* key : {"dim", "class_count"}) {
        if (doc.contains(key) && !doc[key].is_number_unsigned())
            throw SchemaError(std::string("field '") + key + "' must be a non-negative integer");
    }
    if (doc.contains("labels") && doc["labels"].is_array()) {
        for (const auto& l : doc["labels"])
            if (!l.is_number_unsigned()) throw SchemaError("labels must be non-negative integers");
    }
    LabeledPointCloud cloud;
    cloud.dim = require<std::size_t>(doc, "dim");
    cloud.class_count = require<std::size_t>(doc, "class_count");
    cloud.points = require<std::vector<Vector>>(doc, "points");
    cloud.labels = require<std::vector<std::size_t>>(doc, "labels");
    validate(cloud);
    return cloud;
}

void save_cloud(const LabeledPointCloud& cloud, const std::filesystem::path& path) {
    validate(cloud);
    io::write_json(path, cloud_to_json(cloud));
}

LabeledPointCloud load_cloud(const std::filesystem::path& path) {
    return cloud_from_json(io::read_json(path));
}

std::string cloud_to_csv(const LabeledPointCloud& cloud) {
    std::ostringstream out;
    for (std::size_t d = 0; d < cloud.dim; ++d) out << 'x' << d << ',';
    out << "label\n";
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        for (double x : cloud.points[i]) out << io::format_double(x) << ',';
        out << cloud.labels[i] << '\n';
    }
    return out.str();
}

}  // namespace topoclass
