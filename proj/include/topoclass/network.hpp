#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "topoclass/data.hpp"
#include "topoclass/numerics.hpp"

namespace topoclass {

enum class Activation { ReLU, Softmax, Identity };

std::string_view to_string(Activation a);
// Accepts "relu", "softmax", "identity". Throws SchemaError otherwise.
Activation activation_from_string(std::string_view name);

// One layer function x -> activation(W x + b).
struct LayerSpec {
    Matrix weight;  // out x in
    Vector bias;    // out
    Activation activation = Activation::ReLU;

    std::size_t input_dim() const noexcept { return weight.cols(); }
    std::size_t output_dim() const noexcept { return weight.rows(); }

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

Vector relu(std::span<const double> v);
// exp(v) / sum(exp(v)), evaluated after subtracting max(v). Throws DomainError
// on empty input.
Vector softmax(std::span<const double> v);

// Applies a single layer. Also returns the pre-activation W x + b through
// `pre` when non-null.
Vector apply_layer(const LayerSpec& layer, std::span<const double> x, Vector* pre = nullptr);

// Composition f_L o ... o f_1. Immutable after construction.
class Mlp {
public:
    // Throws DimensionError when consecutive layers do not chain or a bias
    // length differs from its weight's row count, and SpecError when Softmax
    // appears anywhere but the last layer or the list is empty.
    explicit Mlp(std::vector<LayerSpec> layers);

    const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
    std::size_t layer_count() const noexcept { return layers_.size(); }
    std::size_t input_dim() const noexcept { return layers_.front().input_dim(); }
    std::size_t output_dim() const noexcept { return layers_.back().output_dim(); }
    bool ends_in_softmax() const noexcept {
        return layers_.back().activation == Activation::Softmax;
    }

    friend bool operator==(const Mlp&, const Mlp&) = default;

private:
    std::vector<LayerSpec> layers_;
};

// Throws DimensionError when x.size() != net.input_dim().
Vector forward(const Mlp& net, std::span<const double> x);
std::vector<Vector> forward_batch(const Mlp& net, const std::vector<Vector>& xs);

// Index of the strictly largest coordinate, or nullopt when the top two agree
// within `tie_tol`. Shared decision rule for accuracy and Voronoi checks.
inline constexpr double kTieTolerance = 1e-12;
std::optional<std::size_t> strict_argmax(std::span<const double> y, double tie_tol = kTieTolerance);

struct TraceStage {
    std::string name;
    std::vector<Vector> points;

    std::size_t dim() const noexcept { return points.empty() ? 0 : points.front().size(); }
};

// Per-layer images of a labeled batch. stages[0] is the input; with default
// options stages[i] is the output of layer i.
struct ActivationTrace {
    std::vector<TraceStage> stages;
    std::vector<std::size_t> labels;
    std::size_t class_count = 0;

    // Points of stage `s` with label `c`.
    std::vector<Vector> stage_class_points(std::size_t s, std::size_t c) const;
};

struct TraceOptions {
    // Also record W x + b before each activation, as stage "z{i}" preceding "f{i}".
    bool include_pre_activation = false;
};

ActivationTrace forward_trace(const Mlp& net, const LabeledPointCloud& cloud,
                              const TraceOptions& options = {});

// Uniform He-style init in [-sqrt(6/n_in), +sqrt(6/n_in)]; biases start at
// kInitialBias so ReLU units begin active on the origin side.
inline constexpr double kInitialBias = 0.1;
LayerSpec init_layer(std::size_t in, std::size_t out, Activation activation, Rng& rng);

// ReLU hidden layers over widths dims[1..n-2], Softmax final layer.
// dims = {in, h1, ..., out}; needs at least two entries.
Mlp build_mlp(const std::vector<std::size_t>& dims, Rng& rng);

// 2 -> 5 -> 5 -> 2 -> 2 -> 2 (ReLU) followed by a 2 -> 2 softmax layer.
inline const std::vector<std::size_t> kPaperNetDims{2, 5, 5, 2, 2, 2, 2};
Mlp build_paper_net(Rng& rng);

nlohmann::json mlp_to_json(const Mlp& net);
// Throws SchemaError on structural problems (missing keys, bad activation,
// ragged weights) and re-raises Mlp construction errors as SchemaError.
Mlp mlp_from_json(const nlohmann::json& doc);
void save_mlp(const Mlp& net, const std::filesystem::path& path);
Mlp load_mlp(const std::filesystem::path& path);

}  // namespace topoclass
