#include "topoclass/network.hpp"

#include <algorithm>
#include <cmath>

#include "topoclass/io.hpp"

namespace topoclass {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::ReLU: return "relu";
        case Activation::Softmax: return "softmax";
        case Activation::Identity: return "identity";
    }
    return "unknown";
}

Activation activation_from_string(std::string_view name) {
    if (name == "relu") return Activation::ReLU;
    if (name == "softmax") return Activation::Softmax;
    if (name == "identity") return Activation::Identity;
    throw SchemaError("unknown activation '" + std::string(name) + "'");
}

Vector relu(std::span<const double> v) {
    Vector out(v.begin(), v.end());
    for (double& x : out) x = x > 0.0 ? x : 0.0;
    return out;
}

Vector softmax(std::span<const double> v) {
    if (v.empty()) throw DomainError("softmax of an empty vector");
    const double top = *std::max_element(v.begin(), v.end());
    Vector out(v.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - top);
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

Vector apply_layer(const LayerSpec& layer, std::span<const double> x, Vector* pre) {
    Vector z = matvec(layer.weight, x);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += layer.bias[i];
    if (pre) *pre = z;
    switch (layer.activation) {
        case Activation::ReLU: return relu(z);
        case Activation::Softmax: return softmax(z);
        case Activation::Identity: return z;
    }
    return z;
}

Mlp::Mlp(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw SpecError("network needs at least one layer");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& l = layers_[i];
        if (l.weight.rows() == 0 || l.weight.cols() == 0)
            throw DimensionError("layer " + std::to_string(i + 1) + " has an empty weight matrix");
        if (l.bias.size() != l.weight.rows()) {
            throw DimensionError("layer " + std::to_string(i + 1) + " bias has length " +
                                 std::to_string(l.bias.size()) + ", weight has " +
                                 std::to_string(l.weight.rows()) + " rows");
        }
        if (!all_finite(l.weight.entries()) || !all_finite(l.bias))
            throw DomainError("layer " + std::to_string(i + 1) + " has non-finite parameters");
        if (l.activation == Activation::Softmax && i + 1 != layers_.size())
            throw SpecError("softmax is only allowed as the final layer");
        if (i > 0 && layers_[i - 1].output_dim() != l.input_dim()) {
            throw DimensionError("layer " + std::to_string(i) + " outputs " +
                                 std::to_string(layers_[i - 1].output_dim()) + " values but layer " +
                                 std::to_string(i + 1) + " expects " +
                                 std::to_string(l.input_dim()));
        }
    }
}

Vector forward(const Mlp& net, std::span<const double> x) {
    if (x.size() != net.input_dim()) {
        throw DimensionError("input has " + std::to_string(x.size()) + " coordinates, network expects " +
                             std::to_string(net.input_dim()));
    }
    Vector a(x.begin(), x.end());
    for (const auto& layer : net.layers()) a = apply_layer(layer, a);
    return a;
}

std::vector<Vector> forward_batch(const Mlp& net, const std::vector<Vector>& xs) {
    std::vector<Vector> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(forward(net, x));
    return out;
}

std::optional<std::size_t> strict_argmax(std::span<const double> y, double tie_tol) {
    if (y.empty()) return std::nullopt;
    std::size_t best = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] > y[best]) best = i;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (i != best && y[best] - y[i] <= tie_tol) return std::nullopt;
    return best;
}

std::vector<Vector> ActivationTrace::stage_class_points(std::size_t s, std::size_t c) const {
    std::vector<Vector> out;
    const auto& pts = stages.at(s).points;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (labels[i] == c) out.push_back(pts[i]);
    return out;
}

ActivationTrace forward_trace(const Mlp& net, const LabeledPointCloud& cloud,
                              const TraceOptions& options) {
    if (cloud.dim != net.input_dim()) {
        throw DimensionError("cloud dimension " + std::to_string(cloud.dim) +
                             " does not match network input " + std::to_string(net.input_dim()));
    }
    ActivationTrace trace;
    trace.labels = cloud.labels;
    trace.class_count = cloud.class_count;
    trace.stages.push_back({"input", cloud.points});
    std::vector<Vector> current = cloud.points;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto& layer = net.layers()[l];
        TraceStage pre{"z" + std::to_string(l + 1), {}};
        TraceStage post{"f" + std::to_string(l + 1), {}};
        post.points.reserve(current.size());
        for (const auto& x : current) {
            Vector z;
            post.points.push_back(apply_layer(layer, x, &z));
            if (options.include_pre_activation) pre.points.push_back(std::move(z));
        }
        if (options.include_pre_activation) trace.stages.push_back(std::move(pre));
        current = post.points;
        trace.stages.push_back(std::move(post));
    }
    return trace;
}

LayerSpec init_layer(std::size_t in, std::size_t out, Activation activation, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(in));
    LayerSpec layer{Matrix(out, in), Vector(out, kInitialBias), activation};
    for (double& w : layer.weight.entries()) w = rng.uniform(-bound, bound);
    return layer;
}

Mlp build_mlp(const std::vector<std::size_t>& dims, Rng& rng) {
    if (dims.size() < 2) throw SpecError("architecture needs an input and an output dimension");
    for (std::size_t d : dims)
        if (d == 0) throw SpecError("layer dimensions must be positive");
    std::vector<LayerSpec> layers;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const bool last = i + 2 == dims.size();
        layers.push_back(
            init_layer(dims[i], dims[i + 1], last ? Activation::Softmax : Activation::ReLU, rng));
    }
    return Mlp(std::move(layers));
}

Mlp build_paper_net(Rng& rng) { return build_mlp(kPaperNetDims, rng); }

nlohmann::json mlp_to_json(const Mlp& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers()) {
        nlohmann::json weight = nlohmann::json::array();
        for (std::size_t r = 0; r < l.weight.rows(); ++r) {
            const auto row = l.weight.row(r);
            weight.push_back(Vector(row.begin(), row.end()));
        }
        layers.push_back({{"activation", to_string(l.activation)}, {"weight", weight}, {"bias", l.bias}});
    }
    return {{"layers", layers}};
}

Mlp mlp_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array())
        throw SchemaError("model must be an object with a 'layers' array");
    std::vector<LayerSpec> layers;
    std::size_t index = 0;
    for (const auto& entry : doc["layers"]) {
        ++index;
        const std::string where = "layer " + std::to_string(index);
        if (!entry.is_object() || !entry.contains("activation") || !entry.contains("weight") ||
            !entry.contains("bias")) {
            throw SchemaError(where + " needs 'activation', 'weight' and 'bias'");
        }
        if (!entry["activation"].is_string()) throw SchemaError(where + " activation must be a string");
        LayerSpec layer;
        layer.activation = activation_from_string(entry["activation"].get<std::string>());
        try {
            layer.weight = Matrix::from_rows(entry["weight"].get<std::vector<Vector>>());
            layer.bias = entry["bias"].get<Vector>();
        } catch (const nlohmann::json::exception&) {
            throw SchemaError(where + " weight/bias must be numeric arrays");
        } catch (const DimensionError& e) {
            throw SchemaError(where + ": " + e.what());
        }
        layers.push_back(std::move(layer));
    }
    try {
        return Mlp(std::move(layers));
    } catch (const Error& e) {
        throw SchemaError(std::string("invalid model: ") + e.what());
    }
}

void save_mlp(const Mlp& net, const std::filesystem::path& path) {
    io::write_json(path, mlp_to_json(net));
}

Mlp load_mlp(const std::filesystem::path& path) { return mlp_from_json(io::read_json(path)); }

}  // namespace topoclass
