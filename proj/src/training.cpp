#include "topoclass/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "topoclass/io.hpp"

namespace topoclass {

std::string history_to_csv(const TrainHistory& history) {
    std::ostringstream out;
    out << "epoch,loss,accuracy\n";
    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
        out << (e + 1) << ',' << io::format_double(history.epochs[e].loss) << ','
            << io::format_double(history.epochs[e].accuracy) << '\n';
    }
    return out.str();
}

double cross_entropy(std::span<const double> p, std::size_t label) {
    if (label >= p.size()) {
        throw IndexError("label " + std::to_string(label) + " out of range for " +
                         std::to_string(p.size()) + " classes");
    }
    return -std::log(p[label]);
}

namespace {

// -log softmax(z)[label], via log-sum-exp so it stays finite when the softmax
// probability underflows.
double logit_cross_entropy(std::span<const double> z, std::size_t label) {
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - top);
    return top + std::log(sum) - z[label];
}

// Accumulates d loss / d params for one sample into `grads` (which must be
// shaped like `layers`). Returns the sample loss.
double accumulate_gradients(const std::vector<LayerSpec>& layers, std::span<const double> x,
                            std::size_t label, std::vector<LayerGradient>& grads) {
    const std::size_t depth = layers.size();
    std::vector<Vector> inputs(depth);
    std::vector<Vector> pre(depth);
    Vector a(x.begin(), x.end());
    for (std::size_t l = 0; l < depth; ++l) {
        inputs[l] = a;
        a = apply_layer(layers[l], a, &pre[l]);
    }
    if (label >= a.size()) {
        throw IndexError("label " + std::to_string(label) + " out of range for " +
                         std::to_string(a.size()) + " outputs");
    }
    const double loss = logit_cross_entropy(pre.back(), label);

    // Softmax followed by cross-entropy: d loss / d z = p - onehot(label).
    Vector delta = a;
    delta[label] -= 1.0;
    for (std::size_t l = depth; l-- > 0;) {
        const auto& in = inputs[l];
        auto& g = grads[l];
        for (std::size_t r = 0; r < delta.size(); ++r) {
            g.bias[r] += delta[r];
            auto grow = g.weight.row(r);
            for (std::size_t c = 0; c < in.size(); ++c) grow[c] += delta[r] * in[c];
        }
        if (l == 0) break;
        const auto& w = layers[l].weight;
        Vector back(w.cols(), 0.0);
        for (std::size_t r = 0; r < w.rows(); ++r) {
            const auto wrow = w.row(r);
            for (std::size_t c = 0; c < w.cols(); ++c) back[c] += wrow[c] * delta[r];
        }
        if (layers[l - 1].activation == Activation::ReLU) {
            for (std::size_t c = 0; c < back.size(); ++c)
                if (!(pre[l - 1][c] > 0.0)) back[c] = 0.0;
        }
        delta = std::move(back);
    }
    return loss;
}

std::vector<LayerGradient> zero_gradients(const std::vector<LayerSpec>& layers) {
    std::vector<LayerGradient> grads;
    grads.reserve(layers.size());
    for (const auto& l : layers)
        grads.push_back({Matrix(l.weight.rows(), l.weight.cols()), Vector(l.bias.size(), 0.0)});
    return grads;
}

void require_softmax_head(const Mlp& net) {
    if (!net.ends_in_softmax()) throw ConfigError("network must end in a softmax layer");
}

}  // namespace

std::vector<LayerGradient> gradients(const Mlp& net, std::span<const double> x, std::size_t label) {
    require_softmax_head(net);
    if (x.size() != net.input_dim()) {
        throw DimensionError("input has " + std::to_string(x.size()) +
                             " coordinates, network expects " + std::to_string(net.input_dim()));
    }
    auto grads = zero_gradients(net.layers());
    accumulate_gradients(net.layers(), x, label, grads);
    return grads;
}

double accuracy(const Mlp& net, const LabeledPointCloud& cloud) {
    if (cloud.points.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const auto cls = strict_argmax(forward(net, cloud.points[i]));
        if (cls && *cls == cloud.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(cloud.points.size());
}

double mean_loss(const Mlp& net, const LabeledPointCloud& cloud) {
    require_softmax_head(net);
    double total = 0.0;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        Vector a = cloud.points[i];
        Vector z;
        for (const auto& layer : net.layers()) a = apply_layer(layer, a, &z);
        if (cloud.labels[i] >= z.size()) throw IndexError("label out of range");
        total += logit_cross_entropy(z, cloud.labels[i]);
    }
    return cloud.points.empty() ? 0.0 : total / static_cast<double>(cloud.points.size());
}

TrainResult train(const Mlp& net, const LabeledPointCloud& cloud, const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw ConfigError("epochs must be at least 1");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate))
        throw ConfigError("learning_rate must be positive and finite");
    if (cfg.target_accuracy && !(*cfg.target_accuracy > 0.0 && *cfg.target_accuracy <= 1.0))
        throw ConfigError("target_accuracy must lie in (0, 1]");
    if (!net.ends_in_softmax()) throw ConfigError("network must end in a softmax layer");
    try {
        validate(cloud);
    } catch (const SchemaError& e) {
        throw ConfigError(std::string("invalid training data: ") + e.what());
    }
    if (cloud.dim != net.input_dim()) {
        throw ConfigError("data dimension " + std::to_string(cloud.dim) +
                          " does not match network input " + std::to_string(net.input_dim()));
    }
    if (cloud.class_count != net.output_dim()) {
        throw ConfigError("data has " + std::to_string(cloud.class_count) +
                          " classes but the network has " + std::to_string(net.output_dim()) +
                          " outputs");
    }

    std::vector<LayerSpec> layers = net.layers();
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(cloud.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result{net, {}, false};
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            auto grads = zero_gradients(layers);
            for (std::size_t i = start; i < stop; ++i)
                accumulate_gradients(layers, cloud.points[order[i]], cloud.labels[order[i]], grads);
            const double step = cfg.learning_rate / static_cast<double>(stop - start);
            for (std::size_t l = 0; l < layers.size(); ++l) {
                auto& w = layers[l].weight.entries();
                const auto& gw = grads[l].weight.entries();
                for (std::size_t k = 0; k < w.size(); ++k) w[k] -= step * gw[k];
                for (std::size_t k = 0; k < layers[l].bias.size(); ++k)
                    layers[l].bias[k] -= step * grads[l].bias[k];
            }
        }
        result.net = Mlp(layers);
        EpochStats stats{mean_loss(result.net, cloud), accuracy(result.net, cloud)};
        if (!std::isfinite(stats.loss)) throw NumericalError("training diverged: non-finite loss");
        result.history.epochs.push_back(stats);
        if (cfg.target_accuracy && stats.accuracy >= *cfg.target_accuracy) {
            result.reached_target = true;
            break;
        }
    }
    return result;
}

}  // namespace topoclass
