#pragma once

// Central-difference check of the reverse-mode gradients.

#include <algorithm>
#include <cmath>

#include "topoclass/network.hpp"
#include "topoclass/training.hpp"

namespace gradcheck {

using namespace topoclass;

inline constexpr double kStep = 1e-5;

// |analytic - numeric| / max(1, |analytic|, |numeric|), maximised over every
// weight and bias.
inline double max_relative_error(const Mlp& net, const Vector& x, std::size_t label) {
    const auto analytic = gradients(net, x, label);
    auto layers = net.layers();
    auto loss = [&] { return cross_entropy(forward(Mlp(layers), x), label); };
    auto probe = [&](double& param, double grad) {
        const double saved = param;
        param = saved + kStep;
        const double up = loss();
        param = saved - kStep;
        const double down = loss();
        param = saved;
        const double numeric = (up - down) / (2.0 * kStep);
        return std::abs(grad - numeric) / std::max({1.0, std::abs(grad), std::abs(numeric)});
    };
    double worst = 0.0;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& w = layers[l].weight.entries();
        for (std::size_t i = 0; i < w.size(); ++i)
            worst = std::max(worst, probe(w[i], analytic[l].weight.entries()[i]));
        for (std::size_t i = 0; i < layers[l].bias.size(); ++i)
            worst = std::max(worst, probe(layers[l].bias[i], analytic[l].bias[i]));
    }
    return worst;
}

// Smallest |pre-activation| over the ReLU layers at x. Central differences are
// only meaningful away from the kinks.
inline double kink_margin(const Mlp& net, const Vector& x) {
    double margin = INFINITY;
    Vector h = x;
    for (const auto& l : net.layers()) {
        Vector pre;
        h = apply_layer(l, h, &pre);
        if (l.activation == Activation::ReLU)
            for (double z : pre) margin = std::min(margin, std::abs(z));
    }
    return margin;
}

struct Case {
    Mlp net;
    Vector x;
    std::size_t label;
};

// Random ReLU/softmax net, input and label, redrawn until every pre-activation
// sits at least 1e-3 from a kink.
inline Case random_case(Rng& rng) {
    for (;;) {
        std::vector<std::size_t> dims{1 + rng.below(4)};
        const auto hidden = rng.below(4);
        for (std::size_t i = 0; i < hidden; ++i) dims.push_back(1 + rng.below(6));
        dims.push_back(2 + rng.below(4));
        auto net = build_mlp(dims, rng);
        // Random biases too, so the bias path is exercised away from the init value.
        auto layers = net.layers();
        for (auto& l : layers)
            for (auto& b : l.bias) b = rng.uniform(-0.5, 0.5);
        net = Mlp(layers);
        Vector x(dims[0]);
        for (auto& v : x) v = rng.uniform(-2.0, 2.0);
        if (kink_margin(net, x) < 1e-3) continue;
        return {net, x, static_cast<std::size_t>(rng.below(dims.back()))};
    }
}

}  // namespace gradcheck
