#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topoclass/data.hpp"
#include "topoclass/network.hpp"

namespace topoclass {

struct TrainConfig {
    double learning_rate = 0.05;
    std::size_t epochs = 500;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    // Stop after the first epoch whose training accuracy reaches this value.
    std::optional<double> target_accuracy = 0.999;
};

struct EpochStats {
    double loss = 0.0;      // mean cross-entropy over the cloud after the epoch
    double accuracy = 0.0;  // fraction classified with a strict argmax at the label

    friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;

    friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

// epoch,loss,accuracy with a header row; epochs numbered from 1.
std::string history_to_csv(const TrainHistory& history);

struct LayerGradient {
    Matrix weight;
    Vector bias;
};

// -log p[label]. Throws IndexError when label >= p.size().
double cross_entropy(std::span<const double> p, std::size_t label);

// Reverse-mode gradient of cross_entropy(forward(net, x), label) with respect
// to every weight and bias. The net must end in Softmax (ConfigError
// otherwise); the ReLU derivative at 0 is taken as 0.
std::vector<LayerGradient> gradients(const Mlp& net, std::span<const double> x, std::size_t label);

// Fraction of points whose strict argmax equals the label; ties count as
// wrong.
double accuracy(const Mlp& net, const LabeledPointCloud& cloud);
// Mean cross-entropy over the cloud.
double mean_loss(const Mlp& net, const LabeledPointCloud& cloud);

struct TrainResult {
    Mlp net;
    TrainHistory history;
    bool reached_target = false;
};

// Mini-batch SGD with a fixed learning rate on the mean batch gradient. The
// visiting order is reshuffled each epoch from cfg.seed, so the result is a
// pure function of (net, cloud, cfg). Throws ConfigError for invalid config or
// mismatched net/cloud shapes.
TrainResult train(const Mlp& net, const LabeledPointCloud& cloud, const TrainConfig& cfg);

}  // namespace topoclass
