#include <doctest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "topoclass/training.hpp"

using namespace topoclass;

namespace {

LabeledPointCloud blobs(std::size_t per_class, std::uint64_t seed) {
    Rng rng(seed);
    LabeledPointCloud cloud{2, 2, {}, {}};
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            cloud.points.push_back({(c == 0 ? -2.0 : 2.0) + 0.3 * rng.normal(), 0.3 * rng.normal()});
            cloud.labels.push_back(c);
        }
    return cloud;
}

Mlp zero_softmax(std::size_t in, std::size_t out) {
    return Mlp({LayerSpec{Matrix(out, in), Vector(out, 0.0), Activation::Softmax}});
}

}  // namespace

TEST_CASE("cross entropy") {
    CHECK(cross_entropy(Vector{0.5, 0.5}, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(cross_entropy(Vector{1.0 - 1e-12, 1e-12}, 0) == doctest::Approx(1e-12).epsilon(1e-3));
    CHECK(cross_entropy(Vector{1.0, 0.0}, 0) == 0.0);
    CHECK_THROWS_AS(cross_entropy(Vector{0.5, 0.5}, 2), IndexError);
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const auto p = softmax(Vector{rng.normal(), rng.normal(), rng.normal()});
        CHECK(cross_entropy(p, rng.below(3)) >= 0.0);
    }
}

TEST_CASE("gradient of a zero input through a zero softmax layer") {
    const auto net = zero_softmax(3, 2);
    const auto g = gradients(net, Vector{0, 0, 0}, 0);
    REQUIRE(g.size() == 1);
    for (double w : g[0].weight.entries()) CHECK(w == 0.0);
    CHECK(g[0].bias == Vector{-0.5, 0.5});

    // Only the column of the non-zero coordinate picks up gradient.
    const auto h = gradients(net, Vector{0, 2, 0}, 1);
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(h[0].weight(r, 0) == 0.0);
        CHECK(h[0].weight(r, 2) == 0.0);
        CHECK(h[0].weight(r, 1) != 0.0);
    }
}

TEST_CASE("gradients need a softmax head") {
    const Mlp net({LayerSpec{Matrix::identity(2), Vector{0, 0}, Activation::ReLU}});
    CHECK_THROWS_AS(gradients(net, Vector{1, 1}, 0), ConfigError);
}

TEST_CASE("gradients match central differences") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = gradcheck::random_case(rng);
        CAPTURE(trial);
        CHECK(gradcheck::max_relative_error(c.net, c.x, c.label) < 1e-4);
    }
}

TEST_CASE("relu derivative at zero is zero") {
    // Pre-activation of the hidden unit is exactly 0 at x = 0.
    const Mlp net({LayerSpec{Matrix::from_rows({{1.0}}), Vector{0.0}, Activation::ReLU},
                   LayerSpec{Matrix::from_rows({{1.0}, {-1.0}}), Vector{0.0, 0.0}, Activation::Softmax}});
    const auto g = gradients(net, Vector{0.0}, 0);
    CHECK(g[0].weight(0, 0) == 0.0);
    CHECK(g[0].bias[0] == 0.0);
}

TEST_CASE("duplicating every sample leaves a full-batch step unchanged") {
    // One full-batch step on {a, b} and on {a, a, b, b} uses the same mean gradient.
    Rng rng(9);
    const auto net = build_mlp({2, 4, 2}, rng);
    const LabeledPointCloud single{2, 2, {{0.3, -0.2}, {1.1, 0.7}}, {0, 1}};
    LabeledPointCloud doubled{2, 2, {}, {}};
    for (std::size_t i = 0; i < 2; ++i)
        for (int r = 0; r < 2; ++r) {
            doubled.points.push_back(single.points[i]);
            doubled.labels.push_back(single.labels[i]);
        }
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.target_accuracy.reset();
    cfg.batch_size = 2;
    const auto a = train(net, single, cfg).net;
    cfg.batch_size = 4;
    const auto b = train(net, doubled, cfg).net;
    for (std::size_t l = 0; l < a.layer_count(); ++l) {
        for (std::size_t i = 0; i < a.layers()[l].weight.entries().size(); ++i)
            CHECK(std::abs(a.layers()[l].weight.entries()[i] - b.layers()[l].weight.entries()[i]) < 1e-14);
        for (std::size_t i = 0; i < a.layers()[l].bias.size(); ++i)
            CHECK(std::abs(a.layers()[l].bias[i] - b.layers()[l].bias[i]) < 1e-14);
    }
    CHECK_FALSE(a == net);
}

TEST_CASE("accuracy and the tie rule") {
    const auto cloud = gen_annulus2d(20, 0);
    // Zero weights: every output is (0.5, 0.5), a tie, so nothing counts.
    CHECK(accuracy(zero_softmax(2, 2), cloud) == 0.0);
    CHECK(mean_loss(zero_softmax(2, 2), cloud) == doctest::Approx(std::log(2.0)));

    const LabeledPointCloud two{1, 2, {{-1.0}, {1.0}}, {0, 1}};
    const Mlp perfect({LayerSpec{Matrix::from_rows({{-5.0}, {5.0}}), Vector{0, 0}, Activation::Softmax}});
    CHECK(accuracy(perfect, two) == 1.0);
}

TEST_CASE("train config validation") {
    Rng rng(0);
    const auto net = build_paper_net(rng);
    const auto cloud = gen_annulus2d(10, 0);
    auto cfg = [](auto edit) {
        TrainConfig c;
        edit(c);
        return c;
    };
    CHECK_THROWS_AS(train(net, cloud, cfg([](TrainConfig& c) { c.epochs = 0; })), ConfigError);
    CHECK_THROWS_AS(train(net, cloud, cfg([](TrainConfig& c) { c.batch_size = 0; })), ConfigError);
    CHECK_THROWS_AS(train(net, cloud, cfg([](TrainConfig& c) { c.learning_rate = 0.0; })), ConfigError);
    CHECK_THROWS_AS(train(net, cloud, cfg([](TrainConfig& c) { c.target_accuracy = 1.5; })), ConfigError);

    ShellSpec spec;
    spec.dim = 3;
    spec.samples_per_class = 5;
    CHECK_THROWS_AS(train(net, gen_shells(spec), {}), ConfigError);
    const auto three = gen_concentric(2, shell_bands(ShellSpec{}, 3), 5, 0);
    CHECK_THROWS_AS(train(net, three, {}), ConfigError);
    const Mlp no_head({LayerSpec{Matrix::identity(2), Vector{0, 0}, Activation::Identity}});
    CHECK_THROWS_AS(train(no_head, cloud, {}), ConfigError);
}

TEST_CASE("initial loss on balanced data is near ln 2") {
    // The expectation over initialisations is close to ln 2. Individual draws
    // of the narrow paper net can be far off when a 2-wide layer saturates.
    const auto cloud = gen_annulus2d(200, 3);
    double mean = 0.0;
    int close = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const double loss = mean_loss(build_paper_net(rng), cloud);
        mean += loss / 100.0;
        close += std::abs(loss - std::log(2.0)) < 0.2;
    }
    CHECK(std::abs(mean - std::log(2.0)) < 0.2);
    CHECK(close >= 90);
}

TEST_CASE("separable blobs are learned perfectly unless the net collapses") {
    // A run either separates the blobs within 200 epochs or has a dead 2-wide
    // layer, which leaves a constant classifier.
    int reached = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto cloud = blobs(100, seed);
        Rng rng(seed);
        TrainConfig cfg;
        cfg.epochs = 200;
        cfg.seed = seed;
        cfg.target_accuracy = 1.0;
        const auto result = train(build_paper_net(rng), cloud, cfg);
        CAPTURE(seed);
        CHECK(result.history.epochs.size() <= 200);
        if (result.reached_target) {
            ++reached;
            CHECK(accuracy(result.net, cloud) == 1.0);
        } else {
            CHECK(accuracy(result.net, cloud) <= 0.5);
        }
    }
    CHECK(reached >= 15);
}

TEST_CASE("training is deterministic") {
    const auto cloud = gen_annulus2d(100, 1);
    Rng a(4), b(4);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.seed = 4;
    const auto r1 = train(build_paper_net(a), cloud, cfg);
    const auto r2 = train(build_paper_net(b), cloud, cfg);
    CHECK(r1.history == r2.history);
    CHECK(r1.net == r2.net);
    cfg.seed = 5;
    Rng c(4);
    CHECK_FALSE(train(build_paper_net(c), cloud, cfg).history == r1.history);
}

TEST_CASE("history csv and early stop") {
    const auto cloud = blobs(30, 2);
    Rng rng(2);
    TrainConfig cfg;
    cfg.epochs = 300;
    cfg.target_accuracy = 0.5;
    const auto result = train(build_paper_net(rng), cloud, cfg);
    CHECK(result.reached_target);
    CHECK(result.history.epochs.back().accuracy >= 0.5);
    for (std::size_t i = 0; i + 1 < result.history.epochs.size(); ++i)
        CHECK(result.history.epochs[i].accuracy < 0.5);
    const auto csv = history_to_csv(result.history);
    CHECK(csv.rfind("epoch,loss,accuracy\n1,", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == result.history.epochs.size() + 1);
}
