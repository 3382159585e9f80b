#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "topoclass/network.hpp"

using namespace topoclass;

namespace {

LayerSpec layer(const std::vector<Vector>& w, Vector b, Activation a) {
    return {Matrix::from_rows(w), std::move(b), a};
}

Mlp random_net(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    Rng rng(seed);
    return build_mlp(dims, rng);
}

}  // namespace

TEST_CASE("relu") {
    CHECK(relu(Vector{-1, 2}) == Vector{0, 2});
    CHECK(relu(Vector{0, 0}) == Vector{0, 0});
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        Vector v{rng.normal(), rng.normal(), rng.normal()};
        const auto r = relu(v);
        CHECK(relu(r) == r);
        for (double x : r) CHECK(x >= 0.0);
    }
}

TEST_CASE("softmax examples") {
    CHECK(softmax(Vector{0, 0}) == Vector{0.5, 0.5});
    // 1 / (1 + e) and e / (1 + e).
    const auto p = softmax(Vector{1, 2});
    const double e = std::exp(1.0);
    CHECK(p[0] == doctest::Approx(1.0 / (1.0 + e)).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(e / (1.0 + e)).epsilon(1e-15));
    CHECK(p[0] == doctest::Approx(0.2689414213699951).epsilon(1e-15));
    CHECK_THROWS_AS(softmax(Vector{}), DomainError);
    const auto big = softmax(Vector{1000, 1000, -1000});
    CHECK(big[0] == doctest::Approx(0.5));
    CHECK(big[2] >= 0.0);
}

TEST_CASE("softmax stays in the open simplex") {
    Rng rng(2);
    for (int i = 0; i < 10000; ++i) {
        Vector v(2 + rng.below(5));
        for (auto& x : v) x = rng.uniform(-50.0, 50.0);
        const auto p = softmax(v);
        double sum = 0.0;
        for (double x : p) {
            REQUIRE(x > 0.0);
            sum += x;
        }
        REQUIRE(std::abs(sum - 1.0) < 1e-12);

        const double shift = rng.uniform(-100.0, 100.0);
        auto w = v;
        for (auto& x : w) x += shift;
        const auto q = softmax(w);
        for (std::size_t j = 0; j < p.size(); ++j) REQUIRE(std::abs(p[j] - q[j]) < 1e-12);
    }
}

TEST_CASE("forward examples") {
    const Mlp id({layer({{1, 0}, {0, 1}}, {0, 0}, Activation::Identity)});
    CHECK(forward(id, Vector{-3, 5}) == Vector{-3, 5});
    const Mlp rl({layer({{1, 0}, {0, 1}}, {0, 0}, Activation::ReLU)});
    CHECK(forward(rl, Vector{-3, 5}) == Vector{0, 5});
    CHECK_THROWS_AS(forward(rl, Vector{1, 2, 3}), DimensionError);

    Rng rng(0);
    const auto net = build_paper_net(rng);
    for (int i = 0; i < 100; ++i) {
        const Vector x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const auto y = forward(net, x);
        REQUIRE(y.size() == 2);
        CHECK(y[0] + y[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(y[0] > 0.0);
        CHECK(y[1] > 0.0);
    }
}

TEST_CASE("paper net shape") {
    Rng rng(8);
    const auto net = build_paper_net(rng);
    REQUIRE(net.layer_count() == 6);
    CHECK(net.layers()[0].weight.rows() == 5);
    CHECK(net.layers()[0].weight.cols() == 2);
    CHECK(net.layers()[2].weight.rows() == 2);
    CHECK(net.layers()[2].weight.cols() == 5);
    CHECK(net.layers()[5].activation == Activation::Softmax);
    for (std::size_t i = 0; i < 5; ++i) CHECK(net.layers()[i].activation == Activation::ReLU);
    for (const auto& l : net.layers()) {
        const double bound = std::sqrt(6.0 / static_cast<double>(l.input_dim()));
        for (double w : l.weight.entries()) CHECK(std::abs(w) <= bound);
        for (double b : l.bias) CHECK(b == kInitialBias);
    }
}

TEST_CASE("mlp validation") {
    const auto sm = layer({{1, 0}, {0, 1}}, {0, 0}, Activation::Softmax);
    const auto rl = layer({{1, 0}, {0, 1}}, {0, 0}, Activation::ReLU);
    CHECK_THROWS_AS(Mlp({}), SpecError);
    CHECK_THROWS_AS(Mlp({sm, rl}), SpecError);
    CHECK_NOTHROW(Mlp({rl, sm}));
    CHECK_THROWS_AS(Mlp({rl, layer({{1, 0, 0}}, {0}, Activation::ReLU)}), DimensionError);
    CHECK_THROWS_AS(Mlp({layer({{1, 0}}, {0, 0}, Activation::ReLU)}), DimensionError);
    CHECK_THROWS_AS(Mlp({layer({{1, NAN}}, {0}, Activation::ReLU)}), DomainError);
    CHECK(activation_from_string("relu") == Activation::ReLU);
    CHECK(to_string(Activation::Softmax) == "softmax");
    CHECK_THROWS_AS(activation_from_string("tanh"), SchemaError);
}

TEST_CASE("forward is deterministic and composes") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> dims{1 + rng.below(5)};
        const auto depth = 1 + rng.below(5);
        for (std::size_t i = 0; i < depth; ++i) dims.push_back(1 + rng.below(6));
        dims.push_back(2 + rng.below(3));
        const auto net = build_mlp(dims, rng);
        Vector x(dims[0]);
        for (auto& v : x) v = rng.uniform(-2, 2);

        const auto y = forward(net, x);
        CHECK(forward(net, x) == y);

        Vector z = x;
        for (const auto& l : net.layers()) z = forward(Mlp({l}), z);
        CHECK(z == y);
    }
}

TEST_CASE("strict argmax") {
    CHECK(strict_argmax(Vector{0.2, 0.7, 0.1}) == std::size_t{1});
    CHECK_FALSE(strict_argmax(Vector{0.5, 0.5}).has_value());
    CHECK_FALSE(strict_argmax(Vector{0.3, 0.3 + 1e-13, 0.1}).has_value());
    CHECK(strict_argmax(Vector{0.3, 0.3 + 1e-9}) == std::size_t{1});
    CHECK(strict_argmax(Vector{4.0}) == std::size_t{0});
}

TEST_CASE("activation trace") {
    Rng rng(12);
    const auto net = build_paper_net(rng);
    const auto cloud = gen_annulus2d(50, 1);
    const auto trace = forward_trace(net, cloud);
    REQUIRE(trace.stages.size() == net.layer_count() + 1);
    std::vector<std::size_t> dims;
    for (const auto& s : trace.stages) {
        dims.push_back(s.dim());
        CHECK(s.points.size() == cloud.size());
    }
    CHECK(dims == std::vector<std::size_t>{2, 5, 5, 2, 2, 2, 2});
    CHECK(trace.stages.front().name == "input");
    CHECK(trace.stages.back().name == "f6");
    CHECK(trace.stages.front().points == cloud.points);
    CHECK(trace.stages.back().points == forward_batch(net, cloud.points));
    CHECK(trace.labels == cloud.labels);
    CHECK(trace.stage_class_points(3, 1).size() == 50);

    const auto full = forward_trace(net, cloud, {.include_pre_activation = true});
    REQUIRE(full.stages.size() == 2 * net.layer_count() + 1);
    CHECK(full.stages[1].name == "z1");
    CHECK(full.stages[2].name == "f1");
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto z = matvec(net.layers()[0].weight, cloud.points[i]);
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += net.layers()[0].bias[j];
        CHECK(full.stages[1].points[i] == z);
        CHECK(full.stages[2].points[i] == relu(z));
    }
}

TEST_CASE("model JSON round trips exactly") {
    const auto dir = oracle::scratch_dir("network_json");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto net = random_net({3, 7, 4, 3}, seed);
        save_mlp(net, dir / "m.json");
        CHECK(load_mlp(dir / "m.json") == net);
    }
    nlohmann::json doc = mlp_to_json(random_net({2, 2}, 1));
    doc["layers"][0]["activation"] = "sigmoid";
    CHECK_THROWS_AS(mlp_from_json(doc), SchemaError);
    doc = mlp_to_json(random_net({2, 3, 2}, 1));
    doc["layers"][0]["activation"] = "softmax";
    CHECK_THROWS_AS(mlp_from_json(doc), SchemaError);
    CHECK_THROWS_AS(mlp_from_json(nlohmann::json::object()), SchemaError);
    doc = mlp_to_json(random_net({2, 3, 2}, 1));
    doc["layers"][0]["weight"][1] = {1.0};
    CHECK_THROWS_AS(mlp_from_json(doc), SchemaError);
}
