#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "topoclass/isomap.hpp"

using namespace topoclass;

namespace {

std::vector<Vector> random_points(Rng& rng, std::size_t n, std::size_t dim) {
    std::vector<Vector> pts(n, Vector(dim));
    for (auto& p : pts)
        for (auto& x : p) x = rng.uniform(-1.0, 1.0);
    return pts;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
    return m;
}

// Random connected graph with small integer weights: a random spanning tree
// plus extra edges. Integer weights make every path sum exact.
std::vector<std::tuple<std::size_t, std::size_t, double>> random_graph_edges(Rng& rng, std::size_t n) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t v = 1; v < n; ++v)
        edges.emplace_back(v, rng.below(v), static_cast<double>(1 + rng.below(20)));
    const auto extra = rng.below(3 * n);
    for (std::size_t e = 0; e < extra; ++e) {
        const auto a = rng.below(n), b = rng.below(n);
        if (a != b) edges.emplace_back(a, b, static_cast<double>(1 + rng.below(20)));
    }
    return edges;
}

}  // namespace

TEST_CASE("neighbor graph basics") {
    NeighborGraph g(4);
    g.add_edge(0, 1, 2.0);
    g.add_edge(1, 0, 1.5);
    g.add_edge(2, 3, 1.0);
    CHECK(g.edge_count() == 2);
    CHECK(g.weight(0, 1) == 1.5);
    CHECK(g.weight(1, 0) == 1.5);
    CHECK_FALSE(g.weight(0, 2).has_value());
    CHECK(g.components() == std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}});
    CHECK_THROWS_AS(g.add_edge(1, 1, 1.0), SpecError);
    CHECK_THROWS_AS(g.add_edge(0, 1, 0.0), SpecError);
    CHECK_THROWS_AS(g.add_edge(0, 1, -1.0), SpecError);
    CHECK_THROWS_AS(g.add_edge(0, 9, 1.0), SpecError);
    const auto sub = g.induced({3, 2});
    CHECK(sub.node_count() == 2);
    CHECK(sub.weight(0, 1) == 1.0);
}

TEST_CASE("knn graph examples") {
    const std::vector<Vector> line{{0.0}, {1.0}, {2.0}};
    const auto path = knn_graph(line, 1);
    CHECK(path.edge_count() == 2);
    CHECK(path.weight(0, 1) == 1.0);
    CHECK(path.weight(1, 2) == 1.0);
    CHECK_FALSE(path.weight(0, 2).has_value());

    Rng rng(1);
    const auto pts = random_points(rng, 8, 3);
    const auto complete = knn_graph(pts, 7);
    CHECK(complete.edge_count() == 28);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = i + 1; j < 8; ++j) CHECK(complete.weight(i, j) == distance(pts[i], pts[j]));

    CHECK_THROWS_AS(knn_graph(line, 0), SpecError);
    CHECK_THROWS_AS(knn_graph(line, 3), SpecError);

    const auto dup = knn_graph({{1.0, 1.0}, {1.0, 1.0}, {5.0, 5.0}}, 1);
    CHECK(dup.weight(0, 1) == kZeroDistanceWeight);
}

TEST_CASE("knn graph is symmetric and contains each point's k nearest") {
    Rng rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = 5 + rng.below(30);
        const auto k = 1 + rng.below(4);
        const auto pts = random_points(rng, n, 2);
        const auto g = knn_graph(pts, k);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& e : g.neighbors(i)) {
                CHECK(e.to != i);
                CHECK(e.weight > 0.0);
                CHECK(g.weight(e.to, i) == e.weight);
            }
            std::vector<double> d;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) d.push_back(distance(pts[i], pts[j]));
            std::sort(d.begin(), d.end());
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && distance(pts[i], pts[j]) < d[k - 1]) CHECK(g.weight(i, j).has_value());
        }
    }
}

TEST_CASE("geodesic examples") {
    NeighborGraph path(3);
    path.add_edge(0, 1, 1.0);
    path.add_edge(1, 2, 1.0);
    const auto d = geodesic_distances(path);
    CHECK(d(0, 2) == 2.0);
    CHECK(d(2, 0) == 2.0);
    CHECK(d(1, 1) == 0.0);

    Rng rng(3);
    const auto pts = random_points(rng, 12, 3);
    CHECK(max_abs_diff(geodesic_distances(knn_graph(pts, 11)), euclidean_distances(pts)) == 0.0);

    NeighborGraph split(4);
    split.add_edge(0, 2, 1.0);
    split.add_edge(1, 3, 1.0);
    try {
        geodesic_distances(split);
        FAIL("expected DisconnectedError");
    } catch (const DisconnectedError& e) {
        CHECK(e.components() == std::vector<std::vector<std::size_t>>{{0, 2}, {1, 3}});
    }
}

TEST_CASE("geodesics match floyd-warshall exactly") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 30;
        const auto edges = random_graph_edges(rng, n);
        NeighborGraph g(n);
        for (auto [a, b, w] : edges) g.add_edge(a, b, w);
        CHECK(geodesic_distances(g) == oracle::floyd_warshall(n, edges));
    }
}

TEST_CASE("geodesics dominate straight lines") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pts = random_points(rng, 60, 3);
        const auto g = knn_graph(pts, 8);
        if (g.components().size() != 1) continue;
        const auto geo = geodesic_distances(g);
        const auto euc = euclidean_distances(pts);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j) {
                REQUIRE(geo(i, j) >= euc(i, j) * (1.0 - 1e-12));
                REQUIRE(geo(i, j) == geo(j, i));
            }
    }
}

TEST_CASE("mds examples") {
    auto r = classical_mds(Matrix::from_rows({{0, 4}, {4, 0}}), 1);
    REQUIRE(r.coordinates.size() == 2);
    CHECK(std::abs(r.coordinates[0][0]) == doctest::Approx(2.0));
    CHECK(r.coordinates[0][0] == doctest::Approx(-r.coordinates[1][0]));

    const std::vector<Vector> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    r = classical_mds(euclidean_distances(square), 2);
    CHECK(r.stress < 1e-9);
    CHECK_FALSE(r.clamped_negative);

    CHECK_THROWS_AS(classical_mds(Matrix::from_rows({{0, 1}, {2, 0}}), 1), DomainError);
    CHECK_THROWS_AS(classical_mds(Matrix::from_rows({{0, -1}, {-1, 0}}), 1), DomainError);
    CHECK_THROWS_AS(classical_mds(Matrix::from_rows({{1, 1}, {1, 0}}), 1), DomainError);
    CHECK_THROWS_AS(classical_mds(Matrix(2, 3), 1), DomainError);
    CHECK_THROWS_AS(classical_mds(Matrix::from_rows({{0, NAN}, {NAN, 0}}), 1), DomainError);
}

TEST_CASE("mds recovers euclidean configurations") {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = 4 + rng.below(47);
        const auto pts = random_points(rng, n, 3);
        const auto d = euclidean_distances(pts);
        const auto r = classical_mds(d, 3);
        REQUIRE(r.coordinates.size() == n);
        const auto back = euclidean_distances(r.coordinates);
        CHECK(max_abs_diff(back, d) < 1e-6);
        for (std::size_t c = 0; c < 3; ++c) {
            double mean = 0.0;
            for (const auto& p : r.coordinates) mean += p[c];
            CHECK(std::abs(mean / static_cast<double>(n)) < 1e-9);
        }
        for (double v : r.eigenvalues) CHECK(v >= 0.0);
    }
    // Planar sets are exact in two dimensions.
    for (int trial = 0; trial < 10; ++trial) {
        const auto pts = random_points(rng, 5 + rng.below(40), 2);
        CHECK(classical_mds(euclidean_distances(pts), 2).stress < 1e-9);
    }
}

TEST_CASE("non-euclidean input is clamped and flagged") {
    // Star metric: three leaves 1 from a hub and 2 from each other would all
    // have to be antipodal about the hub, which no Euclidean space allows.
    Matrix d(4, 4, 2.0);
    for (std::size_t i = 0; i < 4; ++i) d(i, i) = 0.0;
    for (std::size_t i = 1; i < 4; ++i) d(0, i) = d(i, 0) = 1.0;
    const auto r = classical_mds(d, 3);
    CHECK(r.negative_eigenvalue_count > 0);
    for (double v : r.eigenvalues) CHECK(v >= 0.0);
}

TEST_CASE("isomap on planar data with a complete graph") {
    Rng rng(7);
    const auto pts = random_points(rng, 40, 2);
    const auto r = isomap(pts, {.neighbors = 39, .target_dim = 2});
    CHECK(max_abs_diff(euclidean_distances(r.coordinates), euclidean_distances(pts)) < 1e-6);
    CHECK(r.neighbors == 39);
    CHECK(r.kept_indices.size() == 40);
}

TEST_CASE("isomap unrolls a curve and is permutation invariant") {
    std::vector<Vector> arc;
    for (int i = 0; i < 50; ++i) {
        const double t = 0.05 * i;
        arc.push_back({std::cos(t), std::sin(t), 0.3 * t, 0.0, 0.1});
    }
    const auto r = isomap(arc, {.neighbors = 2, .target_dim = 3});
    REQUIRE(r.coordinates.size() == 50);
    CHECK(r.coordinates[0].size() == 3);
    // Interior points link only to their two neighbours on the helix; each end
    // point also reaches its second neighbour, a slightly shorter chord.
    auto chord = [](double dt) { return std::sqrt(2.0 * (1.0 - std::cos(dt)) + 0.09 * dt * dt); };
    const double along = 2.0 * chord(0.1) + 45.0 * chord(0.05);
    CHECK(geodesic_distances(knn_graph(arc, 2))(0, 49) == doctest::Approx(along).epsilon(1e-12));
    CHECK(distance(r.coordinates.front(), r.coordinates.back()) == doctest::Approx(along).epsilon(1e-3));

    std::vector<std::size_t> perm(50);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(8);
    rng.shuffle(perm);
    std::vector<Vector> shuffled;
    for (auto i : perm) shuffled.push_back(arc[i]);
    const auto s = isomap(shuffled, {.neighbors = 2, .target_dim = 3});
    const auto d1 = euclidean_distances(r.coordinates);
    const auto d2 = euclidean_distances(s.coordinates);
    for (std::size_t a = 0; a < 50; ++a)
        for (std::size_t b = 0; b < 50; ++b) CHECK(std::abs(d2(a, b) - d1(perm[a], perm[b])) < 1e-6);

    CHECK(isomap(arc, {.neighbors = 2, .target_dim = 3}).coordinates == r.coordinates);
}

TEST_CASE("isomap disconnected handling") {
    std::vector<Vector> pts;
    for (int i = 0; i < 10; ++i) pts.push_back({0.1 * i, 0.0});
    for (int i = 0; i < 6; ++i) pts.push_back({100.0 + 0.1 * i, 0.0});
    CHECK_THROWS_AS(isomap(pts, {.neighbors = 2, .target_dim = 2}), DisconnectedError);
    const auto r = isomap(pts, {.neighbors = 2, .target_dim = 2, .restrict_to_largest_component = true});
    CHECK(r.kept_indices.size() == 10);
    CHECK(r.kept_indices.front() == 0);
    CHECK(r.coordinates.size() == 10);
}

TEST_CASE("embedding serialization") {
    const std::vector<Vector> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto r = isomap(square, {.neighbors = 3, .target_dim = 3});
    const std::vector<std::size_t> labels{0, 0, 1, 1};
    const auto csv = embedding_to_csv(r, &labels);
    CHECK(csv.rfind("x,y,z,label\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    const auto j = embedding_to_json(r, &labels);
    CHECK(j["coordinates"].size() == 4);
    CHECK(j["labels"].size() == 4);
}
