#include "topoclass/isomap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "topoclass/io.hpp"

namespace topoclass {

NeighborGraph::NeighborGraph(std::size_t node_count) : adjacency_(node_count) {}

void NeighborGraph::add_edge(std::size_t a, std::size_t b, double weight) {
    if (a >= node_count() || b >= node_count()) throw SpecError("edge endpoint out of range");
    if (a == b) throw SpecError("self-loops are not allowed");
    if (!(weight > 0.0) || !std::isfinite(weight)) throw SpecError("edge weights must be positive and finite");
    auto insert = [](std::vector<Edge>& list, std::size_t to, double w) {
        auto it = std::lower_bound(list.begin(), list.end(), to,
                                   [](const Edge& e, std::size_t t) { return e.to < t; });
        if (it != list.end() && it->to == to)
            it->weight = std::min(it->weight, w);
        else
            list.insert(it, Edge{to, w});
    };
    insert(adjacency_[a], b, weight);
    insert(adjacency_[b], a, weight);
}

std::size_t NeighborGraph::edge_count() const noexcept {
    std::size_t total = 0;
    for (const auto& list : adjacency_) total += list.size();
    return total / 2;
}

std::optional<double> NeighborGraph::weight(std::size_t a, std::size_t b) const {
    for (const auto& e : adjacency_.at(a))
        if (e.to == b) return e.weight;
    return std::nullopt;
}

std::vector<std::vector<std::size_t>> NeighborGraph::components() const {
    const std::size_t n = node_count();
    std::vector<std::size_t> label(n, n);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t s = 0; s < n; ++s) {
        if (label[s] != n) continue;
        std::vector<std::size_t> members{s};
        label[s] = out.size();
        for (std::size_t head = 0; head < members.size(); ++head) {
            for (const auto& e : adjacency_[members[head]]) {
                if (label[e.to] == n) {
                    label[e.to] = out.size();
                    members.push_back(e.to);
                }
            }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

NeighborGraph NeighborGraph::induced(const std::vector<std::size_t>& nodes) const {
    std::vector<std::size_t> index(node_count(), node_count());
    for (std::size_t i = 0; i < nodes.size(); ++i) index.at(nodes[i]) = i;
    NeighborGraph sub(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (const auto& e : adjacency_[nodes[i]])
            if (index[e.to] != node_count() && index[e.to] > i) sub.add_edge(i, index[e.to], e.weight);
    return sub;
}

namespace {

std::string describe_components(const std::vector<std::vector<std::size_t>>& components) {
    std::ostringstream out;
    out << "neighbour graph is disconnected: " << components.size() << " components (sizes";
    for (std::size_t i = 0; i < components.size() && i < 8; ++i) out << ' ' << components[i].size();
    if (components.size() > 8) out << " ...";
    out << "; first members";
    for (std::size_t i = 0; i < components.size() && i < 8; ++i) out << ' ' << components[i].front();
    out << ")";
    return out.str();
}

}  // namespace

DisconnectedError::DisconnectedError(std::vector<std::vector<std::size_t>> components)
    : Error(describe_components(components)), components_(std::move(components)) {}

NeighborGraph knn_graph(const std::vector<Vector>& points, std::size_t k) {
    const std::size_t n = points.size();
    if (k < 1 || k >= n) {
        throw SpecError("k must satisfy 1 <= k < point count (k=" + std::to_string(k) +
                        ", points=" + std::to_string(n) + ")");
    }
    NeighborGraph graph(n);
    std::vector<std::pair<double, std::size_t>> candidates;
    candidates.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        candidates.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) candidates.emplace_back(squared_distance(points[i], points[j]), j);
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                          candidates.end());
        for (std::size_t m = 0; m < k; ++m) {
            const double d = std::sqrt(candidates[m].first);
            graph.add_edge(i, candidates[m].second, d > 0.0 ? d : kZeroDistanceWeight);
        }
    }
    return graph;
}

Matrix geodesic_distances(const NeighborGraph& graph) {
    const std::size_t n = graph.node_count();
    if (n > 1) {
        auto components = graph.components();
        if (components.size() > 1) throw DisconnectedError(std::move(components));
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    Matrix dist(n, n, inf);
    using Item = std::pair<double, std::size_t>;
    for (std::size_t source = 0; source < n; ++source) {
        auto row = dist.row(source);
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        row[source] = 0.0;
        heap.emplace(0.0, source);
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d > row[u]) continue;
            for (const auto& e : graph.neighbors(u)) {
                const double candidate = d + e.weight;
                if (candidate < row[e.to]) {
                    row[e.to] = candidate;
                    heap.emplace(candidate, e.to);
                }
            }
        }
    }
    // Path sums can differ in the last bit between directions; report the
    // smaller so the matrix is exactly symmetric.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) dist(i, j) = dist(j, i) = std::min(dist(i, j), dist(j, i));
    return dist;
}

Matrix euclidean_distances(const std::vector<Vector>& points) {
    const std::size_t n = points.size();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d(i, j) = d(j, i) = distance(points[i], points[j]);
    return d;
}

namespace {

void check_distance_matrix(const Matrix& d) {
    if (d.rows() != d.cols()) throw DomainError("distance matrix must be square");
    const double scale = std::max(1.0, d.max_abs());
    for (std::size_t i = 0; i < d.rows(); ++i) {
        if (d(i, i) != 0.0) throw DomainError("distance matrix must have a zero diagonal");
        for (std::size_t j = 0; j < d.cols(); ++j) {
            const double x = d(i, j);
            if (!std::isfinite(x)) throw DomainError("distance matrix has non-finite entries");
            if (x < 0.0) throw DomainError("distance matrix has negative entries");
            if (std::abs(x - d(j, i)) > 1e-9 * scale) throw DomainError("distance matrix is not symmetric");
        }
    }
}

// Eigenvalues at or below this fraction of the largest are treated as zero.
constexpr double kNullEigenvalueRatio = 1e-12;

}  // namespace

EmbeddingResult classical_mds(const Matrix& d, std::size_t target_dim) {
    check_distance_matrix(d);
    if (target_dim == 0) throw SpecError("target dimension must be positive");
    const std::size_t n = d.rows();

    Matrix sq(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double x = 0.5 * (d(i, j) + d(j, i));
            sq(i, j) = x * x;
        }
    Vector row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row_mean[i] += sq(i, j);
        grand += row_mean[i];
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n) * static_cast<double>(n);
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = -0.5 * (sq(i, j) - row_mean[i] - row_mean[j] + grand);

    EmbeddingResult result;
    result.kept_indices.resize(n);
    std::iota(result.kept_indices.begin(), result.kept_indices.end(), 0);
    result.coordinates.assign(n, Vector(target_dim, 0.0));
    result.eigenvalues.assign(target_dim, 0.0);
    if (n == 0) return result;

    const auto eig = eigh_symmetric(b, 1e-12);
    const double top = std::max(0.0, eig.values.front());
    for (double v : eig.values)
        if (v < -1e-9 * top) ++result.negative_eigenvalue_count;

    for (std::size_t c = 0; c < target_dim && c < n; ++c) {
        double lambda = eig.values[c];
        if (lambda < 0.0) {
            result.clamped_negative = true;
            lambda = 0.0;
        }
        if (lambda <= kNullEigenvalueRatio * top) lambda = 0.0;
        result.eigenvalues[c] = lambda;
        const double scale = std::sqrt(lambda);
        for (std::size_t i = 0; i < n; ++i) result.coordinates[i][c] = scale * eig.vectors(i, c);
    }
    for (std::size_t c = 0; c < target_dim; ++c) {
        double mean = 0.0;
        for (const auto& p : result.coordinates) mean += p[c];
        mean /= static_cast<double>(n);
        for (auto& p : result.coordinates) p[c] -= mean;
    }

    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double e = distance(result.coordinates[i], result.coordinates[j]) - d(i, j);
            num += e * e;
            den += d(i, j) * d(i, j);
        }
    result.stress = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return result;
}

EmbeddingResult isomap(const std::vector<Vector>& points, const IsomapOptions& options) {
    NeighborGraph graph = knn_graph(points, options.neighbors);
    std::vector<std::size_t> kept(points.size());
    std::iota(kept.begin(), kept.end(), 0);
    if (options.restrict_to_largest_component) {
        auto components = graph.components();
        if (components.size() > 1) {
            // Largest first; ties go to the component with the smallest member.
            kept = *std::max_element(components.begin(), components.end(),
                                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
            graph = graph.induced(kept);
        }
    }
    EmbeddingResult result = classical_mds(geodesic_distances(graph), options.target_dim);
    result.kept_indices = std::move(kept);
    result.neighbors = options.neighbors;
    return result;
}

nlohmann::json embedding_to_json(const EmbeddingResult& result, const std::vector<std::size_t>* labels) {
    nlohmann::json doc;
    doc["coordinates"] = result.coordinates;
    doc["eigenvalues"] = result.eigenvalues;
    doc["stress"] = result.stress;
    doc["clamped_negative"] = result.clamped_negative;
    doc["negative_eigenvalue_count"] = result.negative_eigenvalue_count;
    doc["kept_indices"] = result.kept_indices;
    doc["neighbors"] = result.neighbors;
    if (labels) {
        std::vector<std::size_t> kept_labels;
        for (std::size_t i : result.kept_indices) kept_labels.push_back(labels->at(i));
        doc["labels"] = kept_labels;
    }
    return doc;
}

std::string embedding_to_csv(const EmbeddingResult& result, const std::vector<std::size_t>* labels) {
    static const char* const names[] = {"x", "y", "z"};
    std::ostringstream out;
    const std::size_t dim = result.eigenvalues.size();
    for (std::size_t c = 0; c < dim; ++c) {
        if (c) out << ',';
        if (c < 3)
            out << names[c];
        else
            out << 'c' << c;
    }
    if (labels) out << ",label";
    out << '\n';
    for (std::size_t r = 0; r < result.coordinates.size(); ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            if (c) out << ',';
            out << io::format_double(result.coordinates[r][c]);
        }
        if (labels) out << ',' << labels->at(result.kept_indices[r]);
        out << '\n';
    }
    return out.str();
}

}  // namespace topoclass
