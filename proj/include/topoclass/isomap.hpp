#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "topoclass/numerics.hpp"

namespace topoclass {

struct Edge {
    std::size_t to = 0;
    double weight = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected weighted graph stored as sorted adjacency lists.
class NeighborGraph {
public:
    explicit NeighborGraph(std::size_t node_count = 0);

    // Adds {a, b} in both directions. Throws SpecError for self-loops,
    // non-positive or non-finite weights, and out-of-range nodes. Re-adding an
    // existing edge keeps the smaller weight.
    void add_edge(std::size_t a, std::size_t b, double weight);

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    const std::vector<Edge>& neighbors(std::size_t node) const { return adjacency_.at(node); }
    std::size_t edge_count() const noexcept;
    std::optional<double> weight(std::size_t a, std::size_t b) const;

    // Connected components, each sorted ascending, ordered by smallest member.
    std::vector<std::vector<std::size_t>> components() const;

    // Subgraph on `nodes` (renumbered in the given order).
    NeighborGraph induced(const std::vector<std::size_t>& nodes) const;

private:
    std::vector<std::vector<Edge>> adjacency_;
};

// Raised by geodesic_distances when the graph has more than one component.
class DisconnectedError : public Error {
public:
    explicit DisconnectedError(std::vector<std::vector<std::size_t>> components);
    const std::vector<std::vector<std::size_t>>& components() const noexcept { return components_; }

private:
    std::vector<std::vector<std::size_t>> components_;
};

// Duplicate points get an edge of weight kZeroDistanceWeight instead of 0.
inline constexpr double kZeroDistanceWeight = 1e-12;

// Symmetrized k-nearest-neighbour graph with Euclidean edge weights: {i, j} is
// an edge iff j is among i's k nearest or i among j's. Distance ties are broken
// by the lower index. Throws SpecError unless 1 <= k < points.size().
NeighborGraph knn_graph(const std::vector<Vector>& points, std::size_t k);

// All-pairs shortest paths, one Dijkstra run per source.
Matrix geodesic_distances(const NeighborGraph& graph);

// Pairwise Euclidean distance matrix.
Matrix euclidean_distances(const std::vector<Vector>& points);

struct EmbeddingResult {
    std::vector<Vector> coordinates;      // one row per kept input point
    Vector eigenvalues;                   // leading target_dim eigenvalues, descending, >= 0
    double stress = 0.0;                  // ||D(coords) - D||_F / ||D||_F
    bool clamped_negative = false;        // a used eigenvalue was < 0 and set to 0
    std::size_t negative_eigenvalue_count = 0;  // significantly negative eigenvalues of B
    std::vector<std::size_t> kept_indices;      // rows of the input that were embedded
    std::size_t neighbors = 0;            // k used for the graph (0 for plain MDS)
};

// Classical (Torgerson) scaling: eigen-decompose B = -1/2 H (D.D) H and scale
// the leading eigenvectors by sqrt(eigenvalue). Throws DomainError when d is
// not square, not symmetric, has a non-zero diagonal, or has negative or
// non-finite entries. Output coordinates are mean-centred.
EmbeddingResult classical_mds(const Matrix& d, std::size_t target_dim);

struct IsomapOptions {
    std::size_t neighbors = 10;
    std::size_t target_dim = 3;
    // Embed only the largest kNN component instead of raising DisconnectedError.
    bool restrict_to_largest_component = false;
};

EmbeddingResult isomap(const std::vector<Vector>& points, const IsomapOptions& options = {});

nlohmann::json embedding_to_json(const EmbeddingResult& result,
                                 const std::vector<std::size_t>* labels = nullptr);
// Columns x,y,z,... then label when labels are supplied (indexed like the input).
std::string embedding_to_csv(const EmbeddingResult& result,
                             const std::vector<std::size_t>* labels = nullptr);

}  // namespace topoclass
