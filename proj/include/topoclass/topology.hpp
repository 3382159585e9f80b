#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "topoclass/data.hpp"
#include "topoclass/network.hpp"
#include "topoclass/numerics.hpp"

namespace topoclass {

// ---------------------------------------------------------------------------
// Voronoi cells of simplex vertices
// ---------------------------------------------------------------------------

// Class i when y_i is the strict maximum of y (ties within kTieTolerance give
// nullopt, i.e. the point lies on a Voronoi boundary). For y on the simplex,
// ||y - v_i||^2 - ||y - v_j||^2 = 2 (y_j - y_i), so this is exactly interior
// membership in the Voronoi cell of vertex v_i.
//
// Throws DomainError unless every coordinate is >= -1e-9 and the coordinates
// sum to 1 within 1e-9.
std::optional<std::size_t> simplex_class(std::span<const double> y);

struct Violation {
    std::size_t index = 0;
    std::optional<std::size_t> assigned;  // nullopt: on a cell boundary
    std::size_t label = 0;
};

struct Disc {
    Vector center;
    double radius = 0.0;
};

struct SeparabilityReport {
    bool voronoi_ok = false;
    std::vector<Violation> violating_points;
    // Disc certificate on the network's output clouds; absent when only the
    // Voronoi criterion was evaluated.
    std::optional<bool> disc_ok;
    std::vector<Disc> discs;
    std::optional<double> min_inter_disc_gap;
};

// Every point's output must land in the interior of its own class's Voronoi
// cell. Requires a softmax head with one output per class (ConfigError).
SeparabilityReport check_thm3(const Mlp& net, const LabeledPointCloud& cloud);

// check_thm3 plus the disc certificate on the per-class output clouds.
SeparabilityReport check_separation(const Mlp& net, const LabeledPointCloud& cloud);

// ---------------------------------------------------------------------------
// Disc certificate
// ---------------------------------------------------------------------------

// Smallest enclosing ball. Exact move-to-front Welzl recursion for dim <= 3;
// for higher dimensions Badoiu-Clarkson core-set iterations with at most 1%
// radius slack. In both cases the returned radius is the true maximum
// distance from the returned center, so containment is guaranteed. Throws
// EmptyInputError for no points, DimensionError for ragged input.
Disc min_enclosing_ball(const std::vector<Vector>& points);
// The two routes, exposed separately; the Welzl route works in any dimension
// but its expected cost grows quickly with it.
Disc min_enclosing_ball_welzl(const std::vector<Vector>& points);
inline constexpr double kApproxBallSlack = 0.01;
Disc min_enclosing_ball_approx(const std::vector<Vector>& points, double slack = kApproxBallSlack);

struct DiscSeparation {
    bool disjoint = false;
    std::vector<Disc> discs;
    // min over pairs of (center distance - radius sum); +inf for a single class.
    double gap = 0.0;
};

// Minimum enclosing ball per class; disjoint iff every pair is strictly
// separated. A sufficient certificate for disc separation, not a decision
// procedure: failing it does not prove that no disjoint discs exist.
DiscSeparation check_disc_separation(const std::vector<std::vector<Vector>>& classes);

// ---------------------------------------------------------------------------
// Urysohn separators
// ---------------------------------------------------------------------------

// Minimum Euclidean distance from x to a finite set.
double set_distance(std::span<const double> x, const std::vector<Vector>& set);
// Minimum distance between two finite sets.
double set_gap(const std::vector<Vector>& a, const std::vector<Vector>& b);

// f(x) = d(x, A) / (d(x, A) + d(x, B)): 0 on A, 1 on B, values in [0, 1], and
// Lipschitz with constant 1 / d(A, B).
class UrysohnBinary {
public:
    // Throws SpecError for empty or ragged sets and SeparationError when the
    // sets share a point.
    UrysohnBinary(std::vector<Vector> zero_set, std::vector<Vector> one_set);

    double operator()(std::span<const double> x) const;
    double set_gap() const noexcept { return gap_; }
    std::size_t dim() const noexcept { return zero_set_.front().size(); }

private:
    std::vector<Vector> zero_set_;
    std::vector<Vector> one_set_;
    double gap_;
};

// f(x) = sum_k k * w_k(x) with w_k = prod_{j != k} d(x, D_j) / sum_m prod_{j != m} d(x, D_j).
// On D_k every weight but w_k vanishes, so f == k there exactly.
class UrysohnMulticlass {
public:
    // Needs at least two classes; same error contract as UrysohnBinary, checked
    // pairwise.
    explicit UrysohnMulticlass(std::vector<std::vector<Vector>> classes);

    double operator()(std::span<const double> x) const;
    // Smallest pairwise gap between classes.
    double min_gap() const noexcept { return gap_; }
    std::size_t class_count() const noexcept { return classes_.size(); }

private:
    std::vector<std::vector<Vector>> classes_;
    double gap_;
};

UrysohnBinary urysohn_binary(std::vector<Vector> d1, std::vector<Vector> d2);
UrysohnMulticlass urysohn_multiclass(std::vector<std::vector<Vector>> classes);

// Each class's values must sit inside [k - radius, k + radius].
inline constexpr double kUrysohnTargetRadius = 0.25;

// ---------------------------------------------------------------------------
// Bottleneck kernel witnesses
// ---------------------------------------------------------------------------

struct KernelWitness {
    Vector direction;  // unit vector with W direction ~ 0
    Vector p1;         // inner_radius * direction, in the inner ball
    Vector p2;         // outer_radius * direction, in the outer shell
    double output_gap = 0.0;  // ||W p1 - W p2||
};

inline constexpr double kWitnessResidual = 1e-9;

// Two points of the ball/shell data on one kernel line of W. Throws
// NotApplicableError when W has at least as many rows as columns, SpecError
// when the radii leave the ball (<= 0.9) / shell ([1, 2]) regions, and
// NumericalError when no kernel vector meets ||W p|| <= 1e-9.
KernelWitness kernel_witness(const Matrix& w, double inner_radius = 0.5, double outer_radius = 1.5);

struct WitnessImages {
    Vector first_layer_p1;
    Vector first_layer_p2;
    Vector output_p1;
    Vector output_p2;
    double first_layer_gap = 0.0;
    double output_gap = 0.0;
};

// Pushes both witness points through the first layer and the whole net.
WitnessImages witness_images(const Mlp& net, const KernelWitness& witness);

// ---------------------------------------------------------------------------
// Activation-cloud diagnostics
// ---------------------------------------------------------------------------

// Singular values of the mean-centred cloud, descending (length = dim).
Vector singular_values(const std::vector<Vector>& points);
// Number of singular values above rel_tol * largest. A single point has rank 0.
std::size_t linear_rank(const std::vector<Vector>& points, double rel_tol = 1e-6);
// Connected components of the symmetric kNN graph, counted with union-find.
// Throws SpecError unless 1 <= k < points.size().
std::size_t component_count(const std::vector<Vector>& points, std::size_t k);

struct StageDiagnostics {
    std::size_t dim = 0;
    std::size_t rank = 0;
    Vector singular_values;
    // Per class; nullopt when the class has too few points for the k used.
    std::vector<std::optional<std::size_t>> class_components;
};

StageDiagnostics diagnose_stage(const std::vector<Vector>& points,
                                const std::vector<std::size_t>& labels, std::size_t class_count,
                                std::size_t k);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::json disc_to_json(const Disc& disc);
nlohmann::json report_to_json(const SeparabilityReport& report);
nlohmann::json witness_to_json(const KernelWitness& witness);
nlohmann::json diagnostics_to_json(const StageDiagnostics& diag);

}  // namespace topoclass
