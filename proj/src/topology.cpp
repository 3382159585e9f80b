#include "topoclass/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>

#include "topoclass/isomap.hpp"
#include "topoclass/training.hpp"

namespace topoclass {

std::optional<std::size_t> simplex_class(std::span<const double> y) {
    if (y.empty()) throw DomainError("empty simplex point");
    double sum = 0.0;
    for (double v : y) {
        if (!std::isfinite(v) || v < -1e-9) throw DomainError("point has a negative or non-finite coordinate");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DomainError("point coordinates do not sum to 1");
    return strict_argmax(y, kTieTolerance);
}

namespace {

void require_classifier(const Mlp& net, const LabeledPointCloud& cloud) {
    if (!net.ends_in_softmax()) throw ConfigError("network must end in a softmax layer");
    if (net.output_dim() != cloud.class_count) {
        throw ConfigError("network has " + std::to_string(net.output_dim()) + " outputs but data has " +
                          std::to_string(cloud.class_count) + " classes");
    }
}

}  // namespace

SeparabilityReport check_thm3(const Mlp& net, const LabeledPointCloud& cloud) {
    require_classifier(net, cloud);
    SeparabilityReport report;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const auto assigned = simplex_class(forward(net, cloud.points[i]));
        if (!assigned || *assigned != cloud.labels[i]) report.violating_points.push_back({i, assigned, cloud.labels[i]});
    }
    report.voronoi_ok = report.violating_points.empty();
    return report;
}

SeparabilityReport check_separation(const Mlp& net, const LabeledPointCloud& cloud) {
    SeparabilityReport report = check_thm3(net, cloud);
    std::vector<std::vector<Vector>> outputs(cloud.class_count);
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        outputs.at(cloud.labels[i]).push_back(forward(net, cloud.points[i]));
    const auto discs = check_disc_separation(outputs);
    report.disc_ok = discs.disjoint;
    report.discs = discs.discs;
    report.min_inter_disc_gap = discs.gap;
    return report;
}

namespace {

void check_points(const std::vector<Vector>& points) {
    if (points.empty()) throw EmptyInputError("no points given");
    const std::size_t dim = points.front().size();
    for (const auto& p : points) {
        if (p.size() != dim) throw DimensionError("points have mixed dimensions");
        if (!all_finite(p)) throw DomainError("point has a non-finite coordinate");
    }
}

// Tightens the radius to the farthest point so containment never depends on
// solver round-off.
Disc enclose(const std::vector<Vector>& points, Vector center) {
    double r2 = 0.0;
    for (const auto& p : points) r2 = std::max(r2, squared_distance(p, center));
    return {std::move(center), std::sqrt(r2)};
}

// Smallest ball with every point of `support` on its boundary, centred in the
// affine hull of the support. nullopt when the support is affinely dependent.
std::optional<Disc> circumball(const std::vector<const Vector*>& support) {
    const Vector& p0 = *support.front();
    const std::size_t dim = p0.size();
    const std::size_t m = support.size() - 1;
    if (m == 0) return Disc{p0, 0.0};
    // Solve G lambda = b with G_ij = 2 (p_i - p0).(p_j - p0), b_i = |p_i - p0|^2.
    std::vector<Vector> diff(m, Vector(dim));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t d = 0; d < dim; ++d) diff[i][d] = (*support[i + 1])[d] - p0[d];
    Matrix g(m, m + 1);
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) g(i, j) = 2.0 * dot(diff[i], diff[j]);
        g(i, m) = dot(diff[i], diff[i]);
        scale = std::max(scale, g(i, i));
    }
    if (scale == 0.0) return std::nullopt;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(g(r, col)) > std::abs(g(pivot, col))) pivot = r;
        if (std::abs(g(pivot, col)) <= 1e-12 * scale) return std::nullopt;
        if (pivot != col)
            for (std::size_t c = 0; c <= m; ++c) std::swap(g(col, c), g(pivot, c));
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = g(r, col) / g(col, col);
            for (std::size_t c = col; c <= m; ++c) g(r, c) -= f * g(col, c);
        }
    }
    Vector center = p0;
    for (std::size_t i = 0; i < m; ++i) {
        const double lambda = g(i, m) / g(i, i);
        for (std::size_t d = 0; d < dim; ++d) center[d] += lambda * diff[i][d];
    }
    double r2 = 0.0;
    for (const Vector* p : support) r2 = std::max(r2, squared_distance(*p, center));
    return Disc{std::move(center), std::sqrt(r2)};
}

bool contains(const Disc& ball, const Vector& p) {
    const double r = ball.radius;
    return distance(p, ball.center) <= r + 1e-12 * std::max(1.0, r);
}

// Ball through a (possibly degenerate) support set: if the support is
// affinely dependent, the smallest ball over one-point-smaller subsets that
// still contains the whole support.
Disc support_ball(const std::vector<const Vector*>& support) {
    if (auto ball = circumball(support)) return *ball;
    std::optional<Disc> best;
    for (std::size_t skip = 0; skip < support.size(); ++skip) {
        std::vector<const Vector*> sub;
        for (std::size_t i = 0; i < support.size(); ++i)
            if (i != skip) sub.push_back(support[i]);
        Disc candidate = support_ball(sub);
        bool ok = true;
        for (const Vector* p : support) ok = ok && contains(candidate, *p);
        if (ok && (!best || candidate.radius < best->radius)) best = std::move(candidate);
    }
    if (best) return *best;
    std::vector<Vector> copies;
    for (const Vector* p : support) copies.push_back(*p);
    return enclose(copies, copies.front());
}

using PointList = std::list<const Vector*>;

// Gartner's move-to-front variant of Welzl's recursion.
Disc mtf_ball(PointList& points, PointList::iterator end, std::vector<const Vector*>& support,
              std::size_t dim) {
    Disc ball = support.empty() ? Disc{Vector(dim, 0.0), -1.0} : support_ball(support);
    if (support.size() == dim + 1) return ball;
    for (auto it = points.begin(); it != end;) {
        const Vector* p = *it;
        auto next = std::next(it);
        if (ball.radius < 0.0 || !contains(ball, *p)) {
            support.push_back(p);
            ball = mtf_ball(points, it, support, dim);
            support.pop_back();
            points.splice(points.begin(), points, it);
        }
        it = next;
    }
    return ball;
}

}  // namespace

Disc min_enclosing_ball_welzl(const std::vector<Vector>& points) {
    check_points(points);
    std::vector<const Vector*> order;
    order.reserve(points.size());
    for (const auto& p : points) order.push_back(&p);
    Rng rng(0x5eb5eb5eULL);
    rng.shuffle(order);
    PointList list(order.begin(), order.end());
    std::vector<const Vector*> support;
    const Disc ball = mtf_ball(list, list.end(), support, points.front().size());
    return enclose(points, ball.center);
}

Disc min_enclosing_ball_approx(const std::vector<Vector>& points, double slack) {
    check_points(points);
    if (!(slack > 0.0)) throw SpecError("ball slack must be positive");
    // After ceil(1/slack^2) farthest-point steps the radius is within
    // (1 + slack) of optimal.
    const auto iterations = static_cast<std::size_t>(std::ceil(1.0 / (slack * slack)));
    Vector center = points.front();
    for (std::size_t i = 1; i <= iterations; ++i) {
        std::size_t far = 0;
        double best = -1.0;
        for (std::size_t j = 0; j < points.size(); ++j) {
            const double d = squared_distance(points[j], center);
            if (d > best) {
                best = d;
                far = j;
            }
        }
        if (best == 0.0) break;
        const double step = 1.0 / static_cast<double>(i + 1);
        for (std::size_t d = 0; d < center.size(); ++d) center[d] += step * (points[far][d] - center[d]);
    }
    return enclose(points, std::move(center));
}

Disc min_enclosing_ball(const std::vector<Vector>& points) {
    check_points(points);
    return points.front().size() <= 3 ? min_enclosing_ball_welzl(points) : min_enclosing_ball_approx(points);
}

DiscSeparation check_disc_separation(const std::vector<std::vector<Vector>>& classes) {
    if (classes.empty()) throw EmptyInputError("no classes given");
    DiscSeparation out;
    for (const auto& c : classes) out.discs.push_back(min_enclosing_ball(c));
    out.gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.discs.size(); ++i)
        for (std::size_t j = i + 1; j < out.discs.size(); ++j) {
            const double g = distance(out.discs[i].center, out.discs[j].center) - out.discs[i].radius -
                             out.discs[j].radius;
            out.gap = std::min(out.gap, g);
        }
    out.disjoint = out.gap > 0.0;
    return out;
}

double set_distance(std::span<const double> x, const std::vector<Vector>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : set) best = std::min(best, squared_distance(x, p));
    return std::sqrt(best);
}

double set_gap(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : a) best = std::min(best, set_distance(p, b));
    return best;
}

namespace {

void check_class_set(const std::vector<Vector>& set, std::size_t dim) {
    if (set.empty()) throw SpecError("separator sets must be nonempty");
    for (const auto& p : set)
        if (p.size() != dim) throw SpecError("separator points have mixed dimensions");
}

}  // namespace

UrysohnBinary::UrysohnBinary(std::vector<Vector> zero_set, std::vector<Vector> one_set)
    : zero_set_(std::move(zero_set)), one_set_(std::move(one_set)), gap_(0.0) {
    if (zero_set_.empty() || one_set_.empty()) throw SpecError("separator sets must be nonempty");
    check_class_set(zero_set_, zero_set_.front().size());
    check_class_set(one_set_, zero_set_.front().size());
    gap_ = topoclass::set_gap(zero_set_, one_set_);
    if (!(gap_ > 0.0)) throw SeparationError("the two sets share a point");
}

double UrysohnBinary::operator()(std::span<const double> x) const {
    if (x.size() != dim()) throw DimensionError("probe dimension does not match the separator");
    const double a = set_distance(x, zero_set_);
    const double b = set_distance(x, one_set_);
    return a / (a + b);
}

UrysohnMulticlass::UrysohnMulticlass(std::vector<std::vector<Vector>> classes)
    : classes_(std::move(classes)), gap_(std::numeric_limits<double>::infinity()) {
    if (classes_.size() < 2) throw SpecError("at least two classes are required");
    if (classes_.front().empty()) throw SpecError("separator sets must be nonempty");
    const std::size_t dim = classes_.front().front().size();
    for (const auto& c : classes_) check_class_set(c, dim);
    for (std::size_t i = 0; i < classes_.size(); ++i)
        for (std::size_t j = i + 1; j < classes_.size(); ++j) {
            const double g = topoclass::set_gap(classes_[i], classes_[j]);
            if (!(g > 0.0))
                throw SeparationError("classes " + std::to_string(i) + " and " + std::to_string(j) +
                                      " share a point");
            gap_ = std::min(gap_, g);
        }
}

double UrysohnMulticlass::operator()(std::span<const double> x) const {
    if (x.size() != classes_.front().front().size())
        throw DimensionError("probe dimension does not match the separator");
    const std::size_t c = classes_.size();
    Vector dist(c);
    for (std::size_t k = 0; k < c; ++k) dist[k] = set_distance(x, classes_[k]);
    // Products are formed relative to the largest distance to keep them in
    // range; the common factor cancels in the ratio.
    const double top = *std::max_element(dist.begin(), dist.end());
    Vector weight(c, 1.0);
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        for (std::size_t j = 0; j < c; ++j)
            if (j != k) weight[k] *= dist[j] / top;
        total += weight[k];
    }
    double f = 0.0;
    for (std::size_t k = 0; k < c; ++k) f += static_cast<double>(k) * (weight[k] / total);
    return f;
}

UrysohnBinary urysohn_binary(std::vector<Vector> d1, std::vector<Vector> d2) {
    return UrysohnBinary(std::move(d1), std::move(d2));
}

UrysohnMulticlass urysohn_multiclass(std::vector<std::vector<Vector>> classes) {
    return UrysohnMulticlass(std::move(classes));
}

KernelWitness kernel_witness(const Matrix& w, double inner_radius, double outer_radius) {
    if (w.rows() >= w.cols()) {
        throw NotApplicableError("no bottleneck: layer maps R^" + std::to_string(w.cols()) + " to R^" +
                                 std::to_string(w.rows()) + "; theorem does not apply");
    }
    if (!(inner_radius > 0.0 && inner_radius <= 0.9))
        throw SpecError("inner radius must lie in (0, 0.9]");
    if (!(outer_radius >= 1.0 && outer_radius <= 2.0)) throw SpecError("outer radius must lie in [1, 2]");
    const auto basis = null_space_basis(w);
    for (const auto& v : basis) {
        KernelWitness out;
        out.direction = v;
        out.p1 = v;
        out.p2 = v;
        for (double& x : out.p1) x *= inner_radius;
        for (double& x : out.p2) x *= outer_radius;
        const Vector w1 = matvec(w, out.p1);
        const Vector w2 = matvec(w, out.p2);
        if (norm(w1) > kWitnessResidual || norm(w2) > kWitnessResidual) continue;
        out.output_gap = distance(w1, w2);
        return out;
    }
    throw NumericalError("kernel of the bottleneck layer is numerically trivial");
}

WitnessImages witness_images(const Mlp& net, const KernelWitness& witness) {
    WitnessImages out;
    const auto& first = net.layers().front();
    out.first_layer_p1 = apply_layer(first, witness.p1);
    out.first_layer_p2 = apply_layer(first, witness.p2);
    out.first_layer_gap = distance(out.first_layer_p1, out.first_layer_p2);
    out.output_p1 = forward(net, witness.p1);
    out.output_p2 = forward(net, witness.p2);
    out.output_gap = distance(out.output_p1, out.output_p2);
    return out;
}

Vector singular_values(const std::vector<Vector>& points) {
    check_points(points);
    const std::size_t dim = points.front().size();
    Vector mean(dim, 0.0);
    for (const auto& p : points)
        for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d];
    for (double& m : mean) m /= static_cast<double>(points.size());
    Matrix scatter(dim, dim);
    for (const auto& p : points)
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) scatter(a, b) += (p[a] - mean[a]) * (p[b] - mean[b]);
    const auto eig = eigh_symmetric(scatter);
    Vector sv(dim);
    for (std::size_t i = 0; i < dim; ++i) sv[i] = std::sqrt(std::max(0.0, eig.values[i]));
    return sv;
}

std::size_t linear_rank(const std::vector<Vector>& points, double rel_tol) {
    const Vector sv = singular_values(points);
    if (sv.empty() || sv.front() == 0.0) return 0;
    return static_cast<std::size_t>(
        std::count_if(sv.begin(), sv.end(), [&](double s) { return s > rel_tol * sv.front(); }));
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), count_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --count_;
    }
    std::size_t count() const noexcept { return count_; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::size_t count_;
};

}  // namespace

std::size_t component_count(const std::vector<Vector>& points, std::size_t k) {
    if (k < 1 || k >= points.size()) throw SpecError("component_count needs 1 <= k < point count");
    const NeighborGraph graph = knn_graph(points, k);
    DisjointSets sets(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        for (const auto& e : graph.neighbors(i)) sets.unite(i, e.to);
    return sets.count();
}

StageDiagnostics diagnose_stage(const std::vector<Vector>& points, const std::vector<std::size_t>& labels,
                                std::size_t class_count, std::size_t k) {
    StageDiagnostics out;
    out.dim = points.empty() ? 0 : points.front().size();
    out.singular_values = singular_values(points);
    out.rank = linear_rank(points);
    for (std::size_t c = 0; c < class_count; ++c) {
        std::vector<Vector> members;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (labels[i] == c) members.push_back(points[i]);
        if (members.size() > k)
            out.class_components.push_back(component_count(members, k));
        else
            out.class_components.push_back(std::nullopt);
    }
    return out;
}

namespace {

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json disc_to_json(const Disc& disc) { return {{"center", disc.center}, {"radius", disc.radius}}; }

nlohmann::json report_to_json(const SeparabilityReport& report) {
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : report.violating_points) {
        violations.push_back({{"index", v.index},
                              {"assigned", v.assigned ? nlohmann::json(*v.assigned) : nlohmann::json(nullptr)},
                              {"label", v.label}});
    }
    nlohmann::json doc;
    doc["voronoi_ok"] = report.voronoi_ok;
    doc["violation_count"] = report.violating_points.size();
    doc["violating_points"] = violations;
    doc["disc_ok"] = report.disc_ok ? nlohmann::json(*report.disc_ok) : nlohmann::json(nullptr);
    nlohmann::json discs = nlohmann::json::array();
    for (const auto& d : report.discs) discs.push_back(disc_to_json(d));
    doc["discs"] = discs;
    doc["min_inter_disc_gap"] =
        report.min_inter_disc_gap ? finite_or_null(*report.min_inter_disc_gap) : nlohmann::json(nullptr);
    return doc;
}

nlohmann::json witness_to_json(const KernelWitness& witness) {
    return {{"direction", witness.direction},
            {"p1", witness.p1},
            {"p2", witness.p2},
            {"output_gap", witness.output_gap}};
}

nlohmann::json diagnostics_to_json(const StageDiagnostics& diag) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : diag.class_components) comps.push_back(c ? nlohmann::json(*c) : nlohmann::json(nullptr));
    return {{"dim", diag.dim},
            {"linear_rank", diag.rank},
            {"singular_values", diag.singular_values},
            {"class_components", comps}};
}

}  // namespace topoclass
