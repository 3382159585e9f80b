#include "topoclass/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace topoclass {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw DimensionError("matrix entry count " + std::to_string(entries_.size()) +
                             " does not match " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
    }
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    std::vector<double> entries;
    entries.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionError("ragged matrix rows");
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(entries));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector Matrix::column(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double x : entries_) s += x * x;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : entries_) m = std::max(m, std::abs(x));
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " times " + std::to_string(b.rows()) +
                             "x" + std::to_string(b.cols()));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const auto src = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
        }
    }
    return out;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) {
        throw DimensionError("matvec: matrix has " + std::to_string(a.cols()) +
                             " columns, vector has " + std::to_string(x.size()) + " entries");
    }
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

namespace {

void normalize_sign(Matrix& vectors, std::size_t col) {
    for (std::size_t r = 0; r < vectors.rows(); ++r) {
        const double x = vectors(r, col);
        if (std::abs(x) > 1e-12) {
            if (x < 0.0)
                for (std::size_t k = 0; k < vectors.rows(); ++k) vectors(k, col) = -vectors(k, col);
            return;
        }
    }
}

void check_symmetric(const Matrix& s, double tol) {
    if (s.rows() != s.cols()) {
        throw ShapeError("eigh: matrix is " + std::to_string(s.rows()) + "x" +
                         std::to_string(s.cols()) + ", expected square");
    }
    const double scale = std::max(1.0, s.max_abs());
    for (std::size_t i = 0; i < s.rows(); ++i) {
        for (std::size_t j = i + 1; j < s.cols(); ++j) {
            if (!std::isfinite(s(i, j)) || !std::isfinite(s(j, i)))
                throw ShapeError("eigh: non-finite entry");
            if (std::abs(s(i, j) - s(j, i)) > tol * scale)
                throw ShapeError("eigh: matrix is not symmetric at (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
        }
    }
}

// Sorts eigenpairs by descending value and fixes the sign convention.
EigenDecomposition sorted_pairs(const Vector& values, const Matrix& vectors) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    EigenDecomposition out{Vector(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = values[order[j]];
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, j) = vectors(r, order[j]);
        normalize_sign(out.vectors, j);
    }
    return out;
}

constexpr int kMaxJacobiSweeps = 100;

}  // namespace

EigenDecomposition eigh_jacobi(const Matrix& s, double tol) {
    check_symmetric(s, tol);
    const std::size_t n = s.rows();
    Matrix a = s;
    // Symmetrize so the rotations see an exactly symmetric matrix.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (s(i, j) + s(j, i));
    Matrix v = Matrix::identity(n);
    const double target = tol * a.frobenius_norm();

    auto off_norm = [&] {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) off += a(i, j) * a(i, j);
        return std::sqrt(off);
    };

    int sweep = 0;
    for (; sweep < kMaxJacobiSweeps; ++sweep) {
        if (off_norm() <= target) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == kMaxJacobiSweeps && off_norm() > target) {
        throw ConvergenceError("eigh: Jacobi did not converge in " +
                               std::to_string(kMaxJacobiSweeps) + " sweeps");
    }

    Vector values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
    return sorted_pairs(values, v);
}

EigenDecomposition eigh_symmetric(const Matrix& s, double tol) {
    if (s.rows() <= kJacobiMaxOrder) return eigh_jacobi(s, tol);
    check_symmetric(s, tol);
    const auto n = static_cast<Eigen::Index>(s.rows());
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::MatrixXd m = Eigen::Map<const RowMajor>(s.entries().data(), n, n);
    m = 0.5 * (m + m.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw ConvergenceError("eigh: QL iteration failed");
    Vector values(s.rows());
    Matrix vectors(s.rows(), s.rows());
    for (Eigen::Index j = 0; j < n; ++j) {
        values[j] = solver.eigenvalues()(j);
        for (Eigen::Index r = 0; r < n; ++r) vectors(r, j) = solver.eigenvectors()(r, j);
    }
    return sorted_pairs(values, vectors);
}

std::vector<Vector> null_space_basis(const Matrix& w, double tol) {
    // a = W^T is m x n; its column space is the row space of W, so the trailing
    // m - rank columns of the orthogonal factor span ker(W).
    Matrix a = w.transposed();
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Matrix q = Matrix::identity(m);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    auto column_tail_norm = [&](std::size_t col, std::size_t from) {
        double s = 0.0;
        for (std::size_t r = from; r < m; ++r) s += a(r, col) * a(r, col);
        return std::sqrt(s);
    };

    std::size_t rank = 0;
    double first_pivot = 0.0;
    const std::size_t steps = std::min(m, n);
    for (std::size_t k = 0; k < steps; ++k) {
        std::size_t best = k;
        double best_norm = -1.0;
        for (std::size_t c = k; c < n; ++c) {
            const double nc = column_tail_norm(c, k);
            if (nc > best_norm) {
                best_norm = nc;
                best = c;
            }
        }
        if (k == 0) first_pivot = best_norm;
        if (best_norm <= tol * first_pivot || best_norm == 0.0) break;
        if (best != k) {
            for (std::size_t r = 0; r < m; ++r) std::swap(a(r, k), a(r, best));
            std::swap(perm[k], perm[best]);
        }
        // Householder vector u with (I - 2uu^T) a[k:, k] = -sign * ||.|| e_k.
        Vector u(m - k);
        for (std::size_t r = k; r < m; ++r) u[r - k] = a(r, k);
        const double alpha = u[0] >= 0.0 ? -best_norm : best_norm;
        u[0] -= alpha;
        const double unorm = norm(u);
        if (unorm > 0.0) {
            for (double& x : u) x /= unorm;
            for (std::size_t c = k; c < n; ++c) {
                double proj = 0.0;
                for (std::size_t r = k; r < m; ++r) proj += u[r - k] * a(r, c);
                for (std::size_t r = k; r < m; ++r) a(r, c) -= 2.0 * proj * u[r - k];
            }
            for (std::size_t r = 0; r < m; ++r) {
                double proj = 0.0;
                for (std::size_t i = k; i < m; ++i) proj += q(r, i) * u[i - k];
                for (std::size_t i = k; i < m; ++i) q(r, i) -= 2.0 * proj * u[i - k];
            }
        }
        ++rank;
    }

    std::vector<Vector> basis;
    for (std::size_t c = rank; c < m; ++c) {
        Vector v = q.column(c);
        for (double x : v) {
            if (std::abs(x) > 1e-12) {
                if (x < 0.0)
                    for (double& y : v) y = -y;
                break;
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    for (auto& s : state_) s = splitmix64(seed);
}

std::uint64_t Rng::next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

double Rng::normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace topoclass
