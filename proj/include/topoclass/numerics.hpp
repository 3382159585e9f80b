#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "topoclass/errors.hpp"

namespace topoclass {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    // Throws DimensionError when entries.size() != rows * cols.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    // Nested initializer; every row must have the same length.
    static Matrix from_rows(const std::vector<Vector>& rows);
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return entries_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return entries_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return entries_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {entries_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {entries_.data() + r * cols_, cols_};
    }
    Vector column(std::size_t c) const;

    const std::vector<double>& entries() const noexcept { return entries_; }
    std::vector<double>& entries() noexcept { return entries_; }

    Matrix transposed() const;
    double frobenius_norm() const;
    double max_abs() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> v);

struct EigenDecomposition {
    Vector values;       // descending
    Matrix vectors;      // column j pairs with values[j]; columns orthonormal
};

// Symmetric eigendecomposition by cyclic Jacobi rotations. Iterates until the
// off-diagonal Frobenius norm drops below tol * ||s||_F. Throws ShapeError for
// non-square or non-symmetric input (|s_ij - s_ji| > tol * max(1, max|s|)) and
// ConvergenceError if the sweep budget is exhausted.
//
// Eigenvectors are sign-normalized: the first entry with magnitude above
// 1e-12 is positive.
EigenDecomposition eigh_jacobi(const Matrix& s, double tol = 1e-12);

// Same contract as eigh_jacobi. Matrices up to kJacobiMaxOrder use the Jacobi
// route; larger ones go through Eigen's tridiagonal QL solver because cyclic
// Jacobi is O(n^3) per sweep with a poor constant.
inline constexpr std::size_t kJacobiMaxOrder = 96;
EigenDecomposition eigh_symmetric(const Matrix& s, double tol = 1e-12);

// Orthonormal basis of {v : ||W v|| <= tol * ||W|| * ||v||}, via Householder
// QR with column pivoting of W^T. Each vector's first significant entry is
// positive. Returns an empty list when the kernel is trivial.
std::vector<Vector> null_space_basis(const Matrix& w, double tol = 1e-10);

// xoshiro256** seeded through splitmix64. The stream is fully determined by
// the 64-bit seed; doubles use the top 53 bits of each draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64() noexcept;
    // Uniform on [0, 1).
    double uniform() noexcept;
    // Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept;
    // Uniform integer on [0, n). n must be > 0. Unbiased (rejection).
    std::uint64_t below(std::uint64_t n) noexcept;
    // Standard normal via Box-Muller (no cached second value).
    double normal() noexcept;

    template <class T>
    void shuffle(std::vector<T>& items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_[4];
};

}  // namespace topoclass
