#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cevfb {

/// Row-major dense matrix for the small local systems (moment conditions,
/// coefficient fallbacks).
class DenseMatrix {
public:
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

/// Gaussian elimination with partial pivoting. Throws Singular.
std::vector<double> solve_dense(DenseMatrix a, std::vector<double> rhs);

/// Square band matrix with `lower` sub- and `upper` super-diagonals.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper);

    std::size_t size() const { return n_; }
    std::size_t lower() const { return lower_; }
    std::size_t upper() const { return upper_; }

    bool in_band(std::size_t i, std::size_t j) const {
        return j + lower_ >= i && j <= i + upper_;
    }
    /// Requires in_band(i, j).
    double& at(std::size_t i, std::size_t j) { return data_[i * width() + (j + lower_ - i)]; }
    double get(std::size_t i, std::size_t j) const {
        return in_band(i, j) && j < n_ ? data_[i * width() + (j + lower_ - i)] : 0.0;
    }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;

private:
    std::size_t width() const { return lower_ + upper_ + 1; }

    std::size_t n_ = 0;
    std::size_t lower_ = 0;
    std::size_t upper_ = 0;
    std::vector<double> data_;
};

/// LU factorization of a band matrix without pivoting; the compact operators
/// are row diagonally dominant, so the band does not grow. Throws Singular on
/// a vanishing pivot.
class BandedLu {
public:
    BandedLu() = default;
    explicit BandedLu(const BandedMatrix& a);

    std::size_t size() const { return lu_.size(); }
    /// Overwrites `rhs` with A^{-1} rhs.
    void solve_in_place(std::span<double> rhs) const;

private:
    BandedMatrix lu_;
};

}  // namespace cevfb
