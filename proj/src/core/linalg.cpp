#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "core/error.hpp"

namespace cevfb {

std::vector<double> solve_dense(DenseMatrix a, std::vector<double> rhs) {
    const std::size_t n = a.rows();
    if (a.cols() != n || rhs.size() != n) {
        fail(ErrorCode::InvalidParameter, "solve_dense: dimension mismatch");
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (!(std::abs(a(piv, k)) > 1e-14 * scale)) {
            fail(ErrorCode::Singular, "solve_dense: matrix is singular");
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(rhs[k], rhs[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            rhs[i] -= f * rhs[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = rhs[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * rhs[j];
        rhs[k] = s / a(k, k);
    }
    return rhs;
}

BandedMatrix::BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), lower_(lower), upper_(upper), data_(n * (lower + upper + 1), 0.0) {}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= lower_ ? i - lower_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + upper_);
        const double* row = &data_[i * width()];
        double s = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) s += row[j + lower_ - i] * x[j];
        y[i] = s;
    }
}

BandedLu::BandedLu(const BandedMatrix& a) : lu_(a) {
    const std::size_t n = lu_.size();
    const std::size_t kl = lu_.lower();
    const std::size_t ku = lu_.upper();
    for (std::size_t k = 0; k < n; ++k) {
        const double pivot = lu_.at(k, k);
        double row_scale = 0.0;
        for (std::size_t j = k; j <= std::min(n - 1, k + ku); ++j)
            row_scale = std::max(row_scale, std::abs(lu_.get(k, j)));
        if (!(std::abs(pivot) > 1e-14 * row_scale) || !std::isfinite(pivot)) {
            fail(ErrorCode::Singular, "banded LU: vanishing pivot");
        }
        const std::size_t i1 = std::min(n - 1, k + kl);
        const std::size_t j1 = std::min(n - 1, k + ku);
        for (std::size_t i = k + 1; i <= i1; ++i) {
            const double f = lu_.at(i, k) / pivot;
            lu_.at(i, k) = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j <= j1; ++j) lu_.at(i, j) -= f * lu_.at(k, j);
        }
    }
}

void BandedLu::solve_in_place(std::span<double> rhs) const {
    const std::size_t n = lu_.size();
    const std::size_t kl = lu_.lower();
    const std::size_t ku = lu_.upper();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j0 = i >= kl ? i - kl : 0;
        double s = rhs[i];
        for (std::size_t j = j0; j < i; ++j) s -= lu_.get(i, j) * rhs[j];
        rhs[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        const std::size_t j1 = std::min(n - 1, i + ku);
        double s = rhs[i];
        for (std::size_t j = i + 1; j <= j1; ++j) s -= lu_.get(i, j) * rhs[j];
        rhs[i] = s / lu_.get(i, i);
    }
}

}  // namespace cevfb
