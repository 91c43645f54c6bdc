#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rodtbc/error.hpp"

namespace rodtbc {

/// Row-major dense square matrix.
template <class T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, T(0)) {}

    std::size_t size() const { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    std::vector<T> apply(const std::vector<T>& x) const {
        std::vector<T> y(n_, T(0));
        for (std::size_t i = 0; i < n_; ++i) {
            T acc(0);
            for (std::size_t j = 0; j < n_; ++j) acc += (*this)(i, j) * x[j];
            y[i] = acc;
        }
        return y;
    }

    /// Induced 1-norm (max column sum).
    T norm1() const {
        using std::abs;
        T best(0);
        for (std::size_t j = 0; j < n_; ++j) {
            T col(0);
            for (std::size_t i = 0; i < n_; ++i) col += abs((*this)(i, j));
            best = std::max(best, col);
        }
        return best;
    }

private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

/// LU factorization with full (row and column) pivoting: P A Q = L U.
template <class T>
class FullPivotLU {
public:
    explicit FullPivotLU(DenseMatrix<T> a) : lu_(std::move(a)) {
        using std::abs;
        const std::size_t n = lu_.size();
        row_.resize(n);
        col_.resize(n);
        for (std::size_t i = 0; i < n; ++i) row_[i] = col_[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t pr = k, pc = k;
            T best(0);
            for (std::size_t i = k; i < n; ++i)
                for (std::size_t j = k; j < n; ++j)
                    if (abs(lu_(i, j)) > best) {
                        best = abs(lu_(i, j));
                        pr = i;
                        pc = j;
                    }
            if (best == T(0)) {
                singular_ = true;
                return;
            }
            if (pr != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(pr, j));
                std::swap(row_[k], row_[pr]);
            }
            if (pc != k) {
                for (std::size_t i = 0; i < n; ++i) std::swap(lu_(i, k), lu_(i, pc));
                std::swap(col_[k], col_[pc]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                lu_(i, k) /= lu_(k, k);
                const T f = lu_(i, k);
                for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    bool singular() const { return singular_; }

    std::vector<T> solve(const std::vector<T>& b) const {
        if (singular_) throw SingularSystem("FullPivotLU::solve on a singular matrix");
        const std::size_t n = lu_.size();
        std::vector<T> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            T acc = b[row_[i]];
            for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * y[j];
            y[i] = acc;
        }
        for (std::size_t i = n; i-- > 0;) {
            T acc = y[i];
            for (std::size_t j = i + 1; j < n; ++j) acc -= lu_(i, j) * y[j];
            y[i] = acc / lu_(i, i);
        }
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i) x[col_[i]] = y[i];
        return x;
    }

    /// 1-norm of the inverse, column by column (M is small here).
    T inverse_norm1() const {
        using std::abs;
        const std::size_t n = lu_.size();
        T best(0);
        std::vector<T> e(n, T(0));
        for (std::size_t j = 0; j < n; ++j) {
            e.assign(n, T(0));
            e[j] = T(1);
            const auto col = solve(e);
            T sum(0);
            for (const auto& v : col) sum += abs(v);
            best = std::max(best, sum);
        }
        return best;
    }

private:
    DenseMatrix<T> lu_;
    std::vector<std::size_t> row_, col_;
    bool singular_ = false;
};

/// Banded matrix with kl sub- and ku super-diagonals, factored by Gaussian
/// elimination with partial pivoting (fill-in widens the upper band to kl+ku).
class BandedLU {
public:
    BandedLU(std::size_t n, std::size_t kl, std::size_t ku)
        : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1), ab_(n * (2 * kl + ku + 1), 0.0),
          piv_(n) {}

    std::size_t size() const { return n_; }
    std::size_t lower() const { return kl_; }
    std::size_t upper() const { return ku_; }

    /// Entry (i, j) of the unfactored matrix; |i - j| must respect the bands.
    void set(std::size_t i, std::size_t j, double v) {
        if (j + kl_ < i || i + ku_ < j) throw Error("BandedLU::set outside the band");
        at(i, j) = v;
    }
    double get(std::size_t i, std::size_t j) const {
        if (j + kl_ < i || i + ku_ + kl_ < j) return 0.0;
        return ab_[i * width_ + (j + kl_ - i)];
    }

    /// Returns false when a zero pivot is met.
    bool factor() {
        const std::size_t uw = kl_ + ku_;
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t last = std::min(n_ - 1, k + kl_);
            std::size_t p = k;
            double best = std::abs(at(k, k));
            for (std::size_t i = k + 1; i <= last; ++i)
                if (std::abs(at(i, k)) > best) {
                    best = std::abs(at(i, k));
                    p = i;
                }
            piv_[k] = p;
            if (best == 0.0) return factored_ = false;
            const std::size_t jmax = std::min(n_ - 1, k + uw);
            if (p != k)
                for (std::size_t j = k; j <= jmax; ++j) std::swap(at(k, j), at(p, j));
            for (std::size_t i = k + 1; i <= last; ++i) {
                const double f = at(i, k) / at(k, k);
                at(i, k) = f;
                if (f == 0.0) continue;
                for (std::size_t j = k + 1; j <= jmax; ++j) at(i, j) -= f * at(k, j);
            }
        }
        return factored_ = true;
    }

    bool factored() const { return factored_; }

    /// In-place solve of A x = b.
    void solve(std::span<double> b) const {
        if (!factored_) throw SingularSystem("BandedLU::solve before a successful factor()");
        const std::size_t uw = kl_ + ku_;
        for (std::size_t k = 0; k < n_; ++k) {
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
            const std::size_t last = std::min(n_ - 1, k + kl_);
            for (std::size_t i = k + 1; i <= last; ++i) b[i] -= at(i, k) * b[k];
        }
        for (std::size_t k = n_; k-- > 0;) {
            double acc = b[k];
            const std::size_t jmax = std::min(n_ - 1, k + uw);
            for (std::size_t j = k + 1; j <= jmax; ++j) acc -= at(k, j) * b[j];
            b[k] = acc / at(k, k);
        }
    }

private:
    // Row i stores columns i-kl .. i+kl+ku.
    double& at(std::size_t i, std::size_t j) { return ab_[i * width_ + (j + kl_ - i)]; }
    double at(std::size_t i, std::size_t j) const { return ab_[i * width_ + (j + kl_ - i)]; }

    std::size_t n_, kl_, ku_, width_;
    std::vector<double> ab_;
    std::vector<std::size_t> piv_;
    bool factored_ = false;
};

/// Double-sweep (Thomas) solve of lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
inline std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n), x(n);
    double denom = diag[0];
    if (denom == 0.0) throw SingularSystem("tridiagonal sweep: zero pivot at row 0");
    c[0] = n > 1 ? upper[0] / denom : 0.0;
    d[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        if (denom == 0.0 || !std::isfinite(denom))
            throw SingularSystem("tridiagonal sweep: zero pivot");
        c[i] = i + 1 < n ? upper[i] / denom : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

}  // namespace rodtbc
