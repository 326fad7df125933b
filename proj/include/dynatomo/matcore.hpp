// Copyright 2026 The Dynatomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense linear algebra for small complex matrices (d up to ~16).
//
// Everything here is a pure function over value types. Matrices are stored
// row-major and vectorization stacks rows, so vec([[a,b],[c,d]]) = (a,b,c,d).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "dynatomo/error.hpp"
#include "dynatomo/rng.hpp"

namespace dynatomo {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;
using RVector = std::vector<double>;

inline double conj_of(double x) { return x; }
inline cplx conj_of(const cplx &z) { return std::conj(z); }
inline double abs2(double x) { return x * x; }
inline double abs2(const cplx &z) { return z.real() * z.real() + z.imag() * z.imag(); }

template <typename T>
class Matrix {
   public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{}) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw Error(ErrorCode::ShapeMismatch, "entry count " + std::to_string(data_.size()) +
                                                      " does not match " + std::to_string(rows_) + "x" +
                                                      std::to_string(cols_));
        }
    }
    Matrix(std::initializer_list<std::initializer_list<T>> rows) : rows_(rows.size()) {
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto &row : rows) {
            if (row.size() != cols_) throw Error(ErrorCode::ShapeMismatch, "ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t k = 0; k < n; ++k) m(k, k) = T{1};
        return m;
    }
    static Matrix diagonal(std::span<const T> values) {
        Matrix m(values.size(), values.size());
        for (std::size_t k = 0; k < values.size(); ++k) m(k, k) = values[k];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }

    std::vector<T> column(std::size_t c) const {
        std::vector<T> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }
    std::vector<T> row(std::size_t r) const {
        return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                              data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
    }

    Matrix &operator+=(const Matrix &other) {
        require_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
        return *this;
    }
    Matrix &operator-=(const Matrix &other) {
        require_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
        return *this;
    }
    Matrix &operator*=(const T &s) {
        for (auto &x : data_) x *= s;
        return *this;
    }

    bool operator==(const Matrix &) const = default;

   private:
    void require_same_shape(const Matrix &other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) {
            throw Error(ErrorCode::ShapeMismatch, "operands have different shapes");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using CMatrix = Matrix<cplx>;
using RMatrix = Matrix<double>;

template <typename T>
Matrix<T> operator+(Matrix<T> a, const Matrix<T> &b) {
    a += b;
    return a;
}
template <typename T>
Matrix<T> operator-(Matrix<T> a, const Matrix<T> &b) {
    a -= b;
    return a;
}
template <typename T>
Matrix<T> operator*(Matrix<T> a, const T &s) {
    a *= s;
    return a;
}
template <typename T>
Matrix<T> operator*(const T &s, Matrix<T> a) {
    a *= s;
    return a;
}
inline CMatrix operator*(double s, CMatrix a) {
    a *= cplx(s);
    return a;
}

template <typename T>
Matrix<T> matmul(const Matrix<T> &a, const Matrix<T> &b) {
    if (a.cols() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "matmul inner dimensions differ");
    Matrix<T> out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

template <typename T>
Matrix<T> operator*(const Matrix<T> &a, const Matrix<T> &b) {
    return matmul(a, b);
}

template <typename T>
std::vector<T> apply(const Matrix<T> &a, std::span<const T> v) {
    if (a.cols() != v.size()) throw Error(ErrorCode::ShapeMismatch, "matrix-vector size mismatch");
    std::vector<T> out(a.rows(), T{});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T acc{};
        for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * v[k];
        out[i] = acc;
    }
    return out;
}

template <typename T>
Matrix<T> adjoint(const Matrix<T> &a) {
    Matrix<T> out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = conj_of(a(r, c));
    return out;
}

template <typename T>
T trace(const Matrix<T> &a) {
    if (!a.is_square()) throw Error(ErrorCode::ShapeMismatch, "trace of non-square matrix");
    T acc{};
    for (std::size_t k = 0; k < a.rows(); ++k) acc += a(k, k);
    return acc;
}

template <typename T>
double frobenius_norm(const Matrix<T> &a) {
    double acc = 0.0;
    for (const auto &x : a.data()) acc += abs2(x);
    return std::sqrt(acc);
}

template <typename T>
double max_abs(const Matrix<T> &a) {
    double best = 0.0;
    for (const auto &x : a.data()) best = std::max(best, std::abs(x));
    return best;
}

/// tr(A^dagger B).
inline cplx frobenius_inner(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "frobenius_inner operands have different shapes");
    }
    cplx acc{};
    for (std::size_t k = 0; k < a.data().size(); ++k) acc += std::conj(a.data()[k]) * b.data()[k];
    return acc;
}

/// <u|v>, conjugate-linear in the first argument.
inline cplx inner(std::span<const cplx> u, std::span<const cplx> v) {
    if (u.size() != v.size()) throw Error(ErrorCode::ShapeMismatch, "inner product length mismatch");
    cplx acc{};
    for (std::size_t k = 0; k < u.size(); ++k) acc += std::conj(u[k]) * v[k];
    return acc;
}

inline double vector_norm(std::span<const cplx> v) {
    double acc = 0.0;
    for (const auto &x : v) acc += abs2(x);
    return std::sqrt(acc);
}

/// |u><v|
inline CMatrix outer(std::span<const cplx> u, std::span<const cplx> v) {
    CMatrix out(u.size(), v.size());
    for (std::size_t r = 0; r < u.size(); ++r)
        for (std::size_t c = 0; c < v.size(); ++c) out(r, c) = u[r] * std::conj(v[c]);
    return out;
}

inline CMatrix projector(std::span<const cplx> u) { return outer(u, u); }

inline CVector scaled(std::span<const cplx> v, cplx s) {
    CVector out(v.begin(), v.end());
    for (auto &x : out) x *= s;
    return out;
}

inline CMatrix to_complex(const RMatrix &a) {
    CMatrix out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.data().size(); ++k) out.data()[k] = a.data()[k];
    return out;
}

inline double hermiticity_defect(const CMatrix &a) {
    if (!a.is_square()) return INFINITY;
    double acc = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) acc += abs2(a(r, c) - std::conj(a(c, r)));
    return std::sqrt(acc);
}

inline CMatrix hermitian_part(const CMatrix &a) {
    CMatrix out(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = 0.5 * (a(r, c) + std::conj(a(c, r)));
    return out;
}

template <typename T>
bool all_finite(const Matrix<T> &a) {
    return std::all_of(a.data().begin(), a.data().end(), [](const T &x) {
        if constexpr (std::is_same_v<T, double>) {
            return std::isfinite(x);
        } else {
            return std::isfinite(x.real()) && std::isfinite(x.imag());
        }
    });
}

/// Row-major stacking of a square matrix into a d^2 x 1 column.
inline CMatrix vectorize(const CMatrix &a) {
    if (!a.is_square()) throw Error(ErrorCode::ShapeMismatch, "vectorize expects a square matrix");
    return CMatrix(a.rows() * a.cols(), 1, std::vector<cplx>(a.data().begin(), a.data().end()));
}

inline CMatrix devectorize(const CMatrix &v) {
    const std::size_t n = v.rows() * v.cols();
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (d * d != n) throw Error(ErrorCode::ShapeMismatch, "length is not a perfect square");
    return CMatrix(d, d, std::vector<cplx>(v.data().begin(), v.data().end()));
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic complex Jacobi).

struct HermitianEigenSystem {
    RVector eigenvalues;   // ascending
    CMatrix eigenvectors;  // column k belongs to eigenvalues[k]
};

namespace detail {

// Unitary acting on coordinates (p, q) that zeroes the off-diagonal entry of
// the 2x2 Hermitian block [[app, b], [conj(b), aqq]]:
//   U = diag(1, e^{-i phi}) * [[c, s], [-s, c]],  b = |b| e^{i phi},
//   tan(2 theta) = 2|b| / (aqq - app).
struct JacobiRotation {
    cplx u00, u01, u10, u11;

    static JacobiRotation make(double app, double aqq, cplx b) {
        const double mag = std::abs(b);
        const cplx phase_conj = std::conj(b / mag);
        const double theta = 0.5 * std::atan2(2.0 * mag, aqq - app);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        return {c, s, -s * phase_conj, c * phase_conj};
    }

    // M <- M U restricted to columns p, q.
    void apply_right(CMatrix &m, std::size_t p, std::size_t q) const {
        for (std::size_t k = 0; k < m.rows(); ++k) {
            const cplx x = m(k, p);
            const cplx y = m(k, q);
            m(k, p) = x * u00 + y * u10;
            m(k, q) = x * u01 + y * u11;
        }
    }

    // M <- U^dagger M restricted to rows p, q.
    void apply_left_adjoint(CMatrix &m, std::size_t p, std::size_t q) const {
        for (std::size_t k = 0; k < m.cols(); ++k) {
            const cplx x = m(p, k);
            const cplx y = m(q, k);
            m(p, k) = std::conj(u00) * x + std::conj(u10) * y;
            m(q, k) = std::conj(u01) * x + std::conj(u11) * y;
        }
    }
};

inline double off_diagonal_norm(const CMatrix &a) {
    double acc = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (r != c) acc += abs2(a(r, c));
    return std::sqrt(acc);
}

}  // namespace detail

inline constexpr int kJacobiSweepBudget = 100;
inline constexpr double kJacobiRelativeThreshold = 1e-13;

/// Eigenvalues ascending, eigenvectors as orthonormal columns.
/// Throws NotHermitian when ||A - A^dagger||_F > tol * max(1, ||A||_F).
inline HermitianEigenSystem hermitian_eigen(const CMatrix &input, double tol = 1e-10) {
    if (!input.is_square()) throw Error(ErrorCode::ShapeMismatch, "eigenproblem needs a square matrix");
    const double norm = frobenius_norm(input);
    if (hermiticity_defect(input) > tol * std::max(1.0, norm)) {
        throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian within tolerance");
    }
    const std::size_t n = input.rows();
    CMatrix a = hermitian_part(input);
    CMatrix v = CMatrix::identity(n);
    const double threshold = kJacobiRelativeThreshold * norm;

    for (int sweep = 0;; ++sweep) {
        if (detail::off_diagonal_norm(a) <= threshold) break;
        if (sweep == kJacobiSweepBudget) {
            throw Error(ErrorCode::NoConvergence, "Jacobi sweep budget exhausted");
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx b = a(p, q);
                if (b == cplx{}) continue;
                const auto rot = detail::JacobiRotation::make(a(p, p).real(), a(q, q).real(), b);
                rot.apply_right(a, p, q);
                rot.apply_left_adjoint(a, p, q);
                a(p, q) = a(q, p) = cplx{};
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                rot.apply_right(v, p, q);
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
    HermitianEigenSystem out{RVector(n), CMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
    }
    return out;
}

/// V f(diag) V^dagger.
inline CMatrix spectral_function(const HermitianEigenSystem &eig, const std::function<double(double)> &f) {
    const std::size_t n = eig.eigenvalues.size();
    CMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = f(eig.eigenvalues[k]);
        for (std::size_t r = 0; r < n; ++r) {
            const cplx vr = eig.eigenvectors(r, k) * fk;
            for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(eig.eigenvectors(c, k));
        }
    }
    return out;
}

inline constexpr double kPositiveDefiniteFloor = 1e-12;

/// The unique positive definite R with R A R = I. The default eigenvalue
/// floor is 1e-12 times the largest eigenvalue.
inline CMatrix inv_sqrt_pd(const CMatrix &a, std::optional<double> eig_floor = std::nullopt) {
    const auto eig = hermitian_eigen(a);
    const double top = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.back();
    const double floor = eig_floor.value_or(kPositiveDefiniteFloor * top);
    if (top <= 0.0 || eig.eigenvalues.front() < floor || eig.eigenvalues.front() <= 0.0) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "smallest eigenvalue " + std::to_string(eig.eigenvalues.front()) + " below floor");
    }
    return spectral_function(eig, [](double x) { return 1.0 / std::sqrt(x); });
}

// ---------------------------------------------------------------------------
// Singular values (one-sided Jacobi). Accurate to roughly eps * sigma_max,
// which keeps numerical-rank decisions meaningful at relative 1e-10.

template <typename T>
RVector singular_values(const Matrix<T> &input) {
    CMatrix w(input.rows(), input.cols());
    for (std::size_t k = 0; k < input.data().size(); ++k) w.data()[k] = input.data()[k];
    if (w.rows() < w.cols()) w = adjoint(w);
    const std::size_t n = w.cols();
    const std::size_t m = w.rows();

    auto column_inner = [&](std::size_t p, std::size_t q) {
        cplx acc{};
        for (std::size_t r = 0; r < m; ++r) acc += std::conj(w(r, p)) * w(r, q);
        return acc;
    };

    for (int sweep = 0; sweep < kJacobiSweepBudget; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = column_inner(p, p).real();
                const double beta = column_inner(q, q).real();
                const cplx gamma = column_inner(p, q);
                if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || gamma == cplx{}) continue;
                rotated = true;
                detail::JacobiRotation::make(alpha, beta, gamma).apply_right(w, p, q);
            }
        }
        if (!rotated) break;
    }

    RVector out(n);
    for (std::size_t c = 0; c < n; ++c) out[c] = std::sqrt(column_inner(c, c).real());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// sigma_max / sigma_min; infinity when sigma_min is exactly zero.
template <typename T>
double condition_number(const Matrix<T> &a) {
    const auto sv = singular_values(a);
    if (sv.empty() || sv.back() == 0.0) return INFINITY;
    return sv.front() / sv.back();
}

// ---------------------------------------------------------------------------
// Gaussian elimination with partial pivoting.

inline constexpr double kPivotRelativeThreshold = 1e-13;

template <typename T>
std::vector<T> solve_linear(Matrix<T> a, std::vector<T> b) {
    if (!a.is_square()) throw Error(ErrorCode::ShapeMismatch, "solve_linear needs a square system");
    if (a.rows() != b.size()) throw Error(ErrorCode::ShapeMismatch, "right-hand side length mismatch");
    const std::size_t n = a.rows();
    const double scale = max_abs(a);
    if (scale == 0.0) throw Error(ErrorCode::Singular, "zero matrix");

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a(r, k)) > std::abs(a(pivot, k))) pivot = r;
        if (std::abs(a(pivot, k)) < kPivotRelativeThreshold * scale) {
            throw Error(ErrorCode::Singular, "pivot below threshold in column " + std::to_string(k));
        }
        if (pivot != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
            std::swap(b[k], b[pivot]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const T factor = a(r, k) / a(k, k);
            if (factor == T{}) continue;
            for (std::size_t c = k; c < n; ++c) a(r, c) -= factor * a(k, c);
            b[r] -= factor * b[k];
        }
    }
    std::vector<T> x(n);
    for (std::size_t k = n; k-- > 0;) {
        T acc = b[k];
        for (std::size_t c = k + 1; c < n; ++c) acc -= a(k, c) * x[c];
        x[k] = acc / a(k, k);
    }
    return x;
}

template <typename T>
T determinant(Matrix<T> a) {
    if (!a.is_square()) throw Error(ErrorCode::ShapeMismatch, "determinant of non-square matrix");
    const std::size_t n = a.rows();
    T det{1};
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a(r, k)) > std::abs(a(pivot, k))) pivot = r;
        if (a(pivot, k) == T{}) return T{};
        if (pivot != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const T factor = a(r, k) / a(k, k);
            for (std::size_t c = k; c < n; ++c) a(r, c) -= factor * a(k, c);
        }
    }
    return det;
}

template <typename T>
Matrix<T> inverse(const Matrix<T> &a) {
    const std::size_t n = a.rows();
    Matrix<T> out(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<T> e(n, T{});
        e[c] = T{1};
        const auto col = solve_linear(a, std::move(e));
        for (std::size_t r = 0; r < n; ++r) out(r, c) = col[r];
    }
    return out;
}

/// argmin ||A x - b||_2 via the normal equations A^dagger A x = A^dagger b.
inline CVector lstsq_via_normal_equations(const CMatrix &a, std::span<const cplx> b) {
    if (a.rows() != b.size()) throw Error(ErrorCode::ShapeMismatch, "least squares row count mismatch");
    const CMatrix ah = adjoint(a);
    return solve_linear(matmul(ah, a), apply(ah, b));
}

// ---------------------------------------------------------------------------
// Seeded random objects.

inline CMatrix random_gaussian_matrix(std::size_t rows, std::size_t cols, Rng &rng) {
    CMatrix g(rows, cols);
    for (auto &x : g.data()) {
        const double re = rng.normal();
        const double im = rng.normal();
        x = cplx(re, im) * std::sqrt(0.5);
    }
    return g;
}

inline CVector random_unit_vector(std::size_t d, Rng &rng) {
    CVector v(d);
    for (auto &x : v) {
        const double re = rng.normal();
        const double im = rng.normal();
        x = cplx(re, im);
    }
    const double n = vector_norm(v);
    for (auto &x : v) x /= n;
    return v;
}

/// G G^dagger / tr(G G^dagger) for a seeded complex Gaussian G.
inline CMatrix random_density_matrix(std::size_t d, std::uint64_t seed) {
    Rng rng(seed, 0x5eed);
    const CMatrix g = random_gaussian_matrix(d, d, rng);
    CMatrix rho = hermitian_part(matmul(g, adjoint(g)));
    rho *= cplx(1.0 / trace(rho).real());
    return rho;
}

}  // namespace dynatomo
