#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swv/errors.hpp"

namespace swv {

using Vec = std::vector<double>;

/**
 * @brief Dense real matrix with row-major storage.
 *
 * Dimensions are fixed at construction and entries default to zero.
 * Indexing is unchecked; shape checks happen in the arithmetic operators.
 */
class Mat {
public:
    Mat() = default;

    Mat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

    Mat(std::initializer_list<std::initializer_list<double>> init)
        : rows_(init.size()), cols_(init.size() ? init.begin()->size() : 0) {
        a_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw DimensionMismatchError("ragged initializer for Mat");
            a_.insert(a_.end(), row.begin(), row.end());
        }
    }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }

    bool operator==(const Mat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    Mat transpose() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double trace() const {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
        return s;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    /// Maximum absolute column sum (the induced 1-norm).
    double one_norm() const {
        double best = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
            best = std::max(best, s);
        }
        return best;
    }

    double max_abs() const {
        double best = 0.0;
        for (double v : a_) best = std::max(best, std::abs(v));
        return best;
    }

    bool all_finite() const {
        for (double v : a_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    Mat& operator+=(const Mat& o) {
        require_same_shape(o, "+=");
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }

    Mat& operator-=(const Mat& o) {
        require_same_shape(o, "-=");
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }

    Mat& operator*=(double s) {
        for (double& v : a_) v *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, double s) { return a *= s; }
    friend Mat operator*(double s, Mat a) { return a *= s; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        if (a.cols_ != b.rows_)
            throw DimensionMismatchError("Mat product: " + shape_str(a) + " * " + shape_str(b));
        Mat c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Vec operator*(const Mat& a, const Vec& x) {
        if (a.cols_ != x.size())
            throw DimensionMismatchError("Mat * Vec size mismatch");
        Vec y(a.rows_, 0.0);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
        return y;
    }

private:
    static std::string shape_str(const Mat& m) {
        return std::to_string(m.rows_) + "x" + std::to_string(m.cols_);
    }

    void require_same_shape(const Mat& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionMismatchError(std::string("Mat ") + op + ": " + shape_str(*this) +
                                         " vs " + shape_str(o));
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

// -- vector helpers ----------------------------------------------------------

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

inline Vec scaled(Vec v, double s) {
    for (double& x : v) x *= s;
    return v;
}

/// Quadratic form x^T M x.
inline double quad_form(const Mat& m, const Vec& x) {
    return dot(x, m * x);
}

// -- factorizations ----------------------------------------------------------

/**
 * @brief Solves A X = B in place via LU with partial pivoting.
 *
 * A is consumed. Throws SingularSystemError when a pivot vanishes.
 */
inline Mat solve_linear(Mat a, Mat b) {
    if (!a.square() || a.rows() != b.rows())
        throw DimensionMismatchError("solve_linear shape mismatch");
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
        if (a(piv, col) == 0.0)
            throw SingularSystemError("singular system in solve_linear");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
        }
        const double inv = 1.0 / a(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = a(i, col) * inv;
            if (f == 0.0) continue;
            for (std::size_t j = col + 1; j < n; ++j) a(i, j) -= f * a(col, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(col, j);
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        const double inv = 1.0 / a(col, col);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = b(col, j);
            for (std::size_t k = col + 1; k < n; ++k) s -= a(col, k) * b(k, j);
            b(col, j) = s * inv;
        }
    }
    return b;
}

inline Vec solve_linear(const Mat& a, const Vec& rhs) {
    Mat b(rhs.size(), 1);
    for (std::size_t i = 0; i < rhs.size(); ++i) b(i, 0) = rhs[i];
    Mat x = solve_linear(a, std::move(b));
    Vec out(rhs.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x(i, 0);
    return out;
}

inline double determinant(Mat a) {
    if (!a.square()) throw DimensionMismatchError("determinant of non-square Mat");
    const std::size_t n = a.rows();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
        if (a(piv, col) == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            det = -det;
        }
        det *= a(col, col);
        const double inv = 1.0 / a(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = a(i, col) * inv;
            for (std::size_t j = col + 1; j < n; ++j) a(i, j) -= f * a(col, j);
        }
    }
    return det;
}

inline Mat inverse(const Mat& a) {
    if (!a.square()) throw DimensionMismatchError("inverse of non-square Mat");
    return solve_linear(a, Mat::identity(a.rows()));
}

/// Lower Cholesky factor of a symmetric matrix, or nullopt when a pivot is
/// nonpositive. Success of this factorization is the library's definition of
/// positive definiteness.
inline std::optional<Mat> cholesky_lower(const Mat& s) {
    const std::size_t n = s.rows();
    Mat l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) return std::nullopt;
        l(j, j) = std::sqrt(d);
        const double inv = 1.0 / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v * inv;
        }
    }
    return l;
}

/// Solves L X = B for lower-triangular L.
inline Mat forward_subst(const Mat& l, Mat b) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double inv = 1.0 / l(i, i);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = b(i, j);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b(k, j);
            b(i, j) = s * inv;
        }
    }
    return b;
}

/// Solves L^T X = B for lower-triangular L.
inline Mat back_subst_transposed(const Mat& l, Mat b) {
    const std::size_t n = l.rows();
    for (std::size_t i = n; i-- > 0;) {
        const double inv = 1.0 / l(i, i);
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = b(i, j);
            for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * b(k, j);
            b(i, j) = s * inv;
        }
    }
    return b;
}

/**
 * @brief Symmetric positive definite matrix.
 *
 * Construction validates symmetry to 1e-10 relative tolerance, symmetrizes
 * exactly, and requires the Cholesky factorization to succeed. The factor is
 * cached for reuse.
 */
class SpdMat {
public:
    static constexpr double symmetry_tol = 1e-10;

    explicit SpdMat(Mat m) : m_(std::move(m)) {
        if (!m_.square()) throw DimensionMismatchError("SpdMat requires a square matrix");
        if (!m_.all_finite()) throw NotSpdError("SpdMat entries must be finite");
        const double scale = std::max(1.0, m_.max_abs());
        for (std::size_t i = 0; i < m_.rows(); ++i)
            for (std::size_t j = i + 1; j < m_.cols(); ++j) {
                if (std::abs(m_(i, j) - m_(j, i)) > symmetry_tol * scale)
                    throw NotSymmetricError("SpdMat asymmetry at (" + std::to_string(i) + "," +
                                            std::to_string(j) + ")");
                const double v = 0.5 * (m_(i, j) + m_(j, i));
                m_(i, j) = v;
                m_(j, i) = v;
            }
        auto l = cholesky_lower(m_);
        if (!l) throw NotSpdError("matrix is not positive definite");
        chol_ = std::move(*l);
    }

    std::size_t dim() const { return m_.rows(); }
    const Mat& mat() const { return m_; }
    const Mat& chol() const { return chol_; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
    Mat m_;
    Mat chol_;
};

} // namespace swv
