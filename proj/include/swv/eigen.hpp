#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "swv/errors.hpp"
#include "swv/matrix.hpp"

namespace swv {

/// Extreme eigenvalues of a symmetric matrix or a definite pencil.
struct EigExtrema {
    double lambda_min;
    double lambda_max;
};

namespace detail {

inline void require_symmetric(const Mat& s, const char* who) {
    if (!s.square()) throw DimensionMismatchError(std::string(who) + ": non-square matrix");
    const double tol = 1e-10 * std::max(1.0, s.max_abs());
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = i + 1; j < s.cols(); ++j)
            if (std::abs(s(i, j) - s(j, i)) > tol)
                throw NotSymmetricError(std::string(who) + ": matrix is not symmetric");
}

inline double off_diagonal_norm(const Mat& s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = i + 1; j < s.cols(); ++j) sum += 2.0 * s(i, j) * s(i, j);
    return std::sqrt(sum);
}

} // namespace detail

/**
 * @brief All eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi.
 *
 * Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius mass
 * falls below 1e-14 of the matrix norm. When @p vectors is non-null it
 * receives the orthonormal eigenvectors as columns, ordered to match.
 */
inline std::vector<double> sym_eigenvalues(Mat s, Mat* vectors = nullptr) {
    detail::require_symmetric(s, "sym_eigenvalues");
    const std::size_t n = s.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (s(i, j) + s(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    Mat v = Mat::identity(n);

    const double scale = std::max(s.frobenius_norm(), 1e-300);
    const int max_sweeps = 100;
    int sweep = 0;
    while (detail::off_diagonal_norm(s) > 1e-14 * scale) {
        if (++sweep > max_sweeps)
            throw NoConvergenceError("Jacobi eigenvalue iteration failed to converge");
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (apq == 0.0) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return s(a, a) < s(b, b); });
    std::vector<double> eig(n);
    for (std::size_t k = 0; k < n; ++k) eig[k] = s(order[k], order[k]);
    if (vectors) {
        Mat out(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) out(i, k) = v(i, order[k]);
        *vectors = std::move(out);
    }
    return eig;
}

inline EigExtrema sym_eig_extrema(const Mat& s) {
    const auto eig = sym_eigenvalues(s);
    return {eig.front(), eig.back()};
}

/**
 * @brief Extreme generalized eigenvalues of the definite pencil (B, A).
 *
 * Returns min and max of the ratios x^T B x / x^T A x over x != 0, computed as
 * the eigenvalue extrema of L^{-1} B L^{-T} where A = L L^T. When @p states is
 * non-null it receives vectors attaining each eigenvalue ratio as columns,
 * ordered ascending with the extrema first and last.
 */
inline EigExtrema pencil_extrema(const SpdMat& a, const SpdMat& b, Mat* states = nullptr) {
    if (a.dim() != b.dim()) throw DimensionMismatchError("pencil_extrema dimension mismatch");
    const Mat& l = a.chol();
    Mat x = forward_subst(l, b.mat());            // X = L^{-1} B
    Mat m = forward_subst(l, x.transpose());      // M = L^{-1} B L^{-T}
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = v;
            m(j, i) = v;
        }
    Mat vecs;
    const auto eig = sym_eigenvalues(m, states ? &vecs : nullptr);
    if (states) *states = back_subst_transposed(l, std::move(vecs));
    return {eig.front(), eig.back()};
}

namespace detail {

/// Reduces a square matrix to upper Hessenberg form in place by stabilized
/// elementary similarity transforms with pivoting.
inline void hessenberg_reduce(Mat& h) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double x = 0.0;
        std::size_t piv = m;
        for (std::size_t j = m; j < n; ++j)
            if (std::abs(h(j, m - 1)) > std::abs(x)) {
                x = h(j, m - 1);
                piv = j;
            }
        if (piv != m) {
            for (std::size_t j = m - 1; j < n; ++j) std::swap(h(piv, j), h(m, j));
            for (std::size_t j = 0; j < n; ++j) std::swap(h(j, piv), h(j, m));
        }
        if (x != 0.0) {
            for (std::size_t i = m + 1; i < n; ++i) {
                double y = h(i, m - 1);
                if (y == 0.0) continue;
                y /= x;
                h(i, m - 1) = y;
                for (std::size_t j = m; j < n; ++j) h(i, j) -= y * h(m, j);
                for (std::size_t j = 0; j < n; ++j) h(j, m) += y * h(j, i);
            }
        }
    }
    for (std::size_t i = 2; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) h(i, j) = 0.0;
}

/**
 * @brief Eigenvalues of an upper Hessenberg matrix by the Francis
 * double-shift QR iteration with deflation and exceptional shifts.
 *
 * Classic hqr scheme; the iteration budget is 30 steps per eigenvalue.
 */
inline std::vector<std::complex<double>> hessenberg_eigenvalues(Mat h) {
    const int n = static_cast<int>(h.rows());
    std::vector<std::complex<double>> eig;
    eig.reserve(n);

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(h(i, j));

    double t = 0.0;
    int nn = n - 1;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(h(l, l - 1)) + s == s) {
                    h(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = h(nn, nn);
            if (l == nn) {
                eig.emplace_back(x + t, 0.0);
                --nn;
            } else {
                double y = h(nn - 1, nn - 1);
                double w = h(nn, nn - 1) * h(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + (p >= 0.0 ? z : -z);
                        eig.emplace_back(x + z, 0.0);
                        eig.emplace_back(z != 0.0 ? x - w / z : x + z, 0.0);
                    } else {
                        eig.emplace_back(x + p, z);
                        eig.emplace_back(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (its == 30)
                        throw NoConvergenceError("QR eigenvalue iteration exceeded 30 steps");
                    if (its == 10 || its == 20) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) h(i, i) -= x;
                        double s = std::abs(h(nn, nn - 1)) + std::abs(h(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    double p = 0.0, q = 0.0, r = 0.0;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        double z = h(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / h(m + 1, m) + h(m, m + 1);
                        q = h(m + 1, m + 1) - z - rr - ss;
                        r = h(m + 2, m + 1);
                        double scale = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= scale;
                        q /= scale;
                        r /= scale;
                        if (m == l) break;
                        double u = std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r));
                        double v = std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) +
                                                  std::abs(h(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        h(i, i - 2) = 0.0;
                        if (i != m + 2) h(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        double xs = 0.0;
                        if (k != m) {
                            p = h(k, k - 1);
                            q = h(k + 1, k - 1);
                            r = (k != nn - 1 ? h(k + 2, k - 1) : 0.0);
                            xs = std::abs(p) + std::abs(q) + std::abs(r);
                            if (xs != 0.0) {
                                p /= xs;
                                q /= xs;
                                r /= xs;
                            }
                        }
                        double s = std::sqrt(p * p + q * q + r * r);
                        if (p < 0.0) s = -s;
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) h(k, k - 1) = -h(k, k - 1);
                            } else {
                                h(k, k - 1) = -s * xs;
                            }
                            p += s;
                            const double px = p / s;
                            const double py = q / s;
                            const double pz = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                double pp = h(k, j) + q * h(k + 1, j);
                                if (k != nn - 1) {
                                    pp += r * h(k + 2, j);
                                    h(k + 2, j) -= pp * pz;
                                }
                                h(k + 1, j) -= pp * py;
                                h(k, j) -= pp * px;
                            }
                            const int mmin = std::min(nn, k + 3);
                            for (int i = l; i <= mmin; ++i) {
                                double pp = px * h(i, k) + py * h(i, k + 1);
                                if (k != nn - 1) {
                                    pp += pz * h(i, k + 2);
                                    h(i, k + 2) -= pp * r;
                                }
                                h(i, k + 1) -= pp * q;
                                h(i, k) -= pp;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    return eig;
}

} // namespace detail

/// All eigenvalues of a general real square matrix. Dimensions 1 and 2 use
/// closed forms; larger matrices go through Hessenberg reduction and the
/// Francis QR iteration.
inline std::vector<std::complex<double>> eigenvalues(const Mat& a) {
    if (!a.square()) throw DimensionMismatchError("eigenvalues of non-square matrix");
    const std::size_t n = a.rows();
    if (n == 0) return {};
    if (n == 1) return {std::complex<double>(a(0, 0), 0.0)};
    if (n == 2) {
        const double tr = a(0, 0) + a(1, 1);
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        const double disc = tr * tr - 4.0 * det;
        if (disc >= 0.0) {
            const double rt = std::sqrt(disc);
            return {std::complex<double>(0.5 * (tr - rt), 0.0),
                    std::complex<double>(0.5 * (tr + rt), 0.0)};
        }
        const double im = 0.5 * std::sqrt(-disc);
        return {std::complex<double>(0.5 * tr, -im), std::complex<double>(0.5 * tr, im)};
    }
    Mat h = a;
    detail::hessenberg_reduce(h);
    return detail::hessenberg_eigenvalues(std::move(h));
}

/// Largest real part over the spectrum of A.
inline double spectral_abscissa(const Mat& a) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : eigenvalues(a)) best = std::max(best, z.real());
    return best;
}

} // namespace swv
