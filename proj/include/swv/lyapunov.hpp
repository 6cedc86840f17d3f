#pragma once

#include <cstddef>

#include "swv/errors.hpp"
#include "swv/matrix.hpp"

namespace swv {

/**
 * @brief Solves the continuous Lyapunov equation A^T P + P A = -Q for P.
 *
 * The equation is vectorized row-major over the d^2 unknowns and solved as one
 * dense linear system, then the result is symmetrized. The solution is
 * required to be positive definite; callers pass a Hurwitz A (or a shifted
 * matrix that is Hurwitz) to guarantee that.
 *
 * Throws SingularLyapunovError when the vectorized system is singular, which
 * happens exactly when A and -A share an eigenvalue, and NotSpdError when the
 * symmetrized solution fails its Cholesky factorization.
 */
inline SpdMat solve_lyapunov(const Mat& a, const SpdMat& q) {
    if (!a.square() || a.rows() != q.dim())
        throw DimensionMismatchError("solve_lyapunov shape mismatch");
    const std::size_t d = a.rows();
    const std::size_t n = d * d;

    // Row e = i*d+j states sum_k A(k,i) P(k,j) + sum_l A(l,j) P(i,l) = -Q(i,j).
    Mat sys(n, n);
    Vec rhs(n, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t e = i * d + j;
            for (std::size_t k = 0; k < d; ++k) sys(e, k * d + j) += a(k, i);
            for (std::size_t l = 0; l < d; ++l) sys(e, i * d + l) += a(l, j);
            rhs[e] = -q(i, j);
        }

    Vec p;
    try {
        p = solve_linear(std::move(sys), rhs);
    } catch (const SingularSystemError&) {
        throw SingularLyapunovError("Lyapunov equation is singular for this A");
    }

    Mat sol(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) sol(i, j) = 0.5 * (p[i * d + j] + p[j * d + i]);
    if (!sol.all_finite()) throw SingularLyapunovError("Lyapunov solution is not finite");
    return SpdMat(std::move(sol));
}

/// Residual A^T P + P A + Q, useful for verifying a computed solution.
inline Mat lyapunov_residual(const Mat& a, const SpdMat& q, const SpdMat& p) {
    return a.transpose() * p.mat() + p.mat() * a + q.mat();
}

} // namespace swv
