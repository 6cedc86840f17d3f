#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "swv/errors.hpp"
#include "swv/matrix.hpp"

namespace swv {

namespace detail {

/// Padé approximant of order (m, m) to exp(B), for m in {3, 5, 7, 9}.
inline Mat pade_low_order(const Mat& b, int m) {
    static const std::array<double, 4> c3 = {120.0, 60.0, 12.0, 1.0};
    static const std::array<double, 6> c5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
    static const std::array<double, 8> c7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                             25200.0,    1512.0,    56.0,      1.0};
    static const std::array<double, 10> c9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                              302702400.0,   30270240.0,   2162160.0,
                                              110880.0,      3960.0,       90.0,
                                              1.0};
    const double* c = nullptr;
    switch (m) {
        case 3: c = c3.data(); break;
        case 5: c = c5.data(); break;
        case 7: c = c7.data(); break;
        default: c = c9.data(); break;
    }
    const std::size_t d = b.rows();
    const Mat b2 = b * b;
    Mat even = Mat::identity(d) * c[0];
    Mat odd = Mat::identity(d) * c[1];
    Mat pow = Mat::identity(d);
    for (int k = 2; k <= m; k += 2) {
        pow = pow * b2;
        even += pow * c[k];
        if (k + 1 <= m) odd += pow * c[k + 1];
    }
    const Mat u = b * odd;
    return solve_linear(even - u, even + u);
}

/// Padé approximant of order (13, 13) to exp(B).
inline Mat pade13(const Mat& b) {
    static const std::array<double, 14> c = {64764752532480000.0,
                                             32382376266240000.0,
                                             7771770303897600.0,
                                             1187353796428800.0,
                                             129060195264000.0,
                                             10559470521600.0,
                                             670442572800.0,
                                             33522128640.0,
                                             1323241920.0,
                                             40840800.0,
                                             960960.0,
                                             16380.0,
                                             182.0,
                                             1.0};
    const std::size_t d = b.rows();
    const Mat id = Mat::identity(d);
    const Mat b2 = b * b;
    const Mat b4 = b2 * b2;
    const Mat b6 = b4 * b2;
    const Mat u = b * (b6 * (b6 * c[13] + b4 * c[11] + b2 * c[9]) + b6 * c[7] + b4 * c[5] +
                       b2 * c[3] + id * c[1]);
    const Mat v = b6 * (b6 * c[12] + b4 * c[10] + b2 * c[8]) + b6 * c[6] + b4 * c[4] +
                  b2 * c[2] + id * c[0];
    return solve_linear(v - u, v + u);
}

} // namespace detail

/**
 * @brief Matrix exponential exp(A t) by scaling and squaring.
 *
 * Uses the Higham (2005) degree ladder: the lowest Padé order whose backward
 * error bound covers the 1-norm of A t is chosen among {3, 5, 7, 9, 13}, and
 * above the last threshold the argument is scaled down by a power of two
 * before the order-13 approximant and squared back. Throws OverflowError when
 * the result is not finite.
 */
inline Mat expm(const Mat& a, double t = 1.0) {
    if (!a.square()) throw DimensionMismatchError("expm of non-square matrix");
    const Mat b = a * t;
    if (!b.all_finite()) throw OverflowError("expm argument is not finite");

    constexpr double theta3 = 1.495585217958292e-2;
    constexpr double theta5 = 2.539398330063230e-1;
    constexpr double theta7 = 9.504178996162932e-1;
    constexpr double theta9 = 2.097847961257068e0;
    constexpr double theta13 = 5.371920351148152e0;

    const double norm = b.one_norm();
    Mat result(0, 0);
    if (norm <= theta3) {
        result = detail::pade_low_order(b, 3);
    } else if (norm <= theta5) {
        result = detail::pade_low_order(b, 5);
    } else if (norm <= theta7) {
        result = detail::pade_low_order(b, 7);
    } else if (norm <= theta9) {
        result = detail::pade_low_order(b, 9);
    } else {
        int squarings = 0;
        double scaled = norm / theta13;
        while (scaled > 1.0) {
            scaled *= 0.5;
            ++squarings;
        }
        result = detail::pade13(b * std::ldexp(1.0, -squarings));
        for (int k = 0; k < squarings; ++k) result = result * result;
    }
    if (!result.all_finite()) throw OverflowError("expm result overflowed");
    return result;
}

} // namespace swv
