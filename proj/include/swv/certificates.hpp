#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "swv/eigen.hpp"
#include "swv/errors.hpp"
#include "swv/family.hpp"
#include "swv/lyapunov.hpp"
#include "swv/matrix.hpp"

namespace swv {

enum class Stability { Stable, Unstable };

/// Decides stability of one subsystem by the sign of its spectral abscissa.
/// An abscissa within 1e-9 of zero is neither and raises BoundaryError.
inline Stability classify_subsystem(const Mat& a) {
    const double alpha = spectral_abscissa(a);
    if (std::abs(alpha) <= 1e-9)
        throw BoundaryError("spectral abscissa " + std::to_string(alpha) +
                            " is too close to zero to classify");
    return alpha < 0.0 ? Stability::Stable : Stability::Unstable;
}

/**
 * @brief Quadratic certificate V(x) = x^T P x for one subsystem.
 *
 * Along any trajectory of the subsystem, V decays at least at rate rate_upper
 * and at most at rate rate_lower:
 *
 *   exp(-rate_lower * t) V(x(0)) <= V(x(t)) <= exp(-rate_upper * t) V(x(0)).
 *
 * Stable subsystems have 0 < rate_upper <= rate_lower and epsilon = 0.
 * Unstable ones have rate_upper <= rate_lower <= 0 (the bounds grow), with P
 * solving the Lyapunov equation for A - epsilon I, where epsilon exceeds the
 * spectral abscissa.
 */
struct SubsystemCertificate {
    int id;
    Stability stability;
    double epsilon;
    SpdMat p;
    SpdMat q;
    double rate_upper;
    double rate_lower;
};

/// Bounds on the jump of the certificate value across one transition p -> q:
/// gain_lower <= V_q(x) / V_p(x) <= gain_upper for every x != 0, and both
/// bounds are attained.
struct EdgeGains {
    int from;
    int to;
    double gain_lower;
    double gain_upper;
};

/**
 * @brief Builds the certificate for one subsystem.
 *
 * Stable case: P solves A^T P + P A = -Q and the rates are the Rayleigh
 * bounds lmin(Q)/lmax(P) and lmax(Q)/lmin(P).
 *
 * Unstable case: the dynamics are shifted by epsilon = abscissa + eps_offset
 * so that A - epsilon I is Hurwitz, P solves the shifted equation, and the
 * rates fold the shift back in. The growth bound requires
 * 2 epsilon - lmax(Q)/lmin(P) >= 0; when the initial offset violates it the
 * offset is doubled until it holds, up to 60 doublings. The bound is a
 * difference of two nearly equal quantities at large epsilon, so acceptance
 * requires clearing a relative noise floor instead of bare nonnegativity;
 * otherwise round-off in lmin(P) could fabricate a certificate whose rates
 * are cancellation noise.
 */
inline SubsystemCertificate build_certificate(int id, const Mat& a, const SpdMat& q,
                                              double eps_offset = 1e-4) {
    if (!(eps_offset > 0.0)) throw ConfigError("eps_offset must be positive");
    const Stability stability = classify_subsystem(a);

    if (stability == Stability::Stable) {
        SpdMat p = solve_lyapunov(a, q);
        const EigExtrema ep = sym_eig_extrema(p.mat());
        const EigExtrema eq = sym_eig_extrema(q.mat());
        return SubsystemCertificate{id,
                                    stability,
                                    0.0,
                                    std::move(p),
                                    q,
                                    eq.lambda_min / ep.lambda_max,
                                    eq.lambda_max / ep.lambda_min};
    }

    const double alpha = spectral_abscissa(a);
    double offset = eps_offset;
    for (int attempt = 0; attempt < 60; ++attempt) {
        const double epsilon = alpha + offset;
        Mat shifted = a;
        for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, i) -= epsilon;
        SpdMat p = solve_lyapunov(shifted, q);
        const EigExtrema ep = sym_eig_extrema(p.mat());
        const EigExtrema eq = sym_eig_extrema(q.mat());
        const double slow = 2.0 * epsilon - eq.lambda_max / ep.lambda_min;
        if (slow >= 1e-12 * std::abs(epsilon)) {
            const double fast = 2.0 * epsilon - eq.lambda_min / ep.lambda_max;
            return SubsystemCertificate{id,      stability, epsilon, std::move(p),
                                        q,       -fast,     -slow};
        }
        offset *= 2.0;
    }
    throw EpsilonSearchError("no epsilon found with a nonnegative growth rate for subsystem " +
                             std::to_string(id));
}

/// Tight jump bounds for the transition from @p from to @p to, computed as
/// the extreme eigenvalues of the pencil of the two certificate matrices.
inline EdgeGains edge_gains(const SubsystemCertificate& from, const SubsystemCertificate& to) {
    const EigExtrema e = pencil_extrema(from.p, to.p);
    return EdgeGains{from.id, to.id, e.lambda_min, e.lambda_max};
}

struct CertificateOptions {
    double eps_offset = 1e-4;
    /// Per-subsystem right-hand sides; ids absent here use the identity.
    std::map<int, SpdMat> q_override;
};

/**
 * @brief Certificates for a whole family plus jump gains for every edge.
 */
class CertificateSet {
public:
    CertificateSet(SubsystemFamily family, std::vector<SubsystemCertificate> certs,
                   std::vector<EdgeGains> gains)
        : family_(std::move(family)), certs_(std::move(certs)) {
        for (const EdgeGains& g : gains) gains_.emplace(std::make_pair(g.from, g.to), g);
    }

    const SubsystemFamily& family() const { return family_; }

    const SubsystemCertificate& certificate(int id) const {
        if (id < 1 || id > static_cast<int>(certs_.size()))
            throw UnknownModeError("no certificate for subsystem " + std::to_string(id));
        return certs_[static_cast<std::size_t>(id - 1)];
    }

    bool has_gains(int p, int q) const { return gains_.count({p, q}) > 0; }

    const EdgeGains& gains(int p, int q) const {
        auto it = gains_.find({p, q});
        if (it == gains_.end())
            throw MissingEdgeGainError("no gains for transition " + std::to_string(p) + " -> " +
                                       std::to_string(q));
        return it->second;
    }

    const std::vector<SubsystemCertificate>& certificates() const { return certs_; }

    const std::map<std::pair<int, int>, EdgeGains>& all_gains() const { return gains_; }

    std::set<int> stable_ids() const {
        std::set<int> out;
        for (const auto& c : certs_)
            if (c.stability == Stability::Stable) out.insert(c.id);
        return out;
    }

    std::set<int> unstable_ids() const {
        std::set<int> out;
        for (const auto& c : certs_)
            if (c.stability == Stability::Unstable) out.insert(c.id);
        return out;
    }

private:
    SubsystemFamily family_;
    std::vector<SubsystemCertificate> certs_;
    std::map<std::pair<int, int>, EdgeGains> gains_;
};

/// Certifies every subsystem and every admissible transition of the family.
inline CertificateSet build_certificate_set(const SubsystemFamily& family,
                                            const CertificateOptions& options = {}) {
    std::vector<SubsystemCertificate> certs;
    certs.reserve(static_cast<std::size_t>(family.count()));
    const SpdMat identity_q{Mat::identity(family.dim())};
    for (int id = 1; id <= family.count(); ++id) {
        auto it = options.q_override.find(id);
        const SpdMat& q = it != options.q_override.end() ? it->second : identity_q;
        if (q.dim() != family.dim())
            throw DimensionMismatchError("Q for subsystem " + std::to_string(id) +
                                         " has the wrong dimension");
        certs.push_back(build_certificate(id, family.mode(id), q, options.eps_offset));
    }
    std::vector<EdgeGains> gains;
    gains.reserve(family.edges().size());
    for (const auto& [p, q] : family.edges())
        gains.push_back(edge_gains(certs[static_cast<std::size_t>(p - 1)],
                                   certs[static_cast<std::size_t>(q - 1)]));
    return CertificateSet(family, std::move(certs), std::move(gains));
}

} // namespace swv
