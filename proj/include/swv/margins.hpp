#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "swv/certificates.hpp"
#include "swv/errors.hpp"
#include "swv/signal.hpp"

namespace swv {

enum class Classification { Stabilizing, Destabilizing, Undetermined };

enum class EvaluationMode { Asymptotic, EmpiricalTail };

/**
 * @brief The two certified margins of a signal against a certificate set.
 *
 * stability_margin combines the conservative certificate values (largest jump
 * gains, slowest decay, fastest growth); a negative value certifies that every
 * trajectory decays. instability_margin combines the optimistic values; a
 * positive value certifies that some growth is unavoidable. The instability
 * margin never exceeds the stability margin, so at most one test fires.
 */
struct MarginReport {
    double stability_margin;
    double instability_margin;
    EvaluationMode mode;
    Classification classification;
};

namespace detail {

template <typename RhoMap, typename EtaMap>
double margin_value(double nu, const RhoMap& rho, const EtaMap& eta, const CertificateSet& certs,
                    bool conservative) {
    double total = 0.0;
    if (nu > 0.0) {
        double jump = 0.0;
        for (const auto& [edge, share] : rho) {
            if (share == 0.0) continue;
            const EdgeGains& g = certs.gains(edge.first, edge.second);
            jump += std::log(conservative ? g.gain_upper : g.gain_lower) *
                    static_cast<double>(share);
        }
        total += nu * jump;
    }
    for (const auto& [mode, share] : eta) {
        if (share == 0.0) continue;
        const SubsystemCertificate& c = certs.certificate(mode);
        const double rate = std::abs(conservative ? c.rate_upper : c.rate_lower);
        total += (c.stability == Stability::Stable ? -rate : rate) * share;
    }
    return total;
}

inline Classification classify_value(double stability, double instability) {
    // Margins within this band of zero are treated as sign-indefinite.
    constexpr double band = 1e-9;
    if (stability < -band) return Classification::Stabilizing;
    if (instability > band) return Classification::Destabilizing;
    return Classification::Undetermined;
}

} // namespace detail

inline double stability_margin(const AsymptoticStatistics& s, const CertificateSet& certs) {
    return detail::margin_value(s.nu, s.rho, s.eta, certs, true);
}

inline double instability_margin(const AsymptoticStatistics& s, const CertificateSet& certs) {
    return detail::margin_value(s.nu, s.rho, s.eta, certs, false);
}

inline double stability_margin(const SignalStatistics& s, const CertificateSet& certs) {
    return detail::margin_value(s.nu, s.rho, s.eta, certs, true);
}

inline double instability_margin(const SignalStatistics& s, const CertificateSet& certs) {
    return detail::margin_value(s.nu, s.rho, s.eta, certs, false);
}

/// Classifies long-run statistics: Stabilizing when the stability margin is
/// negative, Destabilizing when the instability margin is positive, otherwise
/// Undetermined.
inline MarginReport classify(const AsymptoticStatistics& s, const CertificateSet& certs) {
    const double sm = stability_margin(s, certs);
    const double im = instability_margin(s, certs);
    return {sm, im, EvaluationMode::Asymptotic, detail::classify_value(sm, im)};
}

/**
 * @brief Certified envelope exponents at time t.
 *
 * Along the signal, exp(lower) V(0) <= V(x(t)) <= exp(upper) V(0) where V is
 * evaluated in the active certificate at each instant. Computed from raw
 * transition counts and activation times, so a switch-free prefix is exact.
 */
struct EnvelopeExponents {
    double t;
    double lower;
    double upper;
};

inline EnvelopeExponents envelope_exponents(const SwitchingSignal& signal,
                                            const CertificateSet& certs, double t) {
    const SignalStatistics st = stats_at(signal, t);
    double lower = 0.0;
    double upper = 0.0;
    for (const auto& [edge, n] : st.transition_counts) {
        const EdgeGains& g = certs.gains(edge.first, edge.second);
        lower += std::log(g.gain_lower) * static_cast<double>(n);
        upper += std::log(g.gain_upper) * static_cast<double>(n);
    }
    for (const auto& [mode, dwell] : st.activation_time) {
        const SubsystemCertificate& c = certs.certificate(mode);
        const double sign = c.stability == Stability::Stable ? -1.0 : 1.0;
        lower += sign * std::abs(c.rate_lower) * dwell;
        upper += sign * std::abs(c.rate_upper) * dwell;
    }
    return {t, lower, upper};
}

/**
 * @brief Margin surrogates measured over the tail of a finite window.
 *
 * Samples both margins at every switch instant in [tail_fraction * horizon,
 * horizon] plus 100 uniformly spaced times, and reports the supremum of the
 * stability samples and the infimum of the instability samples. Raises
 * EmptyTailError when the signal switches but never before the horizon, since
 * the window then carries no switching information.
 */
inline MarginReport empirical_margins(const SwitchingSignal& signal, const CertificateSet& certs,
                                      double horizon, double tail_fraction = 0.5) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw NonpositiveTimeError("horizon must be positive and finite");
    if (!(tail_fraction > 0.0) || !(tail_fraction < 1.0))
        throw ConfigError("tail_fraction must lie in (0, 1)");

    const auto events = signal.switches_up_to(horizon);
    if (events.empty() && !signal.pattern().empty())
        throw EmptyTailError("signal does not switch before the horizon");

    const double t0 = tail_fraction * horizon;
    std::vector<double> times;
    for (const ModeSwitch& s : events)
        if (s.time >= t0) times.push_back(s.time);
    for (int k = 0; k < 100; ++k)
        times.push_back(t0 + (horizon - t0) * static_cast<double>(k) / 99.0);

    double sup_stab = -std::numeric_limits<double>::infinity();
    double inf_instab = std::numeric_limits<double>::infinity();
    for (double t : times) {
        const SignalStatistics st = stats_at(signal, t);
        sup_stab = std::max(sup_stab, stability_margin(st, certs));
        inf_instab = std::min(inf_instab, instability_margin(st, certs));
    }
    return {sup_stab, inf_instab, EvaluationMode::EmpiricalTail,
            detail::classify_value(sup_stab, inf_instab)};
}

} // namespace swv
