#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "swv/certificates.hpp"
#include "swv/errors.hpp"
#include "swv/expm.hpp"
#include "swv/family.hpp"
#include "swv/margins.hpp"
#include "swv/matrix.hpp"
#include "swv/signal.hpp"

namespace swv {

struct TrajectorySample {
    double t;
    Vec x;
    double norm_x;
    int mode;
    /// Certificate value of the active mode at x; NaN when the trajectory was
    /// propagated without certificates.
    double v;
};

/// Simulated trajectory together with the finite switching realization that
/// produced it. When the state norm exceeds the overflow cap the sample list
/// truncates and @c saturated is set.
struct Trajectory {
    SwitchingSignal signal;
    double horizon;
    std::vector<TrajectorySample> samples;
    bool saturated;
};

struct SimOptions {
    double horizon;
    double sample_step = 0.25;
    double overflow_cap = 1e300;
};

/**
 * @brief Propagates the switched system exactly from dwell to dwell.
 *
 * Within each dwell the state advances by matrix exponentials between sample
 * times, so there is no integration error beyond roundoff. Samples land on
 * the uniform grid of step sample_step plus every switch instant; the sample
 * at a switch instant carries the new mode.
 */
inline Trajectory propagate(const SubsystemFamily& family, const SwitchingSignal& signal,
                            const Vec& x0, const SimOptions& opt,
                            const CertificateSet* certs = nullptr) {
    if (x0.size() != family.dim())
        throw DimensionMismatchError("initial state has the wrong dimension");
    if (!(norm2(x0) > 0.0)) throw ConfigError("initial state must be nonzero");
    if (!(opt.horizon > 0.0) || !std::isfinite(opt.horizon))
        throw NonpositiveTimeError("horizon must be positive and finite");
    if (!(opt.sample_step > 0.0)) throw NonpositiveTimeError("sample_step must be positive");
    validate(signal, family);

    std::vector<ModeSwitch> events = signal.switches_up_to(opt.horizon);
    std::vector<double> boundaries{0.0};
    for (const ModeSwitch& s : events)
        if (s.time < opt.horizon) boundaries.push_back(s.time);
    boundaries.push_back(opt.horizon);

    Trajectory traj{SwitchingSignal::finite(signal.initial_mode(), std::move(events)),
                    opt.horizon,
                    {},
                    false};

    const auto value_of = [&](int mode, const Vec& x) {
        return certs ? quad_form(certs->certificate(mode).p.mat(), x)
                     : std::numeric_limits<double>::quiet_NaN();
    };
    const auto emit = [&](double t, const Vec& x) {
        const int mode = traj.signal.mode_at(t);
        traj.samples.push_back({t, x, norm2(x), mode, value_of(mode, x)});
    };

    Vec x = x0;
    emit(0.0, x);

    std::map<std::pair<int, std::uint64_t>, Mat> step_cache;
    const auto stepper = [&](int mode, double dt) -> const Mat& {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(dt));
        std::memcpy(&bits, &dt, sizeof(bits));
        auto [it, inserted] = step_cache.try_emplace({mode, bits}, Mat(0, 0));
        if (inserted) it->second = expm(family.mode(mode), dt);
        return it->second;
    };

    const double h = opt.sample_step;
    for (std::size_t seg = 0; seg + 1 < boundaries.size() && !traj.saturated; ++seg) {
        const double a = boundaries[seg];
        const double b = boundaries[seg + 1];
        if (!(b > a)) continue;
        const int mode = traj.signal.mode_at(a);

        std::vector<double> sample_times;
        for (std::uint64_t k = static_cast<std::uint64_t>(std::floor(a / h)) + 1;; ++k) {
            const double t = static_cast<double>(k) * h;
            if (t >= b) break;
            if (t > a) sample_times.push_back(t);
        }
        sample_times.push_back(b);

        double at = a;
        for (double t : sample_times) {
            x = stepper(mode, t - at) * x;
            at = t;
            const double norm = norm2(x);
            if (!std::isfinite(norm) || norm > opt.overflow_cap) {
                traj.saturated = true;
                break;
            }
            emit(t, x);
        }
    }
    return traj;
}

/// Worst slack of a trajectory against its certified envelopes, in log scale.
/// Nonnegative slacks mean the corresponding bound held with room to spare.
struct EnvelopeReport {
    std::size_t samples_checked;
    double worst_lower_slack;
    double worst_upper_slack;
};

/**
 * @brief Verifies the certified envelopes along a simulated trajectory.
 *
 * For every sample, the certificate value must lie between
 * exp(lower) V(0) and exp(upper) V(0) from envelope_exponents. Violations
 * beyond @p tolerance (relative, compared in log scale) raise
 * EnvelopeViolationError.
 */
inline EnvelopeReport check_envelopes(const Trajectory& traj, const CertificateSet& certs,
                                      double tolerance = 1e-6) {
    if (traj.samples.empty()) throw TooFewSamplesError("trajectory has no samples");
    const TrajectorySample& first = traj.samples.front();
    const double v0 = quad_form(certs.certificate(first.mode).p.mat(), first.x);
    if (!(v0 > 0.0)) throw ConfigError("initial certificate value must be positive");
    const double log_v0 = std::log(v0);

    EnvelopeReport report{0, std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
    for (const TrajectorySample& s : traj.samples) {
        if (s.t <= 0.0) continue;
        const double v = quad_form(certs.certificate(s.mode).p.mat(), s.x);
        const double log_v = std::log(v);
        const EnvelopeExponents env = envelope_exponents(traj.signal, certs, s.t);
        const double lower_slack = (log_v - log_v0) - env.lower;
        const double upper_slack = env.upper - (log_v - log_v0);
        if (lower_slack < -tolerance)
            throw EnvelopeViolationError(s.t, v, std::exp(env.lower) * v0, true);
        if (upper_slack < -tolerance)
            throw EnvelopeViolationError(s.t, v, std::exp(env.upper) * v0, false);
        report.worst_lower_slack = std::min(report.worst_lower_slack, lower_slack);
        report.worst_upper_slack = std::min(report.worst_upper_slack, upper_slack);
        ++report.samples_checked;
    }
    return report;
}

enum class Verdict { Converging, Diverging, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Converging: return "converging";
        case Verdict::Diverging: return "diverging";
        default: return "inconclusive";
    }
}

/**
 * @brief Empirical growth verdict from the tail of a trajectory.
 *
 * A saturated trajectory is Diverging outright. Otherwise the least-squares
 * slope of log norm over the final half of the samples decides: above 1e-3
 * Diverging, below -1e-3 Converging, else Inconclusive.
 */
inline Verdict divergence_verdict(const Trajectory& traj) {
    if (traj.saturated) return Verdict::Diverging;
    const std::size_t n = traj.samples.size();
    if (n < 4) throw TooFewSamplesError("trajectory too short for a verdict");
    const std::size_t begin = n / 2;

    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double m = static_cast<double>(n - begin);
    for (std::size_t k = begin; k < n; ++k) {
        const double t = traj.samples[k].t;
        const double y = std::log(std::max(traj.samples[k].norm_x, 1e-300));
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double denom = m * stt - st * st;
    if (denom <= 0.0) throw TooFewSamplesError("degenerate sample times for a verdict");
    const double slope = (m * sty - st * sy) / denom;
    if (slope > 1e-3) return Verdict::Diverging;
    if (slope < -1e-3) return Verdict::Converging;
    return Verdict::Inconclusive;
}

/// Writes a trajectory as CSV with certified envelope columns, 17 significant
/// digits per value.
inline void write_trace_csv(std::ostream& os, const Trajectory& traj,
                            const CertificateSet& certs) {
    if (traj.samples.empty()) throw TooFewSamplesError("trajectory has no samples");
    const TrajectorySample& first = traj.samples.front();
    const double v0 = quad_form(certs.certificate(first.mode).p.mat(), first.x);

    const auto fmt = [](double value) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        return std::string(buf);
    };

    os << "t,mode,norm_x,V,psi_env,phi_env\n";
    for (const TrajectorySample& s : traj.samples) {
        const double v = quad_form(certs.certificate(s.mode).p.mat(), s.x);
        double lower = v0;
        double upper = v0;
        if (s.t > 0.0) {
            const EnvelopeExponents env = envelope_exponents(traj.signal, certs, s.t);
            lower = std::exp(env.lower) * v0;
            upper = std::exp(env.upper) * v0;
        }
        os << fmt(s.t) << ',' << s.mode << ',' << fmt(s.norm_x) << ',' << fmt(v) << ','
           << fmt(lower) << ',' << fmt(upper) << '\n';
    }
}

} // namespace swv
