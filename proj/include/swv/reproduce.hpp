#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "swv/certificates.hpp"
#include "swv/config.hpp"
#include "swv/family.hpp"
#include "swv/margins.hpp"
#include "swv/matrix.hpp"
#include "swv/signal.hpp"
#include "swv/simulate.hpp"

namespace swv {

/// Bundled demonstration systems used by the reproduction cases and tests.
namespace demo {

/// Two stable spiral modes whose rotations oppose each other. Slow switching
/// between them is harmless, yet the certificate margins cannot certify it.
inline SubsystemFamily two_spirals() {
    return SubsystemFamily(
        {{1, Mat{{-0.2, -0.4}, {3.0, -0.2}}}, {2, Mat{{-0.2, -3.0}, {0.4, -0.2}}}},
        {{1, 2}, {2, 1}});
}

inline CycleSpec two_spirals_cycle() { return {{1, 10.0}, {2, 10.0}}; }

/// Three stable modes and one strongly unstable one, with a transition graph
/// that admits an Eulerian circuit. The entries are the full-precision values
/// behind the 4-decimal display roundings carried by the shipped configs; the
/// bundled reference tables were computed from these, and rounding the inputs
/// to 4 decimals perturbs the slow third mode's certificate by a few parts in
/// a thousand.
inline SubsystemFamily four_mode_mix() {
    return SubsystemFamily(
        {{1, Mat{{-0.18567715858072997, -0.75647414805194202},
                 {-0.070700185595967982, -0.65001185368364656}}},
         {2, Mat{{-0.35088167568023415, -0.26825479011585951},
                 {-0.35225888685770512, -0.54905113247659154}}},
         {3, Mat{{0.17339431902137512, -0.60908043400988199},
                 {0.83140638972746583, -0.1966413250814788}}},
         {4, Mat{{0.62944737278635787, 0.81158387415123845},
                 {-0.74602636741298789, 0.82675171227803879}}}},
        {{1, 2}, {1, 3}, {2, 1}, {2, 4}, {3, 1}, {3, 4}, {4, 2}, {4, 3}});
}

/// Certificate options matching the bundled reference tables: the offset is
/// chosen so the unstable mode's shift lands exactly on 0.7282, which is its
/// spectral abscissa rounded to four decimals plus the default 1e-4.
inline CertificateOptions reference_options() {
    CertificateOptions opts;
    opts.eps_offset = 0.7282 - spectral_abscissa(four_mode_mix().mode(4));
    return opts;
}

/// A schedule visiting every admissible transition of four_mode_mix once,
/// dwelling 10 on the fast stable modes and 30 on the others.
inline CycleSpec four_mode_cycle() {
    return {{1, 10.0}, {2, 10.0}, {4, 30.0}, {3, 30.0},
            {1, 10.0}, {3, 30.0}, {4, 30.0}, {2, 10.0}};
}

/// One stable and one unstable mode from four_mode_mix, switching both ways.
inline SubsystemFamily stable_unstable_pair() {
    const SubsystemFamily four = four_mode_mix();
    return SubsystemFamily({{1, four.mode(2)}, {2, four.mode(4)}}, {{1, 2}, {2, 1}});
}

} // namespace demo

struct ReproCheck {
    std::string name;
    std::string expected;
    std::string actual;
    bool pass;
};

struct ReproResult {
    std::string case_name;
    std::vector<ReproCheck> checks;
    std::vector<std::string> notes;

    bool all_pass() const {
        for (const ReproCheck& c : checks)
            if (!c.pass) return false;
        return true;
    }

    Json to_json() const {
        Json out;
        out["case"] = case_name;
        out["passed"] = all_pass();
        Json list = Json::array();
        for (const ReproCheck& c : checks)
            list.push_back(Json{{"name", c.name},
                                {"expected", c.expected},
                                {"actual", c.actual},
                                {"pass", c.pass}});
        out["checks"] = std::move(list);
        out["notes"] = notes;
        return out;
    }
};

namespace detail {

inline std::string fmt_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
}

inline void check_value(ReproResult& r, const std::string& name, double expected, double actual,
                        double tol, bool relative = false) {
    const double limit = relative ? tol * std::abs(expected) : tol;
    r.checks.push_back({name, fmt_value(expected), fmt_value(actual),
                        std::abs(actual - expected) <= limit});
}

inline void check_label(ReproResult& r, const std::string& name, const std::string& expected,
                        const std::string& actual) {
    r.checks.push_back({name, expected, actual, expected == actual});
}

inline void check_matrix(ReproResult& r, const std::string& name, const Mat& expected,
                         const Mat& actual, double tol) {
    for (std::size_t i = 0; i < expected.rows(); ++i)
        for (std::size_t j = 0; j < expected.cols(); ++j)
            check_value(r,
                        name + "[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                        expected(i, j), actual(i, j), tol);
}

inline const char* classification_name(Classification c) {
    switch (c) {
        case Classification::Stabilizing: return "stabilizing";
        case Classification::Destabilizing: return "destabilizing";
        default: return "undetermined";
    }
}

inline Verdict run_verdict(const SubsystemFamily& family, const SwitchingSignal& signal,
                           const Vec& x0, double horizon) {
    const Trajectory traj = propagate(family, signal, x0, SimOptions{horizon, 0.25, 1e300});
    return divergence_verdict(traj);
}

// Margin pair of the slow two-mode spiral schedule, shared by the
// "example1" and "gap-proof" cases.
inline void check_two_spirals_margins(ReproResult& r, const CertificateSet& certs,
                                      const AsymptoticStatistics& asym) {
    const MarginReport report = classify(asym, certs);
    check_value(r, "stability_margin", 0.1028, report.stability_margin, 2e-3);
    check_value(r, "instability_margin", -0.9028, report.instability_margin, 2e-3);
    check_label(r, "classification", "undetermined",
                classification_name(report.classification));
}

inline void check_pair_margins(ReproResult& r, const CertificateSet& certs,
                               const AsymptoticStatistics& asym) {
    const MarginReport report = classify(asym, certs);
    check_value(r, "stability_margin", 0.6839, report.stability_margin, 2e-3);
    check_value(r, "instability_margin", -0.1277, report.instability_margin, 2e-3);
    check_label(r, "classification", "undetermined",
                classification_name(report.classification));
}

inline ReproResult reproduce_example1() {
    ReproResult r{"example1", {}, {}};
    const SubsystemFamily family = demo::two_spirals();
    const CertificateSet certs = build_certificate_set(family);

    check_matrix(r, "P1", Mat{{10.3629, 0.5242}, {0.5242, 1.4516}},
                 certs.certificate(1).p.mat(), 1e-3);
    check_matrix(r, "P2", Mat{{1.4516, -0.5242}, {-0.5242, 10.3629}},
                 certs.certificate(2).p.mat(), 1e-3);
    for (int id = 1; id <= 2; ++id) {
        check_value(r, "rate_upper[" + std::to_string(id) + "]", 0.0962,
                    certs.certificate(id).rate_upper, 1e-3);
        check_value(r, "rate_lower[" + std::to_string(id) + "]", 0.7038,
                    certs.certificate(id).rate_lower, 1e-3);
    }
    check_value(r, "gain_upper[1->2]", 7.3149, certs.gains(1, 2).gain_upper, 1e-2);
    check_value(r, "gain_upper[2->1]", 7.3149, certs.gains(2, 1).gain_upper, 1e-2);
    check_value(r, "gain_lower[1->2]", 0.1367, certs.gains(1, 2).gain_lower, 1e-3);
    check_value(r, "gain_lower[2->1]", 0.1367, certs.gains(2, 1).gain_lower, 1e-3);

    const PeriodicSignal periodic = periodic_from_cycle(demo::two_spirals_cycle(), family);
    check_two_spirals_margins(r, certs, periodic.asymptotics);

    const Verdict verdict =
        run_verdict(family, periodic.signal, Vec{-1.0883, 2.9263}, 120.0);
    check_label(r, "verdict[x0=(-1.0883,2.9263)]", "converging", to_string(verdict));
    r.notes.push_back("the margins cannot certify this schedule even though the run converges");
    return r;
}

inline ReproResult reproduce_example3() {
    ReproResult r{"example3", {}, {}};
    const SubsystemFamily family = demo::four_mode_mix();
    const CertificateSet certs = build_certificate_set(family, demo::reference_options());

    check_matrix(r, "P1", Mat{{4.4041, -4.4942}, {-4.4942, 5.9995}},
                 certs.certificate(1).p.mat(), 5e-5);
    check_matrix(r, "P2", Mat{{2.9643, -1.5333}, {-1.5333, 1.6598}},
                 certs.certificate(2).p.mat(), 5e-5);
    check_matrix(r, "P3", Mat{{54.7476, -12.0193}, {-12.0193, 39.7715}},
                 certs.certificate(3).p.mat(), 5e-5);
    check_matrix(r, "P4", Mat{{4854.2, -641.9}, {-641.9, 5280.9}},
                 certs.certificate(4).p.mat(), 5e-2);

    const double expected_rate_lower[4] = {1.5691, 1.5486, 0.0302, -1.4562};
    for (int id = 1; id <= 4; ++id)
        check_value(r, "rate_lower[" + std::to_string(id) + "]", expected_rate_lower[id - 1],
                    certs.certificate(id).rate_lower, 1e-3);

    // Each tolerance is 1e-3 relative or the half-ulp of the reference value
    // as printed, whichever is larger; 0.0173 and 0.0070 carry 2.9e-3 and
    // 7.1e-3 of relative print granularity on their own.
    const std::vector<std::tuple<std::pair<int, int>, double, double>> expected_gain_lower = {
        {{1, 2}, 0.2661, 5e-5},    {{1, 3}, 5.6395, 5e-5},    {{2, 1}, 0.6446, 5e-5},
        {{2, 4}, 1.3875e3, 5e-2},  {{3, 1}, 0.0173, 5e-5},    {{3, 4}, 87.0252, 5e-5},
        {{4, 2}, 1.4133e-4, 5e-9}, {{4, 3}, 0.0070, 5e-5}};
    for (const auto& [edge, expected, granularity] : expected_gain_lower)
        check_value(r,
                    "gain_lower[" + std::to_string(edge.first) + "->" +
                        std::to_string(edge.second) + "]",
                    expected, certs.gains(edge.first, edge.second).gain_lower,
                    std::max(1e-3 * std::abs(expected), granularity));

    const PeriodicSignal periodic = periodic_from_cycle(demo::four_mode_cycle(), family);
    const MarginReport report = classify(periodic.asymptotics, certs);
    check_value(r, "instability_margin", 0.1064, report.instability_margin, 2e-3);
    check_label(r, "classification", "destabilizing",
                classification_name(report.classification));

    const auto states = materialize_states(
        SimulateSpec{{}, RandomStatesSpec{10, -10.0, 10.0, 42}, 200.0, 0.25}, family.dim());
    for (std::size_t k = 0; k < states.size(); ++k) {
        const Verdict verdict = run_verdict(family, periodic.signal, states[k], 200.0);
        check_label(r, "verdict[x0 #" + std::to_string(k) + "]", "diverging",
                    to_string(verdict));
    }

    const SubsystemCertificate& c4 = certs.certificate(4);
    r.notes.push_back("epsilon[4] = " + fmt_value(c4.epsilon) +
                      ", the unstable mode's spectral abscissa rounded to four decimals plus the "
                      "1e-4 offset; any shift at or below the abscissa admits no positive "
                      "definite certificate");
    r.notes.push_back("gain references 0.0173 and 0.0070 are printed with 4 decimal places, so "
                      "their own granularity (2.9e-3 and 7.1e-3 relative) exceeds the 1e-3 "
                      "relative tolerance used for the other six");
    return r;
}

inline ReproResult reproduce_sigma_prime() {
    ReproResult r{"example-sigma-prime", {}, {}};
    const SubsystemFamily family = demo::stable_unstable_pair();
    const CertificateSet certs = build_certificate_set(family, demo::reference_options());

    check_matrix(r, "P1", Mat{{2.9643, -1.5333}, {-1.5333, 1.6598}},
                 certs.certificate(1).p.mat(), 5e-5);
    check_matrix(r, "P2", Mat{{4854.2, -641.9}, {-641.9, 5280.9}},
                 certs.certificate(2).p.mat(), 5e-2);
    check_value(r, "rate_upper[1]", 0.2514, certs.certificate(1).rate_upper, 1e-3);
    check_value(r, "rate_lower[1]", 1.5486, certs.certificate(1).rate_lower, 1e-3);
    check_value(r, "rate_upper[2]", -1.4562, certs.certificate(2).rate_upper, 1e-3);
    check_value(r, "rate_lower[2]", -1.4562, certs.certificate(2).rate_lower, 1e-3);
    check_value(r, "gain_lower[1->2]", 1.3875e3, certs.gains(1, 2).gain_lower, 1e-3, true);
    check_value(r, "gain_upper[1->2]", 7.0755e3, certs.gains(1, 2).gain_upper, 1e-3, true);
    check_value(r, "gain_lower[2->1]", 1.4133e-4, certs.gains(2, 1).gain_lower, 1e-3, true);
    check_value(r, "gain_upper[2->1]", 7.2070e-4, certs.gains(2, 1).gain_upper, 1e-3, true);

    const PeriodicSignal periodic =
        periodic_from_cycle(CycleSpec{{1, 10.0}, {2, 10.0}}, family);
    check_pair_margins(r, certs, periodic.asymptotics);

    const Verdict verdict = run_verdict(family, periodic.signal, Vec{9.0044, -9.3111}, 100.0);
    check_label(r, "verdict[x0=(9.0044,-9.3111)]", "diverging", to_string(verdict));
    r.notes.push_back("epsilon[2] = " + fmt_value(certs.certificate(2).epsilon) +
                      ", the abscissa rounded to four decimals plus the 1e-4 offset; the "
                      "reference lists 0.7278 for this case, but that value sits below the "
                      "abscissa 0.72810 and admits no positive definite certificate, and the "
                      "reference P2 and rates are consistent with 0.7282 instead (reported "
                      "informationally, not as a failure)");
    return r;
}

inline ReproResult reproduce_gap_proof() {
    ReproResult r{"gap-proof", {}, {}};

    // Converging side: positive stability margin, yet the run converges.
    {
        const SubsystemFamily family = demo::two_spirals();
        const CertificateSet certs = build_certificate_set(family);
        const PeriodicSignal periodic = periodic_from_cycle(demo::two_spirals_cycle(), family);
        ReproResult part{"", {}, {}};
        check_two_spirals_margins(part, certs, periodic.asymptotics);
        for (ReproCheck& c : part.checks) r.checks.push_back({"slow-pair " + c.name, c.expected,
                                                              c.actual, c.pass});
        const Verdict verdict =
            run_verdict(family, periodic.signal, Vec{-1.0883, 2.9263}, 120.0);
        check_label(r, "slow-pair verdict", "converging", to_string(verdict));
    }

    // Diverging side: negative instability margin, yet the run diverges.
    {
        const SubsystemFamily family = demo::stable_unstable_pair();
        const CertificateSet certs = build_certificate_set(family, demo::reference_options());
        const PeriodicSignal periodic =
            periodic_from_cycle(CycleSpec{{1, 10.0}, {2, 10.0}}, family);
        ReproResult part{"", {}, {}};
        check_pair_margins(part, certs, periodic.asymptotics);
        for (ReproCheck& c : part.checks) r.checks.push_back({"mixed-pair " + c.name, c.expected,
                                                              c.actual, c.pass});
        const Verdict verdict =
            run_verdict(family, periodic.signal, Vec{9.0044, -9.3111}, 100.0);
        check_label(r, "mixed-pair verdict", "diverging", to_string(verdict));
    }

    r.notes.push_back("an undetermined margin pair alongside a converging run, and another "
                      "alongside a diverging run: the gap between the two margin tests is real "
                      "and cannot be closed by sharpening either bound");
    return r;
}

} // namespace detail

inline std::vector<std::string> reproduction_cases() {
    return {"example1", "example3", "example-sigma-prime", "gap-proof"};
}

/// Runs one bundled reproduction case by name and reports every computed
/// value against its reference.
inline ReproResult run_reproduction(const std::string& case_name) {
    if (case_name == "example1") return detail::reproduce_example1();
    if (case_name == "example3") return detail::reproduce_example3();
    if (case_name == "example-sigma-prime") return detail::reproduce_sigma_prime();
    if (case_name == "gap-proof") return detail::reproduce_gap_proof();
    throw ConfigError("unknown reproduction case '" + case_name +
                      "'; expected example1, example3, example-sigma-prime, or gap-proof");
}

} // namespace swv
