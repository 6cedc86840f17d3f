#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <swv/errors.hpp>
#include <swv/reproduce.hpp>
#include <swv/simulate.hpp>

#include "oracles.hpp"

using swv::Mat;
using swv::SwitchingSignal;
using swv::Vec;

namespace {

swv::SubsystemFamily single_mode(const Mat& a) {
    return swv::SubsystemFamily({{1, a}}, {});
}

} // namespace

TEST_CASE("single-mode propagation matches the closed form", "[simulate]") {
    const auto family = single_mode(Mat{{-1.0, 0.0}, {0.0, -1.0}});
    const auto traj = swv::propagate(family, SwitchingSignal::finite(1, {}), Vec{3.0, 4.0},
                                     {10.0, 0.25, 1e300});
    REQUIRE_FALSE(traj.saturated);
    REQUIRE(traj.samples.size() == 41);
    for (const auto& s : traj.samples) {
        REQUIRE(s.mode == 1);
        REQUIRE(s.norm_x == Catch::Approx(5.0 * std::exp(-s.t)).epsilon(1e-12));
        REQUIRE(std::isnan(s.v));
    }
    REQUIRE(traj.samples.front().t == 0.0);
    REQUIRE(traj.samples.back().t == 10.0);
    REQUIRE(swv::divergence_verdict(traj) == swv::Verdict::Converging);
}

TEST_CASE("switched propagation agrees with adaptive integration", "[simulate]") {
    const auto family = swv::demo::two_spirals();
    const auto periodic = swv::periodic_from_cycle(swv::demo::two_spirals_cycle(), family);
    const Vec x0{-1.0, 2.0};

    const auto traj = swv::propagate(family, periodic.signal, x0, {25.0, 0.25, 1e300});
    const Vec ref = oracles::rk45_switched(family, periodic.signal, x0, 25.0);

    const auto& last = traj.samples.back();
    REQUIRE(last.t == 25.0);
    Vec diff(2);
    for (std::size_t i = 0; i < 2; ++i) diff[i] = last.x[i] - ref[i];
    REQUIRE(swv::norm2(diff) <= 1e-8 * swv::norm2(ref));
}

TEST_CASE("propagation is linear in the initial state", "[simulate]") {
    const auto family = swv::demo::two_spirals();
    const auto periodic = swv::periodic_from_cycle(swv::demo::two_spirals_cycle(), family);

    const auto one = swv::propagate(family, periodic.signal, Vec{1.0, -0.5}, {15.0, 0.5, 1e300});
    const auto two = swv::propagate(family, periodic.signal, Vec{3.0, -1.5}, {15.0, 0.5, 1e300});
    REQUIRE(one.samples.size() == two.samples.size());
    for (std::size_t k = 0; k < one.samples.size(); ++k) {
        REQUIRE(two.samples[k].t == one.samples[k].t);
        for (std::size_t i = 0; i < 2; ++i)
            REQUIRE(two.samples[k].x[i] ==
                    Catch::Approx(3.0 * one.samples[k].x[i]).margin(1e-10));
    }
}

TEST_CASE("samples land on the grid and on switch instants", "[simulate]") {
    const auto family = swv::demo::two_spirals();
    const auto signal = SwitchingSignal::finite(1, {{0.4, 2}, {1.1, 1}});
    const auto traj = swv::propagate(family, signal, Vec{1.0, 0.0}, {2.0, 0.5, 1e300});

    std::vector<double> times;
    for (const auto& s : traj.samples) times.push_back(s.t);
    REQUIRE(times == std::vector<double>{0.0, 0.4, 0.5, 1.0, 1.1, 1.5, 2.0});
    for (std::size_t k = 1; k < times.size(); ++k) REQUIRE(times[k] > times[k - 1]);

    // A sample at a switch instant carries the mode being switched to.
    REQUIRE(traj.samples[1].mode == 2);
    REQUIRE(traj.samples[4].mode == 1);
    REQUIRE(traj.samples[2].mode == 2);
}

TEST_CASE("certificate values jump within the edge gains at switches", "[simulate]") {
    const auto family = swv::demo::two_spirals();
    const auto certs = swv::build_certificate_set(family);
    const auto periodic = swv::periodic_from_cycle(swv::demo::two_spirals_cycle(), family);
    const auto traj =
        swv::propagate(family, periodic.signal, Vec{1.0, 1.0}, {40.0, 0.25, 1e300}, &certs);

    int switches_seen = 0;
    int previous_mode = traj.samples.front().mode;
    for (const auto& s : traj.samples) {
        REQUIRE(s.v == Catch::Approx(swv::quad_form(certs.certificate(s.mode).p.mat(), s.x)));
        if (s.mode != previous_mode) {
            ++switches_seen;
            const auto& g = certs.gains(previous_mode, s.mode);
            const double v_old = swv::quad_form(certs.certificate(previous_mode).p.mat(), s.x);
            const double ratio = s.v / v_old;
            REQUIRE(ratio >= g.gain_lower * (1.0 - 1e-9));
            REQUIRE(ratio <= g.gain_upper * (1.0 + 1e-9));
            previous_mode = s.mode;
        }
    }
    REQUIRE(switches_seen == 4);
}

TEST_CASE("trajectories saturate at the overflow cap", "[simulate]") {
    const auto family = single_mode(Mat{{0.5, -3.0}, {3.0, 0.5}});
    const auto traj = swv::propagate(family, SwitchingSignal::finite(1, {}), Vec{1.0, 0.0},
                                     {100.0, 0.25, 1e6});
    REQUIRE(traj.saturated);
    REQUIRE(traj.samples.back().t < 100.0);
    for (const auto& s : traj.samples) REQUIRE(s.norm_x <= 1e6);
    REQUIRE(swv::divergence_verdict(traj) == swv::Verdict::Diverging);
}

TEST_CASE("divergence verdicts cover all three outcomes", "[simulate]") {
    const auto decay = single_mode(Mat{{-1.0, 0.0}, {0.0, -1.0}});
    const auto grow = single_mode(Mat{{0.5, -3.0}, {3.0, 0.5}});
    const auto rotate = single_mode(Mat{{0.0, -1.0}, {1.0, 0.0}});
    const auto constant = SwitchingSignal::finite(1, {});
    const swv::SimOptions opt{20.0, 0.25, 1e300};

    REQUIRE(swv::divergence_verdict(swv::propagate(decay, constant, Vec{1.0, 1.0}, opt)) ==
            swv::Verdict::Converging);
    REQUIRE(swv::divergence_verdict(swv::propagate(grow, constant, Vec{1.0, 1.0}, opt)) ==
            swv::Verdict::Diverging);
    // A pure rotation keeps the norm constant.
    REQUIRE(swv::divergence_verdict(swv::propagate(rotate, constant, Vec{1.0, 1.0}, opt)) ==
            swv::Verdict::Inconclusive);

    const auto stub = swv::propagate(decay, constant, Vec{1.0, 1.0}, {0.3, 0.25, 1e300});
    REQUIRE(stub.samples.size() < 4);
    REQUIRE_THROWS_AS(swv::divergence_verdict(stub), swv::TooFewSamplesError);
}

TEST_CASE("certified envelopes hold along simulated trajectories", "[simulate]") {
    const auto family = swv::demo::two_spirals();
    const auto certs = swv::build_certificate_set(family);
    const auto periodic = swv::periodic_from_cycle(swv::demo::two_spirals_cycle(), family);
    const auto traj =
        swv::propagate(family, periodic.signal, Vec{-1.0, 2.0}, {60.0, 0.25, 1e300}, &certs);

    const auto report = swv::check_envelopes(traj, certs, 1e-6);
    REQUIRE(report.samples_checked == traj.samples.size() - 1);
    REQUIRE(report.worst_lower_slack > -1e-6);
    REQUIRE(report.worst_upper_slack > -1e-6);
}

TEST_CASE("envelope violations are detected", "[simulate]") {
    const auto family = swv::demo::two_spirals();
    const auto certs = swv::build_certificate_set(family);
    const auto periodic = swv::periodic_from_cycle(swv::demo::two_spirals_cycle(), family);
    auto traj =
        swv::propagate(family, periodic.signal, Vec{-1.0, 2.0}, {20.0, 0.25, 1e300}, &certs);

    // Inflate one interior state beyond any certified growth.
    auto& sample = traj.samples[traj.samples.size() / 2];
    for (double& c : sample.x) c *= 50.0;
    sample.norm_x *= 50.0;
    try {
        swv::check_envelopes(traj, certs, 1e-6);
        FAIL("expected EnvelopeViolationError");
    } catch (const swv::EnvelopeViolationError& e) {
        REQUIRE(e.t == sample.t);
        REQUIRE_FALSE(e.lower);
        REQUIRE(e.value > e.bound);
    }
}

TEST_CASE("trace output round-trips at full precision", "[simulate]") {
    const auto family = swv::demo::two_spirals();
    const auto certs = swv::build_certificate_set(family);
    const auto periodic = swv::periodic_from_cycle(swv::demo::two_spirals_cycle(), family);
    const auto traj =
        swv::propagate(family, periodic.signal, Vec{0.3, -0.7}, {12.0, 0.25, 1e300}, &certs);

    std::ostringstream os;
    swv::write_trace_csv(os, traj, certs);
    std::istringstream is(os.str());

    std::string header;
    REQUIRE(std::getline(is, header));
    REQUIRE(header == "t,mode,norm_x,V,psi_env,phi_env");

    std::size_t row = 0;
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos;
             start = pos + 1)
            parts.push_back(line.substr(start, pos - start));
        parts.push_back(line.substr(start));
        REQUIRE(parts.size() == 6);

        const auto& s = traj.samples.at(row);
        REQUIRE(std::strtod(parts[0].c_str(), nullptr) == s.t);
        REQUIRE(std::stoi(parts[1]) == s.mode);
        REQUIRE(std::strtod(parts[2].c_str(), nullptr) == s.norm_x);
        const double v = std::strtod(parts[3].c_str(), nullptr);
        const double psi = std::strtod(parts[4].c_str(), nullptr);
        const double phi = std::strtod(parts[5].c_str(), nullptr);
        REQUIRE(v == s.v);
        REQUIRE(v >= psi * (1.0 - 1e-6));
        REQUIRE(v <= phi * (1.0 + 1e-6));
        ++row;
    }
    REQUIRE(row == traj.samples.size());
}

TEST_CASE("propagation rejects malformed inputs", "[simulate]") {
    const auto family = swv::demo::two_spirals();
    const auto constant = SwitchingSignal::finite(1, {});
    REQUIRE_THROWS_AS(swv::propagate(family, constant, Vec{1.0, 2.0, 3.0}, {10.0, 0.25, 1e300}),
                      swv::DimensionMismatchError);
    REQUIRE_THROWS_AS(swv::propagate(family, constant, Vec{0.0, 0.0}, {10.0, 0.25, 1e300}),
                      swv::ConfigError);
    REQUIRE_THROWS_AS(swv::propagate(family, constant, Vec{1.0, 0.0}, {-1.0, 0.25, 1e300}),
                      swv::NonpositiveTimeError);
    REQUIRE_THROWS_AS(swv::propagate(family, constant, Vec{1.0, 0.0}, {10.0, 0.0, 1e300}),
                      swv::NonpositiveTimeError);
    REQUIRE_THROWS_AS(swv::propagate(family, SwitchingSignal::finite(7, {}), Vec{1.0, 0.0},
                                     {10.0, 0.25, 1e300}),
                      swv::UnknownModeError);
}
