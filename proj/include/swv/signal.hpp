#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swv/errors.hpp"
#include "swv/family.hpp"

namespace swv {

/// One switching event: at @c time the signal jumps to @c mode. Signals are
/// right-continuous, so the new mode is active at the switch instant itself.
struct ModeSwitch {
    double time;
    int mode;
};

/**
 * @brief Piecewise-constant switching signal on [0, inf).
 *
 * Either finite (the mode after the last switch persists forever) or periodic
 * (the pattern on [0, period) repeats). Periodic patterns are canonical: when
 * the mode reached at the end of a period differs from the initial mode, the
 * wrap-around switch at the period boundary is stored explicitly.
 */
class SwitchingSignal {
public:
    static SwitchingSignal finite(int initial_mode, std::vector<ModeSwitch> switches) {
        return SwitchingSignal(initial_mode, std::move(switches), std::nullopt);
    }

    static SwitchingSignal periodic(int initial_mode, std::vector<ModeSwitch> switches,
                                    double period) {
        if (!(period > 0.0)) throw NonpositiveTimeError("period must be positive");
        if (!switches.empty()) {
            if (switches.back().time > period)
                throw ConfigError("periodic pattern extends beyond its period");
            if (switches.back().time == period) {
                if (switches.back().mode != initial_mode)
                    throw ConfigError("switch at the period boundary must restore the initial mode");
            } else if (switches.back().mode != initial_mode) {
                switches.push_back({period, initial_mode});
            }
        }
        return SwitchingSignal(initial_mode, std::move(switches), period);
    }

    int initial_mode() const { return initial_mode_; }
    bool is_periodic() const { return period_.has_value(); }
    double period() const { return period_.value(); }

    /// Base switch events: all of them for a finite signal, one period's worth
    /// for a periodic one.
    const std::vector<ModeSwitch>& pattern() const { return switches_; }

    int mode_at(double t) const {
        if (t < 0.0) throw NonpositiveTimeError("signal is defined for t >= 0");
        double u = t;
        if (period_) u = t - std::floor(t / *period_) * *period_;
        int mode = initial_mode_;
        for (const ModeSwitch& s : switches_) {
            if (s.time > u) break;
            mode = s.mode;
        }
        return mode;
    }

    /// All switch events with time <= t, in order. A switch at exactly t is
    /// included.
    std::vector<ModeSwitch> switches_up_to(double t) const {
        std::vector<ModeSwitch> out;
        if (!period_) {
            for (const ModeSwitch& s : switches_) {
                if (s.time > t) break;
                out.push_back(s);
            }
            return out;
        }
        for (std::uint64_t cycle = 0;; ++cycle) {
            const double offset = static_cast<double>(cycle) * *period_;
            if (offset > t) break;
            bool any = false;
            for (const ModeSwitch& s : switches_) {
                const double time = offset + s.time;
                if (time > t) break;
                out.push_back({time, s.mode});
                any = true;
            }
            if (!any && !switches_.empty()) break;
            if (switches_.empty()) break;
        }
        return out;
    }

private:
    SwitchingSignal(int initial_mode, std::vector<ModeSwitch> switches,
                    std::optional<double> period)
        : initial_mode_(initial_mode), switches_(std::move(switches)), period_(period) {
        double prev_time = 0.0;
        int prev_mode = initial_mode_;
        for (std::size_t k = 0; k < switches_.size(); ++k) {
            const ModeSwitch& s = switches_[k];
            if (!(s.time > prev_time) || !std::isfinite(s.time))
                throw NonpositiveTimeError("switch times must be finite and strictly increasing");
            if (s.mode == prev_mode)
                throw ConfigError("switch #" + std::to_string(k) + " does not change the mode");
            prev_time = s.time;
            prev_mode = s.mode;
        }
    }

    int initial_mode_;
    std::vector<ModeSwitch> switches_;
    std::optional<double> period_;
};

/// Checks that every mode of the signal exists in the family and every
/// transition is an admissible edge.
inline void validate(const SwitchingSignal& signal, const SubsystemFamily& family) {
    if (!family.has_mode(signal.initial_mode()))
        throw UnknownModeError("initial mode " + std::to_string(signal.initial_mode()) +
                               " is not in the family");
    int mode = signal.initial_mode();
    const auto& pattern = signal.pattern();
    for (std::size_t k = 0; k < pattern.size(); ++k) {
        if (!family.has_mode(pattern[k].mode))
            throw UnknownModeError("mode " + std::to_string(pattern[k].mode) +
                                   " is not in the family");
        if (!family.has_edge(mode, pattern[k].mode))
            throw InadmissibleTransitionError(k, mode, pattern[k].mode);
        mode = pattern[k].mode;
    }
}

/**
 * @brief Switching statistics of a signal over the window ]0, t].
 *
 * Counts every switch with time in ]0, t] (one at exactly t included),
 * transition counts per ordered pair, and activation time per mode. The
 * normalized fields are the switching rate nu = N/t, the transition shares
 * rho (undefined when no switch occurred; rho_defined reports that), and the
 * activation shares eta.
 */
struct SignalStatistics {
    double t = 0.0;
    std::int64_t switch_count = 0;
    std::map<std::pair<int, int>, std::int64_t> transition_counts;
    std::map<int, double> activation_time;

    double nu = 0.0;
    bool rho_defined = false;
    std::map<std::pair<int, int>, double> rho;
    std::map<int, double> eta;
};

inline SignalStatistics stats_at(const SwitchingSignal& signal, double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw NonpositiveTimeError("statistics need a positive finite time");
    SignalStatistics st;
    st.t = t;
    const auto events = signal.switches_up_to(t);
    st.switch_count = static_cast<std::int64_t>(events.size());
    int mode = signal.initial_mode();
    double prev = 0.0;
    for (const ModeSwitch& s : events) {
        st.activation_time[mode] += s.time - prev;
        st.transition_counts[{mode, s.mode}] += 1;
        mode = s.mode;
        prev = s.time;
    }
    st.activation_time[mode] += t - prev;

    st.nu = static_cast<double>(st.switch_count) / t;
    st.rho_defined = st.switch_count > 0;
    for (const auto& [edge, n] : st.transition_counts)
        st.rho[edge] = static_cast<double>(n) / static_cast<double>(st.switch_count);
    for (const auto& [m, dwell] : st.activation_time) st.eta[m] = dwell / t;
    return st;
}

/// Long-run statistics of a signal: switching rate, transition shares, and
/// activation shares. For a periodic signal these are the one-period averages.
struct AsymptoticStatistics {
    double nu = 0.0;
    std::map<std::pair<int, int>, double> rho;
    std::map<int, double> eta;
};

/// One stretch of a repeating schedule: hold @c mode for @c dwell time units.
struct CycleStep {
    int mode;
    double dwell;
};

using CycleSpec = std::vector<CycleStep>;

struct PeriodicSignal {
    SwitchingSignal signal;
    AsymptoticStatistics asymptotics;
};

/**
 * @brief Realizes a repeating schedule as a periodic signal.
 *
 * Validates dwell positivity and admissibility of every transition including
 * the wrap-around from the last step back to the first, and returns the exact
 * one-period statistics alongside the signal.
 */
inline PeriodicSignal periodic_from_cycle(const CycleSpec& cycle, const SubsystemFamily& family) {
    if (cycle.empty()) throw ConfigError("cycle must have at least one step");
    double period = 0.0;
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        if (!(cycle[k].dwell > 0.0) || !std::isfinite(cycle[k].dwell))
            throw NonpositiveTimeError("cycle dwell #" + std::to_string(k) +
                                       " must be positive and finite");
        if (!family.has_mode(cycle[k].mode))
            throw UnknownModeError("cycle mode " + std::to_string(cycle[k].mode) +
                                   " is not in the family");
        period += cycle[k].dwell;
    }

    AsymptoticStatistics asym;
    for (const CycleStep& step : cycle) asym.eta[step.mode] += step.dwell / period;

    if (cycle.size() == 1) {
        return {SwitchingSignal::periodic(cycle.front().mode, {}, period), std::move(asym)};
    }

    const auto n = cycle.size();
    std::vector<ModeSwitch> switches;
    switches.reserve(n);
    double at = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const int from = cycle[k].mode;
        const int to = cycle[(k + 1) % n].mode;
        if (!family.has_edge(from, to)) throw InadmissibleTransitionError(k, from, to);
        asym.rho[{from, to}] += 1.0 / static_cast<double>(n);
        at += cycle[k].dwell;
        switches.push_back({at, to});
    }
    asym.nu = static_cast<double>(n) / period;
    return {SwitchingSignal::periodic(cycle.front().mode, std::move(switches), period),
            std::move(asym)};
}

/**
 * @brief A closed walk through the transition graph using every edge once.
 *
 * Hierholzer's algorithm over the sorted edge list, so the result is
 * deterministic. Throws NotEulerianError when some vertex has unequal in- and
 * out-degree or the edges do not form a single connected circuit.
 */
inline std::vector<std::pair<int, int>> eulerian_transition_cycle(
    std::vector<std::pair<int, int>> edges) {
    if (edges.empty()) throw NotEulerianError("no edges to traverse");
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::map<int, std::vector<int>> adj;
    std::map<int, int> degree;
    for (const auto& [p, q] : edges) {
        adj[p].push_back(q);
        degree[p] += 1;
        degree[q] -= 1;
    }
    for (const auto& [vertex, balance] : degree)
        if (balance != 0)
            throw NotEulerianError("vertex " + std::to_string(vertex) +
                                   " has unequal in- and out-degree");

    std::map<int, std::size_t> cursor;
    std::vector<int> stack{adj.begin()->first};
    std::vector<int> walk;
    while (!stack.empty()) {
        const int v = stack.back();
        auto it = adj.find(v);
        std::size_t& k = cursor[v];
        if (it != adj.end() && k < it->second.size()) {
            stack.push_back(it->second[k++]);
        } else {
            walk.push_back(v);
            stack.pop_back();
        }
    }
    std::reverse(walk.begin(), walk.end());
    if (walk.size() != edges.size() + 1)
        throw NotEulerianError("transition graph is not connected");

    std::vector<std::pair<int, int>> circuit;
    circuit.reserve(edges.size());
    for (std::size_t k = 0; k + 1 < walk.size(); ++k) circuit.emplace_back(walk[k], walk[k + 1]);
    return circuit;
}

/// Deterministic 64-bit generator (splitmix64 update).
struct SplitMix64 {
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t below(std::uint64_t n) { return next() % n; }

    std::uint64_t state;
};

/**
 * @brief Seeded random admissible signal with exponential dwell times.
 *
 * Starts from @p start_mode when given, otherwise from a random mode. Each
 * dwell is exponential with the given mean; successors are drawn uniformly
 * from the out-neighbors of the current mode. Entering a mode with no
 * out-neighbors raises DeadEndError.
 */
inline SwitchingSignal random_admissible(const SubsystemFamily& family, std::uint64_t seed,
                                         double mean_dwell, double horizon,
                                         std::optional<int> start_mode = std::nullopt) {
    if (!(mean_dwell > 0.0)) throw NonpositiveTimeError("mean dwell must be positive");
    if (!(horizon > 0.0)) throw NonpositiveTimeError("horizon must be positive");
    SplitMix64 rng(seed);
    int mode;
    if (start_mode) {
        if (!family.has_mode(*start_mode))
            throw UnknownModeError("start mode " + std::to_string(*start_mode) +
                                   " is not in the family");
        mode = *start_mode;
    } else {
        mode = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(family.count())));
    }
    const int initial = mode;
    std::vector<ModeSwitch> switches;
    double t = 0.0;
    for (;;) {
        const auto neighbors = family.out_neighbors(mode);
        if (neighbors.empty())
            throw DeadEndError("mode " + std::to_string(mode) + " has no admissible successor");
        t += -mean_dwell * std::log(1.0 - rng.uniform01());
        if (t >= horizon) break;
        mode = neighbors[rng.below(neighbors.size())];
        switches.push_back({t, mode});
    }
    return SwitchingSignal::finite(initial, std::move(switches));
}

} // namespace swv
