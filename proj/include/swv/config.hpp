#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "swv/certificates.hpp"
#include "swv/errors.hpp"
#include "swv/family.hpp"
#include "swv/margins.hpp"
#include "swv/matrix.hpp"
#include "swv/signal.hpp"

namespace swv {

using Json = nlohmann::json;

// Signal specifications as they appear in a configuration. A schedule is an
// explicit finite event list, a cycle repeats forever, asymptotic statistics
// describe the long-run behavior without a realization, and a random spec
// names a seeded generator run.
struct ScheduleSpec {
    int initial_mode;
    std::vector<ModeSwitch> switches;
};

struct CycleSigSpec {
    CycleSpec steps;
};

struct AsymptoticSpec {
    AsymptoticStatistics stats;
};

struct RandomSigSpec {
    std::uint64_t seed;
    double mean_dwell;
    double horizon;
    std::optional<int> start_mode;
};

using SignalSpec = std::variant<ScheduleSpec, CycleSigSpec, AsymptoticSpec, RandomSigSpec>;

struct RandomStatesSpec {
    std::size_t count;
    double lo;
    double hi;
    std::uint64_t seed;
};

struct SimulateSpec {
    std::vector<Vec> states;
    std::optional<RandomStatesSpec> random_states;
    double horizon = 0.0;
    double sample_step = 0.25;
};

struct ClassifySpec {
    EvaluationMode mode = EvaluationMode::Asymptotic;
    double tail_fraction = 0.5;
};

struct ProblemConfig {
    SubsystemFamily family;
    CertificateOptions certificates;
    std::optional<SignalSpec> signal;
    std::optional<SimulateSpec> simulate;
    ClassifySpec classify;
};

namespace detail {

inline double json_double(const Json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        char* end = nullptr;
        const double x = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw ConfigError(where + ": cannot parse '" + s + "' as a number");
        return x;
    }
    throw ConfigError(where + ": expected a number");
}

inline int json_int(const Json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return v.get<int>();
}

inline const Json& json_field(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw ConfigError(where + ": missing field '" + key + "'");
    return obj.at(key);
}

inline void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

inline Mat json_matrix(const Json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a matrix");
    const std::size_t rows = v.size();
    const std::size_t cols = v.at(0).is_array() ? v.at(0).size() : 0;
    if (cols == 0) throw ConfigError(where + ": expected a matrix of rows");
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const Json& row = v.at(i);
        if (!row.is_array() || row.size() != cols) throw ConfigError(where + ": ragged matrix");
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = json_double(row.at(j), where + "[" + std::to_string(i) + "][" +
                                                 std::to_string(j) + "]");
    }
    return m;
}

inline SubsystemFamily parse_family(const Json& v) {
    reject_unknown_keys(v, {"d", "subsystems", "edges"}, "family");
    const int d = json_int(json_field(v, "d", "family"), "family.d");
    if (d < 1) throw ConfigError("family.d must be at least 1");

    const Json& subs = json_field(v, "subsystems", "family");
    if (!subs.is_array() || subs.empty())
        throw ConfigError("family.subsystems must be a nonempty array");
    std::vector<Subsystem> systems;
    for (const Json& s : subs) {
        reject_unknown_keys(s, {"id", "A"}, "family.subsystems[]");
        const int id = json_int(json_field(s, "id", "subsystem"), "subsystem.id");
        Mat a = json_matrix(json_field(s, "A", "subsystem"), "subsystem.A");
        if (a.rows() != static_cast<std::size_t>(d) || a.cols() != static_cast<std::size_t>(d))
            throw ConfigError("subsystem " + std::to_string(id) + ": A must be " +
                              std::to_string(d) + "x" + std::to_string(d));
        systems.push_back({id, std::move(a)});
    }

    std::vector<std::pair<int, int>> edges;
    const Json& ed = json_field(v, "edges", "family");
    if (!ed.is_array()) throw ConfigError("family.edges must be an array");
    for (const Json& e : ed) {
        if (!e.is_array() || e.size() != 2)
            throw ConfigError("family.edges entries must be pairs [p, q]");
        edges.emplace_back(json_int(e.at(0), "edge"), json_int(e.at(1), "edge"));
    }
    return SubsystemFamily(std::move(systems), std::move(edges));
}

inline CertificateOptions parse_certificates(const Json& v, std::size_t dim) {
    CertificateOptions options;
    if (v.is_null()) return options;
    reject_unknown_keys(v, {"Q", "eps_offset"}, "certificates");
    if (v.contains("eps_offset")) {
        options.eps_offset = json_double(v.at("eps_offset"), "certificates.eps_offset");
        if (!(options.eps_offset > 0.0))
            throw ConfigError("certificates.eps_offset must be positive");
    }
    if (v.contains("Q")) {
        const Json& q = v.at("Q");
        if (q.is_string()) {
            if (q.get<std::string>() != "identity")
                throw ConfigError("certificates.Q string form must be \"identity\"");
        } else if (q.is_object()) {
            for (const auto& [key, mat] : q.items()) {
                int id = 0;
                try {
                    id = std::stoi(key);
                } catch (...) {
                    throw ConfigError("certificates.Q keys must be subsystem ids");
                }
                Mat m = json_matrix(mat, "certificates.Q[" + key + "]");
                if (m.rows() != dim)
                    throw ConfigError("certificates.Q[" + key + "] has the wrong dimension");
                try {
                    options.q_override.emplace(id, SpdMat(std::move(m)));
                } catch (const Error& e) {
                    throw ConfigError("certificates.Q[" + key + "]: " + e.what());
                }
            }
        } else {
            throw ConfigError("certificates.Q must be \"identity\" or an object of matrices");
        }
    }
    return options;
}

inline SignalSpec parse_signal(const Json& v) {
    const std::string type = json_field(v, "type", "signal").get<std::string>();
    if (type == "schedule") {
        reject_unknown_keys(v, {"type", "initial_mode", "switches"}, "signal");
        ScheduleSpec spec;
        spec.initial_mode = json_int(json_field(v, "initial_mode", "signal"),
                                     "signal.initial_mode");
        const Json& sw = json_field(v, "switches", "signal");
        if (!sw.is_array()) throw ConfigError("signal.switches must be an array");
        for (const Json& s : sw) {
            if (!s.is_array() || s.size() != 2)
                throw ConfigError("signal.switches entries must be pairs [t, mode]");
            spec.switches.push_back({json_double(s.at(0), "switch time"),
                                     json_int(s.at(1), "switch mode")});
        }
        return spec;
    }
    if (type == "cycle") {
        reject_unknown_keys(v, {"type", "steps"}, "signal");
        CycleSigSpec spec;
        const Json& steps = json_field(v, "steps", "signal");
        if (!steps.is_array() || steps.empty())
            throw ConfigError("signal.steps must be a nonempty array");
        for (const Json& s : steps) {
            if (!s.is_array() || s.size() != 2)
                throw ConfigError("signal.steps entries must be pairs [mode, dwell]");
            spec.steps.push_back({json_int(s.at(0), "cycle mode"),
                                  json_double(s.at(1), "cycle dwell")});
        }
        return spec;
    }
    if (type == "asymptotic") {
        reject_unknown_keys(v, {"type", "nu", "rho", "eta"}, "signal");
        AsymptoticSpec spec;
        spec.stats.nu = json_double(json_field(v, "nu", "signal"), "signal.nu");
        if (v.contains("rho")) {
            for (const Json& r : v.at("rho")) {
                if (!r.is_array() || r.size() != 3)
                    throw ConfigError("signal.rho entries must be triples [p, q, share]");
                spec.stats.rho[{json_int(r.at(0), "rho"), json_int(r.at(1), "rho")}] =
                    json_double(r.at(2), "rho share");
            }
        }
        for (const Json& e : json_field(v, "eta", "signal")) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("signal.eta entries must be pairs [p, share]");
            spec.stats.eta[json_int(e.at(0), "eta")] = json_double(e.at(1), "eta share");
        }
        return spec;
    }
    if (type == "random") {
        reject_unknown_keys(v, {"type", "seed", "mean_dwell", "horizon", "start_mode"}, "signal");
        RandomSigSpec spec;
        const Json& seed = json_field(v, "seed", "signal");
        if (!seed.is_number_integer()) throw ConfigError("signal.seed must be an integer");
        spec.seed = seed.get<std::uint64_t>();
        spec.mean_dwell = json_double(json_field(v, "mean_dwell", "signal"), "signal.mean_dwell");
        spec.horizon = json_double(json_field(v, "horizon", "signal"), "signal.horizon");
        if (v.contains("start_mode"))
            spec.start_mode = json_int(v.at("start_mode"), "signal.start_mode");
        return spec;
    }
    throw ConfigError("signal.type must be schedule, cycle, asymptotic, or random");
}

inline SimulateSpec parse_simulate(const Json& v, std::size_t dim) {
    reject_unknown_keys(v, {"x0", "horizon", "sample_step"}, "simulate");
    SimulateSpec spec;
    const Json& x0 = json_field(v, "x0", "simulate");
    if (x0.is_string()) {
        // Format: random:<count>:<lo>:<hi>:<seed>
        const std::string s = x0.get<std::string>();
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (pos <= s.size()) {
            const std::size_t next = s.find(':', pos);
            parts.push_back(s.substr(pos, next == std::string::npos ? next : next - pos));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (parts.size() != 5 || parts[0] != "random")
            throw ConfigError("simulate.x0 string must be random:<count>:<lo>:<hi>:<seed>");
        RandomStatesSpec r;
        try {
            r.count = std::stoul(parts[1]);
            r.lo = std::stod(parts[2]);
            r.hi = std::stod(parts[3]);
            r.seed = std::stoull(parts[4]);
        } catch (...) {
            throw ConfigError("simulate.x0: cannot parse '" + s + "'");
        }
        if (r.count == 0 || !(r.lo < r.hi))
            throw ConfigError("simulate.x0 random spec needs count > 0 and lo < hi");
        spec.random_states = r;
    } else if (x0.is_array()) {
        for (const Json& row : x0) {
            if (!row.is_array() || row.size() != dim)
                throw ConfigError("simulate.x0 entries must be vectors of length " +
                                  std::to_string(dim));
            Vec state;
            for (const Json& c : row) state.push_back(json_double(c, "simulate.x0"));
            spec.states.push_back(std::move(state));
        }
        if (spec.states.empty()) throw ConfigError("simulate.x0 must not be empty");
    } else {
        throw ConfigError("simulate.x0 must be an array of states or a random spec string");
    }
    spec.horizon = json_double(json_field(v, "horizon", "simulate"), "simulate.horizon");
    if (!(spec.horizon > 0.0)) throw ConfigError("simulate.horizon must be positive");
    if (v.contains("sample_step")) {
        spec.sample_step = json_double(v.at("sample_step"), "simulate.sample_step");
        if (!(spec.sample_step > 0.0)) throw ConfigError("simulate.sample_step must be positive");
    }
    return spec;
}

inline ClassifySpec parse_classify(const Json& v) {
    reject_unknown_keys(v, {"mode", "tail_fraction"}, "classify");
    ClassifySpec spec;
    if (v.contains("mode")) {
        const std::string mode = v.at("mode").get<std::string>();
        if (mode == "asymptotic")
            spec.mode = EvaluationMode::Asymptotic;
        else if (mode == "empirical")
            spec.mode = EvaluationMode::EmpiricalTail;
        else
            throw ConfigError("classify.mode must be asymptotic or empirical");
    }
    if (v.contains("tail_fraction")) {
        spec.tail_fraction = json_double(v.at("tail_fraction"), "classify.tail_fraction");
        if (!(spec.tail_fraction > 0.0) || !(spec.tail_fraction < 1.0))
            throw ConfigError("classify.tail_fraction must lie in (0, 1)");
    }
    return spec;
}

} // namespace detail

inline ProblemConfig parse_config(const Json& doc) {
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    detail::reject_unknown_keys(doc, {"family", "certificates", "signal", "simulate", "classify"},
                                "config");
    SubsystemFamily family = detail::parse_family(detail::json_field(doc, "family", "config"));
    CertificateOptions certs = detail::parse_certificates(
        doc.contains("certificates") ? doc.at("certificates") : Json(), family.dim());
    std::optional<SignalSpec> signal;
    if (doc.contains("signal")) signal = detail::parse_signal(doc.at("signal"));
    std::optional<SimulateSpec> simulate;
    if (doc.contains("simulate"))
        simulate = detail::parse_simulate(doc.at("simulate"), family.dim());
    ClassifySpec classify;
    if (doc.contains("classify")) classify = detail::parse_classify(doc.at("classify"));
    return ProblemConfig{std::move(family), std::move(certs), std::move(signal),
                         std::move(simulate), classify};
}

inline ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

inline Json to_json(const ProblemConfig& config) {
    Json doc;
    Json family;
    family["d"] = config.family.dim();
    Json subs = Json::array();
    for (int id = 1; id <= config.family.count(); ++id) {
        const Mat& a = config.family.mode(id);
        Json rows = Json::array();
        for (std::size_t i = 0; i < a.rows(); ++i) {
            Json row = Json::array();
            for (std::size_t j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
            rows.push_back(std::move(row));
        }
        subs.push_back(Json{{"id", id}, {"A", std::move(rows)}});
    }
    family["subsystems"] = std::move(subs);
    Json edges = Json::array();
    for (const auto& [p, q] : config.family.edges()) edges.push_back(Json::array({p, q}));
    family["edges"] = std::move(edges);
    doc["family"] = std::move(family);

    Json certs;
    certs["eps_offset"] = config.certificates.eps_offset;
    if (config.certificates.q_override.empty()) {
        certs["Q"] = "identity";
    } else {
        Json q = Json::object();
        for (const auto& [id, m] : config.certificates.q_override) {
            Json rows = Json::array();
            for (std::size_t i = 0; i < m.dim(); ++i) {
                Json row = Json::array();
                for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
                rows.push_back(std::move(row));
            }
            q[std::to_string(id)] = std::move(rows);
        }
        certs["Q"] = std::move(q);
    }
    doc["certificates"] = std::move(certs);

    if (config.signal) {
        Json sig;
        if (const auto* s = std::get_if<ScheduleSpec>(&*config.signal)) {
            sig["type"] = "schedule";
            sig["initial_mode"] = s->initial_mode;
            Json sw = Json::array();
            for (const ModeSwitch& m : s->switches) sw.push_back(Json::array({m.time, m.mode}));
            sig["switches"] = std::move(sw);
        } else if (const auto* c = std::get_if<CycleSigSpec>(&*config.signal)) {
            sig["type"] = "cycle";
            Json steps = Json::array();
            for (const CycleStep& st : c->steps) steps.push_back(Json::array({st.mode, st.dwell}));
            sig["steps"] = std::move(steps);
        } else if (const auto* a = std::get_if<AsymptoticSpec>(&*config.signal)) {
            sig["type"] = "asymptotic";
            sig["nu"] = a->stats.nu;
            Json rho = Json::array();
            for (const auto& [edge, share] : a->stats.rho)
                rho.push_back(Json::array({edge.first, edge.second, share}));
            sig["rho"] = std::move(rho);
            Json eta = Json::array();
            for (const auto& [mode, share] : a->stats.eta)
                eta.push_back(Json::array({mode, share}));
            sig["eta"] = std::move(eta);
        } else if (const auto* r = std::get_if<RandomSigSpec>(&*config.signal)) {
            sig["type"] = "random";
            sig["seed"] = r->seed;
            sig["mean_dwell"] = r->mean_dwell;
            sig["horizon"] = r->horizon;
            if (r->start_mode) sig["start_mode"] = *r->start_mode;
        }
        doc["signal"] = std::move(sig);
    }

    if (config.simulate) {
        Json sim;
        if (config.simulate->random_states) {
            const RandomStatesSpec& r = *config.simulate->random_states;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "random:%zu:%.17g:%.17g:%llu", r.count, r.lo, r.hi,
                          static_cast<unsigned long long>(r.seed));
            sim["x0"] = std::string(buf);
        } else {
            Json states = Json::array();
            for (const Vec& x : config.simulate->states) {
                Json row = Json::array();
                for (double v : x) row.push_back(v);
                states.push_back(std::move(row));
            }
            sim["x0"] = std::move(states);
        }
        sim["horizon"] = config.simulate->horizon;
        sim["sample_step"] = config.simulate->sample_step;
        doc["simulate"] = std::move(sim);
    }

    Json classify;
    classify["mode"] =
        config.classify.mode == EvaluationMode::Asymptotic ? "asymptotic" : "empirical";
    classify["tail_fraction"] = config.classify.tail_fraction;
    doc["classify"] = std::move(classify);
    return doc;
}

/// A signal spec resolved against a family: a concrete realization when the
/// spec names one, and exact long-run statistics when those are known.
struct ResolvedSignal {
    std::optional<SwitchingSignal> signal;
    std::optional<AsymptoticStatistics> asymptotics;
};

inline ResolvedSignal resolve_signal(const SignalSpec& spec, const SubsystemFamily& family) {
    ResolvedSignal out;
    if (const auto* s = std::get_if<ScheduleSpec>(&spec)) {
        SwitchingSignal sig = SwitchingSignal::finite(s->initial_mode, s->switches);
        validate(sig, family);
        out.signal = std::move(sig);
    } else if (const auto* c = std::get_if<CycleSigSpec>(&spec)) {
        PeriodicSignal p = periodic_from_cycle(c->steps, family);
        out.signal = std::move(p.signal);
        out.asymptotics = std::move(p.asymptotics);
    } else if (const auto* a = std::get_if<AsymptoticSpec>(&spec)) {
        const AsymptoticStatistics& st = a->stats;
        if (!(st.nu >= 0.0)) throw ConfigError("signal.nu must be nonnegative");
        double rho_sum = 0.0;
        for (const auto& [edge, share] : st.rho) {
            if (share < 0.0) throw ConfigError("signal.rho shares must be nonnegative");
            if (!family.has_edge(edge.first, edge.second))
                throw ConfigError("signal.rho names transition (" + std::to_string(edge.first) +
                                  "," + std::to_string(edge.second) + ") which is not admissible");
            rho_sum += share;
        }
        if (st.nu > 0.0 && std::abs(rho_sum - 1.0) > 1e-9)
            throw ConfigError("signal.rho shares must sum to 1");
        double eta_sum = 0.0;
        for (const auto& [mode, share] : st.eta) {
            if (share < 0.0) throw ConfigError("signal.eta shares must be nonnegative");
            if (!family.has_mode(mode))
                throw ConfigError("signal.eta names unknown mode " + std::to_string(mode));
            eta_sum += share;
        }
        if (std::abs(eta_sum - 1.0) > 1e-9) throw ConfigError("signal.eta shares must sum to 1");
        out.asymptotics = st;
    } else if (const auto* r = std::get_if<RandomSigSpec>(&spec)) {
        out.signal = random_admissible(family, r->seed, r->mean_dwell, r->horizon, r->start_mode);
    }
    return out;
}

/// Materializes the initial states of a simulate spec; random states are drawn
/// componentwise uniform from [lo, hi] with the spec's seed.
inline std::vector<Vec> materialize_states(const SimulateSpec& spec, std::size_t dim) {
    std::vector<Vec> states = spec.states;
    if (spec.random_states) {
        const RandomStatesSpec& r = *spec.random_states;
        SplitMix64 rng(r.seed);
        for (std::size_t k = 0; k < r.count; ++k) {
            Vec x(dim);
            for (std::size_t i = 0; i < dim; ++i) x[i] = rng.uniform(r.lo, r.hi);
            states.push_back(std::move(x));
        }
    }
    return states;
}

} // namespace swv
