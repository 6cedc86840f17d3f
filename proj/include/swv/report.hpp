#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "swv/certificates.hpp"
#include "swv/config.hpp"
#include "swv/margins.hpp"
#include "swv/simulate.hpp"
#include "swv/version.hpp"

namespace swv {

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::Stabilizing: return "stabilizing";
        case Classification::Destabilizing: return "destabilizing";
        default: return "undetermined";
    }
}

inline const char* to_string(EvaluationMode m) {
    return m == EvaluationMode::Asymptotic ? "asymptotic" : "empirical-tail";
}

inline const char* to_string(Stability s) {
    return s == Stability::Stable ? "stable" : "unstable";
}

/// FNV-1a hash of the canonical serialization, as a fixed-width hex string.
/// Reports embed it so a report can be matched to its exact input.
inline std::string config_digest(const Json& doc) {
    const std::string dump = doc.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline Json matrix_json(const Mat& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json provenance_json(const ProblemConfig& config) {
    return Json{{"generator", "switch-verdict"},
                {"version", version},
                {"config_digest", config_digest(to_json(config))}};
}

inline Json certificates_json(const CertificateSet& certs) {
    Json subsystems = Json::array();
    for (const SubsystemCertificate& c : certs.certificates())
        subsystems.push_back(Json{{"id", c.id},
                                  {"stability", to_string(c.stability)},
                                  {"epsilon", c.epsilon},
                                  {"rate_upper", c.rate_upper},
                                  {"rate_lower", c.rate_lower},
                                  {"P", matrix_json(c.p.mat())},
                                  {"Q", matrix_json(c.q.mat())}});
    Json transitions = Json::array();
    for (const auto& [edge, g] : certs.all_gains())
        transitions.push_back(Json{{"from", g.from},
                                   {"to", g.to},
                                   {"gain_lower", g.gain_lower},
                                   {"gain_upper", g.gain_upper}});
    return Json{{"subsystems", std::move(subsystems)}, {"transitions", std::move(transitions)}};
}

inline Json margin_json(const MarginReport& report) {
    return Json{{"stability_margin", report.stability_margin},
                {"instability_margin", report.instability_margin},
                {"mode", to_string(report.mode)},
                {"classification", to_string(report.classification)}};
}

inline Json envelope_json(const EnvelopeReport& report) {
    return Json{{"samples_checked", report.samples_checked},
                {"worst_lower_slack", report.worst_lower_slack},
                {"worst_upper_slack", report.worst_upper_slack}};
}

} // namespace swv
