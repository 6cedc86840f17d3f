// Command line front end: certify a family, classify a signal against the
// certificates, simulate trajectories with envelope checks, or reproduce the
// bundled reference cases.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <swv/swv.hpp>

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
}

void write_report(const std::string& outdir, const swv::Json& report) {
    std::filesystem::create_directories(outdir);
    const auto path = std::filesystem::path(outdir) / "report.json";
    std::ofstream out(path);
    if (!out) throw swv::ConfigError("cannot write " + path.string());
    out << report.dump(2) << "\n";
    std::cout << "wrote " << path.string() << "\n";
}

void print_certificates(const swv::CertificateSet& certs) {
    std::printf("%-10s %-9s %-12s %-12s %-12s\n", "subsystem", "stability", "epsilon",
                "rate_upper", "rate_lower");
    for (const auto& c : certs.certificates())
        std::printf("%-10d %-9s %-12s %-12s %-12s\n", c.id, swv::to_string(c.stability),
                    fmt(c.epsilon).c_str(), fmt(c.rate_upper).c_str(),
                    fmt(c.rate_lower).c_str());
    std::printf("%-10s %-12s %-12s\n", "transition", "gain_lower", "gain_upper");
    for (const auto& [edge, g] : certs.all_gains())
        std::printf("%3d -> %-3d %-12s %-12s\n", g.from, g.to, fmt(g.gain_lower).c_str(),
                    fmt(g.gain_upper).c_str());
}

void print_margins(const swv::MarginReport& report) {
    std::printf("stability margin    %s\n", fmt(report.stability_margin).c_str());
    std::printf("instability margin  %s\n", fmt(report.instability_margin).c_str());
    std::printf("classification      %s (%s)\n", swv::to_string(report.classification),
                swv::to_string(report.mode));
}

struct LoadedProblem {
    swv::ProblemConfig config;
    swv::CertificateSet certs;
};

LoadedProblem load_problem(const std::string& config_path) {
    swv::ProblemConfig config = swv::load_config(config_path);
    swv::CertificateSet certs = swv::build_certificate_set(config.family, config.certificates);
    return {std::move(config), std::move(certs)};
}

/// Picks the margin evaluation requested by the config. Asymptotic mode needs
/// exact long-run statistics; empirical mode needs a realized signal and a
/// horizon to sample.
swv::MarginReport evaluate_margins(const swv::ProblemConfig& config,
                                   const swv::CertificateSet& certs,
                                   const swv::ResolvedSignal& resolved) {
    if (config.classify.mode == swv::EvaluationMode::Asymptotic) {
        if (!resolved.asymptotics)
            throw swv::ConfigError(
                "classify.mode=asymptotic needs a cycle or asymptotic signal; "
                "use classify.mode=empirical for schedules and random signals");
        return swv::classify(*resolved.asymptotics, certs);
    }
    if (!resolved.signal)
        throw swv::ConfigError("classify.mode=empirical needs a realizable signal");
    double horizon = 0.0;
    if (config.simulate)
        horizon = config.simulate->horizon;
    else if (const auto* r = std::get_if<swv::RandomSigSpec>(&*config.signal))
        horizon = r->horizon;
    if (!(horizon > 0.0))
        throw swv::ConfigError("classify.mode=empirical needs simulate.horizon");
    return swv::empirical_margins(*resolved.signal, certs, horizon,
                                  config.classify.tail_fraction);
}

int cmd_certify(const std::string& config_path, const std::string& outdir) {
    LoadedProblem problem = load_problem(config_path);
    print_certificates(problem.certs);
    swv::Json report;
    report["provenance"] = swv::provenance_json(problem.config);
    report["certificates"] = swv::certificates_json(problem.certs);
    write_report(outdir, report);
    return 0;
}

int cmd_classify(const std::string& config_path, const std::string& outdir) {
    LoadedProblem problem = load_problem(config_path);
    if (!problem.config.signal) throw swv::ConfigError("classify needs a signal section");
    const swv::ResolvedSignal resolved =
        swv::resolve_signal(*problem.config.signal, problem.config.family);
    const swv::MarginReport margins = evaluate_margins(problem.config, problem.certs, resolved);
    print_certificates(problem.certs);
    print_margins(margins);
    swv::Json report;
    report["provenance"] = swv::provenance_json(problem.config);
    report["certificates"] = swv::certificates_json(problem.certs);
    report["classification"] = swv::margin_json(margins);
    write_report(outdir, report);
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& outdir) {
    LoadedProblem problem = load_problem(config_path);
    if (!problem.config.signal) throw swv::ConfigError("simulate needs a signal section");
    if (!problem.config.simulate) throw swv::ConfigError("simulate needs a simulate section");
    const swv::ResolvedSignal resolved =
        swv::resolve_signal(*problem.config.signal, problem.config.family);
    if (!resolved.signal)
        throw swv::ConfigError("simulate needs a realizable signal (schedule, cycle, or random)");

    swv::Json report;
    report["provenance"] = swv::provenance_json(problem.config);
    report["certificates"] = swv::certificates_json(problem.certs);
    try {
        const swv::MarginReport margins =
            evaluate_margins(problem.config, problem.certs, resolved);
        print_margins(margins);
        report["classification"] = swv::margin_json(margins);
    } catch (const swv::EmptyTailError& e) {
        report["classification_note"] = e.what();
    }

    const swv::SimulateSpec& sim = *problem.config.simulate;
    const swv::SimOptions options{sim.horizon, sim.sample_step, 1e300};
    const auto states = swv::materialize_states(sim, problem.config.family.dim());
    std::filesystem::create_directories(outdir);

    swv::Json runs = swv::Json::array();
    for (std::size_t k = 0; k < states.size(); ++k) {
        const swv::Trajectory traj = swv::propagate(problem.config.family, *resolved.signal,
                                                    states[k], options, &problem.certs);
        const swv::EnvelopeReport envelope = swv::check_envelopes(traj, problem.certs);
        const swv::Verdict verdict = swv::divergence_verdict(traj);

        const std::string trace_name = "trace_" + std::to_string(k) + ".csv";
        const auto trace_path = std::filesystem::path(outdir) / trace_name;
        std::ofstream trace(trace_path);
        if (!trace) throw swv::ConfigError("cannot write " + trace_path.string());
        swv::write_trace_csv(trace, traj, problem.certs);

        const swv::TrajectorySample& last = traj.samples.back();
        std::printf("x0 #%zu: %s after t=%s (|x|=%s)%s\n", k, swv::to_string(verdict),
                    fmt(last.t).c_str(), fmt(last.norm_x).c_str(),
                    traj.saturated ? " [saturated]" : "");

        swv::Json run;
        run["x0"] = states[k];
        run["verdict"] = swv::to_string(verdict);
        run["saturated"] = traj.saturated;
        run["final_time"] = last.t;
        run["final_norm"] = last.norm_x;
        run["trace"] = trace_name;
        run["envelope"] = swv::envelope_json(envelope);
        runs.push_back(std::move(run));
    }
    report["simulation"] = swv::Json{{"horizon", sim.horizon},
                                     {"sample_step", sim.sample_step},
                                     {"runs", std::move(runs)}};
    write_report(outdir, report);
    return 0;
}

int cmd_reproduce(const std::string& case_name, const std::string& outdir) {
    const swv::ReproResult result = swv::run_reproduction(case_name);
    std::printf("%-34s %-14s %-14s %s\n", "check", "expected", "actual", "status");
    for (const swv::ReproCheck& c : result.checks)
        std::printf("%-34s %-14s %-14s %s\n", c.name.c_str(), c.expected.c_str(),
                    c.actual.c_str(), c.pass ? "pass" : "FAIL");
    for (const std::string& note : result.notes) std::printf("note: %s\n", note.c_str());
    std::printf("%s: %s\n", case_name.c_str(), result.all_pass() ? "all checks passed"
                                                                 : "some checks FAILED");
    swv::Json report;
    report["provenance"] = swv::Json{{"generator", "switch-verdict"}, {"version", swv::version}};
    report["reproduction"] = result.to_json();
    write_report(outdir, report);
    return result.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certificate-based verdicts for switched linear systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string outdir = ".";
    std::string case_name;

    CLI::App* certify = app.add_subcommand("certify", "build certificates for a family");
    CLI::App* classify = app.add_subcommand("classify", "evaluate margins for a signal");
    CLI::App* simulate = app.add_subcommand("simulate", "propagate trajectories and verify envelopes");
    for (CLI::App* sub : {certify, classify, simulate}) {
        sub->add_option("-c,--config", config_path, "problem configuration (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("-o,--outdir", outdir, "output directory (default: .)");
    }
    CLI::App* reproduce = app.add_subcommand("reproduce", "rerun a bundled reference case");
    reproduce->add_option("case", case_name, "one of: example1, example3, example-sigma-prime, gap-proof")
        ->required();
    reproduce->add_option("-o,--outdir", outdir, "output directory (default: .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(certify)) return cmd_certify(config_path, outdir);
        if (app.got_subcommand(classify)) return cmd_classify(config_path, outdir);
        if (app.got_subcommand(simulate)) return cmd_simulate(config_path, outdir);
        return cmd_reproduce(case_name, outdir);
    } catch (const swv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
