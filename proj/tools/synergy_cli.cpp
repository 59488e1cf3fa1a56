#include "synergy/errors.hpp"
#include "synergy/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace synergy;

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kConfigError = 2, kRuntimeError = 3 };

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

ScenarioConfig load(const Options& opt) {
    ScenarioConfig cfg = ScenarioConfig::load(opt.config);
    if (opt.seed) cfg.seed = *opt.seed;
    return cfg;
}

int cmd_simulate(const Options& opt) {
    const ScenarioConfig cfg = load(opt);
    cfg.validate(true);
    fs::create_directories(opt.out);
    const ScenarioResult res = run_scenario(cfg);
    const fs::path dir(opt.out);
    write_file(dir / cfg.trajectory_file, trajectory_csv(cfg, res));
    write_file(dir / cfg.jumps_file, jump_log_csv(res));
    write_file(dir / cfg.summary_file, summary_csv(res.runs));
    const std::string text = summary_text(cfg, res);
    write_file(dir / "summary.txt", text);
    if (!opt.quiet) std::cout << text;
    return res.passed() ? kPass : kCheckFailure;
}

int cmd_verify(const Options& opt) {
    const ScenarioConfig cfg = load(opt);
    cfg.validate(false);
    fs::create_directories(opt.out);
    const VerificationResult v = run_verification(cfg);
    const fs::path dir(opt.out);
    write_file(dir / "synergism_bounds.txt", v.bounds.to_report());
    write_file(dir / "synergism_check.txt", v.synergism.to_report());
    write_file(dir / "gap_probe.txt", v.gap.to_report());
    write_file(dir / "gap_probe.csv", v.gap.to_csv());
    std::ostringstream grad;
    grad << "samples = " << v.gradient.samples << '\n'
         << "step = " << format_double(v.gradient.step) << '\n'
         << "max_relative_error = " << format_double(v.gradient.max_relative_error) << '\n'
         << "tolerance = " << format_double(v.gradient_tolerance) << '\n'
         << "passed = " << (v.gradient.max_relative_error < v.gradient_tolerance ? "true" : "false") << '\n';
    write_file(dir / "gradient_check.txt", grad.str());
    const auto failures = v.failures();
    if (!opt.quiet) {
        std::cout << v.bounds.to_report() << v.synergism.to_report() << v.gap.to_report() << grad.str();
        for (const auto& f : failures) std::cout << "FAILED " << f << '\n';
        std::cout << (failures.empty() ? "verify: pass\n" : "verify: fail\n");
    } else {
        for (const auto& f : failures) std::cerr << "FAILED " << f << '\n';
    }
    return failures.empty() ? kPass : kCheckFailure;
}

int cmd_sweep(const Options& opt, const std::string& parameter, const std::vector<double>& values) {
    const ScenarioConfig cfg = load(opt);
    cfg.validate(true);
    fs::create_directories(opt.out);
    const auto rows = run_sweep(cfg, parameter, values);
    const std::string csv = sweep_csv(parameter, rows);
    write_file(fs::path(opt.out) / "sweep.csv", csv);
    if (!opt.quiet) std::cout << csv;
    const bool ok = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.error.empty(); });
    return ok ? kPass : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synergistic hybrid attitude control on SO(3): simulation and verification"};
    app.require_subcommand(1);
    Options opt;
    const auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "Scenario file (flat key = value)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output directory");
        sub->add_option("--seed", opt.seed, "Override the scenario seed");
        sub->add_flag("--quiet", opt.quiet, "Suppress report output on stdout");
    };
    CLI::App* simulate = app.add_subcommand("simulate", "Run the scenario and write trajectory, jump log and summary");
    common(simulate);
    CLI::App* verify = app.add_subcommand("verify", "Check synergism bounds, singular-set gap and the gradient");
    common(verify);
    CLI::App* sweep = app.add_subcommand("sweep", "Re-run the scenario over values of one parameter");
    common(sweep);
    std::string parameter;
    std::vector<double> values;
    sweep->add_option("--parameter", parameter, "k | delta | k_c | k_omega | k_s | initial-axis-count")->required();
    sweep->add_option("--values", values, "Parameter values")->expected(0, -1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kPass : kConfigError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opt);
        if (verify->parsed()) return cmd_verify(opt);
        return cmd_sweep(opt, parameter, values);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UnknownParameter& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kRuntimeError;
    }
}
