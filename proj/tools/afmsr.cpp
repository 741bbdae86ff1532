// afmsr: sweeps, single solves and the built-in oracle suite.
#include "afmsr/cli.hpp"
#include "afmsr/harness.hpp"
#include "afmsr/optimizer.hpp"
#include "afmsr/validation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

using namespace afmsr;

namespace {

struct Flags {
    std::string config;
    std::string out = "-";
    std::string format = "csv";
    std::string seed, trials, snr, pe, methods, eig, threads;
    std::vector<std::string> overrides;
    std::string fault;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "key = value configuration file");
    cmd->add_option("--out", f.out, "output path, '-' for stdout");
    cmd->add_option("--format", f.format, "csv or tsv")->check(CLI::IsMember({"csv", "tsv"}));
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--trials", f.trials, "trials per grid point");
    cmd->add_option("--snr", f.snr, "comma separated SNR grid in dB");
    cmd->add_option("--pe", f.pe, "comma separated feedback bit error probabilities");
    cmd->add_option("--method", f.methods, "comma separated methods");
    cmd->add_option("--eig", f.eig, "qr or power")->check(CLI::IsMember({"qr", "power"}));
    cmd->add_option("--threads", f.threads, "worker threads");
    cmd->add_option("--set", f.overrides, "key=value override (repeatable)");
}

ExperimentConfig resolve(const Flags& f) {
    ConfigLayers layers;
    if (!f.config.empty()) layers.add_file(f.config);
    const auto put = [&](const char* key, const std::string& value) {
        if (!value.empty()) layers.set(key, value);
    };
    put("seed", f.seed);
    put("trials", f.trials);
    put("snr", f.snr);
    put("pe", f.pe);
    put("methods", f.methods);
    put("eig", f.eig);
    put("threads", f.threads);
    for (const auto& o : f.overrides) layers.set_assignment(o);
    return layers.resolve();
}

OutputFormat format_of(const Flags& f) { return f.format == "tsv" ? OutputFormat::Tsv : OutputFormat::Csv; }

int solve_one(const ExperimentConfig& cfg, const std::string& out) {
    const Topology topo = with_snr_db(cfg.topology, cfg.snr_grid_db.front());
    Rng rng(trial_seed(cfg.master_seed, 0, 0));
    const ChannelSet ch = draw_channels(topo, rng);
    const MsrSolution sol = alternate(topo, ch, cfg.solver);
    const MsrSolution base = equal_power_baseline(topo, ch, cfg.solver);
    std::ostringstream os;
    os << "snr_db=" << format_number(cfg.snr_grid_db.front()) << '\n'
       << "sum_rate=" << format_number(sol.sum_rate) << '\n'
       << "equal_power_sum_rate=" << format_number(base.sum_rate) << '\n'
       << "outer_iterations=" << sol.outer_iterations << '\n'
       << "converged=" << (sol.converged ? "true" : "false") << '\n';
    for (std::size_t i = 1; i <= topo.relay_groups(); ++i) {
        os << "group" << i << "_power=" << format_number(group_power(topo, sol.alloc, i)) << '\n';
    }
    emit_text(os.str(), out);
    return kExitOk;
}

int validate(const Flags& f) {
    ValidationOptions opts;
    opts.seed = f.seed.empty() ? default_seed() : std::stoull(f.seed);
    if (!f.fault.empty()) {
        if (f.fault != "normalization") throw ConfigError("--inject-fault: unknown fault '" + f.fault + "'");
        opts.normalizer_scale = 1.05;
    }
    bool ok = true;
    std::ostringstream os;
    for (const auto& r : run_validation(opts)) {
        os << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    emit_text(os.str(), f.out);
    return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-hop relay sum-rate optimisation experiments"};
    app.require_subcommand(1);
    Flags snr_flags, pe_flags, one_flags, val_flags;
    auto* snr = app.add_subcommand("snr-sweep", "mean sum rate against SNR");
    auto* pe = app.add_subcommand("pe-sweep", "mean sum rate against feedback bit error probability");
    auto* one = app.add_subcommand("solve-one", "solve a single channel draw");
    auto* val = app.add_subcommand("validate", "run the built-in oracle checks");
    add_common(snr, snr_flags);
    add_common(pe, pe_flags);
    add_common(one, one_flags);
    val->add_option("--seed", val_flags.seed, "seed for the random instances")->check(CLI::NonNegativeNumber);
    val->add_option("--out", val_flags.out, "output path, '-' for stdout");
    val->add_option("--inject-fault", val_flags.fault)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*val) return validate(val_flags);
        if (*snr) {
            const ExperimentConfig cfg = resolve(snr_flags);
            emit_results(run_snr_sweep(cfg), format_of(snr_flags), snr_flags.out);
        } else if (*pe) {
            const ExperimentConfig cfg = resolve(pe_flags);
            emit_results(run_pe_sweep(cfg), format_of(pe_flags), pe_flags.out);
        } else {
            return solve_one(resolve(one_flags), one_flags.out);
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "afmsr: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "afmsr: " << e.what() << '\n';
        return kExitFailure;
    }
}
