#include "afmsr/harness.hpp"

#include "afmsr/feedback.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace afmsr {

namespace {

constexpr std::uint64_t kFeedbackStream = 0x6a09e667f3bcc909ULL;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) fn(k);
        });
    }
}

double worst_step(const MsrSolution& sol) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : sol.receiver_steps) worst = std::min(worst, s.after - s.before);
    return worst;
}

MsrSolution solve(Method method, const Topology& topo, const ChannelSet& ch, SolverOptions opts) {
    switch (method) {
        case Method::ProposedQR:
            opts.eig_method = EigMethod::QR;
            return alternate(topo, ch, opts);
        case Method::ProposedPower:
            opts.eig_method = EigMethod::Power;
            return alternate(topo, ch, opts);
        case Method::EqualPower:
            return equal_power_baseline(topo, ch, opts);
    }
    throw std::logic_error("unknown method");
}

TrialRecord base_record(std::size_t trial, Method method, double snr_db, const ChannelSet& ch) {
    TrialRecord rec;
    rec.trial_index = trial;
    rec.method = method;
    rec.snr_db = snr_db;
    rec.channel_checksum = channel_checksum(ch);
    return rec;
}

void fill_from(TrialRecord& rec, const MsrSolution& sol) {
    rec.sum_rate = sol.sum_rate;
    rec.outer_iterations = sol.outer_iterations;
    rec.converged = sol.converged;
    rec.worst_receiver_step = worst_step(sol);
}

void mark_failed(TrialRecord& rec) {
    rec.failed = true;
    rec.sum_rate = 0.0;
    rec.converged = false;
}

}  // namespace

std::string_view method_name(Method m) noexcept {
    switch (m) {
        case Method::ProposedQR: return "proposed-qr";
        case Method::ProposedPower: return "proposed-power";
        case Method::EqualPower: return "equal-power";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    for (Method m : {Method::ProposedQR, Method::ProposedPower, Method::EqualPower}) {
        if (method_name(m) == name) return m;
    }
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    topology.validate();
    solver.validate();
    if (trials == 0) throw std::invalid_argument("trials: must be at least 1");
    if (snr_grid_db.empty()) throw std::invalid_argument("snr: grid is empty");
    for (double s : snr_grid_db) {
        if (!std::isfinite(s)) throw std::invalid_argument("snr: values must be finite");
    }
    if (pe_grid.empty()) throw std::invalid_argument("pe: grid is empty");
    for (double p : pe_grid) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("pe: values must lie in [0, 1]");
    }
    if (feedback_pe && !(*feedback_pe >= 0.0 && *feedback_pe <= 1.0)) {
        throw std::invalid_argument("feedback_pe: must lie in [0, 1]");
    }
    if (!std::isfinite(pe_sweep_snr_db)) throw std::invalid_argument("pe_sweep_snr: must be finite");
    if (threads == 0) throw std::invalid_argument("threads: must be at least 1");
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t grid_index, std::uint64_t trial) noexcept {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ grid_index);
    return splitmix64(s ^ trial);
}

std::uint64_t channel_checksum(const ChannelSet& ch) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& m : ch.hops) {
        for (const cplx& z : m.entries()) {
            double parts[2] = {z.real(), z.imag()};
            unsigned char bytes[sizeof parts];
            std::memcpy(bytes, parts, sizeof parts);
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 0x100000001b3ULL;
            }
        }
    }
    return h;
}

Topology with_snr_db(Topology topo, double snr_db) {
    topo.sigma_s2 = 1.0;
    topo.sigma_n2 = std::pow(10.0, -snr_db / 10.0);
    return topo;
}

std::vector<TrialRecord> run_snr_trials(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n_methods = cfg.methods.size();
    if (n_methods == 0) return {};
    const std::size_t units = cfg.snr_grid_db.size() * cfg.trials;
    std::vector<TrialRecord> out(units * n_methods);

    parallel_for(units, cfg.threads, [&](std::size_t unit) {
        const std::size_t point = unit / cfg.trials;
        const std::size_t trial = unit % cfg.trials;
        const double snr = cfg.snr_grid_db[point];
        const Topology topo = with_snr_db(cfg.topology, snr);
        const std::uint64_t seed = trial_seed(cfg.master_seed, point, trial);
        Rng rng(seed);
        const ChannelSet ch = draw_channels(topo, rng);

        for (std::size_t k = 0; k < n_methods; ++k) {
            TrialRecord rec = base_record(trial, cfg.methods[k], snr, ch);
            rec.pe = cfg.feedback_pe;
            try {
                const MsrSolution sol = solve(cfg.methods[k], topo, ch, cfg.solver);
                fill_from(rec, sol);
                if (cfg.feedback_pe) {
                    Rng fb(splitmix64(seed ^ kFeedbackStream));
                    rec.sum_rate = apply_feedback(sol, topo, ch, *cfg.feedback_pe, fb);
                }
            } catch (const std::exception&) {
                mark_failed(rec);
            }
            out[unit * n_methods + k] = rec;
        }
    });
    return out;
}

std::vector<SummaryRow> run_snr_sweep(const ExperimentConfig& cfg) { return aggregate(run_snr_trials(cfg)); }

std::vector<TrialRecord> run_pe_trials(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n_methods = cfg.methods.size();
    const std::size_t n_pe = cfg.pe_grid.size();
    if (n_methods == 0) return {};
    std::vector<TrialRecord> out(cfg.trials * n_methods * n_pe);
    const double snr = cfg.pe_sweep_snr_db;
    const Topology topo = with_snr_db(cfg.topology, snr);

    parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
        const std::uint64_t seed = trial_seed(cfg.master_seed, 0, trial);
        Rng rng(seed);
        const ChannelSet ch = draw_channels(topo, rng);

        for (std::size_t k = 0; k < n_methods; ++k) {
            std::optional<MsrSolution> sol;
            try {
                sol = solve(cfg.methods[k], topo, ch, cfg.solver);
            } catch (const std::exception&) {
            }
            for (std::size_t p = 0; p < n_pe; ++p) {
                TrialRecord rec = base_record(trial, cfg.methods[k], snr, ch);
                rec.pe = cfg.pe_grid[p];
                if (!sol) {
                    mark_failed(rec);
                } else {
                    fill_from(rec, *sol);
                    try {
                        Rng fb(splitmix64(seed ^ kFeedbackStream));
                        rec.sum_rate = apply_feedback(*sol, topo, ch, cfg.pe_grid[p], fb);
                    } catch (const std::exception&) {
                        mark_failed(rec);
                    }
                }
                out[(trial * n_methods + k) * n_pe + p] = rec;
            }
        }
    });
    return out;
}

std::vector<SummaryRow> run_pe_sweep(const ExperimentConfig& cfg) { return aggregate(run_pe_trials(cfg)); }

std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& records) {
    // Missing pe (perfect feedback) sorts before any numeric pe.
    using Key = std::tuple<int, double, bool, double>;
    std::map<Key, std::vector<const TrialRecord*>> groups;
    for (const auto& r : records) {
        const Key key{static_cast<int>(r.method), r.snr_db, r.pe.has_value(), r.pe.value_or(0.0)};
        groups[key].push_back(&r);
    }

    std::vector<SummaryRow> rows;
    rows.reserve(groups.size());
    for (auto& [key, members] : groups) {
        // Fixed summation order makes the result independent of input order.
        std::stable_sort(members.begin(), members.end(), [](const TrialRecord* a, const TrialRecord* b) {
            if (a->trial_index != b->trial_index) return a->trial_index < b->trial_index;
            return a->sum_rate < b->sum_rate;
        });
        SummaryRow row;
        row.method = members.front()->method;
        row.snr_db = members.front()->snr_db;
        row.pe = members.front()->pe;

        double sum = 0.0;
        for (const auto* r : members) {
            if (r->failed) {
                ++row.failures;
            } else {
                ++row.trials;
                sum += r->sum_rate;
            }
        }
        if (row.trials == 0) {
            row.mean_sr = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.mean_sr = sum / static_cast<double>(row.trials);
        }
        if (row.trials > 1) {
            double ss = 0.0;
            for (const auto* r : members) {
                if (!r->failed) ss += (r->sum_rate - row.mean_sr) * (r->sum_rate - row.mean_sr);
            }
            const double n = static_cast<double>(row.trials);
            row.std_err = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace afmsr
