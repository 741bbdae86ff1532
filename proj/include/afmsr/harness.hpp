#pragma once

#include "afmsr/network.hpp"
#include "afmsr/optimizer.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace afmsr {

enum class Method { ProposedQR, ProposedPower, EqualPower };

std::string_view method_name(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

struct ExperimentConfig {
    Topology topology = Topology::reference();
    std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<double> pe_grid{0.0, 1e-4, 1e-3, 1e-2};
    std::size_t trials = 200;
    std::uint64_t master_seed = 1;
    std::vector<Method> methods{Method::ProposedQR, Method::ProposedPower, Method::EqualPower};
    /// Flip probability of the quantised feedback link used by the SNR
    /// sweep; empty means perfect (unquantised) feedback.
    std::optional<double> feedback_pe;
    /// Operating point of the Pe sweep.
    double pe_sweep_snr_db = 10.0;
    SolverOptions solver;
    /// Worker threads; results do not depend on this.
    std::size_t threads = 1;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct TrialRecord {
    std::size_t trial_index = 0;
    Method method = Method::ProposedQR;
    double snr_db = 0.0;
    std::optional<double> pe;
    double sum_rate = 0.0;
    std::size_t outer_iterations = 0;
    bool converged = false;
    bool failed = false;
    /// FNV-1a over the channel realisation the trial used.
    std::uint64_t channel_checksum = 0;
    /// Smallest SR change over the solver's receiver updates (+inf if none).
    double worst_receiver_step = 0.0;
};

struct SummaryRow {
    Method method = Method::ProposedQR;
    double snr_db = 0.0;
    std::optional<double> pe;
    double mean_sr = 0.0;
    double std_err = 0.0;
    std::size_t trials = 0;
    std::size_t failures = 0;
};

/// Seed of one trial: splitmix64 applied to the master seed, then to the
/// running value xor the grid index, then xor the trial index.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t grid_index, std::uint64_t trial) noexcept;

std::uint64_t channel_checksum(const ChannelSet& ch) noexcept;

/// sigma_s^2 = 1, sigma_n^2 = 10^(-snr/10).
Topology with_snr_db(Topology topo, double snr_db);

/// Every (snr, trial, method) outcome. Methods at the same (snr, trial)
/// share one channel draw.
std::vector<TrialRecord> run_snr_trials(const ExperimentConfig& cfg);
std::vector<SummaryRow> run_snr_sweep(const ExperimentConfig& cfg);

/// Every (pe, trial, method) outcome at cfg.pe_sweep_snr_db. Each trial is
/// solved once per method; all pe values reuse that solution and the same
/// feedback generator seed.
std::vector<TrialRecord> run_pe_trials(const ExperimentConfig& cfg);
std::vector<SummaryRow> run_pe_sweep(const ExperimentConfig& cfg);

/// Groups by (method, snr, pe); mean and sample standard error of the
/// successful trials. Rows come out sorted by (method, snr, pe).
std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& records);

}  // namespace afmsr
