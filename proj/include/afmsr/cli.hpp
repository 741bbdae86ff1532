#pragma once

#include "afmsr/harness.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace afmsr {

/// Configuration problem; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

/// Environment variable that replaces the built-in default master seed.
inline constexpr const char* kSeedEnvVar = "AFMSR_SEED";

enum class OutputFormat { Csv, Tsv };

/// Recognised configuration keys:
///   sizes           comma list N_0..N_m                 (1,4,4,2)
///   power_budgets   comma list, or one value for all     (1)
///   snr             comma list, dB                       (0,5,10,15,20)
///   pe              comma list                           (0,0.0001,0.001,0.01)
///   pe_sweep_snr    dB                                   (10)
///   feedback_pe     number or "perfect"                  (perfect)
///   trials          integer >= 1                         (200)
///   seed            unsigned 64-bit integer              (1)
///   methods         comma list of proposed-qr, proposed-power,
///                   equal-power, proposed (uses eig)     (proposed-qr,proposed-power,equal-power)
///   eig             qr | power                           (qr)
///   outer_tol       number > 0                           (1e-8)
///   max_outer_iter  integer >= 1                         (50)
///   threads         integer >= 1                         (1)
const std::vector<std::string>& config_keys();

/// Layered key=value settings: later layers win.
class ConfigLayers {
public:
    /// Parses "key = value" lines; blank lines and '#' comments are skipped.
    void add_text(const std::string& text, const std::string& origin);
    void add_file(const std::filesystem::path& path);
    void set(const std::string& key, const std::string& value);
    /// "key=value"
    void set_assignment(const std::string& assignment);

    /// Builds and validates the configuration. Throws ConfigError naming the
    /// offending key.
    ExperimentConfig resolve() const;

private:
    std::vector<std::pair<std::string, std::string>> values_;
};

/// Default seed, honouring kSeedEnvVar when set.
std::uint64_t default_seed();

std::string format_number(double v);
/// Header plus one row per SummaryRow:
/// method,snr_db,pe,mean_sum_rate,std_err,trials,failures
void write_results(std::ostream& os, const std::vector<SummaryRow>& rows, OutputFormat format);
std::string format_results(const std::vector<SummaryRow>& rows, OutputFormat format);

/// Writes to path via a temporary file and rename; "-" or empty writes to
/// standard output. Throws std::runtime_error on I/O failure.
void emit_results(const std::vector<SummaryRow>& rows, OutputFormat format, const std::string& path);
void emit_text(const std::string& text, const std::string& path);

}  // namespace afmsr
