#include "afmsr/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <system_error>

namespace afmsr {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(key + ": malformed number '" + t + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(key + ": malformed integer '" + t + "'");
    }
    return v;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

bool known_key(const std::string& key) {
    const auto& keys = config_keys();
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{"sizes",   "power_budgets", "snr",       "pe",
                                               "pe_sweep_snr", "feedback_pe", "trials",  "seed",
                                               "methods", "eig",           "outer_tol", "max_outer_iter",
                                               "threads"};
    return keys;
}

void ConfigLayers::add_text(const std::string& text, const std::string& origin) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void ConfigLayers::add_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    add_text(ss.str(), path.string());
}

void ConfigLayers::set(const std::string& key, const std::string& value) {
    if (!known_key(key)) throw ConfigError(key + ": unknown configuration key");
    values_.emplace_back(key, value);
}

void ConfigLayers::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

ExperimentConfig ConfigLayers::resolve() const {
    std::map<std::string, std::string> v;
    for (const auto& [key, value] : values_) v[key] = value;
    const auto has = [&](const char* k) { return v.count(k) != 0; };

    ExperimentConfig cfg;
    cfg.master_seed = default_seed();

    if (has("sizes")) {
        cfg.topology.sizes.clear();
        for (const auto& item : split_list(v["sizes"])) {
            cfg.topology.sizes.push_back(static_cast<std::size_t>(parse_unsigned("sizes", item)));
        }
    }
    if (!cfg.topology.sizes.empty() && cfg.topology.sizes.front() != 1) {
        throw ConfigError("sizes: the source must have exactly one antenna");
    }
    const std::size_t groups = cfg.topology.relay_groups();
    std::vector<double> budgets = has("power_budgets") ? parse_doubles("power_budgets", v["power_budgets"])
                                                       : std::vector<double>{1.0};
    if (budgets.size() == 1 && groups > 1) budgets.assign(groups, budgets.front());
    cfg.topology.power_budgets = budgets;

    if (has("snr")) cfg.snr_grid_db = parse_doubles("snr", v["snr"]);
    if (has("pe")) cfg.pe_grid = parse_doubles("pe", v["pe"]);
    if (has("pe_sweep_snr")) cfg.pe_sweep_snr_db = parse_double("pe_sweep_snr", v["pe_sweep_snr"]);
    if (has("feedback_pe")) {
        const std::string f = trim(v["feedback_pe"]);
        if (f == "perfect") {
            cfg.feedback_pe.reset();
        } else {
            cfg.feedback_pe = parse_double("feedback_pe", f);
        }
    }
    if (has("trials")) cfg.trials = static_cast<std::size_t>(parse_unsigned("trials", v["trials"]));
    if (has("seed")) cfg.master_seed = parse_unsigned("seed", v["seed"]);
    if (has("outer_tol")) cfg.solver.outer_tol = parse_double("outer_tol", v["outer_tol"]);
    if (has("max_outer_iter")) {
        cfg.solver.max_outer_iter = static_cast<std::size_t>(parse_unsigned("max_outer_iter", v["max_outer_iter"]));
    }
    if (has("threads")) cfg.threads = static_cast<std::size_t>(parse_unsigned("threads", v["threads"]));

    Method proposed = Method::ProposedQR;
    if (has("eig")) {
        const std::string e = trim(v["eig"]);
        if (e == "qr") {
            proposed = Method::ProposedQR;
        } else if (e == "power") {
            proposed = Method::ProposedPower;
        } else {
            throw ConfigError("eig: expected qr or power, got '" + e + "'");
        }
        cfg.solver.eig_method = proposed == Method::ProposedQR ? EigMethod::QR : EigMethod::Power;
    }
    if (has("methods")) {
        cfg.methods.clear();
        for (const auto& item : split_list(v["methods"])) {
            Method m = proposed;
            if (item != "proposed") {
                const auto parsed = parse_method(item);
                if (!parsed) throw ConfigError("methods: unknown method '" + item + "'");
                m = *parsed;
            }
            if (std::find(cfg.methods.begin(), cfg.methods.end(), m) == cfg.methods.end()) cfg.methods.push_back(m);
        }
    }

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
        return parse_unsigned(kSeedEnvVar, env);
    }
    return 1;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_results(std::ostream& os, const std::vector<SummaryRow>& rows, OutputFormat format) {
    const char sep = format == OutputFormat::Csv ? ',' : '\t';
    os << "method" << sep << "snr_db" << sep << "pe" << sep << "mean_sum_rate" << sep << "std_err" << sep << "trials"
       << sep << "failures" << '\n';
    for (const auto& r : rows) {
        os << method_name(r.method) << sep << format_number(r.snr_db) << sep
           << (r.pe ? format_number(*r.pe) : std::string("perfect")) << sep << format_number(r.mean_sr) << sep
           << format_number(r.std_err) << sep << r.trials << sep << r.failures << '\n';
    }
}

std::string format_results(const std::vector<SummaryRow>& rows, OutputFormat format) {
    std::ostringstream os;
    write_results(os, rows, format);
    return os.str();
}

void emit_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        if (!std::cout) throw std::runtime_error("cannot write to standard output");
        return;
    }
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move results into " + target.string());
    }
}

void emit_results(const std::vector<SummaryRow>& rows, OutputFormat format, const std::string& path) {
    emit_text(format_results(rows, format), path);
}

}  // namespace afmsr
