#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace afmsr {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationOptions {
    std::uint64_t seed = 1;
    /// Multiplies every normaliser entry before the normalisation checks run.
    /// 1.0 leaves them untouched; anything else is a fault injection hook.
    double normalizer_scale = 1.0;
};

/// Built-in oracle suite: scalar closed form, unit relay input power (from
/// the cascade and from symbol-level Monte Carlo), cascade equivalence,
/// group quadratic-form identities and the QR/power cross-check.
std::vector<CheckResult> run_validation(const ValidationOptions& opts = {});

}  // namespace afmsr
