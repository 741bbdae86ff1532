#include "catch_amalgamated.hpp"

#include "afmsr/validation.hpp"

using namespace afmsr;

TEST_CASE("oracle suite passes") {
    const auto results = run_validation();
    REQUIRE(results.size() == 6);
    for (const auto& r : results) {
        INFO(r.name << ": " << r.detail);
        CHECK(r.passed);
    }
}

TEST_CASE("oracle suite catches a normaliser fault") {
    ValidationOptions opts;
    opts.normalizer_scale = 1.05;
    for (const auto& r : run_validation(opts)) {
        INFO(r.name << ": " << r.detail);
        const bool normalisation = r.name.rfind("normalization", 0) == 0;
        CHECK(r.passed != normalisation);
    }
}
