#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lagrot/field.hpp"
#include "lagrot/geometry.hpp"

namespace lagrot {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    double tol_scale = 1.0;          // multiplies every check tolerance
    std::string in_path;             // suite-specific input field (optional)
    std::string phase_path;          // geometry suite phase input (optional)
    bool quiet = false;
};

struct SuiteResult {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    VmoTable omega;  // filled by the geometry suite for CSV export

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// suite: convex | rotation | operator | geometry | solver | all
SuiteResult run_suite(const std::string& suite, const VerifyOptions& opts);

std::vector<std::string> suite_names();

}  // namespace lagrot
