#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tps::verify {

struct SuiteResult {
    std::string name;
    int checks = 0;
    int failures = 0;
    bool pass() const { return failures == 0; }
};

std::vector<std::string> suite_names();

/// Runs one named property suite, printing one verdict line per check.
/// `representer_instances` sizes the solver-heavy suites (50 = full run).
SuiteResult run_suite(const std::string& name, std::uint64_t seed, std::ostream& os,
                      int representer_instances = 50);

/// Detailed statistics shared by the verify CLI and the acceptance harness.
struct RepresenterStats {
    int instances = 0;
    int sparsity_violations = 0;
    int localization_violations = 0;
    int interior_violations = 0;
    int gap_violations = 0;
    int runtime_violations = 0;
    double max_runtime_seconds = 0.0;
    double max_gap = 0.0;
};

/// Seeded random inverse problems for one operator configuration, solved end
/// to end. order = 1 runs the piecewise-constant family over box functionals,
/// order = 2 the piecewise-linear family over Dirac/box mixes.
RepresenterStats run_representer_config(int order, const std::vector<int>& m_values,
                                        int instances, std::uint64_t seed, std::ostream& os);

struct MultidimStats {
    int instances = 0;
    int sparsity_violations = 0;
    int localization_violations = 0;
    int gap_violations = 0;
    int runtime_violations = 0;
    double max_consistency_gap = 0.0;  // D=2 objective mismatch vs 2D pipeline
    bool seminorm_exact = true;
};

MultidimStats run_multidim_checks(std::uint64_t seed, std::ostream& os, int d3_instances = 7);

struct OracleStats {
    int instances = 0;
    double max_relative_error = 0.0;
    int violations = 0;
};

OracleStats run_oracle_checks(std::uint64_t seed, std::ostream& os, int instances = 20);

}  // namespace tps::verify
