#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dtrace {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::size_t checks = 0;
    std::string detail;  // first failures, empty when passed
    double seconds = 0;
};

inline constexpr std::uint64_t default_seed = 2024;

// Structural property suites. Each runs a fixed list of objects; the seed only
// drives the random unit pairs of the Dennis trace suite.
SuiteResult cyclic_identities_suite();
SuiteResult connes_operator_suite();
SuiteResult chain_map_suite();
SuiteResult sigma_delta_suite();
SuiteResult waldhausen_suite();
/// Degree-1 image of the H_1(BGL_1) generator for F_2[x]/x^2 against the K_1
/// trace of 1+x, and additivity on 20 random unit pairs in Q[C_2] and Z[C_2].
SuiteResult dennis_trace_suite(std::uint64_t seed = default_seed);

std::vector<SuiteResult> all_suites(std::uint64_t seed = default_seed);

}  // namespace dtrace
