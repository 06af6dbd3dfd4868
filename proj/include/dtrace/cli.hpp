#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dtrace/selftest.hpp"

namespace dtrace {

inline const char* dtrace_version = "1.0.0";

enum class OutputFormat { table, structured };

struct JobConfig {
    std::string command;
    std::vector<std::string> inputs;
    std::size_t max_degree = 4;
    std::optional<std::string> ring;    // base-ring override, as for BaseRing::parse
    std::optional<std::size_t> bound;   // size bound for built-in categories
    OutputFormat format = OutputFormat::table;
    std::uint64_t seed = default_seed;
    std::size_t n = 2;                  // matrix size for morita and trace-homology
    std::string matrix;                 // literal for trace-k1
};

/// The commands run understands, in help order.
const std::vector<std::pair<std::string, std::string>>& command_list();

/// Runs one job, writing the report to out and diagnostics to err. Returns the
/// exit status: 0 ok, 2 parse error, 3 validation failure, 4 cap exceeded,
/// 5 invariant breach (including a failing selftest suite).
int run(const JobConfig& config, std::ostream& out, std::ostream& err);

}  // namespace dtrace
