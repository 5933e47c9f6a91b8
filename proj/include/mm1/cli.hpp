#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mm1::cli {

struct RunConfig {
    std::string subcommand;
    double lambda0 = 0.0;
    double mu0 = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    std::vector<double> times;
    std::optional<double> t_max;
    std::optional<double> t_step;
    std::uint64_t replicas = 100000;
    std::uint64_t master_seed = 42;
    std::optional<double> epsilon_margin;
    std::string out;
    std::string format;  ///< "csv" or "json"; empty selects the subcommand default
    std::vector<double> alphas;
    std::uint64_t x0 = 1;
    unsigned workers = 0;
};

/// 12 significant digits; non-finite values print as empty fields.
std::string format_number(double value);

/// Time grid from --times, or 0, step, ..., t_max. Throws if not strictly increasing.
std::vector<double> resolve_times(const RunConfig& config);

int cmd_bound(const RunConfig& config, std::ostream& out);
int cmd_curve(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_mgf(const RunConfig& config, std::ostream& out);
int cmd_couple_check(const RunConfig& config, std::ostream& out);

/// Parses argv, runs the subcommand, writes results to `out` (or --out) and logs to `err`.
/// Returns 0 iff every requested check passed.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mm1::cli
