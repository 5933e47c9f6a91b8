#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "mm1/model.hpp"

namespace mm1 {

/// Piecewise-constant queue-length path on [0, horizon]. states[i] holds from event_times[i].
struct TrajectoryPath {
    std::uint64_t initial_state = 0;
    double horizon = 0.0;
    std::vector<double> event_times;
    std::vector<std::uint64_t> states;

    std::uint64_t state_at(double t) const;
    /// First time the path is at 0 (0 when it starts there); nullopt if not within the horizon.
    std::optional<double> first_zero_hit() const;
    /// Event times at which the path drops from 1 to 0.
    std::vector<double> zero_hit_times() const;
};

/// Workload (virtual waiting time): jumps by the service requirement at each arrival and drains
/// at unit rate, reflected at 0.
struct WorkloadPath {
    double initial_workload = 0.0;
    double horizon = 0.0;
    std::vector<double> jump_times;
    std::vector<double> jump_sizes;
    std::vector<double> post_jump;  ///< workload just after each jump

    double value_at(double t) const;
    /// Times in (0, horizon] at which the workload drains to 0.
    std::vector<double> zero_hit_times() const;
};

WorkloadPath make_workload_path(double initial_workload, double horizon,
                                std::vector<double> jump_times, std::vector<double> jump_sizes);

struct EstimateWithError {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t replicas = 0;
    std::uint64_t master_seed = 0;
};

struct TvEstimate {
    double t = 0.0;
    EstimateWithError tv;
    /// sqrt(k / replicas), k the number of distinct observed states (plug-in bias allowance).
    double bias_allowance = 0.0;
    std::size_t support_size = 0;
};

/// Three paths over one marked event stream. path_bound is the copy started from the larger
/// stationary law (lambda_m); it coincides with path_hi.
struct CoupledTriple {
    TrajectoryPath path_lo;
    TrajectoryPath path_hi;
    TrajectoryPath path_bound;
    /// true when path_bound is the perturbed copy X(lambda0, lambda), i.e. lambda0 > lambda.
    bool bound_is_perturbed = false;
    double coupling_time = std::numeric_limits<double>::infinity();
    double bound_zero_hit = std::numeric_limits<double>::infinity();
};

struct FixedStart {
    std::uint64_t x = 0;
};
/// X_0 ~ geometric(lambda_m / mu) drawn by inverse CDF.
struct StationaryStart {
    double lambda_m = 0.0;
};
using StartSpec = std::variant<FixedStart, StationaryStart>;

/// Fraction of alpha_max (and of the stationary sup) above which MGF estimation is refused.
inline constexpr double kMgfInteriorCap = 0.98;
inline constexpr std::uint64_t kMinMgfReplicas = 1000;
inline constexpr int kBootstrapResamples = 200;
inline constexpr std::uint64_t kMaxEventsPerReplica = 1000000000ULL;

/// Competing exponential clocks: exp(lambda + mu) holding at x >= 1, exp(lambda) at 0.
TrajectoryPath simulate_queue_path(double lambda, double mu, std::uint64_t x0, double horizon,
                                   std::uint64_t seed);

/// First passage to 0 from x0.
double sample_hitting_time(double lambda, double mu, std::uint64_t x0, std::uint64_t seed);

/// Sample mean and standard error of exp(alpha tau_0).
EstimateWithError estimate_mgf(double lambda, double mu, const StartSpec& start, double alpha,
                               std::uint64_t replicas, std::uint64_t master_seed,
                               unsigned workers = 0);

/// Plug-in TV between the empirical law of X_t (X_0 ~ pi(initial)) and pi(operating),
/// with bootstrap standard errors.
std::vector<TvEstimate> estimate_tv_curve(const PerturbationSpec& spec, const std::vector<double>& times,
                                          std::uint64_t replicas, std::uint64_t master_seed,
                                          unsigned workers = 0);
std::vector<TvEstimate> estimate_tv_curve(double lambda0, double lambda, double mu,
                                          const std::vector<double>& times, std::uint64_t replicas,
                                          std::uint64_t master_seed, unsigned workers = 0);

/// Draws X_t for `replicas` copies; the streams match estimate_tv_curve for the same t and seed.
std::vector<std::uint64_t> sample_states_at(const PerturbationSpec& spec, double t,
                                            std::uint64_t replicas, std::uint64_t master_seed,
                                            unsigned workers = 0);

/// Plug-in TV of an empirical sample against pi(params), including pi's tail beyond the sample.
double plugin_tv(const std::vector<std::uint64_t>& sample, const QueueParams& params);

CoupledTriple simulate_coupled(double lambda0, double lambda, double mu, double horizon,
                               std::uint64_t seed);

struct QueueWorkloadPair {
    TrajectoryPath queue;
    WorkloadPath workload;
};

/// Queue and workload from one event realization; workload jumps are realized service times.
QueueWorkloadPair simulate_workload_path(double lambda, double mu, const StartSpec& start,
                                         double horizon, std::uint64_t seed);

/// |P_hat(X_t = 0) - (1 - lambda/mu)| with delta-method standard error. Uses the same samples as
/// estimate_tv_curve at this t, so it never exceeds the plug-in TV estimate.
EstimateWithError estimate_tv_lower_at_zero(double lambda0, double lambda, double mu, double t,
                                            std::uint64_t replicas, std::uint64_t master_seed,
                                            unsigned workers = 0);

/// P_hat(W_t = 0) from simulate_workload_path with X_0 ~ pi(lambda0), binomial standard error.
EstimateWithError estimate_workload_atom(double lambda0, double lambda, double mu, double t,
                                         std::uint64_t replicas, std::uint64_t master_seed,
                                         unsigned workers = 0);

}  // namespace mm1
