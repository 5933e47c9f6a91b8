#include "mm1/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <sstream>

#include "mm1/errors.hpp"
#include "mm1/mgf.hpp"
#include "mm1/parallel.hpp"
#include "mm1/rng.hpp"

namespace mm1 {

namespace {

constexpr std::uint64_t kMgfStream = 0x6d67662d72657073ULL;
constexpr std::uint64_t kStateStream = 0x73746174652d6174ULL;
constexpr std::uint64_t kBootstrapStream = 0x626f6f7473747261ULL;
constexpr std::uint64_t kWorkloadStream = 0x776f726b6c6f6164ULL;

std::uint64_t time_stream(std::uint64_t base, double t) {
    return splitmix64(base ^ std::bit_cast<std::uint64_t>(t));
}

void require_horizon(double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw PreconditionError("simulation horizon must be positive and finite");
    }
}

std::uint64_t draw_start(const StartSpec& start, double mu, Rng& rng) {
    if (const auto* fixed = std::get_if<FixedStart>(&start)) return fixed->x;
    const auto& stationary = std::get<StationaryStart>(start);
    return sample_stationary(QueueParams{stationary.lambda_m, mu}, rng.uniform());
}

void validate_start(const StartSpec& start, double mu) {
    if (const auto* s = std::get_if<StationaryStart>(&start)) {
        validate_params(s->lambda_m, mu, "lambda_m", "mu");
    }
}

/// One step of the competing-clock dynamics; returns the holding time and updates x.
double step(double lambda, double mu, std::uint64_t& x, Rng& rng) {
    if (x == 0) {
        const double dt = rng.exponential(lambda);
        x = 1;
        return dt;
    }
    const double dt = rng.exponential(lambda + mu);
    if (rng.bernoulli(lambda / (lambda + mu))) {
        ++x;
    } else {
        --x;
    }
    return dt;
}

std::uint64_t state_after(double lambda, double mu, std::uint64_t x, double t, Rng& rng) {
    double now = 0.0;
    std::uint64_t events = 0;
    while (true) {
        std::uint64_t next = x;
        now += step(lambda, mu, next, rng);
        if (now > t) return x;
        x = next;
        if (++events > kMaxEventsPerReplica) {
            throw Error("event cap exceeded while simulating to a fixed time");
        }
    }
}

struct MeanAndError {
    double mean = 0.0;
    double std_error = 0.0;
};

MeanAndError mean_and_error(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    const double mean = compensated_sum(values) / n;
    std::vector<double> sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(),
                   [mean](double v) { return (v - mean) * (v - mean); });
    const double var = values.size() > 1 ? compensated_sum(sq) / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

}  // namespace

std::uint64_t TrajectoryPath::state_at(double t) const {
    const auto it = std::upper_bound(event_times.begin(), event_times.end(), t);
    if (it == event_times.begin()) return initial_state;
    return states[static_cast<std::size_t>(it - event_times.begin()) - 1];
}

std::optional<double> TrajectoryPath::first_zero_hit() const {
    if (initial_state == 0) return 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] == 0) return event_times[i];
    }
    return std::nullopt;
}

std::vector<double> TrajectoryPath::zero_hit_times() const {
    std::vector<double> hits;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] == 0) hits.push_back(event_times[i]);
    }
    return hits;
}

WorkloadPath make_workload_path(double initial_workload, double horizon,
                                std::vector<double> jump_times, std::vector<double> jump_sizes) {
    WorkloadPath path;
    path.initial_workload = initial_workload;
    path.horizon = horizon;
    path.jump_times = std::move(jump_times);
    path.jump_sizes = std::move(jump_sizes);
    path.post_jump.reserve(path.jump_times.size());
    double w = initial_workload;
    double now = 0.0;
    for (std::size_t i = 0; i < path.jump_times.size(); ++i) {
        w = std::max(0.0, w - (path.jump_times[i] - now)) + path.jump_sizes[i];
        now = path.jump_times[i];
        path.post_jump.push_back(w);
    }
    return path;
}

double WorkloadPath::value_at(double t) const {
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return std::max(0.0, initial_workload - t);
    const auto i = static_cast<std::size_t>(it - jump_times.begin()) - 1;
    return std::max(0.0, post_jump[i] - (t - jump_times[i]));
}

std::vector<double> WorkloadPath::zero_hit_times() const {
    std::vector<double> hits;
    double w = initial_workload;
    double now = 0.0;
    for (std::size_t i = 0; i <= jump_times.size(); ++i) {
        const double next = i < jump_times.size() ? jump_times[i] : horizon;
        if (w > 0.0 && now + w <= next) hits.push_back(now + w);
        if (i < jump_times.size()) {
            w = post_jump[i];
            now = next;
        }
    }
    return hits;
}

TrajectoryPath simulate_queue_path(double lambda, double mu, std::uint64_t x0, double horizon,
                                   std::uint64_t seed) {
    validate_params(lambda, mu);
    require_horizon(horizon);
    Rng rng(seed);
    TrajectoryPath path;
    path.initial_state = x0;
    path.horizon = horizon;
    std::uint64_t x = x0;
    double now = 0.0;
    while (true) {
        now += step(lambda, mu, x, rng);
        if (now > horizon) break;
        path.event_times.push_back(now);
        path.states.push_back(x);
        if (path.states.size() > kMaxEventsPerReplica) {
            throw Error("event cap exceeded in simulate_queue_path");
        }
    }
    return path;
}

double sample_hitting_time(double lambda, double mu, std::uint64_t x0, std::uint64_t seed) {
    validate_params(lambda, mu);
    Rng rng(seed);
    std::uint64_t x = x0;
    double now = 0.0;
    std::uint64_t events = 0;
    while (x > 0) {
        now += step(lambda, mu, x, rng);
        if (++events > kMaxEventsPerReplica) {
            std::ostringstream os;
            os << "hitting time from " << x0 << " exceeded " << kMaxEventsPerReplica << " events";
            throw Error(os.str());
        }
    }
    return now;
}

EstimateWithError estimate_mgf(double lambda, double mu, const StartSpec& start, double alpha,
                               std::uint64_t replicas, std::uint64_t master_seed, unsigned workers) {
    validate_start(start, mu);
    const double lambda_m =
        std::holds_alternative<StationaryStart>(start) ? std::get<StationaryStart>(start).lambda_m : lambda;
    const auto domain = mgf_domain(lambda, mu, lambda_m);
    double cap = kMgfInteriorCap * domain.alpha_max;
    if (std::holds_alternative<StationaryStart>(start) && std::isfinite(domain.stationary_alpha_sup)) {
        cap = std::min(cap, kMgfInteriorCap * domain.stationary_alpha_sup);
    }
    if (!(alpha <= cap)) {
        std::ostringstream os;
        os << "alpha = " << alpha << " is not strictly inside the MGF domain (estimation cap " << cap
           << "); the estimator variance is infinite at the boundary";
        throw DomainError(os.str());
    }
    if (replicas < kMinMgfReplicas) {
        throw PreconditionError("estimate_mgf needs at least 1000 replicas");
    }

    const auto values = parallel_map<double>(replicas, workers, [&](std::uint64_t i) {
        const std::uint64_t seed = derive_seed(master_seed, kMgfStream, i);
        Rng rng(seed);
        const std::uint64_t x0 = draw_start(start, mu, rng);
        const double tau = sample_hitting_time(lambda, mu, x0, splitmix64(seed));
        return std::exp(alpha * tau);
    });
    const auto stats = mean_and_error(values);
    return {stats.mean, stats.std_error, replicas, master_seed};
}

std::vector<std::uint64_t> sample_states_at(const PerturbationSpec& spec, double t,
                                            std::uint64_t replicas, std::uint64_t master_seed,
                                            unsigned workers) {
    if (!(t >= 0.0)) throw PreconditionError("sample time must be nonnegative");
    const std::uint64_t stream = time_stream(kStateStream, t);
    return parallel_map<std::uint64_t>(replicas, workers, [&](std::uint64_t i) {
        Rng rng(derive_seed(master_seed, stream, i));
        const std::uint64_t x0 = sample_stationary(spec.initial, rng.uniform());
        return state_after(spec.operating.lambda, spec.operating.mu, x0, t, rng);
    });
}

double plugin_tv(const std::vector<std::uint64_t>& sample, const QueueParams& params) {
    if (sample.empty()) throw PreconditionError("plug-in TV needs a nonempty sample");
    const std::uint64_t max_state = *std::max_element(sample.begin(), sample.end());
    std::vector<std::uint64_t> counts(max_state + 1, 0);
    for (auto x : sample) ++counts[x];
    const double n = static_cast<double>(sample.size());
    double sum = 0.0;
    for (std::uint64_t x = 0; x <= max_state; ++x) {
        sum += std::abs(static_cast<double>(counts[x]) / n - stationary_pmf(params, x));
    }
    sum += std::pow(params.rho(), static_cast<double>(max_state) + 1.0);
    return 0.5 * sum;
}

std::vector<TvEstimate> estimate_tv_curve(const PerturbationSpec& spec, const std::vector<double>& times,
                                          std::uint64_t replicas, std::uint64_t master_seed,
                                          unsigned workers) {
    validate_spec(spec.initial.lambda, spec.initial.mu, spec.operating.lambda, spec.operating.mu);
    if (replicas == 0) throw PreconditionError("estimate_tv_curve needs at least one replica");

    std::vector<TvEstimate> out;
    out.reserve(times.size());
    for (double t : times) {
        const auto sample = sample_states_at(spec, t, replicas, master_seed, workers);

        TvEstimate est;
        est.t = t;
        est.tv.estimate = plugin_tv(sample, spec.operating);
        est.tv.replicas = replicas;
        est.tv.master_seed = master_seed;

        std::vector<std::uint64_t> sorted = sample;
        std::sort(sorted.begin(), sorted.end());
        est.support_size = static_cast<std::size_t>(
            std::unique(sorted.begin(), sorted.end()) - sorted.begin());
        est.bias_allowance =
            std::sqrt(static_cast<double>(est.support_size) / static_cast<double>(replicas));

        const std::uint64_t boot_stream = time_stream(kBootstrapStream, t);
        const auto boots = parallel_map<double>(kBootstrapResamples, workers, [&](std::uint64_t b) {
            Rng rng(derive_seed(master_seed, boot_stream, b));
            std::vector<std::uint64_t> resample(sample.size());
            for (auto& x : resample) x = sample[rng.below(sample.size())];
            return plugin_tv(resample, spec.operating);
        });
        const double mean = compensated_sum(boots) / boots.size();
        std::vector<double> sq(boots.size());
        std::transform(boots.begin(), boots.end(), sq.begin(),
                       [mean](double v) { return (v - mean) * (v - mean); });
        est.tv.std_error = std::sqrt(compensated_sum(sq) / (boots.size() - 1.0));
        out.push_back(est);
    }
    return out;
}

std::vector<TvEstimate> estimate_tv_curve(double lambda0, double lambda, double mu,
                                          const std::vector<double>& times, std::uint64_t replicas,
                                          std::uint64_t master_seed, unsigned workers) {
    return estimate_tv_curve(validate_spec(lambda0, mu, lambda, mu), times, replicas, master_seed,
                             workers);
}

CoupledTriple simulate_coupled(double lambda0, double lambda, double mu, double horizon,
                               std::uint64_t seed) {
    validate_spec(lambda0, mu, lambda, mu);
    require_horizon(horizon);
    if (lambda0 == lambda) {
        throw PreconditionError("simulate_coupled needs lambda0 != lambda (otherwise one path)");
    }
    Rng rng(seed);
    const double u = rng.uniform();
    const double lambda_lo = std::min(lambda0, lambda);
    const double lambda_hi = std::max(lambda0, lambda);

    CoupledTriple triple;
    triple.bound_is_perturbed = lambda0 > lambda;
    std::uint64_t lo = sample_stationary(QueueParams{lambda_lo, mu}, u);
    std::uint64_t hi = sample_stationary(QueueParams{lambda_hi, mu}, u);
    for (auto* p : {&triple.path_lo, &triple.path_hi}) p->horizon = horizon;
    triple.path_lo.initial_state = lo;
    triple.path_hi.initial_state = hi;

    if (lo == hi) triple.coupling_time = 0.0;
    if (hi == 0) triple.bound_zero_hit = 0.0;

    // Uniformized stream at rate lambda + mu; departures at 0 are ignored.
    const double p_arrival = lambda / (lambda + mu);
    double now = 0.0;
    std::uint64_t events = 0;
    while (true) {
        now += rng.exponential(lambda + mu);
        if (now > horizon) break;
        if (++events > kMaxEventsPerReplica) throw Error("event cap exceeded in simulate_coupled");
        const bool arrival = rng.bernoulli(p_arrival);
        auto apply = [&](std::uint64_t& x, TrajectoryPath& path) {
            if (arrival) {
                ++x;
            } else if (x > 0) {
                --x;
            } else {
                return;
            }
            path.event_times.push_back(now);
            path.states.push_back(x);
        };
        apply(lo, triple.path_lo);
        apply(hi, triple.path_hi);
        if (lo == hi && !std::isfinite(triple.coupling_time)) triple.coupling_time = now;
        if (hi == 0 && !std::isfinite(triple.bound_zero_hit)) triple.bound_zero_hit = now;
    }
    triple.path_bound = triple.path_hi;
    return triple;
}

QueueWorkloadPair simulate_workload_path(double lambda, double mu, const StartSpec& start,
                                         double horizon, std::uint64_t seed) {
    validate_params(lambda, mu);
    validate_start(start, mu);
    require_horizon(horizon);
    Rng rng(seed);
    const std::uint64_t x0 = draw_start(start, mu, rng);

    QueueWorkloadPair out;
    out.queue.initial_state = x0;
    out.queue.horizon = horizon;

    // FIFO arrival epochs of customers in system; initial customers count as arriving at 0.
    std::deque<double> waiting(x0, 0.0);
    std::vector<double> arrival_times;
    std::vector<double> services_initial;
    std::vector<double> services_arrived;
    double last_departure = 0.0;
    std::size_t departed_initial = 0;

    auto depart = [&](double now) {
        const double start_service = std::max(waiting.front(), last_departure);
        const double service = now - start_service;
        if (departed_initial < x0) {
            services_initial.push_back(service);
            ++departed_initial;
        } else {
            services_arrived.push_back(service);
        }
        waiting.pop_front();
        last_departure = now;
    };

    std::uint64_t x = x0;
    double now = 0.0;
    std::uint64_t events = 0;
    while (true) {
        const std::uint64_t before = x;
        now += step(lambda, mu, x, rng);
        if (now > horizon) break;
        if (++events > kMaxEventsPerReplica) throw Error("event cap exceeded in workload simulation");
        out.queue.event_times.push_back(now);
        out.queue.states.push_back(x);
        if (x > before) {
            waiting.push_back(now);
            arrival_times.push_back(now);
        } else {
            depart(now);
        }
    }
    // Remaining services of customers present at the horizon: memoryless exp(mu) completions.
    double tail = std::max(last_departure, horizon);
    while (!waiting.empty()) {
        tail += rng.exponential(mu);
        depart(tail);
    }

    double w0 = 0.0;
    for (double s : services_initial) w0 += s;
    out.workload = make_workload_path(w0, horizon, std::move(arrival_times), std::move(services_arrived));
    return out;
}

EstimateWithError estimate_tv_lower_at_zero(double lambda0, double lambda, double mu, double t,
                                            std::uint64_t replicas, std::uint64_t master_seed,
                                            unsigned workers) {
    const auto spec = validate_spec(lambda0, mu, lambda, mu);
    if (replicas == 0) throw PreconditionError("need at least one replica");
    const auto sample = sample_states_at(spec, t, replicas, master_seed, workers);
    const auto zeros = std::count(sample.begin(), sample.end(), std::uint64_t{0});
    const double n = static_cast<double>(replicas);
    const double p_hat = static_cast<double>(zeros) / n;
    const double atom = stationary_pmf(spec.operating, 0);
    return {std::abs(p_hat - atom), std::sqrt(p_hat * (1.0 - p_hat) / n), replicas, master_seed};
}

EstimateWithError estimate_workload_atom(double lambda0, double lambda, double mu, double t,
                                         std::uint64_t replicas, std::uint64_t master_seed,
                                         unsigned workers) {
    validate_spec(lambda0, mu, lambda, mu);
    if (replicas == 0) throw PreconditionError("need at least one replica");
    const double horizon = std::max(t, 1e-9);
    const std::uint64_t stream = time_stream(kWorkloadStream, t);
    const auto hits = parallel_map<double>(replicas, workers, [&](std::uint64_t i) {
        const auto pair = simulate_workload_path(lambda, mu, StationaryStart{lambda0}, horizon,
                                                 derive_seed(master_seed, stream, i));
        return pair.workload.value_at(t) <= 0.0 ? 1.0 : 0.0;
    });
    const double n = static_cast<double>(replicas);
    const double p_hat = compensated_sum(hits) / n;
    return {p_hat, std::sqrt(p_hat * (1.0 - p_hat) / n), replicas, master_seed};
}

}  // namespace mm1
