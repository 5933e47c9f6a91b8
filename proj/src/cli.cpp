#include "mm1/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mm1/bounds.hpp"
#include "mm1/checks.hpp"
#include "mm1/errors.hpp"
#include "mm1/mgf.hpp"
#include "mm1/model.hpp"
#include "mm1/sim.hpp"

namespace mm1::cli {

namespace {

using json = nlohmann::ordered_json;

json json_number(double value) {
    if (!std::isfinite(value)) return nullptr;
    return std::stod(format_number(value));
}

PerturbationSpec spec_of(const RunConfig& c) {
    return validate_spec(c.lambda0, c.mu0, c.lambda, c.mu);
}

std::string output_format(const RunConfig& c, const char* fallback) {
    const std::string f = c.format.empty() ? fallback : c.format;
    if (f != "csv" && f != "json") throw PreconditionError("--format must be csv or json");
    return f;
}

/// Emits rows either as CSV (header + lines) or as a JSON array of objects.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<json> row) { rows_.push_back(std::move(row)); }

    void write(std::ostream& out, const std::string& format) const {
        if (format == "json") {
            json array = json::array();
            for (const auto& row : rows_) {
                json obj = json::object();
                for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = row[i];
                array.push_back(obj);
            }
            out << array.dump(2) << '\n';
            return;
        }
        for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
        out << '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ',';
                const auto& cell = row[i];
                if (cell.is_null()) continue;
                if (cell.is_string()) {
                    out << cell.get<std::string>();
                } else if (cell.is_number_float()) {
                    out << format_number(cell.get<double>());
                } else {
                    out << cell.dump();
                }
            }
            out << '\n';
        }
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<json>> rows_;
};

const std::vector<std::string> kCertificateFields = {
    "alpha", "prefactor", "time_scale_b", "case_label", "epsilon_margin",
    "lambda0", "mu0", "lambda", "mu", "tv_t0"};

std::vector<json> certificate_row(const BoundCertificate& cert) {
    const auto& s = cert.spec;
    return {json_number(cert.alpha),
            cert.prefactor ? json_number(*cert.prefactor) : json(nullptr),
            json_number(cert.time_scale_b),
            std::string(to_string(cert.case_label)),
            json_number(cert.epsilon_margin),
            json_number(s.initial.lambda),
            json_number(s.initial.mu),
            json_number(s.operating.lambda),
            json_number(s.operating.mu),
            json_number(tv_between_stationaries(s.initial, s.operating))};
}

json certificate_json(const BoundCertificate& cert) {
    const auto row = certificate_row(cert);
    json obj = json::object();
    for (std::size_t i = 0; i < kCertificateFields.size(); ++i) obj[kCertificateFields[i]] = row[i];
    return obj;
}

/// Individual certificates reported next to the best one, in the same (rescaled) frame.
std::vector<BoundCertificate> alternatives(const BoundCertificate& best,
                                           std::optional<double> margin) {
    std::vector<BoundCertificate> alts;
    if (best.case_label == CaseLabel::Unperturbed) return alts;
    const auto& n = best.normalized;
    auto reframe = [&](BoundCertificate cert) {
        cert.time_scale_b = best.time_scale_b;
        cert.spec = best.spec;
        return cert;
    };
    if (n.lambda0 > std::sqrt(n.lambda * n.mu)) {
        alts.push_back(reframe(rate_case2(n.lambda0, n.lambda, n.mu, margin)));
        alts.push_back(reframe(rate_truncation(n.lambda0, n.lambda, n.mu)));
    } else if (n.lambda0 <= n.lambda) {
        alts.push_back(reframe(rate_drift(n.lambda0, n.lambda, n.mu)));
    }
    return alts;
}

}  // namespace

std::string format_number(double value) {
    if (!std::isfinite(value)) return "";
    std::ostringstream os;
    os << std::setprecision(12) << value;
    return os.str();
}

std::vector<double> resolve_times(const RunConfig& config) {
    std::vector<double> times = config.times;
    if (times.empty() && config.t_max) {
        const double step = config.t_step.value_or(*config.t_max / 100.0);
        if (!(step > 0.0)) throw PreconditionError("--t-step must be positive");
        const auto count = static_cast<std::uint64_t>(std::floor(*config.t_max / step + 1e-9));
        for (std::uint64_t i = 0; i <= count; ++i) times.push_back(static_cast<double>(i) * step);
    }
    if (times.empty()) times = {0.0, 0.5, 1.0, 2.0, 3.0};
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
            throw PreconditionError("times must be nonnegative and strictly increasing");
        }
    }
    return times;
}

int cmd_bound(const RunConfig& config, std::ostream& out) {
    const auto spec = spec_of(config);
    const auto format = output_format(config, "json");
    const auto best = certify(spec, config.epsilon_margin);
    const auto alts = alternatives(best, config.epsilon_margin);

    if (format == "json") {
        json doc = certificate_json(best);
        const double astar = alpha_star(best.normalized.lambda, best.normalized.mu);
        doc["alpha_star"] = json_number(astar);
        doc["rate_gap"] = json_number(astar - best.alpha);
        doc["alternatives"] = json::array();
        for (const auto& alt : alts) doc["alternatives"].push_back(certificate_json(alt));
        out << doc.dump(2) << '\n';
    } else {
        Table table(kCertificateFields);
        table.add(certificate_row(best));
        for (const auto& alt : alts) table.add(certificate_row(alt));
        table.write(out, format);
    }
    return 0;
}

int cmd_curve(const RunConfig& config, std::ostream& out) {
    const auto spec = spec_of(config);
    const auto format = output_format(config, "csv");
    const auto times = resolve_times(config);
    const auto cert = certify(spec, config.epsilon_margin);
    const auto curve = bound_curve(cert, times);
    const auto& n = cert.normalized;
    std::optional<BoundCurve> trunc;
    if (cert.case_label != CaseLabel::Unperturbed && n.lambda0 > std::sqrt(n.lambda * n.mu)) {
        trunc = truncation_curve(n, cert.time_scale_b, times);
    }
    const double anchor = tv_between_stationaries(spec.initial, spec.operating);

    Table table({"t", "bound_certificate", "bound_truncation", "tv_stationary_t0_anchor"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        table.add({json_number(times[i]), json_number(curve.values[i]),
                   trunc ? json_number(trunc->values[i]) : json(nullptr), json_number(anchor)});
    }
    table.write(out, format);
    return 0;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
    const auto spec = spec_of(config);
    const auto format = output_format(config, "csv");
    const auto times = resolve_times(config);
    const auto cert = certify(spec, config.epsilon_margin);
    const auto curve = bound_curve(cert, times);
    const auto estimates =
        estimate_tv_curve(spec, times, config.replicas, config.master_seed, config.workers);

    bool all_pass = true;
    Table table({"t", "tv_hat", "std_error", "bias_allowance", "bound", "pass"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto& e = estimates[i];
        const bool pass =
            e.tv.estimate <= curve.values[i] + 3.0 * e.tv.std_error + e.bias_allowance;
        all_pass = all_pass && pass;
        table.add({json_number(e.t), json_number(e.tv.estimate), json_number(e.tv.std_error),
                   json_number(e.bias_allowance), json_number(curve.values[i]), pass ? 1 : 0});
    }
    table.write(out, format);
    return all_pass ? 0 : 1;
}

int cmd_mgf(const RunConfig& config, std::ostream& out) {
    const auto spec = spec_of(config);
    const auto format = output_format(config, "csv");
    const auto rescaled = rescale_general(spec);
    const double lambda = rescaled.normalized.operating.lambda;
    const double mu = rescaled.normalized.operating.mu;
    const double lambda_m = std::max(spec.initial.lambda, lambda);
    if (rescaled.b != 1.0) {
        std::clog << "mgf: mu0 != mu, reporting the rescaled problem (lambda = " << lambda
                  << ", mu = " << mu << ")\n";
    }

    std::vector<double> alphas = config.alphas;
    if (alphas.empty()) {
        const auto domain = mgf_domain(lambda, mu, lambda_m);
        alphas = {0.0, 0.45 * std::min(domain.alpha_max, domain.stationary_alpha_sup)};
    }

    bool all_pass = true;
    // z-scores are only meaningful when E[exp(2 alpha tau)] is finite.
    auto finite_variance = [&](const StartSpec& start, double alpha) {
        try {
            if (const auto* s = std::get_if<StationaryStart>(&start)) {
                mgf_tau0_stationary(s->lambda_m, lambda, mu, 2.0 * alpha);
            } else {
                mgf_tau0_from_1(lambda, mu, 2.0 * alpha);
            }
            return true;
        } catch (const Error&) {
            return false;
        }
    };
    Table table({"start", "alpha", "analytic", "estimate", "std_error", "z", "finite_variance", "pass"});
    auto add_row = [&](const std::string& label, const StartSpec& start, double analytic, double alpha) {
        const auto est = estimate_mgf(lambda, mu, start, alpha, config.replicas, config.master_seed,
                                      config.workers);
        const double diff = est.estimate - analytic;
        const double z = est.std_error > 0.0 ? diff / est.std_error : (diff == 0.0 ? 0.0 : INFINITY);
        const bool pass = std::abs(z) < 3.0;
        all_pass = all_pass && pass;
        table.add({label, json_number(alpha), json_number(analytic), json_number(est.estimate),
                   json_number(est.std_error), json_number(z), finite_variance(start, alpha) ? 1 : 0,
                   pass ? 1 : 0});
    };
    for (double alpha : alphas) {
        add_row("fixed(" + std::to_string(config.x0) + ")", FixedStart{config.x0},
                mgf_tau0_from_x(lambda, mu, alpha, config.x0), alpha);
    }
    for (double alpha : alphas) {
        add_row("stationary(" + format_number(lambda_m) + ")", StationaryStart{lambda_m},
                mgf_tau0_stationary(lambda_m, lambda, mu, alpha), alpha);
    }
    table.write(out, format);
    return all_pass ? 0 : 1;
}

int cmd_couple_check(const RunConfig& config, std::ostream& out) {
    const auto spec = spec_of(config);
    const auto format = output_format(config, "csv");
    const auto rescaled = rescale_general(spec);
    const double lambda = rescaled.normalized.operating.lambda;
    const double mu = rescaled.normalized.operating.mu;
    if (spec.initial.lambda == lambda) {
        throw PreconditionError("couple-check needs a perturbed spec (lambda0 != lambda after rescaling)");
    }
    RunConfig with_default = config;
    if (with_default.times.empty() && !with_default.t_max) with_default.times = {0.5, 1.0, 2.0};
    const auto times = resolve_times(with_default);
    const auto lines = run_coupling_checks(spec.initial.lambda, lambda, mu, times, config.replicas,
                                           config.master_seed, config.workers);
    bool all_pass = true;
    Table table({"check", "t", "statistic", "threshold", "pass"});
    for (const auto& line : lines) {
        all_pass = all_pass && line.pass;
        table.add({line.check, json_number(line.t), json_number(line.statistic),
                   json_number(line.threshold), line.pass ? 1 : 0});
    }
    table.write(out, format);
    return all_pass ? 0 : 1;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certified convergence-rate bounds for perturbed M/M/1 queues", "mm1conv"};
    app.require_subcommand(1);
    RunConfig config;

    app.add_option("--lambda0", config.lambda0, "arrival rate of the initial equilibrium")->required();
    app.add_option("--mu0", config.mu0, "service rate of the initial equilibrium")->required();
    app.add_option("--lambda", config.lambda, "operating arrival rate")->required();
    app.add_option("--mu", config.mu, "operating service rate")->required();
    app.add_option("--times", config.times, "strictly increasing evaluation times")->delimiter(',');
    app.add_option("--t-max", config.t_max, "last time of a uniform grid");
    app.add_option("--t-step", config.t_step, "grid step (default t-max / 100)");
    app.add_option("--replicas", config.replicas, "Monte Carlo replicas")->capture_default_str();
    app.add_option("--seed", config.master_seed, "master seed")->capture_default_str();
    app.add_option("--epsilon-margin", config.epsilon_margin,
                   "back-off below the Case 2 boundary rate (default 1% of it)");
    app.add_option("--out", config.out, "output file (default stdout)");
    app.add_option("--format", config.format, "csv or json");
    app.add_option("--alpha", config.alphas, "MGF arguments for the mgf subcommand")->delimiter(',');
    app.add_option("--x0", config.x0, "fixed start state for the mgf subcommand")->capture_default_str();
    app.add_option("--workers", config.workers, "worker threads (0 = hardware concurrency)");

    struct Entry {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&, std::ostream&);
    };
    const Entry entries[] = {
        {"bound", "best certificate plus individual Case 2 / truncation certificates", cmd_bound},
        {"curve", "bound curves on a time grid (CSV)", cmd_curve},
        {"simulate", "Monte Carlo TV curve against the certificate", cmd_simulate},
        {"mgf", "analytic vs Monte Carlo hitting-time MGFs", cmd_mgf},
        {"couple-check", "coupled-path property suite", cmd_couple_check},
    };
    for (const auto& e : entries) app.add_subcommand(e.name, e.help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    for (const auto& e : entries) {
        if (!app.got_subcommand(e.name)) continue;
        config.subcommand = e.name;
        try {
            std::ostringstream buffer;
            const int code = e.fn(config, buffer);
            if (config.out.empty()) {
                out << buffer.str();
            } else {
                std::ofstream file(config.out, std::ios::trunc);
                if (!file) {
                    err << "cannot open " << config.out << " for writing\n";
                    return 2;
                }
                file << buffer.str();
            }
            return code;
        } catch (const Error& ex) {
            err << "error: " << ex.what() << '\n';
            return 2;
        }
    }
    return 2;
}

}  // namespace mm1::cli
