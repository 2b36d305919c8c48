// Command line front end. Subcommands map one to one onto the library
// entry points; every run with the same arguments produces byte-identical
// output, so results can be diffed across machines and thread counts.
//
// Exit codes: 0 success, 2 bad input or configuration, 3 numerics failure,
// 4 degenerate comparison priors (constant answer, no measurement needed).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qsd/qsd.hpp"

namespace {

// Reports quote nine significant digits. Re-parsing the rounded text keeps
// the JSON writer's shortest-round-trip form pinned to exactly those digits.
double sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

std::string format9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void emit(const nlohmann::ordered_json& j) { std::cout << j.dump(2) << "\n"; }

struct MethodOpts {
    std::string method = "quadrature";
    qsd::QuadratureSpec quad;
    qsd::MonteCarloSpec mc;
};

void add_method_options(CLI::App* cmd, MethodOpts& opts) {
    cmd->add_option("--method", opts.method, "Estimator: quadrature or mc")
        ->capture_default_str();
    cmd->add_option("--quad-tol", opts.quad.tolerance, "Absolute quadrature tolerance")
        ->capture_default_str();
    cmd->add_option("--quad-radius", opts.quad.radius_sigmas,
                    "Integration hull half width in component sigmas")
        ->capture_default_str();
    cmd->add_option("--quad-max-subdiv", opts.quad.max_subdivisions,
                    "Subdivision budget per 1-d integral")
        ->capture_default_str();
    cmd->add_option("--samples", opts.mc.samples, "Monte Carlo sample count")
        ->capture_default_str();
    cmd->add_option("--seed", opts.mc.seed, "Monte Carlo seed")->capture_default_str();
    cmd->add_option("--confidence", opts.mc.confidence, "Confidence level for the half width")
        ->capture_default_str();
}

bool use_mc(const MethodOpts& opts) {
    if (opts.method == "quadrature") return false;
    if (opts.method == "mc") return true;
    throw qsd::validation_error("unknown method '" + opts.method +
                                "' (expected quadrature or mc)");
}

void put_estimate(nlohmann::ordered_json& j, const qsd::ErrorReport& report) {
    j["method"] = qsd::to_string(report.error.method);
    j["error"] = sig9(report.error.value);
    j["half_width"] = sig9(report.error.half_width);
    if (report.error.stochastic) j["seed"] = report.error.seed;
    j["optimality_guaranteed"] = report.optimality_guaranteed;
    if (!report.diagnostic.empty()) j["diagnostic"] = report.diagnostic;
    j["problem_hash"] = hash_hex(report.problem_hash);
}

// Coherent components carry unit covariance in these conventions; anything
// else has no amplitude to hand to the number-basis check.
std::vector<std::vector<std::complex<double>>> coherent_amplitudes(
    const qsd::GaussianMixture& mix, double& max_abs) {
    std::vector<std::vector<std::complex<double>>> amps;
    for (const qsd::GaussianState& s : mix.components) {
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(s.gamma.rows(), s.gamma.cols());
        if ((s.gamma - eye).cwiseAbs().maxCoeff() > 1e-9)
            throw qsd::validation_error(
                "oracle: every component must be a coherent state (unit covariance)");
        const Eigen::VectorXd dx = s.d_x();
        const Eigen::VectorXd dp = s.d_p();
        std::vector<std::complex<double>> a(static_cast<std::size_t>(s.n_modes));
        for (int m = 0; m < s.n_modes; ++m) {
            a[static_cast<std::size_t>(m)] = {dx(m) / std::sqrt(2.0), dp(m) / std::sqrt(2.0)};
            max_abs = std::max(max_abs, std::abs(a[static_cast<std::size_t>(m)]));
        }
        amps.push_back(std::move(a));
    }
    return amps;
}

struct DiscriminateOpts {
    std::string file;
    double prior = 0.5;
    MethodOpts method;
    bool oracle = false;
    int oracle_cutoff = 0;
};

int run_discriminate(const DiscriminateOpts& opts) {
    const qsd::StateSet set = qsd::load_state_set(opts.file);
    const qsd::DiscriminationProblem prob = qsd::make_discrimination_problem(
        qsd::mixture_from_state_set(set, 0), qsd::mixture_from_state_set(set, 1), opts.prior);
    const qsd::ErrorReport report = use_mc(opts.method)
                                        ? qsd::simulate_homodyne_protocol(prob, opts.method.mc)
                                        : qsd::optimal_gaussian_error(prob, opts.method.quad);

    nlohmann::ordered_json j;
    j["command"] = "discriminate";
    j["prior"] = sig9(opts.prior);
    put_estimate(j, report);
    if (opts.oracle) {
        double max_abs = 0.0;
        const auto amps1 = coherent_amplitudes(prob.rho1, max_abs);
        const auto amps2 = coherent_amplitudes(prob.rho2, max_abs);
        const int cutoff =
            opts.oracle_cutoff > 0 ? opts.oracle_cutoff : qsd::fock_cutoff(max_abs);
        const double helstrom = qsd::helstrom_error_numeric(
            qsd::mixture_density(amps1, prob.rho1.weights, cutoff),
            qsd::mixture_density(amps2, prob.rho2.weights, cutoff), opts.prior);
        nlohmann::ordered_json o;
        o["helstrom_error"] = sig9(helstrom);
        o["cutoff"] = cutoff;
        j["oracle"] = o;
    }
    emit(j);
    return 0;
}

struct CompareOpts {
    std::string file;
    std::optional<double> product_q;
    MethodOpts method;
};

// Candidate states are the file's hypotheses: one per weights row when rows
// are given, otherwise one per state.
std::vector<qsd::GaussianMixture> candidate_states(const qsd::StateSet& set) {
    const std::size_t m = set.weights.empty() ? set.states.size() : set.weights.size();
    std::vector<qsd::GaussianMixture> taus;
    taus.reserve(m);
    for (std::size_t i = 0; i < m; ++i) taus.push_back(qsd::mixture_from_state_set(set, i));
    return taus;
}

int run_compare(const CompareOpts& opts) {
    const qsd::StateSet set = qsd::load_state_set(opts.file);
    std::vector<qsd::GaussianMixture> taus = candidate_states(set);

    std::optional<qsd::BinaryComparisonProblem> binary;
    qsd::ComparisonProblem comp;
    if (opts.product_q) {
        if (taus.size() != 2)
            throw qsd::validation_error("compare: --product-q needs exactly two candidates");
        binary = qsd::make_binary_comparison_problem(taus[0], taus[1], *opts.product_q);
        comp = qsd::to_comparison(*binary);
    } else if (set.pair_priors) {
        comp = qsd::make_comparison_problem(std::move(taus), *set.pair_priors);
    } else {
        throw qsd::validation_error(
            "compare: give --product-q or pair_priors in the state file");
    }

    nlohmann::ordered_json j;
    j["command"] = "compare";
    j["n_states"] = comp.states.size();
    j["p_same"] = sig9(comp.pair_priors.diagonal().sum());

    const qsd::ReductionResult reduced = qsd::reduce_to_discrimination(comp);
    if (std::holds_alternative<qsd::ErrorReport>(reduced)) {
        j["degenerate"] = true;
        put_estimate(j, std::get<qsd::ErrorReport>(reduced));
        emit(j);
        return 4;
    }
    j["degenerate"] = false;

    const bool mc = use_mc(opts.method);
    const qsd::ErrorReport report =
        mc ? qsd::optimal_gaussian_comparison_error(comp, opts.method.mc)
           : qsd::optimal_gaussian_comparison_error(comp, opts.method.quad);
    put_estimate(j, report);

    if (binary) {
        const qsd::ErrorReport per_mode =
            mc ? qsd::binary_comparison_error_via_per_mode(*binary, opts.method.mc)
               : qsd::binary_comparison_error_via_per_mode(*binary, opts.method.quad);
        nlohmann::ordered_json p;
        p["error"] = sig9(per_mode.error.value);
        p["half_width"] = sig9(per_mode.error.half_width);
        if (per_mode.error.stochastic) p["seed"] = per_mode.error.seed;
        p["agreement_gap"] = sig9(std::abs(per_mode.error.value - report.error.value));
        j["per_mode_rule"] = p;
    }
    emit(j);
    return 0;
}

struct SweepOpts {
    double alpha_min = 0.5;
    double alpha_max = 1.5;
    int steps = 100;
    bool alpha_grid = false;
    std::string receivers = "helstrom,homodyne,displacement_pd,bs_pd";
    std::string out = "-";
};

double receiver_error(qsd::ReceiverKind kind, double alpha) {
    switch (kind) {
        case qsd::ReceiverKind::helstrom: return qsd::helstrom_comparison_error(alpha);
        case qsd::ReceiverKind::homodyne: return qsd::bpsk_homodyne_comparison_error(alpha);
        case qsd::ReceiverKind::displacement_pd: return qsd::displacement_receiver_error(alpha);
        case qsd::ReceiverKind::bs_pd: return qsd::bs_receiver_error(alpha);
    }
    throw qsd::validation_error("sweep: unknown receiver");
}

std::vector<qsd::ReceiverKind> parse_receiver_list(const std::string& text) {
    std::vector<qsd::ReceiverKind> kinds;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::size_t end = comma == std::string::npos ? text.size() : comma;
        kinds.push_back(qsd::parse_receiver_kind(text.substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    // canonical column order, duplicates collapsed
    std::vector<qsd::ReceiverKind> ordered;
    for (qsd::ReceiverKind kind :
         {qsd::ReceiverKind::helstrom, qsd::ReceiverKind::homodyne,
          qsd::ReceiverKind::displacement_pd, qsd::ReceiverKind::bs_pd})
        if (std::find(kinds.begin(), kinds.end(), kind) != kinds.end()) ordered.push_back(kind);
    return ordered;
}

int run_sweep(const SweepOpts& opts) {
    if (!(opts.alpha_min >= 0.0) || !(opts.alpha_max > opts.alpha_min) ||
        !std::isfinite(opts.alpha_max))
        throw qsd::validation_error("sweep: need 0 <= alpha-min < alpha-max, both finite");
    if (opts.steps < 2) throw qsd::validation_error("sweep: need at least two steps");
    const std::vector<qsd::ReceiverKind> kinds = parse_receiver_list(opts.receivers);

    std::string csv = opts.alpha_grid ? "alpha" : "mean_photon_number";
    for (qsd::ReceiverKind kind : kinds) {
        csv += ',';
        csv += qsd::to_string(kind);
    }
    csv += '\n';

    const double lo = opts.alpha_grid ? opts.alpha_min : opts.alpha_min * opts.alpha_min;
    const double hi = opts.alpha_grid ? opts.alpha_max : opts.alpha_max * opts.alpha_max;
    for (int i = 0; i < opts.steps; ++i) {
        const double x = lo + (hi - lo) * i / (opts.steps - 1);
        const double alpha = opts.alpha_grid ? x : std::sqrt(x);
        csv += format9(x);
        for (qsd::ReceiverKind kind : kinds) {
            csv += ',';
            csv += format9(receiver_error(kind, alpha));
        }
        csv += '\n';
    }

    if (opts.out == "-") {
        std::cout << csv;
    } else {
        std::ofstream out(opts.out, std::ios::binary);
        if (!out) throw qsd::validation_error("sweep: cannot open '" + opts.out + "'");
        out << csv;
        if (!out.flush())
            throw qsd::validation_error("sweep: write to '" + opts.out + "' failed");
    }
    return 0;
}

struct SimulateOpts {
    std::string kind;
    double alpha = -1.0;
    qsd::MonteCarloSpec mc;
};

int run_simulate(const SimulateOpts& opts) {
    if (!(opts.alpha >= 0.0) || !std::isfinite(opts.alpha))
        throw qsd::validation_error("simulate: alpha must be finite and nonnegative");
    qsd::ErrorReport report;
    if (opts.kind == "homodyne") {
        // comparison of |alpha> against |-alpha> with q = 1/2, run as the
        // sampled homodyne protocol on the reduced two-mode problem
        const auto tau1 = qsd::as_mixture(qsd::coherent_state({{opts.alpha, 0.0}}));
        const auto tau2 = qsd::as_mixture(qsd::coherent_state({{-opts.alpha, 0.0}}));
        report = qsd::optimal_gaussian_comparison_error(
            qsd::make_binary_comparison_problem(tau1, tau2, 0.5), opts.mc);
    } else if (opts.kind == "displacement_pd" || opts.kind == "bs_pd") {
        report = qsd::simulate_receiver(qsd::parse_receiver_kind(opts.kind), opts.alpha,
                                        opts.mc);
    } else {
        throw qsd::validation_error("simulate: unknown kind '" + opts.kind +
                                    "' (expected homodyne, displacement_pd or bs_pd)");
    }

    nlohmann::ordered_json j;
    j["command"] = "simulate";
    j["kind"] = opts.kind;
    j["alpha"] = sig9(opts.alpha);
    j["samples"] = opts.mc.samples;
    j["confidence"] = sig9(opts.mc.confidence);
    put_estimate(j, report);
    j["ci_low"] = sig9(report.error.value - report.error.half_width);
    j["ci_high"] = sig9(report.error.value + report.error.half_width);
    emit(j);
    return 0;
}

struct ValidateOpts {
    std::string file;
    std::string dump;
};

int run_validate(const ValidateOpts& opts) {
    const qsd::StateSet set = qsd::load_state_set(opts.file);
    std::cout << "states: " << set.states.size() << "\n";
    std::cout << "modes per state: " << set.n_modes << "\n";
    for (std::size_t i = 0; i < set.states.size(); ++i)
        std::cout << "state " << i << ": ok\n";
    if (!set.weights.empty())
        std::cout << "weights: " << set.weights.size() << " hypotheses over "
                  << set.states.size() << " states\n";
    if (set.pair_priors)
        std::cout << "pair_priors: " << set.pair_priors->rows() << " x "
                  << set.pair_priors->cols() << "\n";
    const qsd::ConstantPCheck check = qsd::is_constant_p_set(set.states);
    if (check)
        std::cout << "constant_p: yes\n";
    else
        std::cout << "constant_p: no (" << check.diagnostic << ")\n";

    if (!opts.dump.empty()) {
        std::ofstream out(opts.dump, std::ios::binary);
        if (!out)
            throw qsd::validation_error("validate: cannot open '" + opts.dump + "'");
        out << qsd::dump_state_set(set);
        if (!out.flush())
            throw qsd::validation_error("validate: write to '" + opts.dump + "' failed");
    }
    return check ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal Gaussian discrimination and state comparison estimates"};
    app.require_subcommand(1);

    DiscriminateOpts disc;
    CLI::App* disc_cmd =
        app.add_subcommand("discriminate", "Minimum-error homodyne discrimination");
    disc_cmd->add_option("file", disc.file, "State set (JSON)")->required();
    disc_cmd->add_option("--prior", disc.prior, "Prior of the first hypothesis")
        ->capture_default_str();
    add_method_options(disc_cmd, disc.method);
    disc_cmd->add_flag("--oracle", disc.oracle,
                       "Append the number-basis minimum error (coherent components only)");
    disc_cmd->add_option("--oracle-cutoff", disc.oracle_cutoff,
                         "Number-basis truncation (0 = automatic)")
        ->capture_default_str();

    CompareOpts comp;
    CLI::App* comp_cmd = app.add_subcommand("compare", "Equal-or-different state comparison");
    comp_cmd->add_option("file", comp.file, "State set (JSON)")->required();
    comp_cmd->add_option("--product-q", comp.product_q,
                         "Independent preparation prior for the first of two candidates");
    add_method_options(comp_cmd, comp.method);

    SweepOpts sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Receiver error curves as CSV");
    sweep_cmd->add_option("--alpha-min", sweep.alpha_min, "Smallest amplitude")
        ->capture_default_str();
    sweep_cmd->add_option("--alpha-max", sweep.alpha_max, "Largest amplitude")
        ->capture_default_str();
    sweep_cmd->add_option("--steps", sweep.steps, "Grid size")->capture_default_str();
    sweep_cmd->add_flag("--alpha-grid", sweep.alpha_grid,
                        "Evenly spaced in amplitude instead of mean photon number");
    sweep_cmd->add_option("--receivers", sweep.receivers, "Comma list of curves")
        ->capture_default_str();
    sweep_cmd->add_option("--out", sweep.out, "Output path, - for stdout")
        ->capture_default_str();

    SimulateOpts sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Sampled receiver runs");
    sim_cmd->add_option("--kind", sim.kind, "homodyne, displacement_pd or bs_pd")
        ->required();
    sim_cmd->add_option("--alpha", sim.alpha, "Coherent amplitude")->required();
    sim_cmd->add_option("--samples", sim.mc.samples, "Sample count")->capture_default_str();
    sim_cmd->add_option("--seed", sim.mc.seed, "Seed")->capture_default_str();
    sim_cmd->add_option("--confidence", sim.mc.confidence, "Confidence level")
        ->capture_default_str();

    ValidateOpts val;
    CLI::App* val_cmd = app.add_subcommand("validate", "Check a state set file");
    val_cmd->add_option("file", val.file, "State set (JSON)")->required();
    val_cmd->add_option("--dump", val.dump, "Write the normalized form here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (disc_cmd->parsed()) return run_discriminate(disc);
        if (comp_cmd->parsed()) return run_compare(comp);
        if (sweep_cmd->parsed()) return run_sweep(sweep);
        if (sim_cmd->parsed()) return run_simulate(sim);
        if (val_cmd->parsed()) return run_validate(val);
    } catch (const qsd::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qsd::numerics_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
