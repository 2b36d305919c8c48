#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <variant>
#include <vector>

#include "qsd/discrimination.hpp"
#include "qsd/errors.hpp"
#include "qsd/gaussian_state.hpp"
#include "qsd/special.hpp"

namespace qsd {

// State comparison: two systems are each prepared in a member of a common
// set, pair (i, j) with probability p_ij, and the task is to decide whether
// the preparations are equal. The problem reduces exactly to discriminating
//   rho_same = sum_i p_ii tau_i x tau_i   (prior p_same)
//   rho_diff = sum_{i != j} p_ij tau_i x tau_j
// on the doubled system, so all discrimination machinery applies.
struct ComparisonProblem {
    std::vector<GaussianMixture> states;
    Eigen::MatrixXd pair_priors;
};

inline ComparisonProblem make_comparison_problem(std::vector<GaussianMixture> states,
                                                 Eigen::MatrixXd pair_priors,
                                                 double tol_prob = default_tol_prob) {
    const auto m = static_cast<Eigen::Index>(states.size());
    if (m < 2) throw validation_error("make_comparison_problem: need at least two states");
    for (const GaussianMixture& s : states)
        if (s.n_modes != states.front().n_modes)
            throw validation_error("make_comparison_problem: mode count mismatch");
    if (pair_priors.rows() != m || pair_priors.cols() != m)
        throw validation_error("make_comparison_problem: pair priors must be m x m");
    if (!pair_priors.allFinite() || pair_priors.minCoeff() < 0.0)
        throw validation_error("make_comparison_problem: pair priors must be nonnegative");
    if (std::abs(pair_priors.sum() - 1.0) > tol_prob)
        throw validation_error("make_comparison_problem: pair priors must sum to one");
    return ComparisonProblem{std::move(states), std::move(pair_priors)};
}

// Two candidate states drawn independently with P(tau1) = q for each system.
struct BinaryComparisonProblem {
    GaussianMixture tau1;
    GaussianMixture tau2;
    double q = 0.5;
};

inline BinaryComparisonProblem make_binary_comparison_problem(GaussianMixture tau1,
                                                              GaussianMixture tau2, double q) {
    if (!(q >= 0.0 && q <= 1.0))
        throw validation_error("make_binary_comparison_problem: q must lie in [0, 1]");
    if (tau1.n_modes != tau2.n_modes)
        throw validation_error("make_binary_comparison_problem: mode count mismatch");
    return BinaryComparisonProblem{std::move(tau1), std::move(tau2), q};
}

inline ComparisonProblem to_comparison(const BinaryComparisonProblem& prob) {
    Eigen::MatrixXd priors(2, 2);
    priors << prob.q * prob.q, prob.q * (1.0 - prob.q),
        (1.0 - prob.q) * prob.q, (1.0 - prob.q) * (1.0 - prob.q);
    return make_comparison_problem({prob.tau1, prob.tau2}, std::move(priors));
}

// Degenerate priors (all mass on "same" or on "different") admit no
// nontrivial measurement; answering the heavier label is optimal outright,
// so the reduction returns a finished constant-answer report instead of a
// discrimination problem.
using ReductionResult = std::variant<DiscriminationProblem, ErrorReport>;

namespace detail {

inline std::uint64_t hash_comparison(const ComparisonProblem& prob) {
    std::uint64_t h = 14695981039346656037ULL;
    hash_u64(h, prob.states.size());
    for (const GaussianMixture& s : prob.states) hash_mixture(h, s);
    for (Eigen::Index r = 0; r < prob.pair_priors.rows(); ++r)
        for (Eigen::Index c = 0; c < prob.pair_priors.cols(); ++c)
            hash_double(h, prob.pair_priors(r, c));
    return h;
}

}  // namespace detail

inline ReductionResult reduce_to_discrimination(const ComparisonProblem& prob,
                                                double tol_prob = default_tol_prob) {
    const auto m = static_cast<std::size_t>(prob.states.size());
    const double p_same = prob.pair_priors.diagonal().sum();
    const double p_diff = 1.0 - p_same;
    if (p_same <= tol_prob || p_diff <= tol_prob) {
        std::ostringstream msg;
        msg << "degenerate pair priors (p_same = " << p_same
            << "); constant answer is optimal";
        ErrorReport report;
        report.error = Estimate{std::min(std::max(p_same, 0.0), std::max(p_diff, 0.0)), 0.0,
                                Method::analytic, false, 0};
        report.problem_hash = detail::hash_comparison(prob);
        report.optimality_guaranteed = true;
        report.diagnostic = msg.str();
        return report;
    }

    std::vector<double> w_same, w_diff;
    std::vector<GaussianState> c_same, c_diff;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double p = prob.pair_priors(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j));
            if (p == 0.0) continue;
            GaussianMixture pair = tensor(prob.states[i], prob.states[j]);
            auto& weights = i == j ? w_same : w_diff;
            auto& comps = i == j ? c_same : c_diff;
            const double scale = p / (i == j ? p_same : p_diff);
            for (std::size_t k = 0; k < pair.components.size(); ++k) {
                weights.push_back(scale * pair.weights[k]);
                comps.push_back(std::move(pair.components[k]));
            }
        }
    GaussianMixture rho_same = make_gaussian_mixture(std::move(w_same), std::move(c_same));
    GaussianMixture rho_diff = make_gaussian_mixture(std::move(w_diff), std::move(c_diff));
    return make_discrimination_problem(std::move(rho_same), std::move(rho_diff), p_same);
}

template <class Spec>
ErrorReport optimal_gaussian_comparison_error(const ComparisonProblem& prob, const Spec& spec) {
    ReductionResult reduced = reduce_to_discrimination(prob);
    if (std::holds_alternative<ErrorReport>(reduced)) return std::get<ErrorReport>(reduced);
    ErrorReport report = optimal_gaussian_error(std::get<DiscriminationProblem>(reduced), spec);
    report.problem_hash = detail::hash_comparison(prob);
    return report;
}

template <class Spec>
ErrorReport optimal_gaussian_comparison_error(const BinaryComparisonProblem& prob,
                                              const Spec& spec) {
    return optimal_gaussian_comparison_error(to_comparison(prob), spec);
}

namespace detail {

// Probabilities a_i = P(x in R' | tau_i) of the per-system acceptance region
// R' = { g >= 0 }, g = q g1 - (1-q) g2, folded into the comparison error of
// the same-outcome rule on the product region (R' x R') u (R'c x R'c):
//   P_err = q^2 2 a1 (1 - a1) + (1-q)^2 2 a2 (1 - a2)
//         + 2 q (1-q) (a1 a2 + (1 - a1)(1 - a2)).
inline ErrorReport per_mode_report(double a1, double hw1, double a2, double hw2, Method method,
                                   const BinaryComparisonProblem& prob, bool stochastic,
                                   std::uint64_t seed) {
    const double q = prob.q;
    a1 = std::clamp(a1, 0.0, 1.0);
    a2 = std::clamp(a2, 0.0, 1.0);
    double err = q * q * 2.0 * a1 * (1.0 - a1) + (1.0 - q) * (1.0 - q) * 2.0 * a2 * (1.0 - a2) +
                 2.0 * q * (1.0 - q) * (a1 * a2 + (1.0 - a1) * (1.0 - a2));
    ErrorReport report;
    report.error = Estimate{std::clamp(err, 0.0, 1.0), 2.0 * (hw1 + hw2), method, stochastic,
                            seed};
    report.problem_hash = hash_comparison(to_comparison(prob));
    std::vector<GaussianState> pool = prob.tau1.components;
    pool.insert(pool.end(), prob.tau2.components.begin(), prob.tau2.components.end());
    ConstantPCheck check = is_constant_p_set(pool);
    report.optimality_guaranteed = check.ok;
    report.diagnostic = check.diagnostic;
    return report;
}

}  // namespace detail

// Comparison error assembled from one per-system homodyne discrimination,
// never touching the doubled system. Agrees with the reduced-problem route
// for product priors; for q = 1/2 and symmetric binary problems it equals
// 2 p (1 - p) with p the per-system success probability.
inline ErrorReport binary_comparison_error_via_per_mode(const BinaryComparisonProblem& prob,
                                                        const QuadratureSpec& spec = {}) {
    const MarginalDensity g1 = x_marginal(prob.tau1);
    const MarginalDensity g2 = x_marginal(prob.tau2);
    const MarginalDensity g = combine(g1, g2, prob.q, -(1.0 - prob.q));
    const Estimate a1 = integrate_where(g1, g, Sign::positive, spec);
    const Estimate a2 = integrate_where(g2, g, Sign::positive, spec);
    return detail::per_mode_report(a1.value, a1.half_width, a2.value, a2.half_width,
                                   Method::quadrature, prob, false, 0);
}

inline ErrorReport binary_comparison_error_via_per_mode(const BinaryComparisonProblem& prob,
                                                        const MonteCarloSpec& spec) {
    const MarginalDensity g1 = x_marginal(prob.tau1);
    const MarginalDensity g2 = x_marginal(prob.tau2);
    const MarginalDensity g = combine(g1, g2, prob.q, -(1.0 - prob.q));
    const int dim = g1.dim();
    auto accept = [&](const Eigen::VectorXd& x) { return g.sign_at(x) >= 0 ? 1.0 : 0.0; };
    auto accept2 = [&](double x0, double x1) {
        return (dim == 1 ? g.sign_at1(x0) : g.sign_at2(x0, x1)) >= 0 ? 1.0 : 0.0;
    };
    MonteCarloSpec spec2 = spec;
    spec2.seed = spec.seed ^ 0x9E3779B97F4A7C15ULL;  // disjoint stream family for tau2
    auto estimate_accept = [&](const MarginalDensity& f, const MonteCarloSpec& s) {
        MixtureSampler sampler(f);
        if (dim <= 2) {
            struct Point {
                double x0, x1;
            };
            return mc_expectation(
                [&](RngStream& stream) {
                    Point pt;
                    sampler.sample2(stream, pt.x0, pt.x1);
                    return pt;
                },
                [&](const Point& pt) { return accept2(pt.x0, pt.x1); }, s);
        }
        return mc_expectation([&](RngStream& stream) { return sampler(stream); }, accept, s);
    };
    const Estimate a1 = estimate_accept(g1, spec);
    const Estimate a2 = estimate_accept(g2, spec2);
    return detail::per_mode_report(a1.value, a1.half_width, a2.value, a2.half_width,
                                   Method::monte_carlo, prob, true, spec.seed);
}

// Success probability of comparison by two independent per-system
// discriminations that each succeed with probability p: both right or both
// wrong keeps the verdict correct.
inline double comparison_success_from_discrimination(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw validation_error(
            "comparison_success_from_discrimination: p must lie in [0, 1]");
    return p * p + (1.0 - p) * (1.0 - p);
}

// Closed form for comparing |alpha> against |-alpha> with q = 1/2 by the
// optimal Gaussian strategy.
inline double bpsk_homodyne_comparison_error(double alpha) {
    const double e = qsd::erf(std::sqrt(2.0) * alpha);
    return 0.5 * (1.0 - e * e);
}

}  // namespace qsd
