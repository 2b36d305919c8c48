#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "qsd/discrimination.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

qsd::GaussianMixture coherent_mix(double alpha) {
    return qsd::as_mixture(qsd::coherent_state({std::complex<double>(alpha, 0.0)}));
}

qsd::DiscriminationProblem bpsk(double alpha, double prior) {
    return qsd::make_discrimination_problem(coherent_mix(alpha), coherent_mix(-alpha), prior);
}

// Two three-component hypotheses over a shared constant-p family with
// distinct position spreads; exercises every mixture code path.
qsd::DiscriminationProblem mixed_problem() {
    auto state = [](double var_x, double mean_x) {
        MatrixXd gamma(2, 2);
        gamma << 2.0 * var_x, 0.0, 0.0, 2.0;
        VectorXd d(2);
        d << mean_x, 0.4;
        return qsd::make_gaussian_state(1, gamma, d);
    };
    const std::vector<qsd::GaussianState> family = {state(0.5, 0.0), state(1.0, 1.2),
                                                    state(2.0, -1.5)};
    return qsd::make_discrimination_problem(
        qsd::make_gaussian_mixture({0.5, 0.3, 0.2}, family),
        qsd::make_gaussian_mixture({0.1, 0.2, 0.7}, family), 0.6);
}

TEST(Problem, ValidatesPriorAndModes) {
    EXPECT_THROW(bpsk(1.0, -0.1), qsd::validation_error);
    EXPECT_THROW(bpsk(1.0, 1.1), qsd::validation_error);
    const qsd::GaussianMixture one = coherent_mix(1.0);
    const qsd::GaussianMixture two = qsd::tensor(one, one);
    EXPECT_THROW(qsd::make_discrimination_problem(one, two, 0.5), qsd::validation_error);
}

TEST(Problem, FlagsConstantPFamilies) {
    const qsd::DiscriminationProblem good = bpsk(1.0, 0.5);
    EXPECT_TRUE(good.constant_p);
    const qsd::GaussianMixture rotated = qsd::as_mixture(
        qsd::coherent_state({std::complex<double>(0.0, 1.0)}));  // momentum displacement
    const qsd::DiscriminationProblem bad =
        qsd::make_discrimination_problem(coherent_mix(1.0), rotated, 0.5);
    EXPECT_FALSE(bad.constant_p);
    EXPECT_FALSE(bad.constant_p_diagnostic.empty());
}

TEST(Decision, ClassifiesBySignWithTieToFirst) {
    const qsd::DecisionFunction df = qsd::decision_function(bpsk(1.0, 0.5));
    VectorXd x(1);
    x << 1.0;
    EXPECT_EQ(qsd::classify(df, x), qsd::Label::rho1);
    x << -1.0;
    EXPECT_EQ(qsd::classify(df, x), qsd::Label::rho2);
    // dead center the two densities agree bit for bit; ties go to the first
    x << 0.0;
    EXPECT_EQ(df.g.sign_at(x), 0);
    EXPECT_EQ(qsd::classify(df, x), qsd::Label::rho1);
}

TEST(OptimalError, MatchesClosedFormForPhaseFlipPairs) {
    EXPECT_NEAR(qsd::optimal_gaussian_error(bpsk(1.0, 0.5), qsd::QuadratureSpec{}).error.value,
                0.022750131948179209, 1e-8);
    EXPECT_NEAR(qsd::optimal_gaussian_error(bpsk(0.5, 0.5), qsd::QuadratureSpec{}).error.value,
                0.15865525393145702, 1e-8);
}

TEST(OptimalError, UnequalPriorsMatchMidpointOracle) {
    const qsd::DiscriminationProblem prob = bpsk(1.0, 0.7);
    const double value =
        qsd::optimal_gaussian_error(prob, qsd::QuadratureSpec{}).error.value;
    const qsd::MarginalDensity g = qsd::combine(
        qsd::x_marginal(prob.rho1), qsd::x_marginal(prob.rho2), 0.7, -0.3);
    const double brute = 0.3 + oracle::midpoint(
                                   [&](double x) { return std::min(g.value1(x), 0.0); },
                                   -10.0, 10.0, 1'000'000);
    EXPECT_NEAR(value, brute, 5e-10);
}

TEST(OptimalError, ExtremePriorsCostNothing) {
    EXPECT_NEAR(qsd::optimal_gaussian_error(bpsk(0.8, 0.0), qsd::QuadratureSpec{}).error.value,
                0.0, 1e-10);
    EXPECT_NEAR(qsd::optimal_gaussian_error(bpsk(0.8, 1.0), qsd::QuadratureSpec{}).error.value,
                0.0, 1e-10);
}

TEST(OptimalError, IdenticalHypothesesCostTheSmallerPrior) {
    const qsd::DiscriminationProblem prob =
        qsd::make_discrimination_problem(coherent_mix(0.4), coherent_mix(0.4), 0.3);
    EXPECT_NEAR(qsd::optimal_gaussian_error(prob, qsd::QuadratureSpec{}).error.value, 0.3,
                1e-10);
}

TEST(OptimalError, MixtureHypothesesMatchMidpointOracle) {
    const qsd::DiscriminationProblem prob = mixed_problem();
    const qsd::ErrorReport report = qsd::optimal_gaussian_error(prob, qsd::QuadratureSpec{});
    const qsd::MarginalDensity g = qsd::combine(
        qsd::x_marginal(prob.rho1), qsd::x_marginal(prob.rho2), 0.6, -0.4);
    const double brute = 0.4 + oracle::midpoint(
                                   [&](double x) { return std::min(g.value1(x), 0.0); },
                                   -16.0, 16.0, 2'000'000);
    EXPECT_NEAR(report.error.value, brute, 1e-8);
    EXPECT_TRUE(report.optimality_guaranteed);
}

TEST(OptimalError, QuadratureReportCarriesMetadata) {
    const qsd::ErrorReport report =
        qsd::optimal_gaussian_error(bpsk(1.0, 0.5), qsd::QuadratureSpec{});
    EXPECT_EQ(report.error.method, qsd::Method::quadrature);
    EXPECT_FALSE(report.error.stochastic);
    EXPECT_LE(report.error.half_width, 1e-9);
    EXPECT_TRUE(report.optimality_guaranteed);
    EXPECT_NE(report.problem_hash, 0u);
}

TEST(OptimalError, NonConstantPStillEstimatesButDropsTheGuarantee) {
    const qsd::GaussianMixture rotated =
        qsd::as_mixture(qsd::coherent_state({std::complex<double>(-0.5, 0.8)}));
    const qsd::DiscriminationProblem prob =
        qsd::make_discrimination_problem(coherent_mix(0.5), rotated, 0.5);
    const qsd::ErrorReport report = qsd::optimal_gaussian_error(prob, qsd::QuadratureSpec{});
    EXPECT_FALSE(report.optimality_guaranteed);
    EXPECT_FALSE(report.diagnostic.empty());
    EXPECT_GT(report.error.value, 0.0);
    EXPECT_LT(report.error.value, 0.5);
}

TEST(Sampled, AgreesWithQuadrature) {
    const qsd::DiscriminationProblem prob = bpsk(1.0, 0.5);
    const double exact =
        qsd::optimal_gaussian_error(prob, qsd::QuadratureSpec{}).error.value;
    qsd::MonteCarloSpec spec;
    spec.samples = 200000;
    spec.seed = 2024;
    const qsd::ErrorReport mc = qsd::simulate_homodyne_protocol(prob, spec);
    EXPECT_NEAR(mc.error.value, exact, 4.0 * mc.error.half_width);
    EXPECT_TRUE(mc.error.stochastic);
    EXPECT_EQ(mc.error.seed, 2024u);
    EXPECT_EQ(mc.error.method, qsd::Method::monte_carlo);
}

TEST(Sampled, SeedControlsReproducibility) {
    const qsd::DiscriminationProblem prob = mixed_problem();
    qsd::MonteCarloSpec spec;
    spec.samples = 100000;
    spec.seed = 5;
    const qsd::ErrorReport a = qsd::simulate_homodyne_protocol(prob, spec);
    const qsd::ErrorReport b = qsd::simulate_homodyne_protocol(prob, spec);
    EXPECT_EQ(a.error.value, b.error.value);
    EXPECT_EQ(a.error.half_width, b.error.half_width);
    spec.seed = 6;
    const qsd::ErrorReport c = qsd::simulate_homodyne_protocol(prob, spec);
    EXPECT_NE(a.error.value, c.error.value);
}

TEST(Sampled, MonteCarloEntryPointDelegates) {
    const qsd::DiscriminationProblem prob = bpsk(0.6, 0.5);
    qsd::MonteCarloSpec spec;
    spec.samples = 50000;
    spec.seed = 1;
    const qsd::ErrorReport via_generic = qsd::optimal_gaussian_error(prob, spec);
    const qsd::ErrorReport direct = qsd::simulate_homodyne_protocol(prob, spec);
    EXPECT_EQ(via_generic.error.value, direct.error.value);
}

TEST(TvDistance, PhaseFlipPairHasErfSeparation) {
    const qsd::MarginalDensity f1 = qsd::x_marginal(coherent_mix(1.0));
    const qsd::MarginalDensity f2 = qsd::x_marginal(coherent_mix(-1.0));
    const qsd::Estimate tv = qsd::tv_distance(f1, f2, {});
    EXPECT_NEAR(tv.value, 0.95449973610364158, 1e-9);
    EXPECT_GE(tv.value, 0.0);
    EXPECT_LE(tv.value, 1.0);
    // at even priors the optimal error is (1 - TV) / 2
    const double err =
        qsd::optimal_gaussian_error(bpsk(1.0, 0.5), qsd::QuadratureSpec{}).error.value;
    EXPECT_NEAR(err, 0.5 * (1.0 - tv.value), 1e-9);
}

TEST(HelstromPure, MatchesGramOracle) {
    EXPECT_NEAR(qsd::helstrom_pure(std::exp(-4.0), 0.5), 0.0046000703695887046, 1e-15);
    for (double t : {0.05, 0.3, 0.9})
        for (double p : {0.2, 0.5, 0.7}) {
            EXPECT_NEAR(qsd::helstrom_pure(t, p), oracle::helstrom_from_gram(t, p), 1e-14);
            EXPECT_DOUBLE_EQ(qsd::helstrom_pure(t, p), qsd::helstrom_pure(t, 1.0 - p));
        }
    EXPECT_THROW(qsd::helstrom_pure(-0.1, 0.5), qsd::validation_error);
    EXPECT_THROW(qsd::helstrom_pure(1.1, 0.5), qsd::validation_error);
    EXPECT_THROW(qsd::helstrom_pure(0.5, 1.5), qsd::validation_error);
}

TEST(Hash, SeparatesDistinctProblems) {
    const std::uint64_t base = qsd::optimal_gaussian_error(bpsk(1.0, 0.5), qsd::QuadratureSpec{})
                                   .problem_hash;
    EXPECT_EQ(base,
              qsd::optimal_gaussian_error(bpsk(1.0, 0.5), qsd::QuadratureSpec{}).problem_hash);
    EXPECT_NE(base,
              qsd::optimal_gaussian_error(bpsk(1.0, 0.6), qsd::QuadratureSpec{}).problem_hash);
    EXPECT_NE(base,
              qsd::optimal_gaussian_error(bpsk(1.1, 0.5), qsd::QuadratureSpec{}).problem_hash);
}

}  // namespace
