// Reference implementations used only to pin expected values in tests.
// Everything here is deliberately naive and independent of the library
// code paths it checks: series instead of std::erf, midpoint sums and
// Gauss-Legendre rules instead of the adaptive integrator, brute-force
// enumeration instead of sampled receivers.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qsd/gaussian_state.hpp"

namespace oracle {

// Maclaurin series for erf, accurate to full double precision for |x| <= 4.
inline double erf_series(double x) {
    const long double two_over_sqrt_pi = 1.128379167095512573896158903122L;
    const long double z = x;
    long double term = z;
    long double sum = z;
    for (int n = 1; n <= 220; ++n) {
        term *= -z * z / n;
        sum += term / (2 * n + 1);
    }
    return static_cast<double>(two_over_sqrt_pi * sum);
}

inline double normal_cdf(double x) { return 0.5 * (1.0 + erf_series(x / std::sqrt(2.0))); }

template <class F>
double midpoint(F&& f, double lo, double hi, int n) {
    const double h = (hi - lo) / n;
    long double sum = 0.0L;
    for (int i = 0; i < n; ++i) sum += f(lo + (i + 0.5) * h);
    return static_cast<double>(sum * h);
}

struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

// Nodes by Newton iteration on the Legendre recurrence.
inline GaussLegendre gauss_legendre(int n) {
    GaussLegendre rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double p1 = 0.0, p0 = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        p0 = 1.0;
        p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        rule.x[i] = t;
        rule.w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return rule;
}

template <class F>
double gl_integrate(F&& f, double lo, double hi, const GaussLegendre& rule) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < rule.x.size(); ++i) sum += rule.w[i] * f(mid + half * rule.x[i]);
    return static_cast<double>(sum * half);
}

// Exact error of the displace-then-count receiver on the four equiprobable
// phase-flip pairs: enumerate both click patterns per pair, decide "equal"
// on an even click total.
inline double displacement_error_enum(double alpha) {
    double err = 0.0;
    for (int s1 : {+1, -1})
        for (int s2 : {+1, -1}) {
            const double m1 = s1 * alpha - alpha;
            const double m2 = s2 * alpha - alpha;
            const double off1 = std::exp(-m1 * m1);
            const double off2 = std::exp(-m2 * m2);
            for (int c1 : {0, 1})
                for (int c2 : {0, 1}) {
                    const double p = (c1 ? 1.0 - off1 : off1) * (c2 ? 1.0 - off2 : off2);
                    const bool same = (c1 + c2) % 2 == 0;
                    if (same != (s1 == s2)) err += 0.25 * p;
                }
        }
    return err;
}

// Exact error of the beam-splitter receiver: count on the difference arm,
// any click decides "different".
inline double bs_error_enum(double alpha) {
    double err = 0.0;
    for (int s1 : {+1, -1})
        for (int s2 : {+1, -1}) {
            const double mu = (s1 - s2) * alpha / std::sqrt(2.0);
            const double off = std::exp(-mu * mu);
            err += 0.25 * (s1 == s2 ? 1.0 - off : off);
        }
    return err;
}

// Minimum error for a pure pair from the 2x2 Gram problem: eigenvalues of
// p |1><1| - (1-p) |2><2| restricted to the span.
inline double helstrom_from_gram(double overlap_sq, double p) {
    const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * p * (1.0 - p) * overlap_sq));
    const double lo = 0.5 * (2.0 * p - 1.0 - disc);
    const double hi = 0.5 * (2.0 * p - 1.0 + disc);
    return 0.5 * (1.0 - (std::abs(lo) + std::abs(hi)));
}

// Gamma = I + A A^T is physical for any A: it dominates the vacuum.
inline qsd::GaussianState random_state(int n_modes, std::mt19937_64& rng, double scale = 0.6) {
    std::normal_distribution<double> normal;
    const int n = 2 * n_modes;
    Eigen::MatrixXd a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) a(r, c) = scale * normal(rng);
    Eigen::VectorXd d(n);
    for (int r = 0; r < n; ++r) d(r) = normal(rng);
    return qsd::make_gaussian_state(n_modes, Eigen::MatrixXd::Identity(n, n) + a * a.transpose(),
                                    d);
}

// A family sharing one momentum block. Gamma_x >= Gamma_p^{-1} keeps each
// member physical; x means vary freely, p means are shared.
inline std::vector<qsd::GaussianState> random_constant_p_set(int n_modes, int count,
                                                             std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    const int n = n_modes;
    Eigen::MatrixXd b(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) b(r, c) = 0.5 * normal(rng);
    const Eigen::MatrixXd gamma_p = Eigen::MatrixXd::Identity(n, n) + b * b.transpose();
    const Eigen::MatrixXd gamma_p_inv = gamma_p.inverse();
    Eigen::VectorXd dp(n);
    for (int r = 0; r < n; ++r) dp(r) = normal(rng);

    std::vector<qsd::GaussianState> states;
    for (int s = 0; s < count; ++s) {
        Eigen::MatrixXd c(n, n);
        for (int r = 0; r < n; ++r)
            for (int q = 0; q < n; ++q) c(r, q) = 0.5 * normal(rng);
        Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        gamma.topLeftCorner(n, n) =
            0.5 * (gamma_p_inv + gamma_p_inv.transpose()) + c * c.transpose() +
            1e-6 * Eigen::MatrixXd::Identity(n, n);
        gamma.bottomRightCorner(n, n) = gamma_p;
        Eigen::VectorXd d(2 * n);
        for (int r = 0; r < n; ++r) d(r) = 2.0 * normal(rng);
        d.tail(n) = dp;
        states.push_back(qsd::make_gaussian_state(n_modes, gamma, d));
    }
    return states;
}

}  // namespace oracle
