#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/marginal.hpp"

namespace qsd {

// Conventions, fixed throughout: hbar = 1, quadrature ordering is xxpp
// (x_1..x_n, p_1..p_n), the vacuum covariance is the identity, and a coherent
// state with amplitude a has displacement (sqrt(2) Re a, sqrt(2) Im a).
//
// The Wigner function of a state (Gamma, d) is
//   W(r) = pi^-n det(Gamma)^-1/2 exp(-(r-d)^T Gamma^-1 (r-d)),
// so W is the density of a normal with covariance Gamma/2. In particular the
// x-quadrature marginal of a mode has covariance Gamma_x / 2, and homodyning
// the vacuum gives variance 1/2. The factor of two is easy to drop; every
// downstream formula here assumes it.

inline constexpr double default_tol_sym = 1e-10;
inline constexpr double default_tol_psd = 1e-9;
inline constexpr double default_tol_prob = 1e-12;
inline constexpr double default_tol_constant_p = 1e-9;

// Symplectic form in xxpp ordering: [[0, I], [-I, 0]].
inline Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    omega.topRightCorner(n_modes, n_modes) = Eigen::MatrixXd::Identity(n_modes, n_modes);
    omega.bottomLeftCorner(n_modes, n_modes) = -Eigen::MatrixXd::Identity(n_modes, n_modes);
    return omega;
}

// Validated Gaussian state. Build through make_gaussian_state or the helpers
// below; all checks happen at construction, use sites assume the invariants.
struct GaussianState {
    int n_modes = 0;
    Eigen::MatrixXd gamma;  // 2n x 2n covariance, symmetric, Gamma + i Omega >= 0
    Eigen::VectorXd d;      // 2n displacement

    Eigen::MatrixXd gamma_x() const { return gamma.topLeftCorner(n_modes, n_modes); }
    Eigen::MatrixXd gamma_p() const { return gamma.bottomRightCorner(n_modes, n_modes); }
    Eigen::MatrixXd gamma_xp() const { return gamma.topRightCorner(n_modes, n_modes); }
    Eigen::VectorXd d_x() const { return d.head(n_modes); }
    Eigen::VectorXd d_p() const { return d.tail(n_modes); }
};

inline GaussianState make_gaussian_state(int n_modes, Eigen::MatrixXd gamma, Eigen::VectorXd d,
                                         double tol_sym = default_tol_sym,
                                         double tol_psd = default_tol_psd) {
    if (n_modes < 1) throw validation_error("make_gaussian_state: n_modes must be positive");
    const int dim = 2 * n_modes;
    if (gamma.rows() != dim || gamma.cols() != dim)
        throw validation_error("make_gaussian_state: covariance must be 2n x 2n");
    if (d.size() != dim) throw validation_error("make_gaussian_state: displacement must have length 2n");
    if (!gamma.allFinite() || !d.allFinite())
        throw validation_error("make_gaussian_state: non-finite entry");
    if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > tol_sym)
        throw validation_error("make_gaussian_state: covariance is not symmetric");
    gamma = (0.5 * (gamma + gamma.transpose())).eval();

    // Uncertainty principle: Gamma + i Omega must be positive semidefinite.
    Eigen::MatrixXcd m = gamma.cast<std::complex<double>>();
    m += std::complex<double>(0.0, 1.0) * symplectic_form(n_modes).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw numerics_error("make_gaussian_state: eigensolver failed on Gamma + i Omega");
    if (es.eigenvalues().minCoeff() < -tol_psd) {
        std::ostringstream msg;
        msg << "make_gaussian_state: uncertainty principle violated, min eigenvalue of "
               "Gamma + i Omega is "
            << es.eigenvalues().minCoeff();
        throw validation_error(msg.str());
    }
    return GaussianState{n_modes, std::move(gamma), std::move(d)};
}

inline GaussianState coherent_state(const std::vector<std::complex<double>>& alphas) {
    const int n = static_cast<int>(alphas.size());
    if (n < 1) throw validation_error("coherent_state: need at least one amplitude");
    Eigen::VectorXd d(2 * n);
    for (int k = 0; k < n; ++k) {
        if (!std::isfinite(alphas[k].real()) || !std::isfinite(alphas[k].imag()))
            throw validation_error("coherent_state: non-finite amplitude");
        d(k) = std::sqrt(2.0) * alphas[k].real();
        d(n + k) = std::sqrt(2.0) * alphas[k].imag();
    }
    return GaussianState{n, Eigen::MatrixXd::Identity(2 * n, 2 * n), std::move(d)};
}

// Tensor product in xxpp ordering: every quadrature block becomes a direct
// sum, displacements concatenate blockwise.
inline GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    const int na = a.n_modes, nb = b.n_modes, n = na + nb;
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    gamma.block(0, 0, na, na) = a.gamma_x();
    gamma.block(na, na, nb, nb) = b.gamma_x();
    gamma.block(n, n, na, na) = a.gamma_p();
    gamma.block(n + na, n + na, nb, nb) = b.gamma_p();
    gamma.block(0, n, na, na) = a.gamma_xp();
    gamma.block(na, n + na, nb, nb) = b.gamma_xp();
    gamma.block(n, 0, na, na) = a.gamma_xp().transpose();
    gamma.block(n + na, na, nb, nb) = b.gamma_xp().transpose();
    Eigen::VectorXd d(2 * n);
    d << a.d_x(), b.d_x(), a.d_p(), b.d_p();
    return make_gaussian_state(n, std::move(gamma), std::move(d));
}

struct GaussianMixture {
    int n_modes = 0;
    std::vector<double> weights;
    std::vector<GaussianState> components;
};

inline GaussianMixture make_gaussian_mixture(std::vector<double> weights,
                                             std::vector<GaussianState> components,
                                             double tol_prob = default_tol_prob) {
    if (components.empty()) throw validation_error("make_gaussian_mixture: no components");
    if (weights.size() != components.size())
        throw validation_error("make_gaussian_mixture: weight/component count mismatch");
    const int n = components.front().n_modes;
    double sum = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (components[j].n_modes != n)
            throw validation_error("make_gaussian_mixture: mode count mismatch between components");
        if (!(weights[j] >= 0.0))
            throw validation_error("make_gaussian_mixture: weights must be nonnegative");
        sum += weights[j];
    }
    if (std::abs(sum - 1.0) > tol_prob)
        throw validation_error("make_gaussian_mixture: weights must sum to one");
    return GaussianMixture{n, std::move(weights), std::move(components)};
}

inline GaussianMixture as_mixture(const GaussianState& s) {
    return GaussianMixture{s.n_modes, {1.0}, {s}};
}

inline GaussianMixture tensor(const GaussianMixture& a, const GaussianMixture& b) {
    std::vector<double> weights;
    std::vector<GaussianState> components;
    weights.reserve(a.components.size() * b.components.size());
    for (std::size_t i = 0; i < a.components.size(); ++i)
        for (std::size_t j = 0; j < b.components.size(); ++j) {
            weights.push_back(a.weights[i] * b.weights[j]);
            components.push_back(tensor(a.components[i], b.components[j]));
        }
    return GaussianMixture{a.n_modes + b.n_modes, std::move(weights), std::move(components)};
}

inline double wigner(const GaussianState& s, const Eigen::VectorXd& r) {
    if (r.size() != 2 * s.n_modes) throw validation_error("wigner: point has wrong dimension");
    Eigen::LLT<Eigen::MatrixXd> llt(s.gamma);
    if (llt.info() != Eigen::Success)
        throw numerics_error("wigner: covariance is numerically singular");
    Eigen::VectorXd z = r - s.d;
    llt.matrixL().solveInPlace(z);
    double log_det = 0.0;
    Eigen::MatrixXd L = llt.matrixL();
    for (int k = 0; k < L.rows(); ++k) log_det += 2.0 * std::log(L(k, k));
    const double log_pi = std::log(4.0 * std::atan(1.0));
    double logw = -s.n_modes * log_pi - 0.5 * log_det - z.squaredNorm();
    return std::exp(logw);
}

inline double wigner_mixture(const GaussianMixture& mix, const Eigen::VectorXd& r) {
    double w = 0.0;
    for (std::size_t j = 0; j < mix.components.size(); ++j)
        w += mix.weights[j] * wigner(mix.components[j], r);
    return w;
}

// Marginal of the Wigner density over all momentum quadratures. Component j
// contributes mean d_x^j and covariance Gamma_x^j / 2; a cross block
// Gamma_xp does not enter a marginal of a joint normal.
inline MarginalDensity x_marginal(const GaussianMixture& mix) {
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    for (const GaussianState& s : mix.components) {
        means.push_back(s.d_x());
        covs.push_back(0.5 * s.gamma_x());
    }
    return MarginalDensity(mix.n_modes, std::move(means), std::move(covs), mix.weights);
}

inline MarginalDensity p_marginal(const GaussianMixture& mix) {
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    for (const GaussianState& s : mix.components) {
        means.push_back(s.d_p());
        covs.push_back(0.5 * s.gamma_p());
    }
    return MarginalDensity(mix.n_modes, std::move(means), std::move(covs), mix.weights);
}

struct ConstantPCheck {
    bool ok = false;
    std::string diagnostic;  // names the first offending state and block
    explicit operator bool() const { return ok; }
};

// A set of states is constant in the p quadratures when every member has the
// same Gamma_p and d_p and no x-p correlations. Homodyne optimality results
// below hold only on such sets.
inline ConstantPCheck is_constant_p_set(const std::vector<GaussianState>& states,
                                        double tol = default_tol_constant_p) {
    if (states.empty()) return {false, "empty state set"};
    const int n = states.front().n_modes;
    const Eigen::MatrixXd gp0 = states.front().gamma_p();
    const Eigen::VectorXd dp0 = states.front().d_p();
    std::ostringstream msg;
    for (std::size_t j = 0; j < states.size(); ++j) {
        if (states[j].n_modes != n) {
            msg << "state " << j << ": mode count differs from state 0";
            return {false, msg.str()};
        }
        double xp = states[j].gamma_xp().cwiseAbs().maxCoeff();
        if (xp > tol) {
            msg << "state " << j << ": max |gamma_xp| = " << xp << " exceeds " << tol;
            return {false, msg.str()};
        }
        double gp = (states[j].gamma_p() - gp0).cwiseAbs().maxCoeff();
        if (gp > tol) {
            msg << "state " << j << ": max |gamma_p - gamma_p[0]| = " << gp << " exceeds " << tol;
            return {false, msg.str()};
        }
        double dp = (states[j].d_p() - dp0).cwiseAbs().maxCoeff();
        if (dp > tol) {
            msg << "state " << j << ": max |d_p - d_p[0]| = " << dp << " exceeds " << tol;
            return {false, msg.str()};
        }
    }
    return {true, "constant-p set"};
}

}  // namespace qsd
