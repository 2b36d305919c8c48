#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "qsd/errors.hpp"

namespace qsd {

// Truncated Fock-space cross-checks for the Gaussian machinery. Everything
// here is dense and deliberately simple; it exists to verify the phase-space
// results by an independent route, not to scale.

inline constexpr int fock_dim_cap = 4096;

// Truncation large enough that a coherent state of modulus up to a keeps all
// but ~1e-13 of its mass.
inline int fock_cutoff(double alpha_abs) {
    if (!(alpha_abs >= 0.0)) throw validation_error("fock_cutoff: need a nonnegative modulus");
    return static_cast<int>(std::ceil(alpha_abs * alpha_abs + 6.0 * alpha_abs + 10.0));
}

struct FockOperator {
    int n_modes = 0;
    int cutoff = 0;  // per-mode dimension; total dimension is cutoff^n_modes
    Eigen::MatrixXcd mat;
};

inline FockOperator make_fock_operator(int n_modes, int cutoff, Eigen::MatrixXcd mat,
                                       bool require_hermitian = true, double tol = 1e-12) {
    if (n_modes < 1 || cutoff < 1)
        throw validation_error("make_fock_operator: mode count and cutoff must be positive");
    double dim_d = std::pow(static_cast<double>(cutoff), n_modes);
    if (dim_d > fock_dim_cap)
        throw validation_error("make_fock_operator: dimension exceeds cap");
    const auto dim = static_cast<Eigen::Index>(dim_d + 0.5);
    if (mat.rows() != dim || mat.cols() != dim)
        throw validation_error("make_fock_operator: matrix dimension mismatch");
    if (require_hermitian && (mat - mat.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw validation_error("make_fock_operator: matrix is not hermitian");
    return FockOperator{n_modes, cutoff, std::move(mat)};
}

struct CoherentFock {
    Eigen::VectorXcd amplitudes;
    double renormalization = 1.0;  // factor applied after truncation
};

// Coherent state in the number basis, c_k = e^{-|a|^2/2} a^k / sqrt(k!),
// built by the stable recurrence c_k = c_{k-1} a / sqrt(k). The truncated
// vector is renormalized; a truncation leak above leak_tol is refused.
inline CoherentFock coherent_fock(std::complex<double> alpha, int cutoff,
                                  double leak_tol = 1e-9) {
    if (cutoff < 1) throw validation_error("coherent_fock: cutoff must be positive");
    Eigen::VectorXcd c(cutoff);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int k = 1; k < cutoff; ++k) c(k) = c(k - 1) * alpha / std::sqrt(static_cast<double>(k));
    const double kept = c.squaredNorm();
    const double leak = 1.0 - kept;
    if (leak > leak_tol) {
        std::ostringstream msg;
        msg << "coherent_fock: cutoff " << cutoff << " leaks " << leak << " of the mass for |a| = "
            << std::abs(alpha);
        throw validation_error(msg.str());
    }
    const double renorm = 1.0 / std::sqrt(kept);
    return CoherentFock{renorm * c, renorm};
}

inline Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    Eigen::VectorXcd out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Density matrix of a mixture of multimode coherent products. Component j is
// |amps[j][0]> x ... x |amps[j][n-1]> with weight weights[j].
inline FockOperator mixture_density(
    const std::vector<std::vector<std::complex<double>>>& amplitudes,
    const std::vector<double>& weights, int cutoff, double tol_prob = 1e-12) {
    if (amplitudes.empty() || amplitudes.size() != weights.size())
        throw validation_error("mixture_density: component lists are empty or mismatched");
    const std::size_t n_modes = amplitudes.front().size();
    if (n_modes < 1) throw validation_error("mixture_density: need at least one mode");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw validation_error("mixture_density: weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > tol_prob)
        throw validation_error("mixture_density: weights must sum to one");

    Eigen::MatrixXcd rho;
    for (std::size_t j = 0; j < amplitudes.size(); ++j) {
        if (amplitudes[j].size() != n_modes)
            throw validation_error("mixture_density: mode count mismatch between components");
        Eigen::VectorXcd v = coherent_fock(amplitudes[j][0], cutoff).amplitudes;
        for (std::size_t m = 1; m < n_modes; ++m)
            v = kron(v, coherent_fock(amplitudes[j][m], cutoff).amplitudes);
        if (rho.size() == 0) rho = Eigen::MatrixXcd::Zero(v.size(), v.size());
        rho += weights[j] * (v * v.adjoint());
    }
    return make_fock_operator(static_cast<int>(n_modes), cutoff, std::move(rho));
}

// Trace norm of a hermitian operator, as the sum of absolute eigenvalues.
inline double trace_norm(const FockOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.mat, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numerics_error("trace_norm: eigensolver failed");
    return es.eigenvalues().cwiseAbs().sum();
}

// Helstrom error 1/2 (1 - || p rho1 - (1-p) rho2 ||_1) by dense
// eigendecomposition.
inline double helstrom_error_numeric(const FockOperator& rho1, const FockOperator& rho2,
                                     double prior) {
    if (!(prior >= 0.0 && prior <= 1.0))
        throw validation_error("helstrom_error_numeric: prior must lie in [0, 1]");
    if (rho1.mat.rows() != rho2.mat.rows() || rho1.n_modes != rho2.n_modes ||
        rho1.cutoff != rho2.cutoff)
        throw validation_error("helstrom_error_numeric: operator shape mismatch");
    FockOperator x{rho1.n_modes, rho1.cutoff,
                   prior * rho1.mat - (1.0 - prior) * rho2.mat};
    const double err = 0.5 * (1.0 - trace_norm(x));
    return err < 0.0 ? 0.0 : err;
}

// Max elementwise deviation between X (x) X for X = q tau1 - (1-q) tau2 and
// the weighted same/different split q^2 t1 x t1 + (1-q)^2 t2 x t2
// - q (1-q) (t1 x t2 + t2 x t1). Zero up to rounding at any truncation,
// since both sides are the same polynomial in the projectors.
inline double verify_comparison_identity(std::complex<double> alpha1,
                                         std::complex<double> alpha2, double q, int cutoff) {
    if (!(q >= 0.0 && q <= 1.0))
        throw validation_error("verify_comparison_identity: q must lie in [0, 1]");
    const Eigen::VectorXcd v1 = coherent_fock(alpha1, cutoff).amplitudes;
    const Eigen::VectorXcd v2 = coherent_fock(alpha2, cutoff).amplitudes;
    const Eigen::MatrixXcd t1 = v1 * v1.adjoint();
    const Eigen::MatrixXcd t2 = v2 * v2.adjoint();
    const Eigen::MatrixXcd x = q * t1 - (1.0 - q) * t2;
    const Eigen::MatrixXcd lhs = kron(x, x);
    const Eigen::MatrixXcd rhs = q * q * kron(t1, t1) + (1.0 - q) * (1.0 - q) * kron(t2, t2) -
                                 q * (1.0 - q) * (kron(t1, t2) + kron(t2, t1));
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace qsd
