#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "qsd/errors.hpp"

namespace qsd {

// Finite signed mixture of Gaussian densities on R^n. Weights may be negative
// (decision functions are differences of densities); a probability density has
// nonnegative weights summing to one. Components are stored by value, no
// deduplication, and zero weights are allowed.
//
// Evaluation runs in log space per component, so values far in the tails
// underflow cleanly to zero while the overall sign stays available at any
// point via sign_at(). Instances are immutable after construction and safe to
// share across threads.
class MarginalDensity {
  public:
    MarginalDensity(int dim, std::vector<Eigen::VectorXd> means,
                    std::vector<Eigen::MatrixXd> covariances, std::vector<double> weights)
        : dim_(dim),
          means_(std::move(means)),
          covs_(std::move(covariances)),
          weights_(std::move(weights)) {
        if (dim_ < 1) throw validation_error("MarginalDensity: dimension must be positive");
        if (means_.empty() || means_.size() != covs_.size() || means_.size() != weights_.size())
            throw validation_error("MarginalDensity: component lists are empty or mismatched");
        const double half_log_2pi = 0.5 * std::log(8.0 * std::atan(1.0));
        for (std::size_t j = 0; j < means_.size(); ++j) {
            if (means_[j].size() != dim_ || covs_[j].rows() != dim_ || covs_[j].cols() != dim_)
                throw validation_error("MarginalDensity: component dimension mismatch");
            if (!means_[j].allFinite() || !covs_[j].allFinite() || !std::isfinite(weights_[j]))
                throw validation_error("MarginalDensity: non-finite component parameter");
            if ((covs_[j] - covs_[j].transpose()).cwiseAbs().maxCoeff() > 1e-10)
                throw validation_error("MarginalDensity: covariance is not symmetric");
            Eigen::MatrixXd sym = 0.5 * (covs_[j] + covs_[j].transpose());
            Eigen::LLT<Eigen::MatrixXd> llt(sym);
            if (llt.info() != Eigen::Success)
                throw validation_error("MarginalDensity: covariance is not positive definite");
            Eigen::MatrixXd L = llt.matrixL();
            double log_norm = -dim_ * half_log_2pi;
            for (int k = 0; k < dim_; ++k) log_norm -= std::log(L(k, k));
            chol_.push_back(std::move(L));
            log_norm_.push_back(log_norm);
        }
    }

    int dim() const { return dim_; }
    std::size_t components() const { return means_.size(); }
    const Eigen::VectorXd& mean(std::size_t j) const { return means_[j]; }
    const Eigen::MatrixXd& covariance(std::size_t j) const { return covs_[j]; }
    const Eigen::MatrixXd& chol(std::size_t j) const { return chol_[j]; }
    double weight(std::size_t j) const { return weights_[j]; }
    const std::vector<double>& weights() const { return weights_; }

    double weight_sum() const {
        double s = 0.0;
        for (double w : weights_) s += w;
        return s;
    }

    bool is_probability_density(double tol = 1e-12) const {
        for (double w : weights_) {
            if (w < 0.0) return false;
        }
        return std::abs(weight_sum() - 1.0) <= tol;
    }

    // Standard-deviation scale of component j along axis d, used for
    // integration domains.
    double sigma(std::size_t j, int d) const { return std::sqrt(covs_[j](d, d)); }

    double operator()(const Eigen::VectorXd& x) const {
        auto [s, m] = accumulate([&](std::size_t j) { return quad_form(j, x); });
        return finish_value(s, m);
    }

    double value1(double x) const {
        auto [s, m] = accumulate([&](std::size_t j) { return quad_form1(j, x); });
        return finish_value(s, m);
    }

    double value2(double x0, double x1) const {
        auto [s, m] = accumulate([&](std::size_t j) { return quad_form2(j, x0, x1); });
        return finish_value(s, m);
    }

    // Sign of the mixture value, stable where the value itself underflows.
    // Returns -1, 0 or +1; exact cancellation yields 0.
    int sign_at(const Eigen::VectorXd& x) const {
        auto [s, m] = accumulate([&](std::size_t j) { return quad_form(j, x); });
        return sign_of(s, m);
    }

    int sign_at1(double x) const {
        auto [s, m] = accumulate([&](std::size_t j) { return quad_form1(j, x); });
        return sign_of(s, m);
    }

    int sign_at2(double x0, double x1) const {
        auto [s, m] = accumulate([&](std::size_t j) { return quad_form2(j, x0, x1); });
        return sign_of(s, m);
    }

  private:
    // Squared Mahalanobis norm through the cached Cholesky factor.
    double quad_form(std::size_t j, const Eigen::VectorXd& x) const {
        Eigen::VectorXd r = x - means_[j];
        chol_[j].triangularView<Eigen::Lower>().solveInPlace(r);
        return r.squaredNorm();
    }

    double quad_form1(std::size_t j, double x) const {
        double z = (x - means_[j](0)) / chol_[j](0, 0);
        return z * z;
    }

    double quad_form2(std::size_t j, double x0, double x1) const {
        const Eigen::MatrixXd& L = chol_[j];
        double r0 = x0 - means_[j](0);
        double r1 = x1 - means_[j](1);
        double z0 = r0 / L(0, 0);
        double z1 = (r1 - L(1, 0) * z0) / L(1, 1);
        return z0 * z0 + z1 * z1;
    }

    // Streaming signed log-sum-exp: s is the signed sum rescaled by exp(-m)
    // where m tracks the largest component log magnitude seen so far.
    template <class QuadForm>
    std::pair<double, double> accumulate(QuadForm&& qf) const {
        double s = 0.0;
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            double w = weights_[j];
            if (w == 0.0) continue;
            double l = std::log(std::abs(w)) + log_norm_[j] - 0.5 * qf(j);
            double sgn = w < 0.0 ? -1.0 : 1.0;
            if (l <= m) {
                s += sgn * std::exp(l - m);
            } else {
                s = s * std::exp(m - l) + sgn;
                m = l;
            }
        }
        return {s, m};
    }

    static double finish_value(double s, double m) {
        if (!(m > -std::numeric_limits<double>::infinity())) return 0.0;
        return s * std::exp(m);
    }

    static int sign_of(double s, double m) {
        if (!(m > -std::numeric_limits<double>::infinity()) || s == 0.0) return 0;
        return s < 0.0 ? -1 : 1;
    }

    int dim_;
    std::vector<Eigen::VectorXd> means_;
    std::vector<Eigen::MatrixXd> covs_;
    std::vector<double> weights_;
    std::vector<Eigen::MatrixXd> chol_;
    std::vector<double> log_norm_;
};

// g1 + scale * g2 over a shared domain, as one mixture.
inline MarginalDensity combine(const MarginalDensity& g1, const MarginalDensity& g2,
                               double scale1, double scale2) {
    if (g1.dim() != g2.dim()) throw validation_error("combine: dimension mismatch");
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    std::vector<double> weights;
    for (std::size_t j = 0; j < g1.components(); ++j) {
        means.push_back(g1.mean(j));
        covs.push_back(g1.covariance(j));
        weights.push_back(scale1 * g1.weight(j));
    }
    for (std::size_t j = 0; j < g2.components(); ++j) {
        means.push_back(g2.mean(j));
        covs.push_back(g2.covariance(j));
        weights.push_back(scale2 * g2.weight(j));
    }
    return MarginalDensity(g1.dim(), std::move(means), std::move(covs), std::move(weights));
}

}  // namespace qsd
