#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "qsd/comparison.hpp"
#include "qsd/errors.hpp"
#include "qsd/estimate.hpp"
#include "qsd/monte_carlo.hpp"

namespace qsd {

// Photon-detection comparison receivers for the binary coherent pair
// |alpha>, |-alpha> with uniform product priors (q = 1/2). Detectors are
// ideal: unit efficiency, no dark counts.

enum class ReceiverKind { helstrom, homodyne, displacement_pd, bs_pd };

inline const char* to_string(ReceiverKind k) {
    switch (k) {
        case ReceiverKind::helstrom: return "helstrom";
        case ReceiverKind::homodyne: return "homodyne";
        case ReceiverKind::displacement_pd: return "displacement_pd";
        case ReceiverKind::bs_pd: return "bs_pd";
    }
    return "unknown";
}

inline ReceiverKind parse_receiver_kind(const std::string& name) {
    if (name == "helstrom") return ReceiverKind::helstrom;
    if (name == "homodyne") return ReceiverKind::homodyne;
    if (name == "displacement_pd") return ReceiverKind::displacement_pd;
    if (name == "bs_pd") return ReceiverKind::bs_pd;
    throw validation_error("unknown receiver kind: " + name);
}

// On/off detector behind a displacement D(beta): a coherent input gamma
// leaves the detector dark with probability exp(-|gamma + beta|^2). p_on is
// defined as one minus p_off, so the two outcomes always sum to one exactly.
struct ClickModel {
    std::complex<double> beta;

    double p_off(std::complex<double> gamma) const { return std::exp(-std::norm(gamma + beta)); }
    double p_on(std::complex<double> gamma) const { return 1.0 - p_off(gamma); }
};

// Displace-and-detect comparison: each system is displaced by beta = -alpha
// and sent to an on/off detector; the verdict is "equal" for an even number
// of clicks. Error e^{-4 alpha^2} (1 - e^{-4 alpha^2} / 2).
inline double displacement_receiver_error(double alpha) {
    const double u = std::exp(-4.0 * alpha * alpha);
    return u * (1.0 - 0.5 * u);
}

// Balanced beam splitter comparison: the difference arm (gamma1 - gamma2) /
// sqrt(2) feeds an on/off detector and any click means "different". Equal
// inputs send vacuum to the detector, so it never clicks on equal pairs.
// Error e^{-2 alpha^2} / 2.
inline double bs_receiver_error(double alpha) {
    return 0.5 * std::exp(-2.0 * alpha * alpha);
}

// Optimal quantum comparison error for the same ensemble, e^{-4 alpha^2} / 2.
// Equals 2 p (1 - p) with p the single-copy Helstrom success probability.
inline double helstrom_comparison_error(double alpha) {
    return 0.5 * std::exp(-4.0 * alpha * alpha);
}

struct ReceiverTrial {
    bool same_source = false;
    bool decided_same = false;
    bool error() const { return same_source != decided_same; }
};

// One shot of a click receiver on a random pair. Only the photon-detection
// kinds have a click-level trial model.
inline ReceiverTrial receiver_trial(ReceiverKind kind, double alpha, RngStream& stream) {
    const double g1 = stream.uniform() <= 0.5 ? alpha : -alpha;
    const double g2 = stream.uniform() <= 0.5 ? alpha : -alpha;
    ReceiverTrial trial;
    trial.same_source = g1 == g2;
    if (kind == ReceiverKind::displacement_pd) {
        const ClickModel detector{std::complex<double>(-alpha, 0.0)};
        int clicks = 0;
        if (stream.uniform() <= detector.p_on(g1)) ++clicks;
        if (stream.uniform() <= detector.p_on(g2)) ++clicks;
        trial.decided_same = clicks % 2 == 0;
    } else if (kind == ReceiverKind::bs_pd) {
        const double diff = (g1 - g2) / std::sqrt(2.0);
        const ClickModel detector{std::complex<double>(0.0, 0.0)};
        trial.decided_same = !(stream.uniform() <= detector.p_on(diff));
    } else {
        throw validation_error("receiver_trial: no click model for this receiver kind");
    }
    return trial;
}

inline ErrorReport simulate_receiver(ReceiverKind kind, double alpha,
                                     const MonteCarloSpec& spec) {
    if (kind != ReceiverKind::displacement_pd && kind != ReceiverKind::bs_pd)
        throw validation_error("simulate_receiver: only click receivers can be simulated");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw validation_error("simulate_receiver: alpha must be finite and nonnegative");
    auto sampler = [&](RngStream& stream) { return receiver_trial(kind, alpha, stream); };
    auto statistic = [](const ReceiverTrial& t) { return t.error() ? 1.0 : 0.0; };
    Estimate est = mc_expectation(sampler, statistic, spec);
    ErrorReport report;
    report.error = est;
    std::uint64_t h = 14695981039346656037ULL;
    detail::hash_u64(h, static_cast<std::uint64_t>(kind));
    detail::hash_double(h, alpha);
    report.problem_hash = h;
    report.optimality_guaranteed = false;
    report.diagnostic = "specific photon-detection receiver, not an optimality bound";
    return report;
}

}  // namespace qsd
