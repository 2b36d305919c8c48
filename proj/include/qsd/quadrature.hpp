#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/estimate.hpp"
#include "qsd/marginal.hpp"
#include "qsd/special.hpp"

namespace qsd {

struct QuadratureSpec {
    double tolerance = 1e-10;       // absolute
    double radius_sigmas = 10.0;    // domain hull: component means +- radius * sigma
    std::size_t max_subdivisions = 1'000'000;
};

inline void validate(const QuadratureSpec& spec) {
    if (!(spec.tolerance > 0.0)) throw validation_error("QuadratureSpec: tolerance must be positive");
    if (!(spec.radius_sigmas >= 6.0))
        throw validation_error("QuadratureSpec: radius_sigmas must be at least 6");
    if (spec.max_subdivisions < 8)
        throw validation_error("QuadratureSpec: max_subdivisions too small");
}

enum class Sign { negative, positive };

namespace detail {

// Gauss-Kronrod 7-15 pair, nodes and weights for [-1, 1].
inline constexpr double gk_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GkResult {
    double value = 0.0;
    double error = 0.0;
};

template <class F>
GkResult gk15(const F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    double k = gk_wk[7] * fc;
    double g = gk_wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk_x[i];
        const double fs = f(c - dx) + f(c + dx);
        k += gk_wk[i] * fs;
        if (i % 2 == 1) g += gk_wg[i / 2] * fs;
    }
    return {k * h, std::abs((k - g) * h)};
}

struct Segment {
    double a, b, value, error;
    std::uint64_t id;  // insertion order, breaks error ties deterministically
};

struct SegmentWorse {
    bool operator()(const Segment& lhs, const Segment& rhs) const {
        if (lhs.error != rhs.error) return lhs.error < rhs.error;
        return lhs.id < rhs.id;
    }
};

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
};

// Globally adaptive bisection. Deterministic: no threads, ties broken by
// insertion id, and the final value is accumulated over the segment partition
// sorted by left endpoint rather than by refinement history.
template <class F>
AdaptiveResult adaptive_1d(const F& f, const std::vector<double>& breakpoints, double tol,
                           std::size_t max_subdivisions) {
    if (breakpoints.size() < 2) throw validation_error("adaptive_1d: empty domain");
    const double width = breakpoints.back() - breakpoints.front();
    const double min_width = width * 1e-12;

    std::priority_queue<Segment, std::vector<Segment>, SegmentWorse> active;
    std::vector<Segment> done;
    std::uint64_t next_id = 0;
    double active_error = 0.0;

    auto push = [&](double a, double b) {
        GkResult r = gk15(f, a, b);
        active.push({a, b, r.value, r.error, next_id++});
        active_error += r.error;
    };

    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (breakpoints[i + 1] > breakpoints[i]) push(breakpoints[i], breakpoints[i + 1]);

    double frozen_error = 0.0;
    std::size_t splits = 0;
    while (!active.empty() && active_error + frozen_error > tol) {
        Segment worst = active.top();
        active.pop();
        active_error -= worst.error;
        if (worst.b - worst.a <= min_width) {
            // Too narrow to resolve further; keep its value, bank its error.
            frozen_error += worst.error;
            done.push_back(worst);
            continue;
        }
        if (splits >= max_subdivisions) {
            std::ostringstream msg;
            msg << "adaptive quadrature: tolerance " << tol << " not reached within "
                << max_subdivisions << " subdivisions (error bound "
                << active_error + frozen_error + worst.error << ")";
            throw numerics_error(msg.str());
        }
        const double mid = 0.5 * (worst.a + worst.b);
        push(worst.a, mid);
        push(mid, worst.b);
        ++splits;
    }

    while (!active.empty()) {
        done.push_back(active.top());
        active.pop();
    }
    std::sort(done.begin(), done.end(),
              [](const Segment& x, const Segment& y) { return x.a < y.a; });
    AdaptiveResult out;
    for (const Segment& s : done) {
        out.value += s.value;
        out.error += s.error;
    }
    return out;
}

// Seed breakpoints: component mean plus a sigma ladder out to the hull
// radius on both sides. The ladder matters when component scales differ by
// orders of magnitude: a narrow component's far tail must start inside a
// segment of comparable width or it slips between the nodes of one long
// segment and never triggers refinement.
inline void component_ladder(std::vector<double>& pts, double m, double s, double radius,
                             double lo, double hi) {
    for (double c : {0.0, 1.0, 3.0, 6.0, radius}) {
        for (double x : {m - c * s, m + c * s})
            if (x > lo && x < hi) pts.push_back(x);
    }
}

inline void dedupe_breakpoints(std::vector<double>& pts, double lo, double hi) {
    std::sort(pts.begin(), pts.end());
    const double eps = (hi - lo) * 1e-12;
    std::vector<double> out;
    for (double x : pts)
        if (out.empty() || x - out.back() > eps) out.push_back(x);
    pts.swap(out);
}

// Integration hull and seed breakpoints along one axis.
inline std::vector<double> axis_breakpoints(const MarginalDensity& f, int axis, double radius) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t j = 0; j < f.components(); ++j) {
        const double m = f.mean(j)(axis);
        const double s = f.sigma(j, axis);
        lo = std::min(lo, m - radius * s);
        hi = std::max(hi, m + radius * s);
    }
    std::vector<double> pts{lo, hi};
    for (std::size_t j = 0; j < f.components(); ++j)
        component_ladder(pts, f.mean(j)(axis), f.sigma(j, axis), radius, lo, hi);
    dedupe_breakpoints(pts, lo, hi);
    return pts;
}

// Extra breakpoints from a second density, clipped to an existing hull.
inline void merge_breakpoints(std::vector<double>& pts, const MarginalDensity& g, int axis,
                              double radius) {
    const double lo = pts.front(), hi = pts.back();
    for (std::size_t j = 0; j < g.components(); ++j)
        component_ladder(pts, g.mean(j)(axis), g.sigma(j, axis), radius, lo, hi);
    dedupe_breakpoints(pts, lo, hi);
}

// Mass of |f| outside the hull, bounded one Gaussian tail at a time.
inline double tail_bound(const MarginalDensity& f, double radius) {
    double b = 0.0;
    for (std::size_t j = 0; j < f.components(); ++j)
        b += std::abs(f.weight(j)) * f.dim() * qsd::erfc(radius / std::sqrt(2.0));
    return b;
}

template <class F1>
Estimate integrate_axis(const F1& f, const std::vector<double>& pts, const QuadratureSpec& spec,
                        double truncation) {
    AdaptiveResult r = adaptive_1d(f, pts, spec.tolerance, spec.max_subdivisions);
    return Estimate{r.value, r.error + truncation, Method::quadrature, false, 0};
}

// Iterated 2-d integration: adaptive in x0 of an adaptive integral in x1.
// The inner tolerance is budgeted so that inner errors integrated over the
// outer hull stay below a tenth of the requested tolerance.
template <class F2>
Estimate integrate_plane(const F2& f, const std::vector<double>& pts0,
                         const std::vector<double>& pts1, const QuadratureSpec& spec,
                         double truncation) {
    const double width0 = pts0.back() - pts0.front();
    const double inner_tol = std::max(0.1 * spec.tolerance / std::max(width0, 1.0), 5e-14);
    const std::size_t inner_cap = std::min<std::size_t>(spec.max_subdivisions, 20'000);
    const std::size_t outer_cap = std::min<std::size_t>(spec.max_subdivisions, 100'000);
    auto outer = [&](double x0) {
        return adaptive_1d([&](double x1) { return f(x0, x1); }, pts1, inner_tol, inner_cap).value;
    };
    AdaptiveResult r = adaptive_1d(outer, pts0, 0.85 * spec.tolerance, outer_cap);
    double half_width = r.error + width0 * inner_tol + truncation;
    return Estimate{r.value, half_width, Method::quadrature, false, 0};
}

}  // namespace detail

// Integral of f over the region where f itself is negative (Sign::negative)
// or positive (Sign::positive). The clipped integrand min(f, 0) or max(f, 0)
// is continuous, so the region boundary is never located explicitly.
inline Estimate integrate_signed_region(const MarginalDensity& f, Sign region,
                                        const QuadratureSpec& spec = {}) {
    validate(spec);
    const double trunc = detail::tail_bound(f, spec.radius_sigmas);
    if (f.dim() == 1) {
        auto pts = detail::axis_breakpoints(f, 0, spec.radius_sigmas);
        if (region == Sign::negative)
            return detail::integrate_axis(
                [&](double x) { return std::min(f.value1(x), 0.0); }, pts, spec, trunc);
        return detail::integrate_axis([&](double x) { return std::max(f.value1(x), 0.0); }, pts,
                                      spec, trunc);
    }
    if (f.dim() == 2) {
        auto pts0 = detail::axis_breakpoints(f, 0, spec.radius_sigmas);
        auto pts1 = detail::axis_breakpoints(f, 1, spec.radius_sigmas);
        if (region == Sign::negative)
            return detail::integrate_plane(
                [&](double x0, double x1) { return std::min(f.value2(x0, x1), 0.0); }, pts0, pts1,
                spec, trunc);
        return detail::integrate_plane(
            [&](double x0, double x1) { return std::max(f.value2(x0, x1), 0.0); }, pts0, pts1,
            spec, trunc);
    }
    throw validation_error("integrate_signed_region: only 1 or 2 dimensions supported");
}

// Plain integral of f over its truncated hull.
inline Estimate integrate_density(const MarginalDensity& f, const QuadratureSpec& spec = {}) {
    validate(spec);
    const double trunc = detail::tail_bound(f, spec.radius_sigmas);
    if (f.dim() == 1) {
        auto pts = detail::axis_breakpoints(f, 0, spec.radius_sigmas);
        return detail::integrate_axis([&](double x) { return f.value1(x); }, pts, spec, trunc);
    }
    if (f.dim() == 2) {
        auto pts0 = detail::axis_breakpoints(f, 0, spec.radius_sigmas);
        auto pts1 = detail::axis_breakpoints(f, 1, spec.radius_sigmas);
        return detail::integrate_plane(
            [&](double x0, double x1) { return f.value2(x0, x1); }, pts0, pts1, spec, trunc);
    }
    throw validation_error("integrate_density: only 1 or 2 dimensions supported");
}

// Integral of f over the region where another density is negative/positive.
// The integrand jumps at the region boundary; adaptive bisection still
// converges, just more slowly than for the clipped integrands above.
inline Estimate integrate_where(const MarginalDensity& f, const MarginalDensity& region,
                                Sign sign, const QuadratureSpec& spec = {}) {
    validate(spec);
    if (f.dim() != region.dim())
        throw validation_error("integrate_where: dimension mismatch");
    const double trunc = detail::tail_bound(f, spec.radius_sigmas);
    const int want = sign == Sign::negative ? -1 : 1;
    if (f.dim() == 1) {
        auto pts = detail::axis_breakpoints(f, 0, spec.radius_sigmas);
        detail::merge_breakpoints(pts, region, 0, spec.radius_sigmas);
        return detail::integrate_axis(
            [&](double x) { return region.sign_at1(x) == want ? f.value1(x) : 0.0; }, pts, spec,
            trunc);
    }
    if (f.dim() == 2) {
        auto pts0 = detail::axis_breakpoints(f, 0, spec.radius_sigmas);
        auto pts1 = detail::axis_breakpoints(f, 1, spec.radius_sigmas);
        detail::merge_breakpoints(pts0, region, 0, spec.radius_sigmas);
        detail::merge_breakpoints(pts1, region, 1, spec.radius_sigmas);
        return detail::integrate_plane(
            [&](double x0, double x1) {
                return region.sign_at2(x0, x1) == want ? f.value2(x0, x1) : 0.0;
            },
            pts0, pts1, spec, trunc);
    }
    throw validation_error("integrate_where: only 1 or 2 dimensions supported");
}

}  // namespace qsd
