#pragma once

#include <cstdint>

namespace qsd {

enum class Method { analytic, quadrature, monte_carlo, fock_oracle };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::analytic: return "analytic";
        case Method::quadrature: return "quadrature";
        case Method::monte_carlo: return "monte-carlo";
        case Method::fock_oracle: return "fock-oracle";
    }
    return "unknown";
}

// Numerical result plus an absolute accuracy statement. For quadrature the
// half width is an error bound from refinement (plus domain truncation); for
// Monte Carlo it is a confidence-interval half width and `seed` is meaningful.
struct Estimate {
    double value = 0.0;
    double half_width = 0.0;
    Method method = Method::analytic;
    bool stochastic = false;
    std::uint64_t seed = 0;
};

}  // namespace qsd
