#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <type_traits>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/estimate.hpp"
#include "qsd/marginal.hpp"
#include "qsd/special.hpp"
#include "qsd/util.hpp"

namespace qsd {

struct MonteCarloSpec {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
    double confidence = 0.95;
};

inline void validate(const MonteCarloSpec& spec) {
    if (spec.samples < 1) throw validation_error("MonteCarloSpec: need at least one sample");
    if (!(spec.confidence > 0.0 && spec.confidence < 1.0))
        throw validation_error("MonteCarloSpec: confidence must lie in (0, 1)");
}

// Counter-based random stream: sample i of a run draws from its own stream
// keyed by (seed, i), so results do not depend on how samples are divided
// among workers. Output is splitmix64 from a per-stream origin that is
// derived by hashing, never by offsetting, which keeps neighbouring streams
// from sliding into one another.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t index)
        : state_(mix(mix(seed + 0x6A09E667F3BCC909ULL) ^ mix(index + 0x9E3779B97F4A7C15ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform on (0, 1]; never returns 0, so logs are safe.
    double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Draws points from a nonnegative mixture density. Component choice uses one
// uniform against cumulative weights; the point is mean + L z with L the
// cached Cholesky factor and z standard normals.
class MixtureSampler {
  public:
    explicit MixtureSampler(MarginalDensity f) : f_(std::move(f)) {
        double total = 0.0;
        for (std::size_t j = 0; j < f_.components(); ++j) {
            if (f_.weight(j) < 0.0)
                throw validation_error("MixtureSampler: weights must be nonnegative");
            total += f_.weight(j);
        }
        if (!(total > 0.0)) throw validation_error("MixtureSampler: zero total weight");
        double c = 0.0;
        for (std::size_t j = 0; j < f_.components(); ++j) {
            c += f_.weight(j);
            cum_.push_back(c);
        }
        total_ = total;
    }

    std::size_t pick_component(RngStream& stream) const {
        const double t = stream.uniform() * total_;
        for (std::size_t j = 0; j < cum_.size(); ++j)
            if (cum_[j] >= t) return j;
        return cum_.size() - 1;
    }

    Eigen::VectorXd operator()(RngStream& stream) const {
        const std::size_t j = pick_component(stream);
        const int n = f_.dim();
        Eigen::VectorXd z(n);
        for (int k = 0; k < n; ++k) z(k) = stream.normal();
        return f_.mean(j) + f_.chol(j).triangularView<Eigen::Lower>() * z;
    }

    // Allocation-free draw for the one- and two-dimensional hot paths.
    void sample2(RngStream& stream, double& x0, double& x1) const {
        const std::size_t j = pick_component(stream);
        const Eigen::MatrixXd& L = f_.chol(j);
        const double z0 = stream.normal();
        x0 = f_.mean(j)(0) + L(0, 0) * z0;
        if (f_.dim() > 1) {
            const double z1 = stream.normal();
            x1 = f_.mean(j)(1) + L(1, 0) * z0 + L(1, 1) * z1;
        } else {
            x1 = 0.0;
        }
    }

  private:
    MarginalDensity f_;
    std::vector<double> cum_;
    double total_ = 0.0;
};

// Mean of statistic(sampler(stream)) over spec.samples independent streams,
// with a normal-approximation confidence interval. The sample set is split
// into fixed blocks; workers claim whole blocks and the block partial sums
// are combined in block order, so the result is bit-identical for any worker
// count (QSD_THREADS only changes wall time).
template <class Sampler, class Statistic>
Estimate mc_expectation(const Sampler& sampler, const Statistic& statistic,
                        const MonteCarloSpec& spec) {
    validate(spec);
    const std::uint64_t n = spec.samples;
    constexpr std::uint64_t block = 1 << 16;
    const std::uint64_t nblocks = (n + block - 1) / block;

    std::vector<double> block_sum(nblocks, 0.0);
    std::vector<double> block_sumsq(nblocks, 0.0);

    auto run_block = [&](std::uint64_t b) {
        const std::uint64_t lo = b * block;
        const std::uint64_t hi = std::min(n, lo + block);
        double s = 0.0, s2 = 0.0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            RngStream stream(spec.seed, i);
            const double v = statistic(sampler(stream));
            s += v;
            s2 += v * v;
        }
        block_sum[b] = s;
        block_sumsq[b] = s2;
    };

    const unsigned workers = detail::worker_count(nblocks);
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& t : pool) t.join();
    }

    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t b = 0; b < nblocks; ++b) {
        sum += block_sum[b];
        sumsq += block_sumsq[b];
    }

    const double mean = sum / static_cast<double>(n);
    double half_width = 0.0;
    if (n > 1) {
        double var = (sumsq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
        if (var > 0.0)
            half_width = confidence_z(spec.confidence) * std::sqrt(var / static_cast<double>(n));
    }
    return Estimate{mean, half_width, Method::monte_carlo, true, spec.seed};
}

}  // namespace qsd
