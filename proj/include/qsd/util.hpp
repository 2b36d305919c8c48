#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>

namespace qsd::detail {

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 14695981039346656037ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline void hash_u64(std::uint64_t& h, std::uint64_t v) { h = fnv1a64(&v, sizeof v, h); }

inline void hash_double(std::uint64_t& h, double v) {
    hash_u64(h, std::bit_cast<std::uint64_t>(v));
}

// Worker count for parallel loops. QSD_THREADS, when set, takes precedence
// over the detected core count; the result never exceeds `jobs`. The choice
// must never change numerical results, only wall time.
inline unsigned worker_count(std::size_t jobs) {
    if (jobs <= 1) return 1;
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("QSD_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) n = static_cast<unsigned>(v);
    }
    if (static_cast<std::size_t>(n) > jobs) n = static_cast<unsigned>(jobs);
    return n < 1 ? 1 : n;
}

}  // namespace qsd::detail
