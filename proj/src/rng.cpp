#include "engage/rng.hpp"

#include <algorithm>
#include <numeric>

namespace engage {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

Rng Rng::child(std::string_view name, std::uint64_t index) const {
    std::uint64_t mix = state_ ^ fnv1a64(name);
    mix ^= 0x9e3779b97f4a7c15ULL + index + (mix << 6) + (mix >> 2);
    return Rng(mix);
}

}  // namespace engage
