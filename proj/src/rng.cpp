#include "nluforge/rng.hpp"

#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace nluforge {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
    std::uint64_t hash = basis;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

namespace {
// splitmix64 finalizer; spreads nearby FNV values before seeding.
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace

SeededRng SeededRng::stream(std::uint64_t seed, std::string_view item, std::string_view decision) {
    std::uint64_t h = fnv1a64(item, mix(seed));
    h = fnv1a64("\x1f", h);
    h = fnv1a64(decision, h);
    return SeededRng(mix(h));
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("SeededRng::below: zero bound");
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t value;
    do {
        value = engine_();
    } while (value >= limit);
    return value % bound;
}

double SeededRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t SeededRng::weighted(std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("SeededRng::weighted: weights sum to zero");
    double point = uniform() * total;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_positive = i;
        if (point < weights[i]) return i;
        point -= weights[i];
    }
    return last_positive;
}

std::vector<std::size_t> SeededRng::sample_indices(std::size_t n, std::size_t k) {
    if (k > n) k = n;
    // Partial Fisher-Yates over a sparse permutation.
    std::vector<std::size_t> out;
    out.reserve(k);
    std::unordered_map<std::size_t, std::size_t> swapped;
    auto at = [&](std::size_t i) {
        auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + below(n - i);
        std::size_t vi = at(i);
        std::size_t vj = at(j);
        out.push_back(vj);
        swapped[j] = vi;
        swapped[i] = vj;
    }
    return out;
}

}  // namespace nluforge
