#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace nluforge {

/// FNV-1a over bytes; stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Deterministic generator with platform-independent draws. The standard
/// distributions are implementation-defined, so all draws are computed here
/// from the raw mt19937_64 stream, which the standard pins exactly.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for one named decision about one item.
    static SeededRng stream(std::uint64_t seed, std::string_view item, std::string_view decision);

    std::uint64_t next() { return engine_(); }
    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform real in [0, 1).
    double uniform();
    bool bernoulli(double p) { return uniform() < p; }
    /// Index drawn proportionally to non-negative weights (sum > 0).
    std::size_t weighted(std::span<const double> weights);

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

    /// k distinct indices from [0, n), in draw order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

  private:
    std::mt19937_64 engine_;
};

}  // namespace nluforge
