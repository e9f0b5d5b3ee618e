#pragma once

// Counter-based random streams. A stream is a 64-bit key; draw i of the
// stream is splitmix64_finalize(key + (i + 1) * golden). Uniforms take the top
// 53 bits; normals use the Marsaglia polar method on consecutive uniforms.
// Nothing here depends on the standard library's implementation-defined
// distributions, so identical seeds give identical draws everywhere.

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace ermip {

inline constexpr std::string_view kRngAlgorithm = "splitmix64-counter/marsaglia-polar";

constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-sensitive 64-bit mix of the given words; used to derive substream
/// keys from (base seed, replication, n, index hash, ...).
constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t w : words) h = splitmix64_finalize(h ^ splitmix64_finalize(w + 0x9e3779b97f4a7c15ULL));
    return h;
}

class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        ++counter_;
        return splitmix64_finalize(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() {
        double u = 0.0;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    /// Standard normal, Marsaglia polar method with a cached second variate.
    double normal();

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ermip
