#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tidp {

/// Derives an independent stream seed from a master seed. SplitMix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random source. Wraps mt19937_64 but implements the
/// distributions by hand so sequences do not depend on the standard library
/// implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % span);
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit && limit != 0);
        return lo + static_cast<std::int64_t>(v % span);
    }

    /// Standard normal via Box-Muller. Two uniforms consumed per call, no
    /// cached spare, so the stream position stays predictable.
    double normal(double mean = 0.0, double sd = 1.0) {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(2.0 * M_PI * u2);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Independent child stream.
    Rng fork(std::uint64_t stream) { return Rng(derive_seed(gen_(), stream)); }

private:
    std::mt19937_64 gen_;
};

}  // namespace tidp
