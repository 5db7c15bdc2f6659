#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace symreg {

inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Deterministic random stream. Every draw is hand-rolled on top of
/// mt19937_64 so that results do not depend on the standard library's
/// distribution implementations; two streams built from the same seed
/// and tags produce identical sequences on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Derive an independent stream from a master seed and a tag path,
    /// e.g. (generation, island, offspring index).
    static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
    {
        std::uint64_t h = mix64(seed);
        for (auto t : tags)
            h = mix64(h ^ (t + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
        return Rng(h);
    }

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t index(std::size_t n)
    {
        return std::size_t((static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

    bool coin(double p = 0.5) { return uniform() < p; }

    /// Weighted pick; entries with nonpositive weight are never chosen.
    /// Returns w.size() if the total mass is zero.
    std::size_t weighted(std::span<const double> w)
    {
        double total = 0.0;
        for (double x : w)
            if (x > 0.0) total += x;
        if (total <= 0.0) return w.size();
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] <= 0.0) continue;
            acc += w[i];
            if (u < acc) return i;
        }
        for (std::size_t i = w.size(); i-- > 0;)
            if (w[i] > 0.0) return i;
        return w.size();
    }

private:
    std::mt19937_64 gen_;
};

} // namespace symreg
