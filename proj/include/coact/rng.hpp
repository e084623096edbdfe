#pragma once
// Seeded 64-bit generator used everywhere the toolkit needs randomness
// (k-means init, splits, synthetic corpora). splitmix64 keeps runs
// reproducible across platforms, unlike std distributions whose output is
// implementation-defined.

#include <cstdint>
#include <cmath>
#include <vector>

namespace coact {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound) without modulo bias.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Knuth product method; fine for the small means used here.
    int next_poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_double();
        } while (p > limit);
        return k - 1;
    }

    // Run length >= 1 with continuation probability `continue_p`.
    int next_geometric_run(double continue_p) {
        int len = 1;
        while (next_double() < continue_p) ++len;
        return len;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Stable derivation of per-stream seeds (e.g. one per synthetic user).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
        return g.next_u64();
    }

  private:
    std::uint64_t state_;
};

}  // namespace coact
