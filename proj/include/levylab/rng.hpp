#pragma once

#include <cmath>
#include <cstdint>

namespace levylab {

// Splittable counter-based RNG.  A stream is keyed by (seed, stream id);
// draws are a splitmix64 walk from the mixed key, so path- or
// sample-level parallelism reproduces bit-identically regardless of
// scheduling.  Not cryptographic.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0xbf58476d1ce4e5b9ULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // uniform on (0,1)
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double c = std::cos(2.0 * M_PI * u2);
        double s = std::sin(2.0 * M_PI * u2);
        spare_ = r * s;
        have_spare_ = true;
        return r * c;
    }

    double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

    // Exact Poisson sampling; large means are split as sums of
    // independent halves so the multiplication chain never underflows.
    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean > 30.0) {
            double half = mean / 2.0;
            return poisson(half) + poisson(mean - half);
        }
        double l = std::exp(-mean);
        long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > l);
        return k - 1;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stable 64-bit combiner for deriving sub-stream ids from small tuples.
inline std::uint64_t stream_id(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                               std::uint64_t d = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t v : {a, b, c, d}) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

} // namespace levylab
