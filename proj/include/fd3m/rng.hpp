#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fd3m {

// Deterministic random streams. The mt19937_64 engine is fully specified by
// the standard; the uniform/normal draws below are hand-rolled so that a
// (seed, stream) pair produces the same sequence on every platform and
// compiler. Streams are derived from a run seed plus a purpose tag and an
// index (e.g. one collocation stream per subdomain), so workers never share
// generator state.
class RngStream {
public:
    RngStream() : engine_(0) {}
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t tag_hash(std::string_view tag) {
        std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    /// Independent stream for (seed, tag, index).
    static RngStream derive(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
        return RngStream(mix(mix(seed ^ tag_hash(tag)) + index));
    }

    /// Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Marsaglia polar; one cached spare draw.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fd3m
