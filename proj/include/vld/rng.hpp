#pragma once

#include <cstdint>
#include <map>
#include <string_view>

namespace vld {

// Deterministic splittable RNG (splitmix64). All randomness in the project
// flows through this so that runs are reproducible across platforms; the
// standard <random> distributions are implementation-defined and would break
// byte-identical reruns.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // inclusive bounds
    int uniform_int(int lo, int hi) {
        if (hi <= lo) return lo;
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    bool bernoulli(double p) { return next_double() < p; }

    // weighted draw over integer keys; returns 0 on an empty/zero-weight map
    int weighted_int(const std::map<int, double>& weights) {
        double total = 0.0;
        for (const auto& [k, w] : weights) total += w > 0 ? w : 0.0;
        if (total <= 0.0) return 0;
        double r = next_double() * total;
        for (const auto& [k, w] : weights) {
            if (w <= 0) continue;
            r -= w;
            if (r < 0) return k;
        }
        return weights.rbegin()->first;
    }

    // Derive a child seed for a subsystem: root xor FNV-1a(tag), remixed.
    // Used so that one root seed drives world gen, tasks, noise, ... without
    // the streams colliding.
    static std::uint64_t mix(std::uint64_t seed, std::string_view tag) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        Rng r(seed ^ h);
        return r.next_u64();
    }

private:
    std::uint64_t state_;
};

} // namespace vld
