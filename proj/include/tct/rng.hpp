#ifndef TCT_RNG_HPP
#define TCT_RNG_HPP

#include <cstdint>
#include <cmath>
#include <string_view>

namespace tct {

// Substream derivation: one root seed, substreams keyed by (purpose, index).
// splitmix64 is used as the mixing function so that replicate streams are
// independent of scheduling order.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose, std::uint64_t index) {
    std::uint64_t h = splitmix64(root ^ fnv1a(purpose));
    return splitmix64(h ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

// xoshiro256** with splitmix64 state expansion; fully specified, so streams
// are bit-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x += 0x9e3779b97f4a7c15ULL);
        have_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0,1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // standard normal via Marsaglia polar method
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    // uniform on [-sqrt(3), sqrt(3)]: zero mean, unit variance, kappa4 = -1.2
    double next_uniform_pm_sqrt3() {
        constexpr double root3 = 1.7320508075688772;
        return (2.0 * next_unit() - 1.0) * root3;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
    bool have_spare_;
    double spare_;
};

} // namespace tct

#endif
