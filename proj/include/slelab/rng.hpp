#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace slelab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Per-stream seed derivation shared by Rng::stream and seed-taking APIs.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t sm =
        master_seed ^ (0x6a09e667f3bcc909ULL + stream_id * 0x9e3779b97f4a7c15ULL);
    return splitmix64(sm);
}

// xoshiro256++ with splitmix64 seeding.  All sampling code below is written
// out explicitly (no std::*_distribution) so that streams are reproducible
// bit for bit across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    // Stream for one replica of one experiment: hash (seed, stream id) so
    // replicas are independent regardless of how work is sharded.
    static Rng stream(std::uint64_t master_seed, std::uint64_t stream_id) {
        return Rng(derive_seed(master_seed, stream_id));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0,1): 53-bit mantissa, never exactly 0.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unbiased uniform integer in [0, k).
    std::uint64_t below(std::uint64_t k) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % k + 1) % k;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v > limit);
        return v % k;
    }

    bool coin() { return (next_u64() >> 63) != 0; }

    // Marsaglia polar method; caches the second variate.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u, v, q;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double f = std::sqrt(-2.0 * std::log(q) / q);
        cached_ = v * f;
        have_cached_ = true;
        return u * f;
    }

    // Marsaglia-Tsang, with the shape<1 boost.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

    // Noncentral chi-squared via the d>1 decomposition
    //   chi2'(d, lambda) = chi2(d-1) + (Z + sqrt(lambda))^2.
    double noncentral_chi_squared(double dof, double lambda) {
        const double z = normal() + std::sqrt(lambda);
        double x = z * z;
        if (dof > 1.0) x += chi_squared(dof - 1.0);
        return x;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace slelab
