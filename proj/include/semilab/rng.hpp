#pragma once

#include <cmath>
#include <cstdint>

namespace semilab {

// Philox4x32-10 counter-based generator. Every draw is addressed by
// (seed, path, step, channel, k); no state is carried between draws, so
// parallel path simulation is reproducible under any worker partition.
class CounterRng {
public:
    explicit CounterRng(uint64_t seed) : key0_(static_cast<uint32_t>(seed)), key1_(static_cast<uint32_t>(seed >> 32)) {}

    struct Block {
        uint32_t v[4];
    };

    Block block(uint64_t path, uint32_t step, uint32_t channel, uint32_t k) const {
        uint32_t c0 = static_cast<uint32_t>(path);
        uint32_t c1 = static_cast<uint32_t>(path >> 32) ^ channel;
        uint32_t c2 = step;
        uint32_t c3 = k;
        uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            uint64_t p0 = static_cast<uint64_t>(kMul0) * c0;
            uint64_t p1 = static_cast<uint64_t>(kMul1) * c2;
            uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
            uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
            uint32_t n0 = hi1 ^ c1 ^ k0;
            uint32_t n1 = lo1;
            uint32_t n2 = hi0 ^ c3 ^ k1;
            uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return Block{{c0, c1, c2, c3}};
    }

    // Two uniforms in the open interval (0,1) from one block.
    void uniform2(uint64_t path, uint32_t step, uint32_t channel, uint32_t k, double& u1, double& u2) const {
        Block b = block(path, step, channel, k);
        u1 = to_unit(b.v[0], b.v[1]);
        u2 = to_unit(b.v[2], b.v[3]);
    }

    double uniform(uint64_t path, uint32_t step, uint32_t channel, uint32_t k) const {
        double u1, u2;
        uniform2(path, step, channel, k, u1, u2);
        return u1;
    }

    // Standard normal pair by Box-Muller.
    void gaussian2(uint64_t path, uint32_t step, uint32_t channel, uint32_t k, double& g1, double& g2) const {
        double u1, u2;
        uniform2(path, step, channel, k, u1, u2);
        double r = std::sqrt(-2.0 * std::log(u1));
        g1 = r * std::cos(2.0 * M_PI * u2);
        g2 = r * std::sin(2.0 * M_PI * u2);
    }

    double gaussian(uint64_t path, uint32_t step, uint32_t channel, uint32_t k) const {
        double g1, g2;
        gaussian2(path, step, channel, k, g1, g2);
        return g1;
    }

    // Poisson by inversion from a single uniform; adequate for the small
    // per-step means used here.
    int poisson(double mean, uint64_t path, uint32_t step, uint32_t channel, uint32_t k) const {
        if (mean <= 0.0) return 0;
        double u = uniform(path, step, channel, k);
        double p = std::exp(-mean);
        double cdf = p;
        int count = 0;
        while (u > cdf && count < 10000) {
            ++count;
            p *= mean / count;
            cdf += p;
        }
        return count;
    }

private:
    static constexpr uint32_t kMul0 = 0xD2511F53u;
    static constexpr uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

    static double to_unit(uint32_t a, uint32_t b) {
        uint64_t x = (static_cast<uint64_t>(a) << 32) | b;
        return (static_cast<double>(x >> 11) + 0.5) * (1.0 / 9007199254740992.0);  // 2^-53
    }

    uint32_t key0_, key1_;
};

}  // namespace semilab
