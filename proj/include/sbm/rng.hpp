#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sbm {

// Philox4x32-10 counter-based generator. Each (seed, path index) pair
// addresses an independent stream: the 64-bit key carries the seed, the
// upper counter words carry the path index and the lower words a running
// draw counter. Streams are collision-free by construction, so batch
// results do not depend on how paths are assigned to workers.
class Philox {
 public:
    Philox(std::uint64_t seed, std::uint64_t stream)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          ctr2_(static_cast<std::uint32_t>(stream)),
          ctr3_(static_cast<std::uint32_t>(stream >> 32)) {}

    // Raw 4x32 block for a given draw counter (used by the known-answer test).
    static std::array<std::uint32_t, 4> block(std::uint32_t c0, std::uint32_t c1,
                                              std::uint32_t c2, std::uint32_t c3,
                                              std::uint32_t k0, std::uint32_t k1) {
        std::uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * x0;
            const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * x2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t y0 = hi1 ^ x1 ^ k0;
            const std::uint32_t y1 = lo1;
            const std::uint32_t y2 = hi0 ^ x3 ^ k1;
            const std::uint32_t y3 = lo0;
            x0 = y0; x1 = y1; x2 = y2; x3 = y3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {x0, x1, x2, x3};
    }

    std::uint32_t next_u32() {
        if (idx_ == 4) refill();
        return buf_[idx_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on the open interval (0,1); never returns an endpoint.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Standard normal via the Marsaglia polar method; pairs are cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        for (;;) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s >= 1.0 || s == 0.0) continue;
            const double m = std::sqrt(-2.0 * std::log(s) / s);
            spare_ = v * m;
            have_spare_ = true;
            return u * m;
        }
    }

 private:
    void refill() {
        const auto b = block(static_cast<std::uint32_t>(draw_),
                             static_cast<std::uint32_t>(draw_ >> 32),
                             ctr2_, ctr3_, key0_, key1_);
        buf_ = b;
        ++draw_;
        idx_ = 0;
    }

    std::uint32_t key0_, key1_, ctr2_, ctr3_;
    std::uint64_t draw_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int idx_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace sbm
