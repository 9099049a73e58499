#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>

namespace weakfactor {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The 128-bit counter is split into a 64-bit block index (low words) and a
// 64-bit stream id (high words); the 64-bit key carries the master seed. Every
// (seed, stream) pair is therefore an independent, reproducible sequence and
// no state needs to be shared between replications.
class philox4x32 {
public:
    using result_type = std::uint32_t;
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    philox4x32(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_{0u, 0u, static_cast<std::uint32_t>(stream_id),
                   static_cast<std::uint32_t>(stream_id >> 32)} {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (position_ == 4) {
            buffer_ = block(counter_, key_);
            // 64-bit block index lives in counter words 0 and 1.
            if (++counter_[0] == 0) ++counter_[1];
            position_ = 0;
        }
        return buffer_[position_++];
    }

    // The raw bijection, exposed for known-answer tests.
    static counter_type block(counter_type ctr, key_type key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    key_type key_;
    counter_type counter_;
    counter_type buffer_{};
    int position_ = 4;
};

// The variate interface every sampler in this library is written against.
template <class R>
concept random_source = requires(R& r, std::uint64_t bound) {
    { r.uniform() } -> std::same_as<double>;
    { r.normal() } -> std::same_as<double>;
    { r.exponential() } -> std::same_as<double>;
    { r.below(bound) } -> std::same_as<std::uint64_t>;
};

// One independent random stream: Philox bits plus the handful of base
// variates the samplers need. All transformations are spelled out here so
// that output is identical across standard library implementations.
class random_stream {
public:
    random_stream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
        : engine_(master_seed, stream_id) {}

    std::uint64_t next_u64() noexcept {
        const std::uint64_t lo = engine_();
        const std::uint64_t hi = engine_();
        return (hi << 32) | lo;
    }

    // Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal, Marsaglia polar method.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

    // Exp(1).
    double exponential() noexcept { return -std::log(uniform()); }

    // Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    philox4x32 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

static_assert(random_source<random_stream>);

// Stream id for replication `index`; `attempt` > 0 selects the fresh
// sub-stream used when a replication is resampled.
constexpr std::uint64_t replication_stream(std::uint64_t index, std::uint64_t attempt = 0) noexcept {
    return (attempt << 48) ^ index;
}

}  // namespace weakfactor
