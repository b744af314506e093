#pragma once

// Counter-based random streams. Every draw is a pure function of
// (master_seed, path_index, step_index, position within the step), so paths
// can be simulated in any order and on any number of threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ubmlab {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter bijection(Counter ctr, Key key) {
        constexpr std::uint32_t kMul0 = 0xD2511F53u;
        constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
        constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Gaussian stream keyed by the master seed and a (path, step) counter pair.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t path_index, std::uint64_t step_index)
        : key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)},
          path_index_(path_index),
          step_index_(step_index) {}

    std::uint64_t master_seed() const { return (static_cast<std::uint64_t>(key_[1]) << 32) | key_[0]; }
    std::uint64_t path_index() const { return path_index_; }
    std::uint64_t step_index() const { return step_index_; }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() {
        if (buffered_words_ < 2) refill();
        const std::uint32_t hi = words_[4 - buffered_words_];
        const std::uint32_t lo = words_[5 - buffered_words_];
        buffered_words_ -= 2;
        const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; draws come in pairs.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    void refill() {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(path_index_), static_cast<std::uint32_t>(path_index_ >> 32),
                                      static_cast<std::uint32_t>(step_index_), block_++};
        words_ = Philox4x32::bijection(ctr, key_);
        buffered_words_ = 4;
    }

    Philox4x32::Key key_;
    std::uint64_t path_index_;
    std::uint64_t step_index_;
    std::uint32_t block_ = 0;
    Philox4x32::Counter words_{};
    int buffered_words_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ubmlab
