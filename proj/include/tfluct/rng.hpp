#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tfluct {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
/// pure function of (key, counter), so any stream position can be reached
/// without touching the others.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t key)
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)}
    {}

    Counter operator()(Counter ctr) const
    {
        std::array<std::uint32_t, 2> k = key_;
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, k);
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static Counter single_round(const Counter& c, const std::array<std::uint32_t, 2>& k)
    {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }

    std::array<std::uint32_t, 2> key_;
};

/// Uniform double in (0, 1] from two 32-bit words (53 random bits).
inline double to_unit_open_closed(std::uint32_t hi, std::uint32_t lo)
{
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

/// Sequential view over one Philox substream: counter = (index lo, index hi,
/// stream lo, stream hi). Streams with different ids never overlap.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream_id) : gen_(seed), stream_(stream_id) {}

    /// Uniform in (0, 1].
    double uniform()
    {
        if (pos_ >= 4) {
            refill();
        }
        const double u = to_unit_open_closed(buf_[pos_], buf_[pos_ + 1]);
        pos_ += 2;
        return u;
    }

    /// Uniform in [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    void refill()
    {
        buf_ = gen_({static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
                     static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)});
        ++index_;
        pos_ = 0;
    }

    Philox4x32 gen_;
    std::uint64_t stream_;
    std::uint64_t index_ = 0;
    Philox4x32::Counter buf_{};
    int pos_ = 4;
};

} // namespace tfluct
