#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <utility>

namespace catbbm {

/// Philox4x64-10 block cipher (Salmon et al., SC'11): a bijection of a
/// 256-bit counter under a 128-bit key. Output matches numpy's Philox for
/// the same (counter, key).
struct Philox4x64 {
    using Counter = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static Counter encrypt(Counter ctr, Key key);
};

/// Reproducible random stream. The key is (seed, substream_id) and the
/// counter walks the blocks, so two streams with different substream ids
/// are outputs of two different keyed permutations and never overlap.
///
/// Satisfies UniformRandomBitGenerator.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t substream_id)
        : key_{seed, substream_id} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (lane_ == 4) refill();
        return buffer_[lane_++];
    }

    /// Uniform on the open interval (0, 1); 53 random bits, never 0 or 1.
    double uniform_open() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on (a, b), a < b.
    double uniform_open(double a, double b) { return a + (b - a) * uniform_open(); }

    /// Uniform on (0, 1) from the top 53 bits of one word, plus a fair sign
    /// from its lowest bit.
    std::pair<double, double> uniform_open_and_sign() {
        const result_type w = (*this)();
        return {(static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53, (w & 1u) ? -1.0 : 1.0};
    }

    /// Fair coin; +1.0 or -1.0.
    double sign() { return ((*this)() >> 63) ? -1.0 : 1.0; }

    std::uint64_t seed() const { return key_[0]; }
    std::uint64_t substream_id() const { return key_[1]; }
    /// Number of 64-bit words consumed so far.
    std::uint64_t position() const { return blocks_ * 4 - (4 - lane_); }

    friend bool operator==(const RngStream& a, const RngStream& b) {
        return a.key_ == b.key_ && a.position() == b.position();
    }

private:
    void refill() {
        ++blocks_;
        buffer_ = Philox4x64::encrypt({blocks_, 0, 0, 0}, key_);
        lane_ = 0;
    }

    Philox4x64::Key key_;
    Philox4x64::Counter buffer_{};
    std::uint64_t blocks_ = 0;
    unsigned lane_ = 4;
};

}  // namespace catbbm
