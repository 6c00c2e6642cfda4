#include "mcascade/rng.hpp"

#include <cmath>
#include <numbers>

namespace mcascade {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

// General streams set the top counter word to this tag; node levels are
// always smaller.
constexpr std::uint32_t kGeneralTag = 0xFFFFFFFFu;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMulA, ctr[0], lo0, hi0);
        mulhilo(kMulB, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

RandomStream::RandomStream(std::array<std::uint32_t, 2> key, std::uint32_t c0, std::uint32_t c1,
                           std::uint32_t c2) noexcept
    : key_(key), stream_{c0, c1, c2} {}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t id) noexcept
    : RandomStream({static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
                   static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32),
                   kGeneralTag) {}

RandomStream RandomStream::for_node(std::uint64_t seed, int level, std::uint64_t index) noexcept {
    return RandomStream({static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
                        static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                        static_cast<std::uint32_t>(level));
}

std::uint32_t RandomStream::next_u32() noexcept {
    if (buffered_ == 0) {
        buffer_ = philox4x32({stream_[0], stream_[1], stream_[2], block_++}, key_);
        buffered_ = 4;
    }
    ++consumed_;
    return buffer_[static_cast<std::size_t>(4 - buffered_--)];
}

std::uint64_t RandomStream::next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double RandomStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace mcascade
