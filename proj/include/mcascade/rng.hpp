#pragma once

#include <array>
#include <cstdint>

namespace mcascade {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Stateless: the output is a pure function of
/// (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Sequential stream over a Philox counter space. The 64-bit seed is the
/// key; the first three counter words identify the stream and the fourth
/// is the block index, so streams with different identifiers never share a
/// block.
class RandomStream {
public:
    /// General-purpose stream `id` under `seed`.
    RandomStream(std::uint64_t seed, std::uint64_t id) noexcept;

    /// Stream attached to a cascade node (tree level, word index). Node
    /// streams occupy a disjoint part of the counter space.
    static RandomStream for_node(std::uint64_t seed, int level, std::uint64_t index) noexcept;

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal (Box-Muller, one output per two uniforms).
    double normal() noexcept;

    /// Number of 32-bit words consumed so far.
    std::uint64_t consumed() const noexcept { return consumed_; }

private:
    RandomStream(std::array<std::uint32_t, 2> key, std::uint32_t c0, std::uint32_t c1,
                 std::uint32_t c2) noexcept;

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 3> stream_;
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
    std::uint64_t consumed_ = 0;
};

}  // namespace mcascade
