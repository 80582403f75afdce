#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace berkson {

/// Counter-based generator (Philox4x32 with 10 rounds).
///
/// Every variate is a pure function of (seed, stream, index), so draws can be
/// produced in any order or on any thread and still be bit-identical. The
/// name and version are part of the reproducibility contract: changing the
/// mapping from counters to variates requires bumping `version`.
class CounterRng {
public:
    static constexpr std::string_view name = "philox4x32-10";
    static constexpr int version = 1;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Raw 128-bit block for counter `index`.
    std::array<std::uint32_t, 4> block(std::uint64_t index) const noexcept;

    /// Uniform on the open interval (0, 1); `lane` selects one of the two
    /// 53-bit values carried by a block.
    double uniform(std::uint64_t index, unsigned lane) const noexcept;

    /// Pair of independent standard normals (Box-Muller on one block).
    std::array<double, 2> normal_pair(std::uint64_t index) const noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

}  // namespace berkson
