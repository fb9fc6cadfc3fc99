#pragma once

#include <array>
#include <cstdint>

namespace csoc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A pure function of (counter, key): any block of output can be produced
/// independently, which is what makes per-path substreams reproducible under
/// any thread count.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr const char* name = "philox4x32-10";

    static Counter block(Counter ctr, Key key) noexcept;
};

/// Which consumer draws from a stream; keeps independent uses disjoint under one seed.
enum class StreamPurpose : std::uint32_t {
    Increments = 1,
    Paths = 2,
    Instances = 3,  ///< random test instances drawn by the scenario runner
};

/// Four independent standard normals for (seed, purpose, stream, index).
///
/// Uniforms take 53 bits from two 32-bit words; normals come from the
/// Box-Muller transform so the output does not depend on the standard
/// library's distribution implementation.
std::array<double, 4> standard_normals(std::uint64_t seed, StreamPurpose purpose,
                                       std::uint32_t stream, std::uint64_t index) noexcept;

}  // namespace csoc
