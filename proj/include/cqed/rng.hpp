#pragma once

#include <array>
#include <cstdint>

namespace cqed {

/// Philox4x32-10 counter-based generator. A stream is fixed by (seed, stream
/// id); draws within a stream advance a 64-bit counter, so any trajectory's
/// random numbers are independent of which thread produced them.
class Philox {
public:
    Philox(std::uint64_t seed, std::uint64_t stream);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();
    std::uint32_t next_u32();

    /// Raw block function: 4 output words for a 128-bit counter and 64-bit key.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key);

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

}  // namespace cqed
