#pragma once

// Counter-based normal generator with a fixed, platform-independent stream.
//
//   block i of stream s under seed k:
//     Philox4x32-10(counter = {lo(i), hi(i), lo(s), hi(s)}, key = {lo(k), hi(k)})
//       -> words x0..x3
//     a = x0 | x1 << 32,  b = x2 | x3 << 32
//     u1 = ((a >> 11) + 1) * 2^-53     in (0, 1]
//     u2 = (b >> 11) * 2^-53           in [0, 1)
//     n0 = sqrt(-2 ln u1) cos(2 pi u2),  n1 = sqrt(-2 ln u1) sin(2 pi u2)
//
// Normals are emitted n0, n1, then the next block.

#include <array>
#include <cstdint>

namespace pglab {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    double next();

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace pglab
