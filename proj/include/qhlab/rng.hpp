#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace qhlab {

// Philox4x32-10 block function (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;
    static Counter block(Counter ctr, Key key);
};

struct RngSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

// Standard normals for one (seed, stream) pair. Key = seed, counter = (draw, stream);
// each Philox block gives two uniforms of 53 bits and Box-Muller turns them into two normals.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream);

    double next();
    void fill(double* out, std::size_t n);
    // Uniform in the open interval (0, 1).
    double next_uniform();

private:
    void refill();

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t draw_ = 0;
    std::array<std::uint32_t, 4> words_{};
    int word_pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qhlab
