#include "qhlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace qhlab {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter c, Key k) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeylA;
            k[1] += kWeylB;
        }
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMulA, c[0], lo0, hi0);
        mulhilo(kMulB, c[2], lo1, hi1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

void NormalStream::refill() {
    Philox4x32::Counter ctr{static_cast<std::uint32_t>(draw_), static_cast<std::uint32_t>(draw_ >> 32),
                            static_cast<std::uint32_t>(stream_),
                            static_cast<std::uint32_t>(stream_ >> 32)};
    words_ = Philox4x32::block(ctr, key_);
    ++draw_;
    word_pos_ = 0;
}

double NormalStream::next_uniform() {
    if (word_pos_ > 2) refill();
    double u = to_open_unit(words_[word_pos_], words_[word_pos_ + 1]);
    word_pos_ += 2;
    return u;
}

double NormalStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

void NormalStream::fill(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = next();
}

}  // namespace qhlab
