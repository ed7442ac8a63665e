#include "spillover/rng.hpp"

#include <cmath>
#include <numbers>

namespace spillover {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline double to_open01(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xD6E8FEB86659FD93ull));
}

std::array<std::uint32_t, 4> random_block(std::uint64_t seed, std::uint64_t unit, Tag tag,
                                          std::uint32_t index) {
    return philox4x32({static_cast<std::uint32_t>(unit), static_cast<std::uint32_t>(unit >> 32),
                       static_cast<std::uint32_t>(tag), index},
                      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
}

double uniform01(std::uint64_t seed, std::uint64_t unit, Tag tag, std::uint32_t index) {
    const auto w = random_block(seed, unit, tag, index);
    return to_open01(w[0], w[1]);
}

double standard_normal(std::uint64_t seed, std::uint64_t unit, Tag tag, std::uint32_t index) {
    const auto w = random_block(seed, unit, tag, index);
    const double u1 = to_open01(w[0], w[1]);
    const double u2 = to_open01(w[2], w[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Stream::integer(int lo, int hi) {
    const double span = static_cast<double>(hi - lo + 1);
    int v = lo + static_cast<int>(uniform() * span);
    return v > hi ? hi : v;
}

}  // namespace spillover
