#pragma once

#include <array>
#include <cstdint>

namespace spillover {

// Philox4x32-10 block function (Salmon et al. 2011).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

// Child seed for (master, a, b); used to give every (cell, replication) its own key.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

// Variable tags. Each random quantity is addressed by (seed, unit, tag, index),
// so draws never depend on iteration order.
enum class Tag : std::uint32_t {
    OwnTreatment = 1,
    PeerTreatment = 2,
    PeerLatent = 3,
    OwnLatent = 4,
    Intercept = 5,
    DirectSlope = 6,
    SpillSlopeBase = 7,
    SpillSlopeLinked = 8,
    Noise = 9,
    Link = 10,
    Redraw = 11,
    AtomChoice = 12,
    SpecDraw = 13,
};

std::array<std::uint32_t, 4> random_block(std::uint64_t seed, std::uint64_t unit, Tag tag,
                                          std::uint32_t index);

// Uniform on the open interval (0,1) from the top 53 bits of words 0 and 1.
double uniform01(std::uint64_t seed, std::uint64_t unit, Tag tag, std::uint32_t index);

// Box-Muller on the two 53-bit uniforms of one block, cosine branch.
double standard_normal(std::uint64_t seed, std::uint64_t unit, Tag tag, std::uint32_t index);

inline bool bernoulli(std::uint64_t seed, std::uint64_t unit, Tag tag, std::uint32_t index,
                      double p) {
    return uniform01(seed, unit, tag, index) < p;
}

// Sequential view over one (seed, unit, tag) address; index advances per call.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t unit, Tag tag) : seed_(seed), unit_(unit), tag_(tag) {}

    double uniform() { return uniform01(seed_, unit_, tag_, index_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return standard_normal(seed_, unit_, tag_, index_++); }
    bool bernoulli(double p) { return uniform() < p; }
    int integer(int lo, int hi);  // inclusive bounds

private:
    std::uint64_t seed_;
    std::uint64_t unit_;
    Tag tag_;
    std::uint32_t index_ = 0;
};

}  // namespace spillover
