#pragma once

#include <cstdint>
#include <optional>

#include "spillover/model.hpp"

namespace spillover {

struct PairDgpConfig {
    std::size_t n = 1000;
    double p_own = 0.5;
    double p_partner = 0.5;
    std::uint64_t seed = 0;
    // When set, A ~ Bernoulli(value) independently of U; the outcome is unchanged.
    std::optional<double> exogenous_link_prob;
};

// D, D_j ~ Bernoulli; U_i, U_j ~ Uniform(-1, 1); A = 1{logistic(U_i + U_j) > 0.5};
// Y = xi + U_i with xi ~ Normal(1, 1).
PairDataset gen_pair(const PairDgpConfig& config);

// Homogeneous-effect pair model: A ~ Bernoulli(p_link) independent of everything,
// Y = b0 + bd D + bs A D_j + Normal(0, 1).
struct HomogeneousPairConfig {
    std::size_t n = 5000;
    double p_link = 0.5;
    double p_own = 0.5;
    double p_partner = 0.5;
    double b0 = 1.0, bd = 2.0, bs = 1.5;
    std::uint64_t seed = 0;
};
PairDataset gen_homogeneous_pair(const HomogeneousPairConfig& config);

struct NetworkDgpConfig {
    std::size_t n = 1600;
    int h = 0;
    double c = 0.5;
    std::uint64_t seed = 0;
    // Per-unit Normal(0, 1) intercept noise and Normal(0, 4) direct-effect slope.
    // When false both are dropped, leaving the intercept at its block value and beta_d = 0.
    bool unit_coefficient_noise = true;
};

// Peer-group sizes in quarters {1, 3, 6, 9}; links A_j = 1{logistic(U_i + U_j) > c} with one
// U_i per focal unit shared by all its links and an independent U_j per link; the focal
// outcome noise is U_i.
NetworkDataset gen_network(const NetworkDgpConfig& config);

inline double true_late(const NetworkDgpConfig& config) { return 1.5 * config.h; }

}  // namespace spillover
