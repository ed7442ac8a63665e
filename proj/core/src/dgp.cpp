#include "spillover/dgp.hpp"

#include <cmath>

#include "spillover/errors.hpp"
#include "spillover/rng.hpp"

namespace spillover {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_prob(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw SpilloverError(ErrorCode::InvalidConfig, std::string(name) + " must lie in [0, 1]");
}

}  // namespace

PairDataset gen_pair(const PairDgpConfig& cfg) {
    if (cfg.n < 4) throw SpilloverError(ErrorCode::InvalidConfig, "pair DGP needs n >= 4");
    check_prob(cfg.p_own, "p_own");
    check_prob(cfg.p_partner, "p_partner");
    if (cfg.exogenous_link_prob) check_prob(*cfg.exogenous_link_prob, "exogenous_link_prob");
    const auto s = cfg.seed;
    PairDataset ds;
    ds.y.resize(cfg.n);
    ds.d.resize(cfg.n);
    ds.d_j.resize(cfg.n);
    ds.a.emplace(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        ds.d[i] = bernoulli(s, i, Tag::OwnTreatment, 0, cfg.p_own);
        ds.d_j[i] = bernoulli(s, i, Tag::PeerTreatment, 0, cfg.p_partner);
        const double ui = -1.0 + 2.0 * uniform01(s, i, Tag::OwnLatent, 0);
        const double uj = -1.0 + 2.0 * uniform01(s, i, Tag::PeerLatent, 0);
        (*ds.a)[i] = cfg.exogenous_link_prob ? bernoulli(s, i, Tag::Link, 0, *cfg.exogenous_link_prob)
                                             : logistic(ui + uj) > 0.5;
        const double xi = 1.0 + standard_normal(s, i, Tag::Noise, 0);
        ds.y[i] = xi + ui;
    }
    return ds;
}

PairDataset gen_homogeneous_pair(const HomogeneousPairConfig& cfg) {
    if (cfg.n < 4) throw SpilloverError(ErrorCode::InvalidConfig, "pair DGP needs n >= 4");
    check_prob(cfg.p_link, "p_link");
    const auto s = cfg.seed;
    PairDataset ds;
    ds.y.resize(cfg.n);
    ds.d.resize(cfg.n);
    ds.d_j.resize(cfg.n);
    ds.a.emplace(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        ds.d[i] = bernoulli(s, i, Tag::OwnTreatment, 0, cfg.p_own);
        ds.d_j[i] = bernoulli(s, i, Tag::PeerTreatment, 0, cfg.p_partner);
        (*ds.a)[i] = bernoulli(s, i, Tag::Link, 0, cfg.p_link);
        const int sp = spillover_pair((*ds.a)[i], ds.d_j[i]);
        ds.y[i] = cfg.b0 + cfg.bd * ds.d[i] + cfg.bs * sp + standard_normal(s, i, Tag::Noise, 0);
    }
    return ds;
}

NetworkDataset gen_network(const NetworkDgpConfig& cfg) {
    if (cfg.n < 8 || cfg.n % 4 != 0)
        throw SpilloverError(ErrorCode::InvalidConfig, "network DGP needs n >= 8 and divisible by 4");
    if (cfg.h != 0 && cfg.h != 1) throw SpilloverError(ErrorCode::InvalidConfig, "h must be 0 or 1");
    if (!(cfg.c > 0.0 && cfg.c < 1.0)) throw SpilloverError(ErrorCode::InvalidConfig, "c must lie in (0, 1)");

    static constexpr int kSizes[4] = {1, 3, 6, 9};
    const auto s = cfg.seed;
    const std::size_t quarter = cfg.n / 4;

    NetworkDataset ds;
    ds.y.resize(cfg.n);
    ds.d.resize(cfg.n);
    ds.n_peers.resize(cfg.n);
    ds.r.resize(cfg.n);
    ds.d_peers.emplace(cfg.n);
    ds.a_peers.emplace(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const int n_i = kSizes[i / quarter];
        const double ui = standard_normal(s, i, Tag::OwnLatent, 0);
        std::vector<Binary> dp(n_i), ap(n_i);
        int r = 0;
        for (int j = 0; j < n_i; ++j) {
            dp[j] = bernoulli(s, i, Tag::PeerTreatment, j, 0.5);
            const double uj = standard_normal(s, i, Tag::PeerLatent, j);
            ap[j] = logistic(ui + uj) > cfg.c;
            r += dp[j] * ap[j];
        }
        const int d = bernoulli(s, i, Tag::OwnTreatment, 0, 0.5);
        double b0 = (n_i <= 3) ? 3.0 : 1.0;
        double bd = 0.0;
        if (cfg.unit_coefficient_noise) {
            b0 += standard_normal(s, i, Tag::Intercept, 0);
            bd = 2.0 * standard_normal(s, i, Tag::DirectSlope, 0);
        }
        double bs = 0.0;
        if (cfg.h == 1) {
            bs = 2.0 * uniform01(s, i, Tag::SpillSlopeBase, 0);
            if (ap[0]) bs += uniform01(s, i, Tag::SpillSlopeLinked, 0);
        }
        ds.y[i] = b0 + bd * d + bs * r + ui;
        ds.d[i] = static_cast<Binary>(d);
        ds.n_peers[i] = n_i;
        ds.r[i] = r;
        (*ds.d_peers)[i] = std::move(dp);
        (*ds.a_peers)[i] = std::move(ap);
    }
    ds.validate();
    return ds;
}

}  // namespace spillover
