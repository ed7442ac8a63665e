#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "spillover/csv_io.hpp"
#include "spillover/dgp.hpp"
#include "spillover/errors.hpp"
#include "spillover/estimators.hpp"

using namespace spillover;

namespace {

double mean_links(const NetworkDataset& ds) {
    double s = 0, k = 0;
    for (const auto& v : *ds.a_peers)
        for (Binary a : v) {
            s += a;
            k += 1;
        }
    return s / k;
}

}  // namespace

TEST_CASE("pair DGP marginals", "[dgp]") {
    PairDgpConfig cfg;
    cfg.n = 1000000;
    cfg.seed = 2023;
    const auto ds = gen_pair(cfg);
    double ma = 0, my = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        ma += (*ds.a)[i];
        my += ds.y[i];
    }
    ma /= ds.n();
    my /= ds.n();
    CHECK(std::abs(ma - 0.5) < 0.005);
    double cov = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) cov += ((*ds.a)[i] - ma) * (ds.y[i] - my);
    CHECK(cov > 0.0);
}

TEST_CASE("pair DGP reproduces the spurious-spillover pattern on one draw", "[dgp]") {
    PairDgpConfig cfg;
    cfg.n = 1000;
    cfg.seed = 2023;
    const auto ds = gen_pair(cfg);
    const auto d = to_double(ds.d), dj = to_double(ds.d_j), a = to_double(*ds.a), s = ds.spillover();
    const Fit ols = ols_fit(ds.y, d, s);
    const Fit tsls = tsls_fit(ds.y, d, s, dj);
    const Fit wls = wls_fit(ds.y, d, s, dj, a);
    CHECK(ols.beta_s() > 0.0);
    CHECK(ols.t_values[2] > 2.0);
    CHECK(std::abs(tsls.t_values[2]) < 2.0);
    CHECK(std::abs(wls.t_values[2]) < 2.0);
}

TEST_CASE("network DGP structure", "[dgp]") {
    NetworkDgpConfig cfg;
    cfg.n = 400;
    cfg.h = 1;
    cfg.c = 0.3;
    cfg.seed = 1;
    const auto ds = gen_network(cfg);
    CHECK(ds.n_peers[0] == 1);
    CHECK(ds.n_peers[100] == 3);
    CHECK(ds.n_peers[200] == 6);
    CHECK(ds.n_peers[399] == 9);

    std::ostringstream a, b;
    write_network_csv(a, ds);
    write_network_csv(b, gen_network(cfg));
    CHECK(a.str() == b.str());
    cfg.seed = 2;
    std::ostringstream c;
    write_network_csv(c, gen_network(cfg));
    CHECK(a.str() != c.str());
}

TEST_CASE("effect switch: h = 0 removes every exposure effect", "[dgp]") {
    NetworkDgpConfig cfg;
    cfg.n = 800;
    cfg.c = 0.5;
    cfg.seed = 4;
    const auto off = gen_network(cfg);
    cfg.h = 1;
    const auto on = gen_network(cfg);
    for (std::size_t i = 0; i < off.n(); ++i) {
        REQUIRE(off.r[i] == on.r[i]);
        if (off.r[i] == 0)
            CHECK(on.y[i] == off.y[i]);
        else
            CHECK(on.y[i] >= off.y[i]);
    }
}

TEST_CASE("link probability decreases in the threshold", "[dgp]") {
    NetworkDgpConfig cfg;
    cfg.n = 100000;
    cfg.seed = 6;
    cfg.c = 0.3;
    const double low = mean_links(gen_network(cfg));
    cfg.c = 0.6;
    const double high = mean_links(gen_network(cfg));
    CHECK(low > high);
}

TEST_CASE("large-sample WLS recovers the complier effect 1.5", "[dgp]") {
    NetworkDgpConfig cfg;
    cfg.n = 200000;
    cfg.h = 1;
    cfg.c = 0.5;
    cfg.seed = 10;
    const auto ds = gen_network(cfg);
    const auto m = ds.exposures(ExposureMap::Identity);
    const auto d = to_double(ds.d), z = to_double(ds.d1), a1 = to_double(*ds.a1);
    const Fit w = wls_fit(ds.y, d, m, z, a1, SeKind::Robust);
    const Fit t = tsls_fit(ds.y, d, m, z, SeKind::Robust);
    CHECK(std::abs(w.beta_s() - 1.5) < 4 * w.se_robust[2]);
    CHECK(std::abs(t.beta_s() - 1.5) < 4 * t.se_robust[2]);
}

TEST_CASE("DGP configuration errors", "[dgp]") {
    NetworkDgpConfig cfg;
    cfg.n = 10;
    CHECK_THROWS_AS(gen_network(cfg), SpilloverError);
    cfg.n = 16;
    cfg.c = 1.0;
    CHECK_THROWS_AS(gen_network(cfg), SpilloverError);
    PairDgpConfig p;
    p.n = 3;
    CHECK_THROWS_AS(gen_pair(p), SpilloverError);
}
