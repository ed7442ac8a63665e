#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "spillover/dgp.hpp"
#include "spillover/errors.hpp"
#include "spillover/randomization.hpp"

using namespace spillover;

namespace {

double loop_mean_diff(const std::vector<double>& y, const std::vector<double>& d1, const std::vector<double>* a1) {
    double t = 0, c = 0, nt = 0, nc = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (a1 && (*a1)[i] != 1.0) continue;
        if (d1[i] == 1.0) {
            t += y[i];
            nt += 1;
        }
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (a1 && (*a1)[i] != 1.0) continue;
        if (d1[i] == 0.0) {
            c += y[i];
            nc += 1;
        }
    }
    return t / nt - c / nc;
}

NetworkDataset network(std::size_t n, int h, std::uint64_t seed) {
    NetworkDgpConfig cfg;
    cfg.n = n;
    cfg.h = h;
    cfg.c = 0.5;
    cfg.seed = seed;
    return gen_network(cfg);
}

}  // namespace

TEST_CASE("ITT statistic", "[frt]") {
    CHECK(statistic_itt(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 1, 0, 0}) == -2.0);
    CHECK(statistic_itt(std::vector<double>{5, 5, 5, 5}, std::vector<double>{1, 0, 1, 0}) == 0.0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    std::bernoulli_distribution bd(0.4);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> y, d1, a1;
        for (int i = 0; i < 50; ++i) {
            y.push_back(nd(rng));
            d1.push_back(i < 2 ? i : bd(rng));
            a1.push_back(i < 4 ? 1.0 : bd(rng));
        }
        d1[2] = 0;
        d1[3] = 1;
        CHECK(std::abs(statistic_itt(y, d1) - loop_mean_diff(y, d1, nullptr)) <= 1e-14);
        CHECK(std::abs(statistic_ittc(y, d1, a1) - loop_mean_diff(y, d1, &a1)) <= 1e-14);
    }
}

TEST_CASE("ITTC statistic", "[frt]") {
    const std::vector<double> y{1, 4, 2, 8, 3}, d1{1, 0, 1, 0, 1}, ones(5, 1.0);
    CHECK(statistic_ittc(y, d1, ones) == statistic_itt(y, d1));
    const std::vector<double> a1{1, 0, 1, 0, 0};
    try {
        statistic_ittc(y, d1, a1);
        FAIL("expected DegenerateArm");
    } catch (const SpilloverError& e) {
        CHECK(e.code() == ErrorCode::DegenerateArm);
    }
}

TEST_CASE("randomization test is deterministic and schedule independent", "[frt]") {
    const auto ds = network(400, 1, 3);
    FrtOptions opts;
    opts.b = 200;
    opts.p1j = 0.5;
    opts.seed = 77;
    const Statistic all[4] = {Statistic::TSLS, Statistic::WLS, Statistic::ITT, Statistic::ITTC};
    const auto a = frt_multi(ds, all, opts);
    const auto b = frt_multi(ds, all, opts);
    opts.workers = 3;
    const auto c = frt_multi(ds, all, opts);
    for (int s = 0; s < 4; ++s) {
        CHECK(a[s].p_value == b[s].p_value);
        CHECK(a[s].p_value == c[s].p_value);
        CHECK(a[s].draws_summary.mean == c[s].draws_summary.mean);
        opts.workers = 1;
        const auto single = frt(ds, all[s], opts);
        CHECK(single.p_value == a[s].p_value);
        CHECK(single.observed == a[s].observed);
        CHECK(std::fmod(a[s].p_value * opts.b, 1.0) == 0.0);
    }
}

TEST_CASE("observed 2SLS and WLS statistics equal the estimator slopes", "[frt]") {
    const auto ds = network(400, 1, 5);
    const auto m = ds.exposures(ExposureMap::Identity);
    const auto d = to_double(ds.d), z = to_double(ds.d1), a1 = to_double(*ds.a1);
    FrtOptions opts;
    opts.b = 5;
    opts.p1j = 0.5;
    CHECK(frt(ds, Statistic::TSLS, opts).observed == tsls_fit(ds.y, d, m, z).beta_s());
    CHECK(frt(ds, Statistic::WLS, opts).observed == wls_fit(ds.y, d, m, z, a1).beta_s());
}

TEST_CASE("single redraw equal to the observed assignment gives p = 1", "[frt]") {
    NetworkDataset ds;
    ds.y = {0.3, 1.1, -0.4, 2.0};
    ds.d = {0, 1, 0, 1};
    ds.n_peers = {1, 1, 1, 1};
    ds.r = {0, 0, 0, 0};
    ds.d1 = {0, 0, 0, 0};
    int found = 0;
    for (std::uint64_t seed = 0; seed < 400 && found < 3; ++seed) {
        std::vector<Binary> draw(4);
        for (std::size_t i = 0; i < 4; ++i) draw[i] = frt_redraw(seed, 0, i, 0.5) ? 1 : 0;
        if (draw[0] == draw[1] && draw[1] == draw[2] && draw[2] == draw[3]) continue;
        ds.d1 = draw;
        ds.validate();
        FrtOptions opts;
        opts.b = 1;
        opts.p1j = 0.5;
        opts.seed = seed;
        CHECK(frt(ds, Statistic::ITT, opts).p_value == 1.0);
        ++found;
    }
    CHECK(found == 3);
}

TEST_CASE("link-dependent statistics require a1; ITT does not", "[frt]") {
    auto ds = network(200, 1, 9);
    FrtOptions opts;
    opts.b = 50;
    opts.p1j = 0.5;
    opts.seed = 4;
    const auto with_links = frt(ds, Statistic::ITT, opts);

    NetworkDataset bare;
    bare.y = ds.y;
    bare.d = ds.d;
    bare.n_peers = ds.n_peers;
    bare.r = ds.r;
    bare.d1 = ds.d1;
    bare.validate();
    const auto without = frt(bare, Statistic::ITT, opts);
    CHECK(with_links.p_value == without.p_value);
    CHECK(with_links.observed == without.observed);
    try {
        frt(bare, Statistic::TSLS, opts);
        FAIL("expected MissingLinks");
    } catch (const SpilloverError& e) {
        CHECK(e.code() == ErrorCode::MissingLinks);
    }
}

TEST_CASE("p-value conventions", "[frt]") {
    const auto ds = network(200, 0, 12);
    FrtOptions opts;
    opts.b = 99;
    opts.p1j = 0.5;
    opts.seed = 8;
    const auto plain = frt(ds, Statistic::ITT, opts);
    opts.plus_one = true;
    const auto exact = frt(ds, Statistic::ITT, opts);
    CHECK(exact.p_value == Catch::Approx((1.0 + plain.p_value * 99) / 100.0));
    opts.plus_one = false;
    opts.sidedness = Sidedness::TwoSidedAbs;
    const auto two = frt(ds, Statistic::ITT, opts);
    CHECK(two.p_value >= 0.0);
    CHECK(two.p_value <= 1.0);
    CHECK(two.sidedness == Sidedness::TwoSidedAbs);
}

TEST_CASE("degenerate redraws score as minus infinity", "[frt]") {
    NetworkDataset ds;
    ds.y = {0.0, 1.0, 2.0, 3.0, 4.0};
    ds.d = {0, 1, 0, 1, 0};
    ds.n_peers = {1, 1, 1, 1, 1};
    ds.r = {0, 1, 0, 0, 0};
    ds.d1 = {0, 1, 0, 0, 0};
    ds.a1 = std::vector<Binary>{1, 1, 0, 0, 0};
    ds.validate();
    FrtOptions opts;
    opts.b = 64;
    opts.p1j = 0.5;
    opts.seed = 1;
    const auto res = frt(ds, Statistic::ITTC, opts);
    CHECK(res.degenerate_draws > 0);
    CHECK(res.p_value <= 1.0 - static_cast<double>(res.degenerate_draws) / opts.b + 1e-12);
}

TEST_CASE("rejection rate under the null is near nominal", "[frt]") {
    int rejected = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        const auto ds = network(400, 0, 1000 + rep);
        FrtOptions opts;
        opts.b = 100;
        opts.p1j = 0.5;
        opts.seed = 5000 + rep;
        if (frt(ds, Statistic::WLS, opts).p_value <= 0.05) ++rejected;
    }
    const double rate = static_cast<double>(rejected) / reps;
    CHECK(rate >= 0.01);
    CHECK(rate <= 0.10);
}
