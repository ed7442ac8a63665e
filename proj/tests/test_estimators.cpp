#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spillover/dgp.hpp"
#include "spillover/errors.hpp"
#include "spillover/estimators.hpp"

using namespace spillover;
using Catch::Approx;

namespace {

struct Design {
    std::vector<double> y, d, m, z, a1;
};

// Network-like design: z drives m for linked units, y has heterogeneous noise.
Design random_design(std::mt19937_64& rng, std::size_t n) {
    std::bernoulli_distribution half(0.5), link(0.6);
    std::uniform_int_distribution<int> extra(0, 3);
    std::normal_distribution<double> noise(0.0, 1.0);
    Design x;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = half(rng), z = half(rng), a = link(rng);
        const double m = a * z + extra(rng);
        x.d.push_back(d);
        x.z.push_back(z);
        x.a1.push_back(a);
        x.m.push_back(m);
        x.y.push_back(1.0 + 0.5 * d + 0.8 * m + (1.0 + m) * noise(rng));
    }
    return x;
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

template <class F>
void expect_code(F f, ErrorCode code) {
    try {
        f();
        FAIL("expected error " << to_string(code));
    } catch (const SpilloverError& e) {
        CHECK(e.code() == code);
    }
}

}  // namespace

TEST_CASE("OLS recovers noiseless coefficients", "[estimators]") {
    std::vector<double> d{0, 1, 0, 1, 1, 0, 0}, m{0, 0, 1, 2, 3, 1, 2}, y;
    for (std::size_t i = 0; i < d.size(); ++i) y.push_back(2 + 3 * d[i] + 5 * m[i]);
    const Fit f = ols_fit(y, d, m);
    CHECK(f.beta0() == Approx(2).margin(1e-12));
    CHECK(f.beta_d() == Approx(3).margin(1e-12));
    CHECK(f.beta_s() == Approx(5).margin(1e-12));
}

TEST_CASE("OLS agrees with a Cramer's-rule oracle", "[estimators]") {
    const std::vector<double> y{1.2, -0.4, 2.2, 3.1, 0.7, 1.9}, d{0, 1, 0, 1, 1, 0}, m{0, 1, 2, 2, 0, 1};
    const Fit f = ols_fit(y, d, m);
    const auto ref = oracle::ols_cramer(y, d, m);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(f.coef[k] - static_cast<double>(ref[k])) <= 1e-12);

    // classical variance sigma^2 (X'X)^-1 through Cramer columns
    oracle::M3 xtx{};
    double ssr = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double row[3] = {1.0, d[i], m[i]};
        const double e = static_cast<double>(y[i] - ref[0] - ref[1] * d[i] - ref[2] * m[i]);
        ssr += e * e;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) xtx[r][c] += row[r] * row[c];
    }
    for (int k = 0; k < 3; ++k) {
        oracle::V3 e{0, 0, 0};
        e[k] = 1.0;
        const double vkk = static_cast<double>(oracle::cramer(xtx, e)[k]);
        CHECK(f.se_classical[k] == Approx(std::sqrt(ssr / 3.0 * vkk)).epsilon(1e-12));
    }
}

TEST_CASE("2SLS ratio agrees with the direct-sum and projected least-squares oracles", "[estimators]") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 1000; ++rep) {
        const auto x = random_design(rng, 20 + rep % 200);
        const Fit f = tsls_fit(x.y, x.d, x.m, x.z);
        CHECK(std::abs(f.beta_s() - oracle::iv_ratio_loops(x.y, x.d, x.m, x.z)) <= 1e-12 * std::max(1.0, std::abs(f.beta_s())));
        const auto p = oracle::projected_least_squares(x.y, x.d, x.m, x.z);
        for (int k = 0; k < 3; ++k) CHECK(rel_gap(f.coef[k], static_cast<double>(p[k])) <= 1e-10);
    }
}

TEST_CASE("residual orthogonality", "[estimators]") {
    std::mt19937_64 rng(7);
    const auto x = random_design(rng, 500);
    for (bool iv : {false, true}) {
        const Fit f = iv ? tsls_fit(x.y, x.d, x.m, x.z) : ols_fit(x.y, x.d, x.m);
        const auto& w = iv ? x.z : x.m;
        double s1 = 0, sd = 0, sw = 0, scale = 0;
        for (std::size_t i = 0; i < x.y.size(); ++i) {
            const double e = x.y[i] - f.coef[0] - f.coef[1] * x.d[i] - f.coef[2] * x.m[i];
            s1 += e;
            sd += x.d[i] * e;
            sw += w[i] * e;
            scale += std::abs(x.y[i]) * (1.0 + std::abs(w[i]));
        }
        CHECK(std::abs(s1) <= 1e-9 * scale);
        CHECK(std::abs(sd) <= 1e-9 * scale);
        CHECK(std::abs(sw) <= 1e-9 * scale);
    }
}

TEST_CASE("WLS equals 2SLS on the linked subsample", "[estimators]") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 200; ++rep) {
        const auto x = random_design(rng, 60);
        Design sub;
        for (std::size_t i = 0; i < x.y.size(); ++i)
            if (x.a1[i] == 1.0) {
                sub.y.push_back(x.y[i]);
                sub.d.push_back(x.d[i]);
                sub.m.push_back(x.m[i]);
                sub.z.push_back(x.z[i]);
            }
        const Fit w = wls_fit(x.y, x.d, x.m, x.z, x.a1);
        const Fit t = tsls_fit(sub.y, sub.d, sub.m, sub.z);
        CHECK(w.n_used == sub.y.size());
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(w.coef[k] - t.coef[k]) <= 1e-12);
            CHECK(std::abs(w.se_robust[k] - t.se_robust[k]) <= 1e-12);
        }
    }
}

TEST_CASE("perfect compliance reduces 2SLS to OLS and full linkage reduces WLS to 2SLS", "[estimators]") {
    std::mt19937_64 rng(11);
    const auto x = random_design(rng, 300);
    const Fit o = ols_fit(x.y, x.d, x.z);
    const Fit t = tsls_fit(x.y, x.d, x.z, x.z);
    for (int k = 0; k < 3; ++k) CHECK(t.coef[k] == Approx(o.coef[k]).margin(1e-12));
    const std::vector<double> ones(x.y.size(), 1.0);
    const Fit w = wls_fit(x.y, x.d, x.m, x.z, ones);
    const Fit t2 = tsls_fit(x.y, x.d, x.m, x.z);
    for (int k = 0; k < 3; ++k) {
        CHECK(w.coef[k] == t2.coef[k]);
        CHECK(w.se_robust[k] == t2.se_robust[k]);
        CHECK(w.se_classical[k] == t2.se_classical[k]);
    }
}

TEST_CASE("affine equivariance in y", "[estimators]") {
    std::mt19937_64 rng(13);
    const auto x = random_design(rng, 200);
    const double alpha = -2.5, gamma = 4.0;
    std::vector<double> y2;
    for (double v : x.y) y2.push_back(alpha * v + gamma);
    const Fit fits[3][2] = {
        {ols_fit(x.y, x.d, x.m), ols_fit(y2, x.d, x.m)},
        {tsls_fit(x.y, x.d, x.m, x.z), tsls_fit(y2, x.d, x.m, x.z)},
        {wls_fit(x.y, x.d, x.m, x.z, x.a1), wls_fit(y2, x.d, x.m, x.z, x.a1)},
    };
    for (const auto& f : fits) {
        CHECK(f[1].coef[0] == Approx(alpha * f[0].coef[0] + gamma).margin(1e-9));
        CHECK(f[1].coef[1] == Approx(alpha * f[0].coef[1]).margin(1e-9));
        CHECK(f[1].coef[2] == Approx(alpha * f[0].coef[2]).margin(1e-9));
    }
}

TEST_CASE("plug-in variance: ratio form equals the sandwich", "[estimators]") {
    std::mt19937_64 rng(17);
    const auto x = random_design(rng, 800);
    const double n = static_cast<double>(x.y.size());
    const Fit t = tsls_fit(x.y, x.d, x.m, x.z, SeKind::Robust);
    const Vec3 vt = plug_in_variance(t, x.y, x.d, x.m, Column(x.z));
    for (int k = 0; k < 3; ++k) CHECK(std::sqrt(vt[k] / n) == Approx(t.se_robust[k]).epsilon(1e-10));
    const Fit w = wls_fit(x.y, x.d, x.m, x.z, x.a1, SeKind::Robust);
    const Vec3 vw = plug_in_variance(w, x.y, x.d, x.m, Column(x.z), Column(x.a1));
    CHECK(std::sqrt(vw[2] / n) == Approx(w.se_robust[2]).epsilon(1e-10));
    CHECK(t.t_values[2] == Approx(t.beta_s() / t.se_robust[2]));
}

TEST_CASE("homoskedastic pair model with every partner linked: 2SLS and WLS SEs agree", "[estimators]") {
    HomogeneousPairConfig cfg;
    cfg.n = 2000;
    cfg.p_link = 1.0;
    cfg.seed = 3;
    const auto ds = gen_homogeneous_pair(cfg);
    const auto y = ds.y;
    const auto d = to_double(ds.d), z = to_double(ds.d_j), a = to_double(*ds.a), s = ds.spillover();
    const Fit t = tsls_fit(y, d, s, z);
    const Fit w = wls_fit(y, d, s, z, a);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(t.se_robust[k] - w.se_robust[k]) <= 1e-12);
        CHECK(std::abs(t.se_classical[k] - w.se_classical[k]) <= 1e-12);
    }
}

TEST_CASE("homogeneous model: WLS spillover within 3 plug-in SEs", "[estimators]") {
    HomogeneousPairConfig cfg;
    cfg.n = 4000;
    cfg.p_link = 0.5;
    cfg.seed = 21;
    const auto ds = gen_homogeneous_pair(cfg);
    const auto d = to_double(ds.d), z = to_double(ds.d_j), a = to_double(*ds.a), s = ds.spillover();
    const Fit w = wls_fit(ds.y, d, s, z, a, SeKind::Robust);
    CHECK(std::abs(w.beta_s() - 1.5) < 3.0 * w.se_robust[2]);
    CHECK(w.n_used < ds.n());
}

TEST_CASE("estimator errors", "[estimators]") {
    const std::vector<double> y{1, 2, 3, 4, 5, 6}, d0(6, 0.0), d{0, 1, 0, 1, 0, 1}, m{0, 1, 2, 0, 1, 2};
    const std::vector<double> z{1, 0, 1, 1, 0, 0}, zc(6, 1.0), ones(6, 1.0), few{1, 1, 1, 0, 0, 0};
    expect_code([&] { ols_fit(y, d0, m); }, ErrorCode::RankDeficient);
    expect_code([&] { ols_fit(y, d, std::vector<double>(6, 2.0)); }, ErrorCode::RankDeficient);
    expect_code([&] { ols_fit(y, d, d); }, ErrorCode::RankDeficient);
    expect_code([&] { tsls_fit(y, d, m, zc); }, ErrorCode::RankDeficient);
    // m equals d: z~'m vanishes exactly
    expect_code([&] { tsls_fit(y, d, d, z); }, ErrorCode::WeakFirstStage);
    expect_code([&] { wls_fit(y, d, m, z, few); }, ErrorCode::InsufficientCompliers);
    const std::vector<double> y3{1, 2, 3}, d3{0, 1, 0}, m3{1, 2, 2};
    expect_code([&] { ols_fit(y3, d3, m3); }, ErrorCode::RankDeficient);
}
