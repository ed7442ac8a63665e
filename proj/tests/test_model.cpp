#include <catch_amalgamated.hpp>

#include "spillover/errors.hpp"
#include "spillover/model.hpp"

using namespace spillover;

TEST_CASE("pair spillover indicator", "[model]") {
    CHECK(spillover_pair(1, 1) == 1);
    CHECK(spillover_pair(0, 1) == 0);
    CHECK(spillover_pair(1, 0) == 0);
}

TEST_CASE("exposure maps", "[model]") {
    CHECK(exposure(3, 9, 5, ExposureMap::Identity) == 3.0);
    CHECK(exposure(2, 4, 4, ExposureMap::Fraction) == 0.5);
    CHECK(exposure(0, 3, 0, ExposureMap::PerDegree) == 0.0);
    CHECK(exposure(2, 3, 3, ExposureMap::AnyTreated) == 1.0);
    CHECK(exposure(0, 3, 3, ExposureMap::AnyTreated) == 0.0);
    CHECK(exposure(1, 3, 2, ExposureMap::PerDegree) == 0.5);
    CHECK_THROWS_AS(exposure(4, 3, 3, ExposureMap::Identity), SpilloverError);
    CHECK_THROWS_AS(exposure(1, 3, 4, ExposureMap::Identity), SpilloverError);
}

TEST_CASE("exposure maps are non-decreasing and bounded", "[model]") {
    for (ExposureMap map : {ExposureMap::Identity, ExposureMap::Fraction, ExposureMap::AnyTreated,
                            ExposureMap::PerDegree})
        for (int n_i = 1; n_i <= 9; ++n_i)
            for (int deg = 0; deg <= n_i; ++deg) {
                const int top = map == ExposureMap::PerDegree ? deg : n_i;
                for (int r = 0; r < top; ++r)
                    CHECK(exposure(r + 1, n_i, deg, map) >= exposure(r, n_i, deg, map));
                for (int r = 0; r <= top; ++r) {
                    const double m = exposure(r, n_i, deg, map);
                    if (map != ExposureMap::Identity) {
                        CHECK(m >= 0.0);
                        CHECK(m <= 1.0);
                    }
                }
            }
}

TEST_CASE("counterfactual exposure", "[model]") {
    CHECK(counterfactual_exposure(2, 1, 1, 0) == 1);
    CHECK(counterfactual_exposure(2, 0, 1, 0) == 2);
    CHECK(counterfactual_exposure(0, 1, 0, 1) == 1);
    for (int r = 0; r <= 3; ++r)
        for (int a1 = 0; a1 <= 1; ++a1)
            for (int d1 = 0; d1 <= 1; ++d1) {
                if (r < a1 * d1) continue;
                const int r1 = counterfactual_exposure(r, a1, d1, 1);
                const int r0 = counterfactual_exposure(r, a1, d1, 0);
                CHECK(r1 - r0 == a1);
                CHECK(counterfactual_exposure(r, a1, d1, d1) == r);
            }
}

namespace {

NetworkDataset small_network() {
    NetworkDataset ds;
    ds.y = {1.0, 2.0, 3.0};
    ds.d = {0, 1, 0};
    ds.n_peers = {1, 2, 3};
    ds.d_peers = std::vector<std::vector<Binary>>{{1}, {0, 1}, {1, 1, 0}};
    ds.a_peers = std::vector<std::vector<Binary>>{{1}, {1, 1}, {0, 1, 1}};
    return ds;
}

}  // namespace

TEST_CASE("network dataset recomputes exposure from peer vectors", "[model]") {
    auto ds = small_network();
    ds.validate();
    CHECK(ds.r == std::vector<int>{1, 1, 1});
    CHECK(ds.d1 == std::vector<Binary>{1, 0, 1});
    CHECK(*ds.a1 == std::vector<Binary>{1, 1, 0});
    CHECK(ds.degree() == std::vector<int>{1, 2, 2});
    CHECK(ds.exposures(ExposureMap::PerDegree) == std::vector<double>{1.0, 0.5, 0.5});
    CHECK(ds.exposures(ExposureMap::Fraction) == std::vector<double>{1.0, 0.5, 1.0 / 3.0});
}

TEST_CASE("network dataset rejects inconsistent stored exposure", "[model]") {
    auto ds = small_network();
    ds.r = {1, 2, 1};
    CHECK_THROWS_AS(ds.validate(), SpilloverError);
}

TEST_CASE("network dataset rejects non-binary treatment", "[model]") {
    auto ds = small_network();
    ds.d[1] = 2;
    CHECK_THROWS_AS(ds.validate(), SpilloverError);
}

TEST_CASE("observables-only dataset", "[model]") {
    NetworkDataset ds;
    ds.y = {1.0, 2.0};
    ds.d = {0, 1};
    ds.n_peers = {2, 2};
    ds.r = {1, 3};
    ds.d1 = {1, 0};
    CHECK_THROWS_AS(ds.validate(), SpilloverError);
    ds.r = {1, 0};
    ds.validate();
    CHECK_FALSE(ds.has_links());
    CHECK_THROWS_AS(ds.exposures(ExposureMap::PerDegree), SpilloverError);
    CHECK(ds.exposures(ExposureMap::Identity) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("pair dataset converts to a one-peer network", "[model]") {
    PairDataset p;
    p.y = {0.5, 1.5, 2.5, 3.5};
    p.d = {0, 1, 0, 1};
    p.d_j = {1, 1, 0, 0};
    p.a = std::vector<Binary>{1, 0, 1, 0};
    CHECK(p.spillover() == std::vector<double>{1, 0, 0, 0});
    const auto net = to_network(p);
    CHECK(net.r == std::vector<int>{1, 0, 0, 0});
    CHECK(net.n_peers == std::vector<int>{1, 1, 1, 1});
    CHECK(*net.a1 == *p.a);
}
