#include "spillover/model.hpp"

#include <string>

#include "spillover/errors.hpp"

namespace spillover {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw SpilloverError(ErrorCode::MalformedData, msg);
}

void require_binary(std::span<const Binary> v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i)
        require(v[i] <= 1, std::string(name) + " is not binary at row " + std::to_string(i));
}

}  // namespace

const char* to_string(ExposureMap map) {
    switch (map) {
        case ExposureMap::Identity: return "identity";
        case ExposureMap::Fraction: return "fraction";
        case ExposureMap::AnyTreated: return "any";
        case ExposureMap::PerDegree: return "perdegree";
    }
    return "?";
}

ExposureMap parse_exposure_map(std::string_view name) {
    if (name == "identity") return ExposureMap::Identity;
    if (name == "fraction") return ExposureMap::Fraction;
    if (name == "any") return ExposureMap::AnyTreated;
    if (name == "perdegree") return ExposureMap::PerDegree;
    throw SpilloverError(ErrorCode::InvalidConfig, "unknown exposure map '" + std::string(name) + "'");
}

double exposure(int r, int n_i, int a_bar, ExposureMap map) {
    if (n_i < 1 || r < 0 || r > n_i || a_bar < 0 || a_bar > n_i)
        throw SpilloverError(ErrorCode::MalformedData,
                             "exposure arguments out of range (r=" + std::to_string(r) +
                                 ", n_i=" + std::to_string(n_i) + ", a_bar=" + std::to_string(a_bar) + ")");
    switch (map) {
        case ExposureMap::Identity: return static_cast<double>(r);
        case ExposureMap::Fraction: return static_cast<double>(r) / n_i;
        case ExposureMap::AnyTreated: return r > 0 ? 1.0 : 0.0;
        case ExposureMap::PerDegree: return a_bar == 0 ? 0.0 : static_cast<double>(r) / a_bar;
    }
    return 0.0;
}

void PairDataset::validate() const {
    require(n() >= 1, "empty pair dataset");
    require(d.size() == n() && d_j.size() == n(), "pair dataset columns differ in length");
    require_binary(d, "d");
    require_binary(d_j, "d_j");
    if (a) {
        require(a->size() == n(), "link column length differs");
        require_binary(*a, "a");
    }
}

std::vector<double> PairDataset::spillover() const {
    if (!a) throw SpilloverError(ErrorCode::MissingLinks, "spillover needs the link column");
    std::vector<double> s(n());
    for (std::size_t i = 0; i < n(); ++i) s[i] = spillover_pair((*a)[i], d_j[i]);
    return s;
}

void NetworkDataset::validate() {
    const std::size_t n = y.size();
    require(n >= 1, "empty network dataset");
    require(d.size() == n && n_peers.size() == n, "network dataset columns differ in length");
    require_binary(d, "d");
    if (d_peers) require(d_peers->size() == n, "d_peers has wrong unit count");
    if (a_peers) require(a_peers->size() == n, "a_peers has wrong unit count");
    if (d1.empty() && d_peers) {
        d1.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            require(!(*d_peers)[i].empty(), "unit " + std::to_string(i) + " has no peers");
            d1[i] = (*d_peers)[i][0];
        }
    }
    if (!a1 && a_peers) {
        a1.emplace(n);
        for (std::size_t i = 0; i < n; ++i) {
            require(!(*a_peers)[i].empty(), "unit " + std::to_string(i) + " has no peer links");
            (*a1)[i] = (*a_peers)[i][0];
        }
    }
    require(d1.size() == n, "d1 column missing or wrong length");
    require_binary(d1, "d1");
    if (a1) {
        require(a1->size() == n, "a1 column has wrong length");
        require_binary(*a1, "a1");
    }

    const bool recompute = d_peers && a_peers;
    const bool r_supplied = !r.empty();
    if (!r_supplied) {
        require(recompute, "r is required when peer vectors are absent");
        r.assign(n, 0);
    }
    require(r.size() == n, "r column has wrong length");

    for (std::size_t i = 0; i < n; ++i) {
        const std::string at = " at unit " + std::to_string(i);
        require(n_peers[i] >= 1, "n_i must be positive" + at);
        if (d_peers) {
            require(static_cast<int>((*d_peers)[i].size()) == n_peers[i], "d_peers length differs from n_i" + at);
            require_binary((*d_peers)[i], "d_peer");
            require((*d_peers)[i][0] == d1[i], "d1 differs from d_peer_1" + at);
        }
        if (a_peers) {
            require(static_cast<int>((*a_peers)[i].size()) == n_peers[i], "a_peers length differs from n_i" + at);
            require_binary((*a_peers)[i], "a_peer");
            if (a1) require((*a_peers)[i][0] == (*a1)[i], "a1 differs from a_peer_1" + at);
        }
        if (recompute) {
            int rr = 0;
            for (int j = 0; j < n_peers[i]; ++j) rr += (*a_peers)[i][j] * (*d_peers)[i][j];
            if (r_supplied) require(r[i] == rr, "stored r differs from peer-vector count" + at);
            r[i] = rr;
        }
        require(r[i] >= 0 && r[i] <= n_peers[i], "r outside [0, n_i]" + at);
        if (a1) require(r[i] >= (*a1)[i] * d1[i], "r smaller than a1*d1" + at);
        if (a_peers) {
            int deg = 0;
            for (Binary a : (*a_peers)[i]) deg += a;
            require(r[i] <= deg, "r exceeds degree" + at);
        }
    }
    if (id.empty()) {
        id.resize(n);
        for (std::size_t i = 0; i < n; ++i) id[i] = std::to_string(i + 1);
    }
    require(id.size() == n, "id column has wrong length");
}

std::vector<int> NetworkDataset::degree() const {
    if (!a_peers) throw SpilloverError(ErrorCode::MissingLinks, "degree needs a_peer columns");
    std::vector<int> deg(n(), 0);
    for (std::size_t i = 0; i < n(); ++i)
        for (Binary a : (*a_peers)[i]) deg[i] += a;
    return deg;
}

std::vector<double> NetworkDataset::exposures(ExposureMap map) const {
    std::vector<double> m(n());
    if (map == ExposureMap::PerDegree) {
        const auto deg = degree();
        for (std::size_t i = 0; i < n(); ++i) m[i] = exposure(r[i], n_peers[i], deg[i], map);
    } else {
        for (std::size_t i = 0; i < n(); ++i) m[i] = exposure(r[i], n_peers[i], 0, map);
    }
    return m;
}

NetworkDataset to_network(const PairDataset& pair) {
    pair.validate();
    NetworkDataset net;
    const std::size_t n = pair.n();
    net.y = pair.y;
    net.d = pair.d;
    net.n_peers.assign(n, 1);
    net.d1 = pair.d_j;
    net.d_peers.emplace(n);
    for (std::size_t i = 0; i < n; ++i) (*net.d_peers)[i] = {pair.d_j[i]};
    if (pair.a) {
        net.a1 = *pair.a;
        net.a_peers.emplace(n);
        for (std::size_t i = 0; i < n; ++i) (*net.a_peers)[i] = {(*pair.a)[i]};
        net.r.resize(n);
        for (std::size_t i = 0; i < n; ++i) net.r[i] = spillover_pair((*pair.a)[i], pair.d_j[i]);
    }
    net.validate();
    return net;
}

std::vector<double> to_double(std::span<const Binary> v) {
    return std::vector<double>(v.begin(), v.end());
}

}  // namespace spillover
