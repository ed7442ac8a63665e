#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spillover {

using Binary = std::uint8_t;

enum class ExposureMap { Identity, Fraction, AnyTreated, PerDegree };

const char* to_string(ExposureMap map);
// Accepts identity|fraction|any|perdegree.
ExposureMap parse_exposure_map(std::string_view name);

inline int spillover_pair(int a, int d_j) { return a * d_j; }

// M_i(r). PerDegree with a_bar = 0 is 0.
double exposure(int r, int n_i, int a_bar, ExposureMap map);

// R_i(d) from the observed exposure, the first-peer link and the observed first-peer treatment.
inline int counterfactual_exposure(int r, int a1, int d1, int d) { return r - a1 * (d1 - d); }

struct PairDataset {
    std::vector<double> y;
    std::vector<Binary> d;
    std::vector<Binary> d_j;
    std::optional<std::vector<Binary>> a;

    std::size_t n() const { return y.size(); }
    void validate() const;
    // s_i = a_i d_{j,i}; requires `a`.
    std::vector<double> spillover() const;
};

// Column layout; unit i's peer vectors are d_peers[i] / a_peers[i] when present.
struct NetworkDataset {
    std::vector<std::string> id;
    std::vector<double> y;
    std::vector<Binary> d;
    std::vector<int> n_peers;
    std::vector<int> r;
    std::vector<Binary> d1;
    std::optional<std::vector<Binary>> a1;
    std::optional<std::vector<std::vector<Binary>>> d_peers;
    std::optional<std::vector<std::vector<Binary>>> a_peers;

    std::size_t n() const { return y.size(); }
    bool has_links() const { return a_peers.has_value(); }

    // Checks shapes and ranges, recomputes r from peer vectors when both are present
    // and rejects a mismatch, and fills d1/a1 from the peer vectors when absent.
    void validate();

    // Degree per unit; requires a_peers.
    std::vector<int> degree() const;
    // M_i for every unit under `map`.
    std::vector<double> exposures(ExposureMap map) const;
};

NetworkDataset to_network(const PairDataset& pair);

std::vector<double> to_double(std::span<const Binary> v);

}  // namespace spillover
