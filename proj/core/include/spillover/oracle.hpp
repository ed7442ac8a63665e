#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spillover/estimators.hpp"
#include "spillover/model.hpp"

namespace spillover {

using Triple = std::array<double, 3>;  // (beta0, beta_d, beta_s)

// ---- pair model ----

struct PairUnitType {
    double weight = 1.0;
    double y[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // y[d][s]
    double p_link = 0.5;                         // Pr(A = 1 | type)
};

struct PairPopulationSpec {
    std::vector<PairUnitType> types;
    double p1_own = 0.5;
    double p1_partner = 0.5;

    void validate() const;
};

struct EstimandSet {
    Triple ols{};
    Triple tsls{};
    Triple wls{};
};

// Exact population moments summed over (type, A, D, D_j); each estimand from its own
// least-squares problem.
EstimandSet pair_enumerate(const PairPopulationSpec& spec);

struct Comparison {
    std::string name;
    double enumerated = 0.0;
    double closed_form = 0.0;
    double gap = 0.0;
};

struct NamedValue {
    std::string name;
    double value = 0.0;
};

struct WeightEntry {
    std::size_t unit = 0;
    int r = 0;
    std::vector<Binary> links;  // empty for weights indexed by r only
    double weight = 0.0;
};

struct EstimandReport {
    std::string label;
    Method method = Method::OLS;
    Triple beta_triple{};
    std::vector<Comparison> comparisons;
    std::vector<NamedValue> decomposition;
    std::vector<WeightEntry> weights;
    double max_abs_gap = 0.0;

    void add(std::string name, double enumerated, double closed_form);
};

// One report per method (OLS, 2SLS, WLS), each comparing the characterizations
// to pair_enumerate.
std::vector<EstimandReport> pair_closed_forms(const PairPopulationSpec& spec);

// ---- network model ----

struct NetworkAtom {
    double weight = 1.0;
    std::vector<double> y;      // y[d * (n_i + 1) + r]
    std::vector<Binary> links;  // length n_i; entry 0 is the IV peer
};

struct NetworkUnitSpec {
    int n_peers = 1;
    std::vector<NetworkAtom> atoms;

    double outcome(const NetworkAtom& a, int d, int r) const { return a.y[d * (n_peers + 1) + r]; }
};

struct NetworkPopulationSpec {
    std::vector<NetworkUnitSpec> units;
    double p1_own = 0.5;
    double p1_partner = 0.5;

    void validate() const;
};

EstimandSet network_enumerate(const NetworkPopulationSpec& spec, ExposureMap map);

// Reports labelled "ols" (direct-effect average and the causal / selection split with
// the pi weights), "tsls" (omega-weighted effects) and "wls" (restricted direct-effect
// average and the same omega-weighted sum, computed by the same routine).
std::vector<EstimandReport> network_closed_forms(const NetworkPopulationSpec& spec, ExposureMap map);

// ---- spec generators and fixtures ----

PairPopulationSpec random_pair_spec(std::uint64_t seed, std::uint64_t index);
NetworkPopulationSpec random_network_spec(std::uint64_t seed, std::uint64_t index, int max_units = 8,
                                          int max_peers = 3);

// Pair numerical-example DGP with U_i, U_j on a 5-point grid over (-1, 1) and xi at its mean.
PairPopulationSpec discretized_pair_example();

// Outcome strongly tied to links; OLS carries a large selection term.
NetworkPopulationSpec adversarial_network_spec();

// Samples n units by cycling over the population's units; atoms, own and peer treatments drawn
// from its law. Links are recorded, so every exposure map is available.
NetworkDataset sample_from_network_spec(const NetworkPopulationSpec& spec, std::size_t n, std::uint64_t seed);

// JSON round trip (nlohmann schema mirrors the structs).
std::string pair_spec_to_json(const PairPopulationSpec& spec);
std::string network_spec_to_json(const NetworkPopulationSpec& spec);
PairPopulationSpec pair_spec_from_json(const std::string& text);
NetworkPopulationSpec network_spec_from_json(const std::string& text);

}  // namespace spillover
