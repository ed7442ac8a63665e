#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spillover/estimators.hpp"
#include "spillover/model.hpp"

namespace spillover {

enum class Statistic { TSLS, WLS, ITT, ITTC };
enum class Sidedness { Upper, TwoSidedAbs };

const char* to_string(Statistic s);
const char* to_string(Sidedness s);
Statistic parse_statistic(std::string_view name);  // tsls|wls|itt|ittc
Sidedness parse_sidedness(std::string_view name);  // upper|abs

double statistic_itt(Column y, Column d1);
double statistic_ittc(Column y, Column d1, Column a1);

struct FrtOptions {
    int b = 500;
    std::optional<double> p1j;  // falls back to mean(d1)
    std::uint64_t seed = 0;
    Sidedness sidedness = Sidedness::Upper;
    ExposureMap map = ExposureMap::Identity;
    bool plus_one = false;  // (1 + count) / (1 + B) instead of count / B
    unsigned workers = 1;
};

struct DrawSummary {
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct FrtResult {
    Statistic statistic_kind = Statistic::ITT;
    double observed = 0.0;
    double p_value = 1.0;
    int b = 0;
    Sidedness sidedness = Sidedness::Upper;
    DrawSummary draws_summary;  // over draws with a computable statistic
    int degenerate_draws = 0;   // scored as -infinity
};

// Redrawn first-peer treatment of `unit` in draw `draw`. Four draws share one Philox
// block (one 32-bit word each).
bool frt_redraw(std::uint64_t seed, std::uint64_t draw, std::uint64_t unit, double p1j);

FrtResult frt(const NetworkDataset& data, Statistic stat, const FrtOptions& opts);

// Several statistics evaluated on one shared set of redraws.
std::vector<FrtResult> frt_multi(const NetworkDataset& data, std::span<const Statistic> stats,
                                 const FrtOptions& opts);

}  // namespace spillover
