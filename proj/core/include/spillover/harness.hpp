#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spillover/dgp.hpp"
#include "spillover/errors.hpp"
#include "spillover/estimators.hpp"
#include "spillover/model.hpp"
#include "spillover/randomization.hpp"

namespace spillover {

// Grid file: n = [400, 1600], h = [0, 1], c = [0.3, 0.6], exposure = "identity".
struct GridSpec {
    std::vector<std::size_t> n;
    std::vector<int> h;
    std::vector<double> c;
    ExposureMap exposure = ExposureMap::Identity;
    bool unit_noise = true;  // NetworkDgpConfig::unit_coefficient_noise for every cell
};

GridSpec parse_grid_toml(const std::string& text);
GridSpec load_grid_file(const std::string& path);

// Cells in (n, h, c) order; `default_c` is used when the grid has no c values.
std::vector<NetworkDgpConfig> expand_grid(const GridSpec& grid, double default_c = 0.5);

// Stable identifier of an (n, h, c) cell for seed derivation.
std::uint64_t cell_id(const NetworkDgpConfig& cell);

struct McEstimationRow {
    std::size_t n = 0;
    int h = 0;
    double c = 0.0;
    Method method = Method::TSLS;
    double truth = 0.0;
    double bias = 0.0;
    double rmse = 0.0;
    double coverage = 0.0;  // robust plug-in 95% interval
    int reps = 0;           // successful replications
    int failures = 0;
};

struct McEstimationReport {
    std::vector<McEstimationRow> rows;
    const McEstimationRow* find(std::size_t n, int h, double c, Method m) const;
};

McEstimationReport mc_estimation(const std::vector<NetworkDgpConfig>& cells, int reps, ExposureMap map,
                                 std::uint64_t master_seed, unsigned workers = 1);

struct McFrtRow {
    std::size_t n = 0;
    int h = 0;
    double c = 0.0;
    Statistic statistic = Statistic::ITT;
    double level = 0.05;
    double rejection = 0.0;
    int reps = 0;
    int b = 0;
    int failures = 0;
};

struct McFrtReport {
    std::vector<McFrtRow> rows;
    const McFrtRow* find(std::size_t n, int h, Statistic s, double level) const;
};

inline constexpr double kFrtLevels[3] = {0.10, 0.05, 0.01};

McFrtReport mc_frt(const std::vector<NetworkDgpConfig>& cells, int reps, int b, std::uint64_t master_seed,
                   ExposureMap map = ExposureMap::Identity, unsigned workers = 1);

struct Table1Method {
    Method method = Method::OLS;
    double reject_fraction = 0.0;  // |t_S| > 1.96 with classical SEs
    double mean_beta_d = 0.0;
    double mean_beta_s = 0.0;
    double mean_t_s = 0.0;
};

struct Table1Summary {
    int reps = 0;
    std::size_t n = 0;
    int failures = 0;
    std::optional<ErrorCode> first_failure;
    Table1Method ols, tsls, wls;
};

Table1Summary table1_replication(int reps, std::size_t n, std::uint64_t master_seed,
                                 std::optional<double> exogenous_link_prob = std::nullopt, unsigned workers = 1);

void write_csv(std::ostream& out, const McEstimationReport& report);
void write_csv(std::ostream& out, const McFrtReport& report);
std::string format_table(const McEstimationReport& report);
std::string format_table(const McFrtReport& report);
std::string format_table(const Table1Summary& summary);

}  // namespace spillover
