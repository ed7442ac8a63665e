#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spillover/csv_io.hpp"
#include "spillover/dgp.hpp"
#include "spillover/errors.hpp"
#include "spillover/estimators.hpp"
#include "spillover/harness.hpp"
#include "spillover/oracle.hpp"
#include "spillover/randomization.hpp"

using namespace spillover;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpilloverError(ErrorCode::InvalidConfig, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes to `path`, or stdout when it is empty or "-".
template <class F>
void emit(const std::string& path, F write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw SpilloverError(ErrorCode::InvalidConfig, "cannot write " + path);
    write(out);
}

Method parse_method(const std::string& s) {
    if (s == "ols") return Method::OLS;
    if (s == "tsls" || s == "2sls") return Method::TSLS;
    if (s == "wls") return Method::WLS;
    throw SpilloverError(ErrorCode::InvalidConfig, "unknown method: " + s);
}

int run_estimate(const std::string& input, const std::string& method_name, const std::string& map_name,
                 const std::string& se_name, const std::string& out_path) {
    const auto data = read_network_csv_file(input);
    const Method method = parse_method(method_name);
    const SeKind se = se_name == "robust" ? SeKind::Robust : SeKind::Classical;
    const auto m = data.exposures(parse_exposure_map(map_name));
    const auto d = to_double(data.d);
    const auto z = to_double(data.d1);
    Fit fit;
    if (method == Method::OLS) {
        fit = ols_fit(data.y, d, m, se);
    } else if (method == Method::TSLS) {
        fit = tsls_fit(data.y, d, m, z, se);
    } else {
        if (!data.a1) throw SpilloverError(ErrorCode::MissingLinks, "WLS needs the a1 column or peer links");
        const auto a1 = to_double(*data.a1);
        fit = wls_fit(data.y, d, m, z, a1, se);
    }
    emit(out_path, [&](std::ostream& os) {
        static const char* terms[3] = {"intercept", "d", "m"};
        os << "term,coef,se_classical,se_robust,t\n";
        for (int k = 0; k < 3; ++k)
            os << terms[k] << ',' << format_double(fit.coef[k]) << ',' << format_double(fit.se_classical[k]) << ','
               << format_double(fit.se_robust[k]) << ',' << format_double(fit.t_values[k]) << '\n';
    });
    std::cerr << to_string(method) << ": n = " << fit.n_used << ", t uses "
              << (se == SeKind::Robust ? "robust" : "classical") << " standard errors\n";
    return 0;
}

int run_frt(const std::string& input, const std::vector<std::string>& stats, const FrtOptions& opts, bool json) {
    const auto data = read_network_csv_file(input);
    std::vector<Statistic> kinds;
    for (const auto& s : stats) kinds.push_back(parse_statistic(s));
    const auto results = frt_multi(data, kinds, opts);
    if (json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : results)
            arr.push_back({{"statistic", to_string(r.statistic_kind)},
                           {"observed", r.observed},
                           {"p_value", r.p_value},
                           {"b", r.b},
                           {"sidedness", to_string(r.sidedness)},
                           {"degenerate_draws", r.degenerate_draws},
                           {"draws", {{"mean", r.draws_summary.mean},
                                      {"sd", r.draws_summary.sd},
                                      {"min", r.draws_summary.min},
                                      {"max", r.draws_summary.max}}}});
        std::cout << arr.dump(2) << '\n';
    } else {
        std::printf("%-6s %12s %8s %6s\n", "stat", "observed", "p", "B");
        for (const auto& r : results)
            std::printf("%-6s %12.6f %8.4f %6d\n", to_string(r.statistic_kind), r.observed, r.p_value, r.b);
    }
    return 0;
}

void print_report(const EstimandReport& r, const std::string& prefix) {
    std::printf("%s%-5s beta = (%.6f, %.6f, %.6f)  max gap %.2e\n", prefix.c_str(), r.label.c_str(), r.beta_triple[0],
                r.beta_triple[1], r.beta_triple[2], r.max_abs_gap);
    for (const auto& v : r.decomposition) std::printf("%s      %-14s %.6f\n", prefix.c_str(), v.name.c_str(), v.value);
}

int run_oracle_check(const std::string& model, int specs, std::uint64_t seed, const std::string& spec_file,
                     const std::string& map_name) {
    const bool pair = model == "pair";
    if (!pair && model != "network") throw SpilloverError(ErrorCode::InvalidConfig, "model must be pair or network");
    const double tol = pair ? 1e-10 : 1e-9;
    const ExposureMap map = parse_exposure_map(map_name);
    double worst = 0.0;
    int bad = 0;
    const auto check = [&](const std::vector<EstimandReport>& reports, const std::string& label, bool verbose) {
        for (const auto& r : reports) {
            worst = std::max(worst, r.max_abs_gap);
            if (!(r.max_abs_gap <= tol)) {
                ++bad;
                std::printf("gap %.3e in %s (%s)\n", r.max_abs_gap, r.label.c_str(), label.c_str());
            }
            if (verbose) print_report(r, "");
        }
    };
    if (!spec_file.empty()) {
        const std::string text = slurp(spec_file);
        if (pair)
            check(pair_closed_forms(pair_spec_from_json(text)), spec_file, true);
        else
            check(network_closed_forms(network_spec_from_json(text), map), spec_file, true);
    } else {
        for (int k = 0; k < specs; ++k) {
            const std::string label = "spec " + std::to_string(k);
            if (pair)
                check(pair_closed_forms(random_pair_spec(seed, k)), label, false);
            else
                check(network_closed_forms(random_network_spec(seed, k), map), label, false);
        }
        std::printf("%d %s specs, max gap %.3e (tolerance %.0e)\n", specs, model.c_str(), worst, tol);
    }
    return bad == 0 ? 0 : 1;
}

int run_simulate(const std::string& model, std::size_t n, int h, double c, std::uint64_t seed,
                 const std::string& out_path) {
    NetworkDataset data;
    if (model == "pair") {
        PairDgpConfig cfg;
        cfg.n = n;
        cfg.seed = seed;
        data = to_network(gen_pair(cfg));
    } else if (model == "network") {
        NetworkDgpConfig cfg;
        cfg.n = n;
        cfg.h = h;
        cfg.c = c;
        cfg.seed = seed;
        data = gen_network(cfg);
    } else {
        throw SpilloverError(ErrorCode::InvalidConfig, "model must be pair or network");
    }
    emit(out_path, [&](std::ostream& os) { write_network_csv(os, data); });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spillover estimation on endogenous peer networks"};
    app.require_subcommand(1);
    unsigned workers = 0;
    app.add_option("--workers", workers, "Worker threads for studies and randomization tests (0 = all cores)");

    std::string input, out_path, method = "tsls", map_name = "identity", se = "classical";
    auto* est = app.add_subcommand("estimate", "Fit OLS, 2SLS or WLS to a network CSV");
    est->add_option("--input", input, "Input CSV")->required();
    est->add_option("--method", method, "ols | tsls | wls")->check(CLI::IsMember({"ols", "tsls", "2sls", "wls"}));
    est->add_option("--exposure", map_name, "identity | fraction | any | perdegree");
    est->add_option("--se", se, "Standard errors used for t: classical | robust")
        ->check(CLI::IsMember({"classical", "robust"}));
    est->add_option("--out", out_path, "Output CSV (stdout when omitted)");

    std::vector<std::string> stats{"tsls", "wls", "itt", "ittc"};
    FrtOptions frt_opts;
    double p1j = -1.0;
    std::string sided = "upper";
    bool json = false, plus_one = false;
    auto* frt_cmd = app.add_subcommand("frt", "Randomization test of no spillover");
    frt_cmd->add_option("--input", input, "Input CSV")->required();
    frt_cmd->add_option("--stat", stats, "tsls | wls | itt | ittc (repeatable)");
    frt_cmd->add_option("--b", frt_opts.b, "Number of redraws")->check(CLI::PositiveNumber);
    frt_cmd->add_option("--p1j", p1j, "Peer treatment probability (default: sample mean of d1)");
    frt_cmd->add_option("--seed", frt_opts.seed, "Redraw seed");
    frt_cmd->add_option("--sided", sided, "upper | abs")->check(CLI::IsMember({"upper", "abs"}));
    frt_cmd->add_option("--exposure", map_name, "identity | fraction | any | perdegree");
    frt_cmd->add_flag("--plus-one", plus_one, "Report (1 + count) / (1 + B)");
    frt_cmd->add_flag("--json", json, "JSON output");

    std::string model = "pair", spec_file;
    int specs = 200;
    std::uint64_t seed = 2023;
    auto* oc = app.add_subcommand("oracle-check", "Compare closed-form estimands with population enumeration");
    oc->add_option("--model", model, "pair | network")->check(CLI::IsMember({"pair", "network"}));
    oc->add_option("--specs", specs, "Number of random specs")->check(CLI::PositiveNumber);
    oc->add_option("--seed", seed, "Spec generator seed");
    oc->add_option("--spec-file", spec_file, "Check one JSON spec instead");
    oc->add_option("--exposure", map_name, "Exposure map for network specs");

    std::size_t n = 1000;
    int h = 0;
    double c = 0.5;
    auto* sim = app.add_subcommand("simulate", "Draw a synthetic dataset");
    sim->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
    sim->add_option("--model", model, "pair | network")->check(CLI::IsMember({"pair", "network"}));
    sim->add_option("--n", n, "Sample size");
    sim->add_option("--h", h, "Spillover switch (network)")->check(CLI::IsMember({0, 1}));
    sim->add_option("--c", c, "Link threshold (network)");
    sim->add_option("--seed", seed, "Seed");
    sim->add_option("--out", out_path, "Output CSV (stdout when omitted)");

    std::string grid_path;
    int reps = 1000, b = 500;
    auto* mce = app.add_subcommand("mc-est", "Estimator study over a grid of designs");
    mce->add_option("--grid", grid_path, "Grid TOML")->required();
    mce->add_option("--reps", reps, "Replications per cell");
    mce->add_option("--seed", seed, "Master seed");
    mce->add_option("--out", out_path, "Output CSV");

    auto* mcf = app.add_subcommand("mc-frt", "Randomization test study over a grid of designs");
    mcf->add_option("--grid", grid_path, "Grid TOML")->required();
    mcf->add_option("--reps", reps, "Replications per cell");
    mcf->add_option("--b", b, "Redraws per test");
    mcf->add_option("--seed", seed, "Master seed");
    mcf->add_option("--out", out_path, "Output CSV");

    auto* t1 = app.add_subcommand("table1", "Pair-model OLS, 2SLS and WLS over many seeds");
    t1->add_option("--reps", reps, "Seeds")->default_val(500);
    t1->add_option("--n", n, "Sample size")->default_val(1000);
    t1->add_option("--seed", seed, "Master seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*est) return run_estimate(input, method, map_name, se, out_path);
        if (*frt_cmd) {
            if (p1j >= 0.0) frt_opts.p1j = p1j;
            frt_opts.sidedness = parse_sidedness(sided);
            frt_opts.map = parse_exposure_map(map_name);
            frt_opts.plus_one = plus_one;
            frt_opts.workers = workers;
            return run_frt(input, stats, frt_opts, json);
        }
        if (*oc) return run_oracle_check(model, specs, seed, spec_file, map_name);
        if (*sim) return run_simulate(model, n, h, c, seed, out_path);
        if (*mce) {
            const auto grid = load_grid_file(grid_path);
            const auto rep = mc_estimation(expand_grid(grid), reps, grid.exposure, seed, workers);
            if (!out_path.empty()) emit(out_path, [&](std::ostream& os) { write_csv(os, rep); });
            std::cout << format_table(rep);
            return 0;
        }
        if (*mcf) {
            const auto grid = load_grid_file(grid_path);
            const auto rep = mc_frt(expand_grid(grid, 0.5), reps, b, seed, grid.exposure, workers);
            if (!out_path.empty()) emit(out_path, [&](std::ostream& os) { write_csv(os, rep); });
            std::cout << format_table(rep);
            return 0;
        }
        if (*t1) {
            std::cout << format_table(table1_replication(reps, n, seed, std::nullopt, workers));
            return 0;
        }
    } catch (const SpilloverError& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
