#include "spillover/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "spillover/csv_io.hpp"
#include "spillover/errors.hpp"
#include "spillover/parallel.hpp"
#include "spillover/rng.hpp"

namespace spillover {

namespace {

constexpr double kZ975 = 1.959963984540054;

[[noreturn]] void bad_grid(const std::string& msg) { throw SpilloverError(ErrorCode::InvalidConfig, "grid: " + msg); }

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> array_items(const std::string& v) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') bad_grid("expected an array, got '" + v + "'");
    std::vector<std::string> items;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = strip(item);
        if (!item.empty()) items.push_back(item);
    }
    if (items.empty()) bad_grid("empty array");
    return items;
}

double to_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        bad_grid("not a number: '" + s + "'");
    }
    if (used != s.size()) bad_grid("not a number: '" + s + "'");
    return v;
}

void check_reps(int reps) {
    if (reps < 1) throw SpilloverError(ErrorCode::InvalidConfig, "reps must be at least 1");
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

GridSpec parse_grid_toml(const std::string& text) {
    GridSpec g;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) bad_grid("expected key = value: '" + line + "'");
        const std::string key = strip(line.substr(0, eq));
        const std::string val = strip(line.substr(eq + 1));
        if (key == "n") {
            for (const auto& it : array_items(val)) {
                const double v = to_number(it);
                if (v < 8 || v != std::floor(v)) bad_grid("n values must be integers >= 8");
                g.n.push_back(static_cast<std::size_t>(v));
            }
        } else if (key == "h") {
            for (const auto& it : array_items(val)) {
                const double v = to_number(it);
                if (v != 0.0 && v != 1.0) bad_grid("h values must be 0 or 1");
                g.h.push_back(static_cast<int>(v));
            }
        } else if (key == "c") {
            for (const auto& it : array_items(val)) g.c.push_back(to_number(it));
        } else if (key == "exposure") {
            if (val.size() < 2 || val.front() != '"' || val.back() != '"') bad_grid("exposure must be a string");
            g.exposure = parse_exposure_map(val.substr(1, val.size() - 2));
        } else if (key == "unit_noise") {
            if (val != "true" && val != "false") bad_grid("unit_noise must be true or false");
            g.unit_noise = val == "true";
        } else {
            bad_grid("unknown key '" + key + "'");
        }
    }
    if (g.n.empty() || g.h.empty()) bad_grid("n and h are required");
    return g;
}

GridSpec load_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpilloverError(ErrorCode::InvalidConfig, "cannot open grid " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_grid_toml(ss.str());
}

std::vector<NetworkDgpConfig> expand_grid(const GridSpec& grid, double default_c) {
    const std::vector<double> cs = grid.c.empty() ? std::vector<double>{default_c} : grid.c;
    std::vector<NetworkDgpConfig> cells;
    for (std::size_t n : grid.n)
        for (int h : grid.h)
            for (double c : cs) {
                NetworkDgpConfig cfg;
                cfg.n = n;
                cfg.h = h;
                cfg.c = c;
                cfg.unit_coefficient_noise = grid.unit_noise;
                cells.push_back(cfg);
            }
    return cells;
}

std::uint64_t cell_id(const NetworkDgpConfig& cell) {
    const auto c_key = static_cast<std::uint64_t>(std::llround(cell.c * 1e6));
    return splitmix64(splitmix64(cell.n) ^ (static_cast<std::uint64_t>(cell.h) << 40) ^ c_key);
}

// ---------------------------------------------------------------- estimation study

const McEstimationRow* McEstimationReport::find(std::size_t n, int h, double c, Method m) const {
    for (const auto& r : rows)
        if (r.n == n && r.h == h && std::abs(r.c - c) < 1e-9 && r.method == m) return &r;
    return nullptr;
}

McEstimationReport mc_estimation(const std::vector<NetworkDgpConfig>& cells, int reps, ExposureMap map,
                                 std::uint64_t master_seed, unsigned workers) {
    check_reps(reps);
    struct Draw {
        bool ok[3] = {false, false, false};
        double est[3] = {0, 0, 0};
        double se[3] = {0, 0, 0};
    };
    const Method methods[3] = {Method::OLS, Method::TSLS, Method::WLS};

    McEstimationReport report;
    for (const auto& cell : cells) {
        std::vector<Draw> draws(static_cast<std::size_t>(reps));
        const std::uint64_t id = cell_id(cell);
        parallel_for(draws.size(), workers, [&](std::size_t rep) {
            NetworkDgpConfig cfg = cell;
            cfg.seed = derive_seed(master_seed, id, rep);
            const NetworkDataset ds = gen_network(cfg);
            const auto m = ds.exposures(map);
            const auto d = to_double(ds.d);
            const auto z = to_double(ds.d1);
            const auto a1 = to_double(*ds.a1);
            Draw& out = draws[rep];
            for (int k = 0; k < 3; ++k) {
                if (methods[k] == Method::OLS && cell.h != 0) continue;
                try {
                    Fit fit = methods[k] == Method::OLS    ? ols_fit(ds.y, d, m, SeKind::Robust)
                              : methods[k] == Method::TSLS ? tsls_fit(ds.y, d, m, z, SeKind::Robust)
                                                           : wls_fit(ds.y, d, m, z, a1, SeKind::Robust);
                    out.est[k] = fit.beta_s();
                    out.se[k] = fit.se_robust[2];
                    out.ok[k] = true;
                } catch (const SpilloverError&) {
                    out.ok[k] = false;
                }
            }
        });
        for (int k = 0; k < 3; ++k) {
            if (methods[k] == Method::OLS && cell.h != 0) continue;
            McEstimationRow row;
            row.n = cell.n;
            row.h = cell.h;
            row.c = cell.c;
            row.method = methods[k];
            row.truth = methods[k] == Method::OLS ? 0.0 : true_late(cell);
            double sum = 0.0, sumsq = 0.0;
            int hits = 0;
            for (const Draw& dr : draws) {
                if (!dr.ok[k]) {
                    ++row.failures;
                    continue;
                }
                const double err = dr.est[k] - row.truth;
                sum += err;
                sumsq += err * err;
                if (std::abs(err) <= kZ975 * dr.se[k]) ++hits;
                ++row.reps;
            }
            if (row.reps > 0) {
                row.bias = sum / row.reps;
                row.rmse = std::sqrt(sumsq / row.reps);
                row.coverage = static_cast<double>(hits) / row.reps;
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

// ---------------------------------------------------------------- randomization study

const McFrtRow* McFrtReport::find(std::size_t n, int h, Statistic s, double level) const {
    for (const auto& r : rows)
        if (r.n == n && r.h == h && r.statistic == s && std::abs(r.level - level) < 1e-12) return &r;
    return nullptr;
}

McFrtReport mc_frt(const std::vector<NetworkDgpConfig>& cells, int reps, int b, std::uint64_t master_seed,
                   ExposureMap map, unsigned workers) {
    check_reps(reps);
    if (b < 1) throw SpilloverError(ErrorCode::InvalidConfig, "b must be at least 1");
    const Statistic stats[4] = {Statistic::TSLS, Statistic::WLS, Statistic::ITT, Statistic::ITTC};

    McFrtReport report;
    for (const auto& cell : cells) {
        std::vector<std::array<double, 4>> pvals(static_cast<std::size_t>(reps));
        std::vector<char> ok(pvals.size(), 0);
        const std::uint64_t id = cell_id(cell);
        parallel_for(pvals.size(), workers, [&](std::size_t rep) {
            NetworkDgpConfig cfg = cell;
            cfg.seed = derive_seed(master_seed, id, rep);
            const NetworkDataset ds = gen_network(cfg);
            FrtOptions opts;
            opts.b = b;
            opts.p1j = 0.5;
            opts.seed = derive_seed(cfg.seed, 0x46525400ull, 0);
            opts.map = map;
            try {
                const auto res = frt_multi(ds, stats, opts);
                for (int s = 0; s < 4; ++s) pvals[rep][s] = res[s].p_value;
                ok[rep] = 1;
            } catch (const SpilloverError&) {
                ok[rep] = 0;
            }
        });
        for (int s = 0; s < 4; ++s)
            for (double level : kFrtLevels) {
                McFrtRow row;
                row.n = cell.n;
                row.h = cell.h;
                row.c = cell.c;
                row.statistic = stats[s];
                row.level = level;
                row.b = b;
                int rejected = 0;
                for (std::size_t rep = 0; rep < pvals.size(); ++rep) {
                    if (!ok[rep]) {
                        ++row.failures;
                        continue;
                    }
                    ++row.reps;
                    if (pvals[rep][s] <= level + 1e-12) ++rejected;
                }
                row.rejection = row.reps > 0 ? static_cast<double>(rejected) / row.reps : 0.0;
                report.rows.push_back(row);
            }
    }
    return report;
}

// ---------------------------------------------------------------- pair example

Table1Summary table1_replication(int reps, std::size_t n, std::uint64_t master_seed,
                                 std::optional<double> exogenous_link_prob, unsigned workers) {
    check_reps(reps);
    struct Draw {
        bool ok = false;
        ErrorCode code = ErrorCode::RankDeficient;
        Fit fits[3];
    };
    std::vector<Draw> draws(static_cast<std::size_t>(reps));
    parallel_for(draws.size(), workers, [&](std::size_t rep) {
        PairDgpConfig cfg;
        cfg.n = n;
        cfg.seed = derive_seed(master_seed, 0x7AB1Eull, rep);
        cfg.exogenous_link_prob = exogenous_link_prob;
        const PairDataset ds = gen_pair(cfg);
        const auto s = ds.spillover();
        const auto d = to_double(ds.d);
        const auto dj = to_double(ds.d_j);
        const auto a = to_double(*ds.a);
        try {
            draws[rep].fits[0] = ols_fit(ds.y, d, s);
            draws[rep].fits[1] = tsls_fit(ds.y, d, s, dj);
            draws[rep].fits[2] = wls_fit(ds.y, d, s, dj, a);
            draws[rep].ok = true;
        } catch (const SpilloverError& e) {
            draws[rep].code = e.code();
        }
    });

    Table1Summary out;
    out.reps = reps;
    out.n = n;
    Table1Method* rows[3] = {&out.ols, &out.tsls, &out.wls};
    const Method methods[3] = {Method::OLS, Method::TSLS, Method::WLS};
    int used = 0;
    for (const Draw& dr : draws) {
        if (!dr.ok) {
            if (!out.first_failure) out.first_failure = dr.code;
            ++out.failures;
            continue;
        }
        ++used;
        for (int k = 0; k < 3; ++k) {
            const Fit& f = dr.fits[k];
            rows[k]->reject_fraction += std::abs(f.t_values[2]) > kZ975 ? 1.0 : 0.0;
            rows[k]->mean_beta_d += f.beta_d();
            rows[k]->mean_beta_s += f.beta_s();
            rows[k]->mean_t_s += f.t_values[2];
        }
    }
    for (int k = 0; k < 3; ++k) {
        rows[k]->method = methods[k];
        if (used > 0) {
            rows[k]->reject_fraction /= used;
            rows[k]->mean_beta_d /= used;
            rows[k]->mean_beta_s /= used;
            rows[k]->mean_t_s /= used;
        }
    }
    return out;
}

// ---------------------------------------------------------------- output

void write_csv(std::ostream& out, const McEstimationReport& report) {
    out << "n,h,c,method,truth,bias,rmse,coverage,reps,failures\n";
    for (const auto& r : report.rows)
        out << r.n << ',' << r.h << ',' << format_double(r.c) << ',' << to_string(r.method) << ','
            << format_double(r.truth) << ',' << format_double(r.bias) << ',' << format_double(r.rmse) << ','
            << format_double(r.coverage) << ',' << r.reps << ',' << r.failures << '\n';
}

void write_csv(std::ostream& out, const McFrtReport& report) {
    out << "n,h,c,statistic,level,rejection,reps,b,failures\n";
    for (const auto& r : report.rows)
        out << r.n << ',' << r.h << ',' << format_double(r.c) << ',' << to_string(r.statistic) << ','
            << format_double(r.level) << ',' << format_double(r.rejection) << ',' << r.reps << ',' << r.b << ','
            << r.failures << '\n';
}

std::string format_table(const McEstimationReport& report) {
    std::ostringstream o;
    char line[256];
    std::snprintf(line, sizeof line, "%6s %2s %5s | %8s %8s | %8s %8s %6s | %8s %8s %6s\n", "n", "h", "c", "OLS bias",
                  "RMSE", "2SLS bias", "RMSE", "Cov", "WLS bias", "RMSE", "Cov");
    o << line;
    std::map<std::tuple<std::size_t, int, long long>, std::array<const McEstimationRow*, 3>> cells;
    std::vector<std::tuple<std::size_t, int, long long>> order;
    for (const auto& r : report.rows) {
        const auto key = std::make_tuple(r.n, r.h, std::llround(r.c * 1e6));
        if (!cells.count(key)) {
            cells[key] = {nullptr, nullptr, nullptr};
            order.push_back(key);
        }
        cells[key][static_cast<int>(r.method)] = &r;
    }
    for (const auto& key : order) {
        const auto& c = cells[key];
        const McEstimationRow* any = c[1] ? c[1] : (c[2] ? c[2] : c[0]);
        std::string ols = c[0] ? fmt("%8.4f", c[0]->bias) + " " + fmt("%8.4f", c[0]->rmse) : std::string(17, ' ');
        auto iv = [](const McEstimationRow* r) {
            return r ? fmt("%8.4f", r->bias) + " " + fmt("%8.4f", r->rmse) + " " + fmt("%6.3f", r->coverage)
                     : std::string(24, ' ');
        };
        std::snprintf(line, sizeof line, "%6zu %2d %5.2f | %s | %s | %s\n", any->n, any->h, any->c, ols.c_str(),
                      iv(c[1]).c_str(), iv(c[2]).c_str());
        o << line;
    }
    return o.str();
}

std::string format_table(const McFrtReport& report) {
    std::ostringstream o;
    const Statistic stats[4] = {Statistic::TSLS, Statistic::WLS, Statistic::ITT, Statistic::ITTC};
    std::vector<std::pair<std::size_t, int>> order;
    for (const auto& r : report.rows)
        if (std::find(order.begin(), order.end(), std::make_pair(r.n, r.h)) == order.end())
            order.emplace_back(r.n, r.h);
    char line[256];
    std::snprintf(line, sizeof line, "%-5s %6s %2s | %6s %6s %6s\n", "stat", "n", "h", "10%", "5%", "1%");
    o << line;
    for (Statistic s : stats)
        for (const auto& [n, h] : order) {
            const McFrtRow* r10 = report.find(n, h, s, 0.10);
            if (!r10) continue;
            std::snprintf(line, sizeof line, "%-5s %6zu %2d | %6.3f %6.3f %6.3f\n", to_string(s), n, h, r10->rejection,
                          report.find(n, h, s, 0.05)->rejection, report.find(n, h, s, 0.01)->rejection);
            o << line;
        }
    return o.str();
}

std::string format_table(const Table1Summary& t) {
    std::ostringstream o;
    char line[256];
    std::snprintf(line, sizeof line, "n = %zu, reps = %d, failed = %d\n", t.n, t.reps, t.failures);
    o << line;
    std::snprintf(line, sizeof line, "%-6s %10s %10s %10s %12s\n", "method", "mean b_d", "mean b_s", "mean t_s",
                  "reject 5%");
    o << line;
    for (const Table1Method* m : {&t.ols, &t.tsls, &t.wls}) {
        std::snprintf(line, sizeof line, "%-6s %10.4f %10.4f %10.3f %12.3f\n", to_string(m->method), m->mean_beta_d,
                      m->mean_beta_s, m->mean_t_s, m->reject_fraction);
        o << line;
    }
    return o.str();
}

}  // namespace spillover
