#include "spillover/randomization.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spillover/errors.hpp"
#include "spillover/parallel.hpp"
#include "spillover/rng.hpp"

namespace spillover {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool needs_links(Statistic s) { return s != Statistic::ITT; }

// Everything a draw needs, fixed across draws.
struct Frame {
    std::vector<double> y, d, d1_obs, a1;
    std::vector<int> r, n_i, deg;
    std::vector<std::size_t> compliers;
    std::vector<double> yc, dc;
    bool links = false;
};

double mean_diff(Column y, Column d1, const double* a1) {
    double s1 = 0.0, s0 = 0.0;
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (a1 && a1[i] == 0.0) continue;
        if (d1[i] != 0.0) {
            s1 += y[i];
            ++n1;
        } else {
            s0 += y[i];
            ++n0;
        }
    }
    if (n1 == 0 || n0 == 0) throw SpilloverError(ErrorCode::DegenerateArm, "an instrument arm is empty");
    return s1 / n1 - s0 / n0;
}

struct Workspace {
    std::vector<double> z, m, zc, mc;
};

// Statistic values for assignment z (exposure recomputed from the observed one).
void evaluate(const Frame& f, std::span<const Statistic> stats, ExposureMap map, Workspace& w,
              std::span<double> out) {
    const std::size_t n = f.y.size();
    bool want_m = false;
    for (Statistic s : stats) want_m |= (s == Statistic::TSLS || s == Statistic::WLS);
    if (want_m) {
        for (std::size_t i = 0; i < n; ++i) {
            const int rr = counterfactual_exposure(f.r[i], static_cast<int>(f.a1[i]),
                                                   static_cast<int>(f.d1_obs[i]), static_cast<int>(w.z[i]));
            if (rr < 0 || rr > f.n_i[i])
                throw SpilloverError(ErrorCode::MalformedData, "recomputed exposure left [0, n_i]");
            w.m[i] = exposure(rr, f.n_i[i], f.deg.empty() ? 0 : f.deg[i], map);
        }
        for (std::size_t k = 0; k < f.compliers.size(); ++k) {
            w.zc[k] = w.z[f.compliers[k]];
            w.mc[k] = w.m[f.compliers[k]];
        }
    }
    for (std::size_t s = 0; s < stats.size(); ++s) {
        try {
            switch (stats[s]) {
                case Statistic::TSLS: out[s] = tsls_slope(f.y, f.d, w.m, w.z); break;
                case Statistic::WLS:
                    if (f.compliers.size() < 4)
                        throw SpilloverError(ErrorCode::InsufficientCompliers, "fewer than 4 compliers");
                    out[s] = tsls_slope(f.yc, f.dc, w.mc, w.zc);
                    break;
                case Statistic::ITT: out[s] = mean_diff(f.y, w.z, nullptr); break;
                case Statistic::ITTC: out[s] = mean_diff(f.y, w.z, f.a1.data()); break;
            }
        } catch (const SpilloverError&) {
            out[s] = kNegInf;
        }
    }
}

}  // namespace

const char* to_string(Statistic s) {
    switch (s) {
        case Statistic::TSLS: return "tsls";
        case Statistic::WLS: return "wls";
        case Statistic::ITT: return "itt";
        case Statistic::ITTC: return "ittc";
    }
    return "?";
}

const char* to_string(Sidedness s) { return s == Sidedness::Upper ? "upper" : "abs"; }

Statistic parse_statistic(std::string_view name) {
    if (name == "tsls") return Statistic::TSLS;
    if (name == "wls") return Statistic::WLS;
    if (name == "itt") return Statistic::ITT;
    if (name == "ittc") return Statistic::ITTC;
    throw SpilloverError(ErrorCode::InvalidConfig, "unknown statistic '" + std::string(name) + "'");
}

Sidedness parse_sidedness(std::string_view name) {
    if (name == "upper") return Sidedness::Upper;
    if (name == "abs") return Sidedness::TwoSidedAbs;
    throw SpilloverError(ErrorCode::InvalidConfig, "unknown sidedness '" + std::string(name) + "'");
}

double statistic_itt(Column y, Column d1) {
    if (y.size() != d1.size()) throw SpilloverError(ErrorCode::MalformedData, "length mismatch");
    return mean_diff(y, d1, nullptr);
}

double statistic_ittc(Column y, Column d1, Column a1) {
    if (y.size() != d1.size() || y.size() != a1.size())
        throw SpilloverError(ErrorCode::MalformedData, "length mismatch");
    return mean_diff(y, d1, a1.data());
}

bool frt_redraw(std::uint64_t seed, std::uint64_t draw, std::uint64_t unit, double p1j) {
    const auto block = random_block(seed, unit, Tag::Redraw, static_cast<std::uint32_t>(draw / 4));
    const double u = (static_cast<double>(block[draw % 4]) + 0.5) * 0x1.0p-32;
    return u < p1j;
}

std::vector<FrtResult> frt_multi(const NetworkDataset& data, std::span<const Statistic> stats,
                                 const FrtOptions& opts) {
    if (opts.b < 1) throw SpilloverError(ErrorCode::InvalidConfig, "b must be at least 1");
    if (stats.empty()) throw SpilloverError(ErrorCode::InvalidConfig, "no statistic requested");
    const std::size_t n = data.n();

    Frame f;
    f.y = data.y;
    f.d = to_double(data.d);
    f.d1_obs = to_double(data.d1);
    f.r = data.r;
    f.n_i = data.n_peers;
    f.links = data.a1.has_value();
    for (Statistic s : stats)
        if (needs_links(s) && !f.links)
            throw SpilloverError(ErrorCode::MissingLinks,
                                 std::string("statistic ") + to_string(s) + " needs the a1 column");
    if (f.links) {
        f.a1 = to_double(*data.a1);
        for (std::size_t i = 0; i < n; ++i)
            if (f.a1[i] != 0.0) {
                f.compliers.push_back(i);
                f.yc.push_back(f.y[i]);
                f.dc.push_back(f.d[i]);
            }
    } else {
        f.a1.assign(n, 0.0);
    }
    if (opts.map == ExposureMap::PerDegree) f.deg = data.degree();

    double p1j = 0.0;
    if (opts.p1j) {
        p1j = *opts.p1j;
    } else {
        for (double v : f.d1_obs) p1j += v;
        p1j /= static_cast<double>(n);
    }
    if (!(p1j > 0.0 && p1j < 1.0)) throw SpilloverError(ErrorCode::InvalidConfig, "p1j must lie in (0, 1)");

    const std::size_t k = stats.size();
    std::vector<double> observed(k);
    {
        Workspace w{f.d1_obs, std::vector<double>(n), std::vector<double>(f.compliers.size()),
                    std::vector<double>(f.compliers.size())};
        evaluate(f, stats, opts.map, w, observed);
        for (std::size_t s = 0; s < k; ++s)
            if (observed[s] == kNegInf)
                throw SpilloverError(ErrorCode::DegenerateArm,
                                     std::string("observed ") + to_string(stats[s]) + " statistic is not computable");
    }

    const std::size_t b = static_cast<std::size_t>(opts.b);
    std::vector<double> draws(b * k);
    parallel_for(b, opts.workers, [&](std::size_t draw) {
        Workspace w{std::vector<double>(n), std::vector<double>(n), std::vector<double>(f.compliers.size()),
                    std::vector<double>(f.compliers.size())};
        for (std::size_t i = 0; i < n; ++i) w.z[i] = frt_redraw(opts.seed, draw, i, p1j) ? 1.0 : 0.0;
        evaluate(f, stats, opts.map, w, std::span<double>(draws.data() + draw * k, k));
    });

    std::vector<FrtResult> results(k);
    for (std::size_t s = 0; s < k; ++s) {
        FrtResult& res = results[s];
        res.statistic_kind = stats[s];
        res.observed = observed[s];
        res.b = opts.b;
        res.sidedness = opts.sidedness;
        const bool abs_mode = opts.sidedness == Sidedness::TwoSidedAbs;
        const double t_obs = abs_mode ? std::abs(observed[s]) : observed[s];
        std::size_t hits = 0, finite = 0;
        double sum = 0.0, sumsq = 0.0, lo = 0.0, hi = 0.0;
        for (std::size_t j = 0; j < b; ++j) {
            const double t = draws[j * k + s];
            if (t == kNegInf) {
                ++res.degenerate_draws;
                continue;
            }
            if ((abs_mode ? std::abs(t) : t) >= t_obs) ++hits;
            lo = finite == 0 ? t : std::min(lo, t);
            hi = finite == 0 ? t : std::max(hi, t);
            sum += t;
            sumsq += t * t;
            ++finite;
        }
        res.p_value = opts.plus_one ? (1.0 + hits) / (1.0 + b) : static_cast<double>(hits) / b;
        if (finite > 0) {
            const double mean = sum / finite;
            const double var = finite > 1 ? std::max(0.0, (sumsq - finite * mean * mean) / (finite - 1)) : 0.0;
            res.draws_summary = {mean, std::sqrt(var), lo, hi};
        }
    }
    return results;
}

FrtResult frt(const NetworkDataset& data, Statistic stat, const FrtOptions& opts) {
    const Statistic one[1] = {stat};
    return frt_multi(data, one, opts).front();
}

}  // namespace spillover
