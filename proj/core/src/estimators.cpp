#include "spillover/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spillover/errors.hpp"

namespace spillover {

namespace {

constexpr double kWeakTol = 1e-12;
constexpr double kRankTol = 1e-12;

void check_lengths(std::size_t n, std::initializer_list<std::size_t> others) {
    for (std::size_t k : others)
        if (k != n) throw SpilloverError(ErrorCode::MalformedData, "input columns differ in length");
    if (n < 4) throw SpilloverError(ErrorCode::RankDeficient, "need at least 4 observations");
}

struct GroupMeans {
    double mean0 = 0.0, mean1 = 0.0;
};

// Means of v within d = 0 and d = 1; throws when either group is empty.
GroupMeans group_means(Column v, Column d) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (d[i] != 0.0) {
            s1 += v[i];
            ++n1;
        } else {
            s0 += v[i];
            ++n0;
        }
    }
    if (n0 == 0 || n1 == 0) throw SpilloverError(ErrorCode::RankDeficient, "d is constant");
    return {s0 / n0, s1 / n1};
}

// m must vary after removing its d-group means, relative to its total variation.
void check_regressor_rank(Column m, Column d) {
    const auto g = group_means(m, d);
    double mean = 0.0;
    for (double v : m) mean += v;
    mean /= m.size();
    double within = 0.0, total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double r = m[i] - (d[i] != 0.0 ? g.mean1 : g.mean0);
        within += r * r;
        total += (m[i] - mean) * (m[i] - mean);
    }
    if (total == 0.0 || within <= kRankTol * total)
        throw SpilloverError(ErrorCode::RankDeficient, "m is constant or collinear with (1, d)");
}

inline Vec3 row(double d, double v) { return {1.0, d, v}; }

Mat3 cross(Column d, Column a, Column b) {
    Mat3 s{};
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Vec3 u = row(d[i], a[i]);
        const Vec3 w = row(d[i], b[i]);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) s[r][c] += u[r] * w[c];
    }
    return s;
}

Mat3 weighted_cross(Column d, Column z, std::span<const double> w) {
    Mat3 s{};
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Vec3 u = row(d[i], z[i]);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) s[r][c] += w[i] * u[r] * u[c];
    }
    return s;
}

std::vector<double> residuals(Column y, Column d, Column m, const Vec3& b) {
    std::vector<double> e(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) e[i] = y[i] - b[0] - b[1] * d[i] - b[2] * m[i];
    return e;
}

// Fills both SE families for instruments z (z = m gives OLS).
void fill_standard_errors(Fit& fit, Column d, Column m, Column z, const std::vector<double>& e,
                          bool exogenous) {
    const std::size_t n = e.size();
    Mat3 zx = cross(d, z, m);
    if (exogenous) zx = symmetrize(zx);
    Mat3 zx_inv{};
    if (!invert3(zx, zx_inv)) throw SpilloverError(ErrorCode::RankDeficient, "moment matrix is singular");
    const Mat3 xz_inv = transpose(zx_inv);

    double ssr = 0.0;
    std::vector<double> e2(n);
    for (std::size_t i = 0; i < n; ++i) {
        ssr += e[i] * e[i];
        e2[i] = e[i] * e[i];
    }
    const double sigma2 = ssr / static_cast<double>(n - 3);
    std::vector<double> ones(n, 1.0);
    const Mat3 classical = multiply(multiply(zx_inv, weighted_cross(d, z, ones)), xz_inv);
    const Mat3 robust = multiply(multiply(zx_inv, weighted_cross(d, z, e2)), xz_inv);
    for (int k = 0; k < 3; ++k) {
        fit.se_classical[k] = std::sqrt(std::max(0.0, sigma2 * classical[k][k]));
        fit.se_robust[k] = std::sqrt(std::max(0.0, robust[k][k]));
    }
    const Vec3& se = fit.se(fit.se_kind_for_t);
    for (int k = 0; k < 3; ++k) fit.t_values[k] = fit.coef[k] / se[k];
}

}  // namespace

const char* to_string(Method m) {
    switch (m) {
        case Method::OLS: return "ols";
        case Method::TSLS: return "tsls";
        case Method::WLS: return "wls";
    }
    return "?";
}

Fit ols_fit(Column y, Column d, Column m, SeKind t_kind) {
    check_lengths(y.size(), {d.size(), m.size()});
    check_regressor_rank(m, d);

    Mat3 xtx{};
    Vec3 xty{};
    for (std::size_t i = 0; i < y.size(); ++i) {
        const Vec3 x = row(d[i], m[i]);
        for (int r = 0; r < 3; ++r) {
            xty[r] += x[r] * y[i];
            for (int c = 0; c < 3; ++c) xtx[r][c] += x[r] * x[c];
        }
    }
    Fit fit;
    fit.method = Method::OLS;
    fit.n_used = y.size();
    fit.se_kind_for_t = t_kind;
    if (!solve3(symmetrize(xtx), xty, fit.coef))
        throw SpilloverError(ErrorCode::RankDeficient, "normal equations are singular");
    fill_standard_errors(fit, d, m, m, residuals(y, d, m, fit.coef), true);
    return fit;
}

double tsls_slope(Column y, Column d, Column m, Column z) {
    const std::size_t n = y.size();
    bool z_varies = false;
    for (std::size_t i = 1; i < n && !z_varies; ++i) z_varies = z[i] != z[0];
    if (!z_varies) throw SpilloverError(ErrorCode::RankDeficient, "instrument is constant");
    const auto g = group_means(z, d);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double zt = z[i] - (d[i] != 0.0 ? g.mean1 : g.mean0);
        num += zt * y[i];
        den += zt * m[i];
    }
    if (!(std::abs(den) / static_cast<double>(n) >= kWeakTol))
        throw SpilloverError(ErrorCode::WeakFirstStage,
                             "|z~'m|/n = " + std::to_string(std::abs(den) / n) + " below 1e-12");
    return num / den;
}

Fit tsls_fit(Column y, Column d, Column m, Column z, SeKind t_kind) {
    check_lengths(y.size(), {d.size(), m.size(), z.size()});
    Fit fit;
    fit.method = Method::TSLS;
    fit.n_used = y.size();
    fit.se_kind_for_t = t_kind;
    const double bs = tsls_slope(y, d, m, z);

    std::vector<double> partial(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) partial[i] = y[i] - bs * m[i];
    const auto g = group_means(partial, d);
    fit.coef = {g.mean0, g.mean1 - g.mean0, bs};
    fill_standard_errors(fit, d, m, z, residuals(y, d, m, fit.coef), false);
    return fit;
}

Fit wls_fit(Column y, Column d, Column m, Column z, Column a1, SeKind t_kind) {
    const std::size_t n = y.size();
    if (d.size() != n || m.size() != n || z.size() != n || a1.size() != n)
        throw SpilloverError(ErrorCode::MalformedData, "input columns differ in length");
    std::vector<double> ys, ds, ms, zs;
    for (std::size_t i = 0; i < n; ++i) {
        if (a1[i] == 0.0) continue;
        ys.push_back(y[i]);
        ds.push_back(d[i]);
        ms.push_back(m[i]);
        zs.push_back(z[i]);
    }
    if (ys.size() < 4)
        throw SpilloverError(ErrorCode::InsufficientCompliers,
                             std::to_string(ys.size()) + " units with a1 = 1; need at least 4");
    Fit fit = tsls_fit(ys, ds, ms, zs, t_kind);
    fit.method = Method::WLS;
    return fit;
}

Vec3 plug_in_variance(const Fit& fit, Column y, Column d, Column m, std::optional<Column> z,
                      std::optional<Column> a1) {
    const std::size_t n_full = y.size();
    if (fit.method == Method::OLS) {
        Vec3 v{};
        for (int k = 0; k < 3; ++k) v[k] = n_full * fit.se_robust[k] * fit.se_robust[k];
        return v;
    }
    if (!z) throw SpilloverError(ErrorCode::InvalidConfig, "plug-in variance needs the instrument");
    if (fit.method == Method::WLS && !a1)
        throw SpilloverError(ErrorCode::MissingLinks, "WLS plug-in variance needs a1");

    std::vector<double> ys, ds, ms, zs;
    for (std::size_t i = 0; i < n_full; ++i) {
        if (fit.method == Method::WLS && (*a1)[i] == 0.0) continue;
        ys.push_back(y[i]);
        ds.push_back(d[i]);
        ms.push_back(m[i]);
        zs.push_back((*z)[i]);
    }
    const auto g = group_means(zs, ds);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double zt = zs[i] - (ds[i] != 0.0 ? g.mean1 : g.mean0);
        const double e = ys[i] - fit.coef[0] - fit.coef[1] * ds[i] - fit.coef[2] * ms[i];
        num += (zt * e) * (zt * e);
        den += zt * ms[i];
    }
    const double nf = static_cast<double>(n_full);
    Vec3 v{};
    for (int k = 0; k < 2; ++k) v[k] = nf * fit.se_robust[k] * fit.se_robust[k];
    v[2] = (num / nf) / ((den / nf) * (den / nf));
    return v;
}

}  // namespace spillover
