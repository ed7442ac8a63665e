#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "spillover/linalg.hpp"

namespace spillover {

enum class Method { OLS, TSLS, WLS };
enum class SeKind { Classical, Robust };

const char* to_string(Method m);

struct Fit {
    Method method = Method::OLS;
    Vec3 coef{};          // (beta0, beta_d, beta_s)
    Vec3 se_classical{};  // homoskedastic, df = n_used - 3
    Vec3 se_robust{};     // HC0 sandwich of the estimating equations
    Vec3 t_values{};
    std::size_t n_used = 0;
    SeKind se_kind_for_t = SeKind::Classical;

    double beta0() const { return coef[0]; }
    double beta_d() const { return coef[1]; }
    double beta_s() const { return coef[2]; }
    const Vec3& se(SeKind k) const { return k == SeKind::Classical ? se_classical : se_robust; }
};

using Column = std::span<const double>;

Fit ols_fit(Column y, Column d, Column m, SeKind t_kind = SeKind::Classical);

// Just-identified IV with instruments (1, d, z) for regressors (1, d, m).
Fit tsls_fit(Column y, Column d, Column m, Column z, SeKind t_kind = SeKind::Classical);

// tsls_fit on the subsample a1 = 1.
Fit wls_fit(Column y, Column d, Column m, Column z, Column a1, SeKind t_kind = SeKind::Classical);

// beta_s = z~'y / z~'m with z~ the residual of z on (1, d). Shared by tsls_fit and the
// randomization test so both produce identical values.
double tsls_slope(Column y, Column d, Column m, Column z);

// Estimated asymptotic variances (n times the squared robust SEs). For 2SLS/WLS the
// beta_s entry is n^-1 sum (z~ e)^2 / (n^-1 z~'m)^2, with n the full sample size.
Vec3 plug_in_variance(const Fit& fit, Column y, Column d, Column m, std::optional<Column> z = std::nullopt,
                      std::optional<Column> a1 = std::nullopt);

}  // namespace spillover
