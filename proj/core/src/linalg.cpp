#include "spillover/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace spillover {

bool solve3(Mat3 a, Vec3 b, Vec3& x, double rel_tol) {
    double scale = 0.0;
    for (const auto& row : a)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 || !std::isfinite(scale)) return false;
    const double tol = rel_tol * scale;

    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) <= tol) return false;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return true;
}

bool invert3(const Mat3& a, Mat3& inv, double rel_tol) {
    for (int c = 0; c < 3; ++c) {
        Vec3 e{0.0, 0.0, 0.0};
        e[c] = 1.0;
        Vec3 col{};
        if (!solve3(a, e, col, rel_tol)) return false;
        for (int r = 0; r < 3; ++r) inv[r][c] = col[r];
    }
    return true;
}

Mat3 symmetrize(const Mat3& a) {
    Mat3 s = a;
    for (int r = 0; r < 3; ++r)
        for (int c = r + 1; c < 3; ++c) {
            const double v = 0.5 * (a[r][c] + a[c][r]);
            s[r][c] = v;
            s[c][r] = v;
        }
    return s;
}

Mat3 transpose(const Mat3& a) {
    Mat3 t{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) t[c][r] = a[r][c];
    return t;
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 p{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a[r][k] * b[k][c];
            p[r][c] = s;
        }
    return p;
}

}  // namespace spillover
