#pragma once

#include <array>

namespace spillover {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Gaussian elimination with partial pivoting. Returns false when a pivot falls
// below rel_tol times the largest absolute entry of `a`.
bool solve3(Mat3 a, Vec3 b, Vec3& x, double rel_tol = 1e-13);

// Same pivoting rule applied to the identity columns.
bool invert3(const Mat3& a, Mat3& inv, double rel_tol = 1e-13);

Mat3 symmetrize(const Mat3& a);
Mat3 transpose(const Mat3& a);
Mat3 multiply(const Mat3& a, const Mat3& b);

}  // namespace spillover
