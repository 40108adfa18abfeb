#pragma once

#include "ramconn/scalar.hpp"

#include <optional>
#include <vector>

namespace ramconn {

// Dense exact linear algebra over a Scalar field. Matrices are row-major
// vectors of rows; all results are exact.
using Vec = std::vector<Scalar>;
using Mat = std::vector<Vec>;

Mat mat_zero(const FieldPtr& f, size_t rows, size_t cols);
Mat mat_identity(const FieldPtr& f, size_t n);
Mat mat_mul(const Mat& a, const Mat& b);
Vec mat_apply(const Mat& a, const Vec& v);
Mat mat_add(const Mat& a, const Mat& b);
Mat mat_sub(const Mat& a, const Mat& b);
Mat mat_transpose(const Mat& a);
Scalar mat_det(Mat a);
Mat mat_inverse(const Mat& a); // throws NotInvertible

size_t rank(Mat a);

// basis of the right kernel {x : a x = 0}
std::vector<Vec> kernel_basis(Mat a);

// one solution of a x = b, or nullopt when inconsistent
std::optional<Vec> solve(Mat a, Vec b);

// solution of a x = b together with a kernel basis (affine solution set)
struct AffineSolution {
    Vec particular;
    std::vector<Vec> kernel;
};
std::optional<AffineSolution> solve_affine(const Mat& a, const Vec& b);

// reduced row echelon form in place; returns pivot column of each pivot row
std::vector<size_t> rref(Mat& a);

} // namespace ramconn
