#include "ramconn/linalg.hpp"

namespace ramconn {

static const FieldPtr& field_of(const Mat& a) {
    if (a.empty() || a[0].empty()) fail(ErrCode::Internal, "empty matrix has no field");
    return a[0][0].field();
}

Mat mat_zero(const FieldPtr& f, size_t rows, size_t cols) {
    return Mat(rows, Vec(cols, f->zero()));
}

Mat mat_identity(const FieldPtr& f, size_t n) {
    Mat m = mat_zero(f, n, n);
    for (size_t i = 0; i < n; ++i) m[i][i] = f->one();
    return m;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    const FieldPtr& f = field_of(a);
    Mat out = mat_zero(f, a.size(), b[0].size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < b.size(); ++k) {
            if (a[i][k].is_zero()) continue;
            for (size_t j = 0; j < b[0].size(); ++j) {
                if (b[k][j].is_zero()) continue;
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    return out;
}

Vec mat_apply(const Mat& a, const Vec& v) {
    const FieldPtr& f = field_of(a);
    Vec out(a.size(), f->zero());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j)
            if (!a[i][j].is_zero() && !v[j].is_zero()) out[i] += a[i][j] * v[j];
    return out;
}

Mat mat_add(const Mat& a, const Mat& b) {
    Mat out = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) out[i][j] += b[i][j];
    return out;
}

Mat mat_sub(const Mat& a, const Mat& b) {
    Mat out = a;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) out[i][j] -= b[i][j];
    return out;
}

Mat mat_transpose(const Mat& a) {
    const FieldPtr& f = field_of(a);
    Mat out = mat_zero(f, a[0].size(), a.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) out[j][i] = a[i][j];
    return out;
}

std::vector<size_t> rref(Mat& a) {
    std::vector<size_t> pivots;
    if (a.empty()) return pivots;
    size_t rows = a.size(), cols = a[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && a[piv][c].is_zero()) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[r]);
        Scalar inv = a[r][c].inverse();
        for (size_t j = c; j < cols; ++j) a[r][j] = a[r][j] * inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            Scalar f = a[i][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

size_t rank(Mat a) { return rref(a).size(); }

Scalar mat_det(Mat a) {
    const FieldPtr f = field_of(a);
    size_t n = a.size();
    Scalar det = f->one();
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && a[piv][c].is_zero()) ++piv;
        if (piv == n) return f->zero();
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        Scalar inv = a[c][c].inverse();
        for (size_t r = c + 1; r < n; ++r) {
            if (a[r][c].is_zero()) continue;
            Scalar fac = a[r][c] * inv;
            for (size_t j = c; j < n; ++j) a[r][j] -= fac * a[c][j];
        }
    }
    return det;
}

Mat mat_inverse(const Mat& a) {
    const FieldPtr f = field_of(a);
    size_t n = a.size();
    Mat aug = a;
    for (size_t i = 0; i < n; ++i) {
        Mat id = mat_identity(f, n);
        aug[i].insert(aug[i].end(), id[i].begin(), id[i].end());
    }
    auto piv = rref(aug);
    if (piv.size() != n || piv.back() != n - 1)
        fail(ErrCode::NotInvertible, "singular matrix");
    Mat out = mat_zero(f, n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) out[i][j] = aug[i][n + j];
    return out;
}

std::vector<Vec> kernel_basis(Mat a) {
    if (a.empty() || a[0].empty()) return {};
    const FieldPtr f = field_of(a);
    size_t cols = a[0].size();
    auto pivots = rref(a);
    std::vector<bool> is_pivot(cols, false);
    for (size_t c : pivots) is_pivot[c] = true;
    std::vector<Vec> basis;
    for (size_t fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc]) continue;
        Vec v(cols, f->zero());
        v[fc] = f->one();
        for (size_t pr = 0; pr < pivots.size(); ++pr) v[pivots[pr]] = -a[pr][fc];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<Vec> solve(Mat a, Vec b) {
    auto sol = solve_affine(a, b);
    if (!sol) return std::nullopt;
    return sol->particular;
}

std::optional<AffineSolution> solve_affine(const Mat& a, const Vec& b) {
    if (a.empty()) return AffineSolution{{}, {}};
    const FieldPtr f = field_of(a);
    size_t rows = a.size(), cols = a[0].size();
    Mat aug = a;
    for (size_t i = 0; i < rows; ++i) aug[i].push_back(b[i]);
    Mat work = aug;
    auto pivots = rref(work);
    // inconsistent iff a pivot lands in the rhs column
    if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
    Vec x(cols, f->zero());
    for (size_t pr = 0; pr < pivots.size(); ++pr) x[pivots[pr]] = work[pr][cols];
    // kernel from the coefficient part
    std::vector<bool> is_pivot(cols, false);
    for (size_t c : pivots) is_pivot[c] = true;
    std::vector<Vec> basis;
    for (size_t fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc]) continue;
        Vec v(cols, f->zero());
        v[fc] = f->one();
        for (size_t pr = 0; pr < pivots.size(); ++pr) v[pivots[pr]] = -work[pr][fc];
        basis.push_back(std::move(v));
    }
    return AffineSolution{std::move(x), std::move(basis)};
}

} // namespace ramconn
