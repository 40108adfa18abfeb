#include "ramconn/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace ramconn {

const char* err_name(ErrCode c) {
    switch (c) {
        case ErrCode::RadicalReducible: return "RadicalReducible";
        case ErrCode::TowerTooDeep: return "TowerTooDeep";
        case ErrCode::MissingRoot: return "MissingRoot";
        case ErrCode::NotInvertible: return "NotInvertible";
        case ErrCode::FieldMismatch: return "FieldMismatch";
        case ErrCode::PoleTooSmall: return "PoleTooSmall";
        case ErrCode::PoleOrderMismatch: return "PoleOrderMismatch";
        case ErrCode::DegenerateNewtonPolygon: return "DegenerateNewtonPolygon";
        case ErrCode::NotGenericRamified: return "NotGenericRamified";
        case ErrCode::C1Zero: return "C1Zero";
        case ErrCode::NotIso: return "NotIso";
        case ErrCode::EmptySolutionSet: return "EmptySolutionSet";
        case ErrCode::BoundTooSmall: return "BoundTooSmall";
        case ErrCode::ChartMismatch: return "ChartMismatch";
        case ErrCode::DegenerateParameters: return "DegenerateParameters";
        case ErrCode::Inconclusive: return "Inconclusive";
        case ErrCode::SchemaError: return "SchemaError";
        case ErrCode::FileError: return "FileError";
        case ErrCode::PrecisionUnsupported: return "PrecisionUnsupported";
        case ErrCode::Internal: return "Internal";
    }
    return "Unknown";
}

Rat rat_from_string(const std::string& s) {
    if (s.empty()) fail(ErrCode::SchemaError, "empty rational literal");
    for (char ch : s)
        if (!(std::isdigit((unsigned char)ch) || ch == '-' || ch == '+' || ch == '/'))
            fail(ErrCode::SchemaError, "bad rational literal '" + s + "'");
    Rat q;
    if (q.set_str(s, 10) != 0) fail(ErrCode::SchemaError, "bad rational literal '" + s + "'");
    q.canonicalize();
    return q;
}

std::string rat_to_string(const Rat& q) { return q.get_str(); }

// ---------------------------------------------------------------------------
// rational polynomial helpers (dense, coeff of X^i at index i)

namespace {

using RPoly = std::vector<Rat>;

void rp_trim(RPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

RPoly rp_mul(const RPoly& a, const RPoly& b) {
    if (a.empty() || b.empty()) return {};
    RPoly out(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// exact division, remainder must vanish
RPoly rp_div_exact(RPoly num, const RPoly& den) {
    RPoly q(num.size() >= den.size() ? num.size() - den.size() + 1 : 0, Rat(0));
    for (size_t i = num.size(); i-- >= den.size() && i + 1 >= den.size();) {
        if (i + 1 < den.size()) break;
        Rat c = num[i] / den.back();
        q[i - (den.size() - 1)] = c;
        for (size_t j = 0; j < den.size(); ++j) num[i - (den.size() - 1) + j] -= c * den[j];
        if (i == 0) break;
    }
    rp_trim(num);
    if (!num.empty()) fail(ErrCode::Internal, "inexact polynomial division");
    return q;
}

RPoly cyclotomic_poly(unsigned L) {
    // X^L - 1 divided by the proper-divisor cyclotomics
    RPoly p(L + 1, Rat(0));
    p[0] = -1;
    p[L] = 1;
    for (unsigned d = 1; d < L; ++d) {
        if (L % d != 0) continue;
        p = rp_div_exact(std::move(p), cyclotomic_poly(d));
    }
    return p;
}

unsigned euler_phi(unsigned n) {
    unsigned res = n;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        while (n % p == 0) n /= p;
        res -= res / p;
    }
    if (n > 1) res -= res / n;
    return res;
}

std::vector<unsigned> prime_divisors(unsigned n) {
    std::vector<unsigned> ps;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        ps.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

// all complex roots by Durand-Kerner; coefficients monic, degree >= 1
using CLD = std::complex<long double>;

std::vector<CLD> numeric_roots(const std::vector<CLD>& monic) {
    size_t n = monic.size() - 1;
    std::vector<CLD> cs(monic);
    for (auto& c : cs) c /= monic[n];
    auto evaln = [&](CLD x) {
        CLD v = 1;
        for (size_t i = n; i-- > 0;) v = v * x + cs[i];
        return v;
    };
    long double scale = 1.0L;
    for (size_t i = 0; i < n; ++i) scale = std::max(scale, powl(std::abs(cs[i]), 1.0L / (long double)(n - i)));
    std::vector<CLD> z(n);
    CLD seed(0.4L, 0.9L);
    CLD acc = 1;
    for (size_t i = 0; i < n; ++i) {
        acc *= seed;
        z[i] = acc * scale * (long double)1.1;
    }
    for (int it = 0; it < 600; ++it) {
        long double worst = 0;
        for (size_t i = 0; i < n; ++i) {
            CLD num = evaln(z[i]);
            CLD den = 1;
            for (size_t j = 0; j < n; ++j)
                if (j != i) den *= (z[i] - z[j]);
            if (std::abs(den) < 1e-300L) den = CLD(1e-300L, 0);
            CLD delta = num / den;
            z[i] -= delta;
            worst = std::max(worst, std::abs(delta) / std::max((long double)1, std::abs(z[i])));
        }
        if (worst < 1e-18L) break;
    }
    return z;
}

bool rationalize(long double x, Rat& out, long double eps = 1e-11L, long long qmax = 100000000LL) {
    long double target = x;
    long long p0 = 1, q0 = 0, p1 = 0, q1 = 1; // convergents
    long double v = x;
    for (int it = 0; it < 64; ++it) {
        long double fl = floorl(v);
        if (fl > 9e17L || fl < -9e17L) return false;
        long long a = (long long)fl;
        long long p2 = a * p0 + p1, q2 = a * q0 + q1;
        if (q2 > qmax) return false;
        p1 = p0; q1 = q0; p0 = p2; q0 = q2;
        long double approx = (long double)p0 / (long double)q0;
        if (fabsl(approx - target) <= eps * std::max((long double)1, fabsl(target))) {
            out = Rat((long)p0, (unsigned long)q0);
            if (q0 < 0) out = -out;
            out.canonicalize();
            return true;
        }
        long double frac = v - fl;
        if (fabsl(frac) < 1e-19L) return false;
        v = 1.0L / frac;
    }
    return false;
}

} // namespace

// ---------------------------------------------------------------------------
// Scalar

Scalar::Scalar(FieldPtr f, std::vector<Rat> coeffs) : field_(std::move(f)), c_(std::move(coeffs)) {
    if (!field_ || c_.size() != field_->dim()) fail(ErrCode::Internal, "scalar size mismatch");
    for (auto& q : c_) q.canonicalize();
}

bool Scalar::is_zero() const {
    for (const auto& q : c_)
        if (q != 0) return false;
    return true;
}

bool Scalar::is_one() const {
    if (c_.empty() || c_[0] != 1) return false;
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

bool Scalar::is_rational() const {
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

Scalar Scalar::operator-() const {
    Scalar r(*this);
    for (auto& q : r.c_) q = -q;
    return r;
}

static void check_same_field(const Scalar& a, const Scalar& b) {
    if (!a.valid() || !b.valid()) fail(ErrCode::Internal, "uninitialized scalar");
    if (a.field().get() != b.field().get() && !a.field()->same_as(*b.field()))
        fail(ErrCode::FieldMismatch, "scalars from different towers");
}

Scalar& Scalar::operator+=(const Scalar& o) {
    check_same_field(*this, o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    check_same_field(*this, o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    check_same_field(*this, o);
    if (c_.size() == 1) {
        c_[0] *= o.c_[0];
        return *this;
    }
    c_ = field_->mul_vec(c_, o.c_);
    return *this;
}

bool operator==(const Scalar& a, const Scalar& b) {
    check_same_field(a, b);
    return a.c_ == b.c_;
}

Scalar Scalar::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Scalar acc = field_->one();
    Scalar base = *this;
    unsigned long k = (unsigned long)e;
    while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

int Scalar::lex_compare(const Scalar& a, const Scalar& b) {
    check_same_field(a, b);
    for (size_t i = 0; i < a.c_.size(); ++i) {
        int c = cmp(a.c_[i], b.c_[i]);
        if (c != 0) return c;
    }
    return 0;
}

std::string Scalar::to_string() const {
    if (!valid()) return "<invalid>";
    if (is_rational()) return rat_to_string(c_.empty() ? Rat(0) : c_[0]);
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < c_.size(); ++i) {
        if (i) os << ",";
        os << rat_to_string(c_[i]);
    }
    os << "]";
    return os.str();
}

Scalar operator*(const Rat& q, const Scalar& s) {
    Scalar r(s);
    std::vector<Rat> c = r.coeffs();
    for (auto& x : c) x *= q;
    return Scalar(s.field(), std::move(c));
}

// ---------------------------------------------------------------------------
// Field

FieldPtr Field::make(const FieldSpec& spec) {
    if (spec.cyclotomic_order < 1) fail(ErrCode::SchemaError, "cyclotomic order must be >= 1");
    auto f = std::shared_ptr<Field>(new Field());
    f->L_ = spec.cyclotomic_order;
    f->cyclo_ = cyclotomic_poly(f->L_);
    f->level_dims_ = {euler_phi(f->L_)};
    f->dim_ = f->level_dims_[0];
    FieldPtr cur = f;
    for (const auto& rad : spec.radicals) {
        if (rad.radicand.size() != cur->dim())
            fail(ErrCode::SchemaError, "radicand coefficient count does not match tower dimension");
        cur = cur->extend(rad.exponent, Scalar(cur, rad.radicand));
    }
    return cur;
}

FieldPtr Field::extend(unsigned e, const Scalar& u) const {
    if (e < 1) fail(ErrCode::SchemaError, "radical exponent must be >= 1");
    if (u.field().get() != this && !u.field()->same_as(*this))
        fail(ErrCode::FieldMismatch, "radicand not in this tower");
    if (radicals_.size() >= 2) fail(ErrCode::TowerTooDeep, "radical towers of depth > 2 are not supported");
    if (e > 1) check_radical_irreducible(u, e);
    auto f = std::shared_ptr<Field>(new Field());
    f->L_ = L_;
    f->cyclo_ = cyclo_;
    f->radicals_ = radicals_;
    f->radicals_.push_back(Radical{e, u.coeffs()});
    f->level_dims_ = level_dims_;
    f->level_dims_.push_back(e);
    f->dim_ = dim_ * e;
    return f;
}

bool Field::same_as(const Field& o) const {
    if (L_ != o.L_ || radicals_.size() != o.radicals_.size()) return false;
    for (size_t i = 0; i < radicals_.size(); ++i)
        if (radicals_[i].exponent != o.radicals_[i].exponent || radicals_[i].radicand != o.radicals_[i].radicand)
            return false;
    return true;
}

bool Field::extends(const Field& sub) const {
    if (L_ != sub.L_ || radicals_.size() < sub.radicals_.size()) return false;
    for (size_t i = 0; i < sub.radicals_.size(); ++i) {
        if (radicals_[i].exponent != sub.radicals_[i].exponent) return false;
        // the sub-tower radicand vector is a prefix-sized truncation
        if (radicals_[i].radicand.size() < sub.radicals_[i].radicand.size()) return false;
        for (size_t t = 0; t < radicals_[i].radicand.size(); ++t) {
            Rat expect = t < sub.radicals_[i].radicand.size() ? sub.radicals_[i].radicand[t] : Rat(0);
            if (radicals_[i].radicand[t] != expect) return false;
        }
    }
    return true;
}

Scalar lift(const FieldPtr& bigger, const Scalar& x) {
    if (bigger.get() == x.field().get() || bigger->same_as(*x.field())) return Scalar(bigger, x.coeffs());
    if (!bigger->extends(*x.field())) fail(ErrCode::FieldMismatch, "target tower does not extend the source");
    std::vector<Rat> c = x.coeffs();
    c.resize(bigger->dim(), Rat(0));
    return Scalar(bigger, std::move(c));
}

Scalar Field::zero() const { return Scalar(shared_from_this(), std::vector<Rat>(dim_, Rat(0))); }

Scalar Field::one() const { return from_rat(Rat(1)); }

Scalar Field::from_rat(const Rat& q) const {
    std::vector<Rat> c(dim_, Rat(0));
    c[0] = q;
    return Scalar(shared_from_this(), std::move(c));
}

Scalar Field::basis_element(unsigned i) const {
    if (i >= dim_) fail(ErrCode::Internal, "basis index out of range");
    std::vector<Rat> c(dim_, Rat(0));
    c[i] = 1;
    return Scalar(shared_from_this(), std::move(c));
}

Scalar Field::zeta() const {
    // X mod cyclotomic; for L <= 2 this is rational
    if (level_dims_[0] == 1) return from_rat(L_ == 2 ? Rat(-1) : Rat(1));
    return basis_element(1);
}

Scalar Field::radical_generator(unsigned i) const {
    if (i >= radicals_.size()) fail(ErrCode::Internal, "no such radical");
    unsigned offset = level_dims_[0];
    for (unsigned k = 0; k < i; ++k) offset *= level_dims_[k + 1];
    if (radicals_[i].exponent == 1) {
        // degree-1 radical is just its radicand
        std::vector<Rat> pad = radicals_[i].radicand;
        pad.resize(dim_, Rat(0));
        return Scalar(shared_from_this(), std::move(pad));
    }
    return basis_element(offset);
}

bool Field::has_root_of_unity(unsigned k) const {
    if (k == 0) return false;
    unsigned Lp = (L_ % 2 == 0) ? L_ : 2 * L_;
    return Lp % k == 0;
}

Scalar Field::root_of_unity(unsigned k) const {
    if (!has_root_of_unity(k))
        fail(ErrCode::MissingRoot, "no primitive " + std::to_string(k) + "-th root of unity in Q(zeta_" +
                                       std::to_string(L_) + ")");
    auto zeta_pow = [&](unsigned long j) {
        j %= L_;
        // X^j reduced mod cyclotomic
        RPoly p(j + 1, Rat(0));
        p[j] = 1;
        // reduce
        const RPoly& m = cyclo_;
        while (p.size() >= m.size()) {
            Rat c = p.back();
            size_t off = p.size() - m.size();
            for (size_t t = 0; t < m.size(); ++t) p[off + t] -= c * m[t];
            rp_trim(p);
            if (p.empty()) break;
        }
        std::vector<Rat> c(dim_, Rat(0));
        for (size_t t = 0; t < p.size(); ++t) c[t] = p[t];
        return Scalar(shared_from_this(), std::move(c));
    };
    if (L_ % k == 0) return zeta_pow(L_ / k);
    // L odd, k | 2L: zeta_{2L} = -zeta_L^{(L+1)/2}
    unsigned long t = 2ul * L_ / k;
    Scalar v = zeta_pow((unsigned long)(L_ + 1) / 2 * t);
    return (t % 2 == 1) ? -v : v;
}

// ---------------------------------------------------------------------------
// tower multiplication

void Field::mul_level(int level, const Rat* a, const Rat* b, Rat* out, Rat*) const {
    if (level == 0) {
        unsigned d = level_dims_[0];
        std::vector<Rat> prod(2 * d - 1, Rat(0));
        for (unsigned i = 0; i < d; ++i) {
            if (a[i] == 0) continue;
            for (unsigned j = 0; j < d; ++j) {
                if (b[j] == 0) continue;
                prod[i + j] += a[i] * b[j];
            }
        }
        // reduce mod the (monic) cyclotomic polynomial
        for (unsigned i = 2 * d - 2; i >= d; --i) {
            if (prod[i] != 0) {
                Rat c = prod[i];
                for (unsigned t = 0; t < d; ++t) prod[i - d + t] -= c * cyclo_[t];
                prod[i] = 0;
            }
            if (i == d) break;
        }
        for (unsigned i = 0; i < d; ++i) out[i] = prod[i];
        return;
    }
    unsigned e = level_dims_[level];
    unsigned B = 1;
    for (int l = 0; l < level; ++l) B *= level_dims_[l];
    std::vector<Rat> prod((2 * e - 1) * B, Rat(0));
    std::vector<Rat> tmp(B);
    for (unsigned i = 0; i < e; ++i)
        for (unsigned j = 0; j < e; ++j) {
            mul_level(level - 1, a + i * B, b + j * B, tmp.data(), nullptr);
            for (unsigned t = 0; t < B; ++t) prod[(i + j) * B + t] += tmp[t];
        }
    // reduce Y^e = u
    const std::vector<Rat>& u = radicals_[level - 1].radicand;
    for (unsigned k = 2 * e - 2; k >= e; --k) {
        mul_level(level - 1, prod.data() + k * B, u.data(), tmp.data(), nullptr);
        for (unsigned t = 0; t < B; ++t) prod[(k - e) * B + t] += tmp[t];
        if (k == e) break;
    }
    for (unsigned t = 0; t < e * B; ++t) out[t] = prod[t];
}

std::vector<Rat> Field::mul_vec(const std::vector<Rat>& a, const std::vector<Rat>& b) const {
    std::vector<Rat> out(dim_, Rat(0));
    mul_level((int)level_dims_.size() - 1, a.data(), b.data(), out.data(), nullptr);
    for (auto& q : out) q.canonicalize();
    return out;
}

std::vector<std::vector<Rat>> Field::mult_matrix(const Scalar& x) const {
    std::vector<std::vector<Rat>> M(dim_, std::vector<Rat>(dim_, Rat(0)));
    for (unsigned j = 0; j < dim_; ++j) {
        std::vector<Rat> ej(dim_, Rat(0));
        ej[j] = 1;
        std::vector<Rat> col = mul_vec(x.coeffs(), ej);
        for (unsigned i = 0; i < dim_; ++i) M[i][j] = col[i];
    }
    return M;
}

Rat Field::norm(const Scalar& x) const {
    // determinant of the multiplication matrix, fraction-free-ish Gauss
    auto M = mult_matrix(x);
    Rat det(1);
    unsigned n = dim_;
    for (unsigned col = 0; col < n; ++col) {
        unsigned piv = col;
        while (piv < n && M[piv][col] == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != col) {
            std::swap(M[piv], M[col]);
            det = -det;
        }
        det *= M[col][col];
        Rat inv = 1 / M[col][col];
        for (unsigned r = col + 1; r < n; ++r) {
            if (M[r][col] == 0) continue;
            Rat f = M[r][col] * inv;
            for (unsigned c2 = col; c2 < n; ++c2) M[r][c2] -= f * M[col][c2];
        }
    }
    det.canonicalize();
    return det;
}

Scalar Scalar::inverse() const {
    if (!valid()) fail(ErrCode::Internal, "uninitialized scalar");
    if (is_zero()) fail(ErrCode::NotInvertible, "division by zero");
    if (c_.size() == 1) return Scalar(field_, {1 / c_[0]});
    // solve (mult matrix) * y = e0
    auto M = field_->mult_matrix(*this);
    unsigned n = field_->dim();
    std::vector<Rat> rhs(n, Rat(0));
    rhs[0] = 1;
    for (unsigned col = 0; col < n; ++col) {
        unsigned piv = col;
        while (piv < n && M[piv][col] == 0) ++piv;
        if (piv == n) fail(ErrCode::NotInvertible, "zero divisor in tower (radical data inconsistent?)");
        std::swap(M[piv], M[col]);
        std::swap(rhs[piv], rhs[col]);
        Rat inv = 1 / M[col][col];
        for (unsigned c2 = col; c2 < n; ++c2) M[col][c2] *= inv;
        rhs[col] *= inv;
        for (unsigned r = 0; r < n; ++r) {
            if (r == col || M[r][col] == 0) continue;
            Rat f = M[r][col];
            for (unsigned c2 = col; c2 < n; ++c2) M[r][c2] -= f * M[col][c2];
            rhs[r] -= f * rhs[col];
        }
    }
    return Scalar(field_, std::move(rhs));
}

// ---------------------------------------------------------------------------
// numeric embeddings

const std::vector<Field::Embedding>& Field::embeddings() const {
    if (!emb_.empty()) return emb_;
    const long double PI = acosl(-1.0L);
    unsigned d0 = level_dims_[0];
    std::vector<Embedding> embs;
    for (unsigned a = 1; a <= L_; ++a) {
        if (std::gcd(a, L_) != 1) continue;
        Embedding e;
        e.basis.resize(d0);
        for (unsigned j = 0; j < d0; ++j) {
            long double ang = 2.0L * PI * (long double)((unsigned long)a * j % L_) / (long double)L_;
            e.basis[j] = CLD(cosl(ang), sinl(ang));
        }
        embs.push_back(std::move(e));
    }
    // extend along radicals
    for (size_t ri = 0; ri < radicals_.size(); ++ri) {
        unsigned e = radicals_[ri].exponent;
        std::vector<Embedding> next;
        for (const auto& base : embs) {
            // numeric value of the radicand under this partial embedding
            CLD uval = 0;
            for (size_t t = 0; t < radicals_[ri].radicand.size(); ++t)
                uval += (long double)radicals_[ri].radicand[t].get_d() * base.basis[t];
            long double mod = powl(std::abs(uval), 1.0L / (long double)e);
            long double arg = atan2l(uval.imag(), uval.real()) / (long double)e;
            for (unsigned t = 0; t < e; ++t) {
                long double ang = arg + 2.0L * PI * t / (long double)e;
                CLD beta = std::abs(uval) == 0 ? CLD(0, 0) : CLD(mod * cosl(ang), mod * sinl(ang));
                Embedding ext;
                ext.basis.reserve(base.basis.size() * e);
                CLD bp = 1;
                for (unsigned p = 0; p < e; ++p) {
                    for (const auto& v : base.basis) ext.basis.push_back(v * bp);
                    bp *= beta;
                }
                next.push_back(std::move(ext));
            }
        }
        embs = std::move(next);
    }
    emb_ = std::move(embs);
    if (emb_.size() != dim_) fail(ErrCode::Internal, "embedding count mismatch");
    return emb_;
}

std::complex<double> Field::embed(const Scalar& x, unsigned precision_bits) const {
    if (precision_bits > 48)
        fail(ErrCode::PrecisionUnsupported, "embedding supports at most 48 bits of relative precision");
    const auto& em = embeddings()[0];
    CLD v = 0;
    for (unsigned i = 0; i < dim_; ++i) {
        if (x.coeffs()[i] == 0) continue;
        v += CLD((long double)x.coeffs()[i].get_d(), 0) * em.basis[i];
    }
    return {(double)v.real(), (double)v.imag()};
}

// ---------------------------------------------------------------------------
// exact root finding through embeddings + verification

std::vector<Scalar> Field::poly_roots(const std::vector<Scalar>& monic_poly) const {
    if (monic_poly.empty() || !monic_poly.back().is_one())
        fail(ErrCode::Internal, "poly_roots expects a monic polynomial");
    size_t deg = monic_poly.size() - 1;
    std::vector<Scalar> found;
    auto self = shared_from_this();
    if (deg == 0) return found;

    // strip zero roots
    std::vector<Scalar> p = monic_poly;
    bool has_zero_root = false;
    while (p.size() > 1 && p.front().is_zero()) {
        has_zero_root = true;
        p.erase(p.begin());
    }
    if (has_zero_root) found.push_back(zero());
    deg = p.size() - 1;
    if (deg == 0) return found;
    if (deg == 1) {
        found.push_back(-p[0]);
    } else {
        // perfect power (X - s)^deg shortcut
        {
            Scalar s = -(Rat(1, (long)deg) * p[deg - 1]);
            std::vector<Scalar> pw(2, zero());
            pw[0] = -s;
            pw[1] = one();
            std::vector<Scalar> acc = pw;
            for (size_t i = 1; i < deg; ++i) {
                std::vector<Scalar> nx(acc.size() + 1, zero());
                for (size_t a = 0; a < acc.size(); ++a)
                    for (size_t b = 0; b < 2; ++b) nx[a + b] += acc[a] * pw[b];
                acc = std::move(nx);
            }
            if (acc == p) {
                found.push_back(s);
                std::sort(found.begin(), found.end(),
                          [](const Scalar& a, const Scalar& b) { return Scalar::lex_compare(a, b) < 0; });
                return found;
            }
        }
        const auto& embs = embeddings();
        unsigned d = dim_;
        // numeric roots of every embedded polynomial
        std::vector<std::vector<CLD>> rootsets(d);
        for (unsigned t = 0; t < d; ++t) {
            std::vector<CLD> cs(deg + 1);
            for (size_t i = 0; i <= deg; ++i) {
                CLD v = 0;
                for (unsigned b = 0; b < d; ++b) {
                    if (p[i].coeffs()[b] == 0) continue;
                    v += CLD((long double)p[i].coeffs()[b].get_d(), 0) * embs[t].basis[b];
                }
                cs[i] = v;
            }
            rootsets[t] = numeric_roots(cs);
        }
        // inverse of the basis-value matrix (rows: embeddings, cols: basis)
        std::vector<std::vector<CLD>> M(d, std::vector<CLD>(2 * d, CLD(0, 0)));
        for (unsigned r = 0; r < d; ++r) {
            for (unsigned c2 = 0; c2 < d; ++c2) M[r][c2] = embs[r].basis[c2];
            M[r][d + r] = 1;
        }
        for (unsigned col = 0; col < d; ++col) {
            unsigned piv = col;
            for (unsigned r = col + 1; r < d; ++r)
                if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
            std::swap(M[piv], M[col]);
            CLD ip = CLD(1, 0) / M[col][col];
            for (unsigned c2 = 0; c2 < 2 * d; ++c2) M[col][c2] *= ip;
            for (unsigned r = 0; r < d; ++r) {
                if (r == col) continue;
                CLD f = M[r][col];
                if (std::abs(f) == 0) continue;
                for (unsigned c2 = 0; c2 < 2 * d; ++c2) M[r][c2] -= f * M[col][c2];
            }
        }
        double combos_d = 1;
        for (unsigned t = 0; t < d; ++t) combos_d *= (double)deg;
        if (combos_d > 400000.0)
            fail(ErrCode::Inconclusive, "root search space too large for this tower");
        unsigned long combos = (unsigned long)combos_d;
        std::vector<unsigned> idx(d, 0);
        std::vector<CLD> y(d), a(d);
        for (unsigned long cn = 0; cn < combos; ++cn) {
            unsigned long rem = cn;
            for (unsigned t = 0; t < d; ++t) {
                idx[t] = rem % deg;
                rem /= deg;
            }
            for (unsigned t = 0; t < d; ++t) y[t] = rootsets[t][idx[t]];
            for (unsigned i = 0; i < d; ++i) {
                CLD s = 0;
                for (unsigned t = 0; t < d; ++t) s += M[i][d + t] * y[t];
                a[i] = s;
            }
            bool ok = true;
            std::vector<Rat> coeffs(d);
            for (unsigned i = 0; i < d && ok; ++i) {
                if (fabsl(a[i].imag()) > 1e-9L * std::max((long double)1, std::abs(a[i]))) ok = false;
                else ok = rationalize(a[i].real(), coeffs[i]);
            }
            if (!ok) continue;
            Scalar cand(self, coeffs);
            // exact verification
            Scalar v = p[deg];
            for (size_t i = deg; i-- > 0;) v = v * cand + p[i];
            if (!v.is_zero()) continue;
            bool dup = false;
            for (const auto& r : found)
                if (r == cand) { dup = true; break; }
            if (!dup) found.push_back(cand);
        }
    }
    std::sort(found.begin(), found.end(),
              [](const Scalar& a, const Scalar& b) { return Scalar::lex_compare(a, b) < 0; });
    return found;
}

std::vector<Scalar> Field::kth_roots(const Scalar& rhs, unsigned k) const {
    if (k == 0) fail(ErrCode::Internal, "kth_roots with k=0");
    if (k == 1) return {rhs};
    if (rhs.is_zero()) return {zero()};
    std::vector<Scalar> p(k + 1, zero());
    p[0] = -rhs;
    p[k] = one();
    return poly_roots(p);
}

void Field::check_radical_irreducible(const Scalar& u, unsigned e) const {
    if (u.is_zero()) fail(ErrCode::RadicalReducible, "radicand is zero");
    for (unsigned p : prime_divisors(e)) {
        auto roots = kth_roots(u, p);
        if (!roots.empty())
            fail(ErrCode::RadicalReducible, "radicand is a " + std::to_string(p) +
                                                "-th power: witness " + roots.front().to_string());
    }
    if (e % 4 == 0) {
        // X^e - u reducible also when u = -4 y^4
        Scalar m4inv = from_rat(Rat(-1, 4));
        auto roots = kth_roots(m4inv * u, 4);
        if (!roots.empty())
            fail(ErrCode::RadicalReducible, "radicand lies in -4K^4: witness " + roots.front().to_string());
    }
}

std::string Field::describe() const {
    std::ostringstream os;
    os << "Q(zeta_" << L_ << ")";
    for (const auto& r : radicals_) os << "(rad^" << r.exponent << ")";
    return os.str();
}

} // namespace ramconn
