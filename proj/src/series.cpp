#include "ramconn/series.hpp"

#include <sstream>

namespace ramconn {

TruncSeries::TruncSeries(FieldPtr f, RingParams params)
    : f_(std::move(f)), p_(params), c_(p_.trunc, f_->zero()) {
    if (p_.ram_index < 1 || p_.trunc < 1) fail(ErrCode::SchemaError, "ring parameters must be positive");
}

TruncSeries::TruncSeries(FieldPtr f, RingParams params, std::vector<Scalar> coeffs)
    : f_(std::move(f)), p_(params), c_(std::move(coeffs)) {
    if (c_.size() != p_.trunc) fail(ErrCode::SchemaError, "series coefficient count must equal the truncation");
}

TruncSeries TruncSeries::monomial(const FieldPtr& f, RingParams p, unsigned deg, const Scalar& c) {
    TruncSeries s(f, p);
    if (deg < p.trunc) s.c_[deg] = c;
    return s;
}

TruncSeries TruncSeries::from_z_coeffs(const FieldPtr& f, RingParams p, const std::vector<Scalar>& zc) {
    TruncSeries s(f, p);
    for (size_t j = 0; j < zc.size(); ++j) {
        size_t deg = j * p.ram_index;
        if (deg < p.trunc) s.c_[deg] = zc[j];
    }
    return s;
}

bool TruncSeries::is_zero() const {
    for (const auto& c : c_)
        if (!c.is_zero()) return false;
    return true;
}

TruncSeries TruncSeries::operator-() const {
    TruncSeries s(*this);
    for (auto& c : s.c_) c = -c;
    return s;
}

static void check_compatible(const TruncSeries& a, const TruncSeries& b) {
    if (!(a.params() == b.params())) fail(ErrCode::Internal, "series ring mismatch");
}

TruncSeries& TruncSeries::operator+=(const TruncSeries& o) {
    check_compatible(*this, o);
    for (unsigned i = 0; i < p_.trunc; ++i) c_[i] += o.c_[i];
    return *this;
}

TruncSeries& TruncSeries::operator-=(const TruncSeries& o) {
    check_compatible(*this, o);
    for (unsigned i = 0; i < p_.trunc; ++i) c_[i] -= o.c_[i];
    return *this;
}

TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
    check_compatible(a, b);
    TruncSeries out(a.f_, a.p_);
    unsigned N = a.p_.trunc;
    for (unsigned i = 0; i < N; ++i) {
        if (a.c_[i].is_zero()) continue;
        for (unsigned j = 0; i + j < N; ++j) {
            if (b.c_[j].is_zero()) continue;
            out.c_[i + j] += a.c_[i] * b.c_[j];
        }
    }
    return out;
}

TruncSeries TruncSeries::operator*(const Scalar& s) const {
    TruncSeries out(*this);
    for (auto& c : out.c_) c *= s;
    return out;
}

bool operator==(const TruncSeries& a, const TruncSeries& b) {
    check_compatible(a, b);
    return a.c_ == b.c_;
}

TruncSeries TruncSeries::shift_w(unsigned k) const {
    TruncSeries out(f_, p_);
    for (unsigned i = 0; i + k < p_.trunc; ++i) out.c_[i + k] = c_[i];
    return out;
}

TruncSeries TruncSeries::unit_inverse() const {
    if (c_[0].is_zero()) fail(ErrCode::NotInvertible, "series has positive order");
    TruncSeries out(f_, p_);
    Scalar lead = c_[0].inverse();
    out.c_[0] = lead;
    for (unsigned n = 1; n < p_.trunc; ++n) {
        Scalar acc = f_->zero();
        for (unsigned k = 1; k <= n; ++k)
            if (!c_[k].is_zero()) acc += c_[k] * out.c_[n - k];
        out.c_[n] = -(lead * acc);
    }
    return out;
}

TruncSeries TruncSeries::truncated(unsigned new_N) const {
    TruncSeries out(f_, RingParams{p_.ram_index, new_N});
    for (unsigned i = 0; i < std::min(new_N, p_.trunc); ++i) out.c_[i] = c_[i];
    return out;
}

std::vector<Scalar> TruncSeries::z_coeffs() const {
    std::vector<Scalar> out;
    for (unsigned j = 0; j * p_.ram_index < p_.trunc; ++j) out.push_back(c_[j * p_.ram_index]);
    return out;
}

std::string TruncSeries::to_string(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (unsigned i = 0; i < p_.trunc; ++i) {
        if (c_[i].is_zero()) continue;
        if (!first) os << " + ";
        os << c_[i].to_string();
        if (i > 0) os << "*" << var << "^" << i;
        first = false;
    }
    if (first) os << "0";
    os << " (mod " << var << "^" << p_.trunc << ")";
    return os.str();
}

unsigned ord(const TruncSeries& s) {
    for (unsigned i = 0; i < s.params().trunc; ++i)
        if (!s.coeff(i).is_zero()) return i;
    return s.params().trunc;
}

TruncSeries galois(long k, const TruncSeries& s) {
    unsigned r = s.params().ram_index;
    Scalar zr = s.field()->root_of_unity(r);
    long kk = ((k % (long)r) + (long)r) % (long)r;
    TruncSeries out = s;
    Scalar zk = zr.pow(kk);
    Scalar factor = s.field()->one();
    for (unsigned l = 0; l < s.params().trunc; ++l) {
        if (l > 0) factor *= zk;
        if (!out.coeff(l).is_zero()) out.set_coeff(l, out.coeff(l) * factor);
    }
    return out;
}

bool operator==(const OneForm& a, const OneForm& b) {
    return a.basis == b.basis && a.pole == b.pole && a.numerator == b.numerator;
}

std::string OneForm::to_string() const {
    std::ostringstream os;
    os << "(" << numerator.to_string(basis == FormBasis::dw ? "w" : "z") << ")";
    os << (basis == FormBasis::dw ? " dw/w^" : " dz/z^") << pole;
    return os.str();
}

OneForm to_dw(const OneForm& form) {
    if (form.basis == FormBasis::dw) return form;
    unsigned r = form.numerator.params().ram_index;
    // numerator given in w already; dz/z^p = r dw/w^{rp - r + 1}
    Rat rr((long)r);
    OneForm out;
    out.numerator = form.numerator * form.numerator.field()->from_rat(rr);
    out.pole = r * form.pole - r + 1;
    out.basis = FormBasis::dw;
    return out;
}

OneForm to_dz(const OneForm& form) {
    if (form.basis == FormBasis::dz) return form;
    unsigned r = form.numerator.params().ram_index;
    if ((form.pole + r - 1) % r != 0)
        fail(ErrCode::PoleOrderMismatch,
             "dw pole order " + std::to_string(form.pole) + " is not of the form r*p - r + 1");
    OneForm out;
    out.numerator = form.numerator * form.numerator.field()->from_rat(Rat(1, (long)r));
    out.pole = (form.pole + r - 1) / r;
    out.basis = FormBasis::dz;
    return out;
}

OneForm trace_form(const OneForm& nu) {
    if (nu.basis != FormBasis::dz) fail(ErrCode::Internal, "trace_form expects a dz-based form");
    unsigned r = nu.numerator.params().ram_index;
    std::vector<Scalar> zc = nu.numerator.z_coeffs();
    const FieldPtr& f = nu.numerator.field();
    Scalar rs = f->from_int((long)r);
    for (auto& c : zc) c *= rs;
    RingParams zp{1, (unsigned)zc.size()};
    OneForm out;
    out.numerator = TruncSeries(f, zp, zc);
    out.pole = nu.pole;
    out.basis = FormBasis::dz;
    return out;
}

Scalar residue(const OneForm& nu) {
    if (nu.basis != FormBasis::dw) {
        return residue(to_dw(nu));
    }
    if (nu.pole == 0) fail(ErrCode::PoleTooSmall, "residue of a form without pole");
    unsigned idx = nu.pole - 1;
    if (idx >= nu.numerator.params().trunc)
        fail(ErrCode::Internal, "residue index beyond truncation");
    return nu.numerator.coeff(idx);
}

} // namespace ramconn
