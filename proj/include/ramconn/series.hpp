#pragma once

#include "ramconn/scalar.hpp"

#include <vector>

namespace ramconn {

// Truncated series ring K[w]/(w^N) with declared ramification w^r = z.
struct RingParams {
    unsigned ram_index = 1; // r
    unsigned trunc = 1;     // N
    friend bool operator==(const RingParams&, const RingParams&) = default;
};

class TruncSeries {
  public:
    TruncSeries() = default;
    TruncSeries(FieldPtr f, RingParams params);
    TruncSeries(FieldPtr f, RingParams params, std::vector<Scalar> coeffs);

    static TruncSeries monomial(const FieldPtr& f, RingParams p, unsigned deg, const Scalar& c);
    // series in z placed on w-degrees that are multiples of r
    static TruncSeries from_z_coeffs(const FieldPtr& f, RingParams p, const std::vector<Scalar>& zc);

    const RingParams& params() const { return p_; }
    const FieldPtr& field() const { return f_; }
    const std::vector<Scalar>& coeffs() const { return c_; }
    const Scalar& coeff(unsigned i) const { return c_[i]; }
    void set_coeff(unsigned i, const Scalar& v) { c_[i] = v; }

    bool is_zero() const;

    TruncSeries operator-() const;
    TruncSeries& operator+=(const TruncSeries& o);
    TruncSeries& operator-=(const TruncSeries& o);
    friend TruncSeries operator+(TruncSeries a, const TruncSeries& b) { return a += b; }
    friend TruncSeries operator-(TruncSeries a, const TruncSeries& b) { return a -= b; }
    friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b);
    TruncSeries operator*(const Scalar& s) const;
    friend bool operator==(const TruncSeries& a, const TruncSeries& b);

    // multiply by w^k (truncating), or by z^k (= w^{rk})
    TruncSeries shift_w(unsigned k) const;
    TruncSeries shift_z(unsigned k) const { return shift_w(k * p_.ram_index); }

    // inverse of a unit (order-0) series
    TruncSeries unit_inverse() const;

    TruncSeries truncated(unsigned new_N) const;

    // z-coefficient extraction: the w-degree r*j part
    std::vector<Scalar> z_coeffs() const;

    std::string to_string(const std::string& var = "w") const;

  private:
    FieldPtr f_;
    RingParams p_;
    std::vector<Scalar> c_;
};

// smallest l with nonzero coefficient of w^l; N (trunc sentinel) for zero
unsigned ord(const TruncSeries& s);

// coefficientwise Galois twist: coeff of w^l multiplied by zeta_r^{k l}
TruncSeries galois(long k, const TruncSeries& s);

enum class FormBasis { dw, dz };

// A 1-form numerator * dw/w^p or numerator * dz/z^p.
struct OneForm {
    TruncSeries numerator;
    unsigned pole = 0;
    FormBasis basis = FormBasis::dw;

    friend bool operator==(const OneForm&, const OneForm&);
    std::string to_string() const;
};

// conversion dz/z^p = r * dw/w^(rp - r + 1)
OneForm to_dw(const OneForm& form);
// inverse conversion; pole must be compatible (p_dw = r p_dz - r + 1)
OneForm to_dz(const OneForm& form);

// Tr of a dz/z^m based form over the declared ramification:
// keeps the w-degree == 0 (mod r) part and multiplies by r; result has r=1.
OneForm trace_form(const OneForm& nu);

// residue: coefficient of dw/w, i.e. coefficient of w^(p-1) in the numerator
Scalar residue(const OneForm& nu);

} // namespace ramconn
