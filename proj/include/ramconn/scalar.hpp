#pragma once

#include "ramconn/errors.hpp"

#include <gmpxx.h>

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ramconn {

using Rat = mpq_class;

Rat rat_from_string(const std::string& s);
std::string rat_to_string(const Rat& q);

class Field;
using FieldPtr = std::shared_ptr<const Field>;

// Element of the tower Q(zeta_L)(b_1,...,b_k), stored as a rational coefficient
// vector in the product power basis zeta^i0 * b_1^i1 * ... (zeta index fastest).
class Scalar {
  public:
    Scalar() = default;
    Scalar(FieldPtr f, std::vector<Rat> coeffs);

    bool valid() const { return field_ != nullptr; }
    const FieldPtr& field() const { return field_; }
    const std::vector<Rat>& coeffs() const { return c_; }

    bool is_zero() const;
    bool is_one() const;
    bool is_rational() const;
    // the rational part; only meaningful when is_rational()
    Rat rational_part() const { return c_.empty() ? Rat(0) : c_[0]; }

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend bool operator==(const Scalar& a, const Scalar& b);
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    Scalar inverse() const;
    Scalar pow(long e) const;

    // total order on coefficient vectors, used only for deterministic tie-breaks
    static int lex_compare(const Scalar& a, const Scalar& b);

    std::string to_string() const;

  private:
    FieldPtr field_;
    std::vector<Rat> c_;
};

struct RadicalSpec {
    unsigned exponent = 0;          // e with b^e = u
    std::vector<Rat> radicand;      // u as coefficients over the tower below
};

struct FieldSpec {
    unsigned cyclotomic_order = 1;  // L
    std::vector<RadicalSpec> radicals;
};

// Exact field tower Q(zeta_L) extended by verified Kummer radicals.
class Field : public std::enable_shared_from_this<Field> {
  public:
    // Verifies irreducibility of every radical (Kummer criterion); rejects
    // towers deeper than two radicals.
    static FieldPtr make(const FieldSpec& spec);
    static FieldPtr rationals() { return make(FieldSpec{1, {}}); }
    static FieldPtr cyclotomic(unsigned L) { return make(FieldSpec{L, {}}); }

    // Extends the tower by one radical b with b^e = u. Throws RadicalReducible
    // if X^e - u factors over the current tower.
    FieldPtr extend(unsigned e, const Scalar& u) const;

    unsigned cyclotomic_order() const { return L_; }
    unsigned dim() const { return dim_; }
    unsigned radical_count() const { return (unsigned)radicals_.size(); }
    unsigned radical_exponent(unsigned i) const { return radicals_[i].exponent; }

    Scalar zero() const;
    Scalar one() const;
    Scalar from_rat(const Rat& q) const;
    Scalar from_int(long n) const { return from_rat(Rat(n)); }
    Scalar basis_element(unsigned i) const;
    Scalar zeta() const;                 // zeta_L as an element
    Scalar radical_generator(unsigned i) const;

    // zeta_k, or MissingRoot when the tower has no primitive k-th root of unity
    Scalar root_of_unity(unsigned k) const;
    bool has_root_of_unity(unsigned k) const;

    // all exact solutions x of x^k = rhs in this field (deduplicated, sorted
    // by lex_compare); complete at desk scale, every returned root is verified
    std::vector<Scalar> kth_roots(const Scalar& rhs, unsigned k) const;
    // all roots in the field of a monic polynomial (coefficient of X^i at
    // index i, leading 1 included)
    std::vector<Scalar> poly_roots(const std::vector<Scalar>& monic_poly) const;

    // N_{K/Q}
    Rat norm(const Scalar& x) const;

    // numeric embedding (standard embedding: zeta -> exp(2 pi i/L), radicals
    // to principal roots); relative error below 2^(1-precision_bits)
    std::complex<double> embed(const Scalar& x, unsigned precision_bits = 48) const;

    bool same_as(const Field& o) const;
    // true when this tower extends `sub` (same cyclotomic part, radical prefix)
    bool extends(const Field& sub) const;

    std::string describe() const;

  private:
    friend class Scalar;
    Field() = default;

    void mul_level(int level, const Rat* a, const Rat* b, Rat* out, Rat* scratch) const;
    std::vector<Rat> mul_vec(const std::vector<Rat>& a, const std::vector<Rat>& b) const;
    std::vector<std::vector<Rat>> mult_matrix(const Scalar& x) const;
    void check_radical_irreducible(const Scalar& u, unsigned e) const;

    // numeric data per embedding: value of each basis monomial
    struct Embedding {
        std::vector<std::complex<long double>> basis;
    };
    const std::vector<Embedding>& embeddings() const;

    unsigned L_ = 1;
    std::vector<Rat> cyclo_;       // monic cyclotomic polynomial, cyclo_[i] = coeff of X^i
    struct Radical {
        unsigned exponent;
        std::vector<Rat> radicand; // element of the sub-tower (flat coeffs)
    };
    std::vector<Radical> radicals_;
    unsigned dim_ = 1;
    std::vector<unsigned> level_dims_;   // φ(L), e_1, e_2
    mutable std::vector<Embedding> emb_; // lazy
};

// convenience for tests and random generation
Scalar operator*(const Rat& q, const Scalar& s);

// re-express an element of a sub-tower in an extension of it
Scalar lift(const FieldPtr& bigger, const Scalar& x);

} // namespace ramconn
