#pragma once

#include "ramconn/formal.hpp"

#include <array>
#include <map>
#include <vector>

namespace ramconn {

// one ramified block deformed over (t, h): the algebra O[W]/(W^r - t^r - z)
// with collision parameters kappa_0 = 0, kappa_1, ..., kappa_{m-1}
struct FamilyBlock {
    unsigned r = 1;
    unsigned m = 1;
    std::vector<Scalar> c;  // c_0 .. c_{mr-r} over a base tower containing zeta_r
    std::vector<Rat> kappa; // size m, kappa_0 = 0, pairwise distinct

    const FieldPtr& field() const { return c[0].field(); }
    void validate() const;
};

// exact polynomials in (t, h, z, W) with the reduction W^r = t^r + z
class MPoly {
  public:
    using Key = std::array<unsigned, 4>; // exponents of t, h, z, W

    MPoly() = default;
    explicit MPoly(FieldPtr f, unsigned r) : f_(std::move(f)), r_(r) {}
    static MPoly monomial(FieldPtr f, unsigned r, Key k, const Scalar& c);

    const FieldPtr& field() const { return f_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Key, Scalar>& terms() const { return terms_; }

    MPoly& operator+=(const MPoly& o);
    MPoly& operator-=(const MPoly& o);
    friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
    friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
    friend MPoly operator*(const MPoly& a, const MPoly& b);
    friend bool operator==(const MPoly& a, const MPoly& b);

    // substitute exact values for t and h; the result is a polynomial in z, W
    MPoly substitute_th(const Scalar& t, const Scalar& h) const;

    void add_term(Key k, const Scalar& c); // reduces W-degree

  private:
    FieldPtr f_;
    unsigned r_ = 1;
    std::map<Key, Scalar> terms_;
};

// the deformed exponent nu~_k = sum_l c_l W^l dz/(z_0...z_{m-1}) + k dz_0/(r z_0),
// held as a single numerator over the denominator z_0 z_1 ... z_{m-1}
struct FamilyExponent {
    unsigned k = 0;
    unsigned r = 1, m = 1;
    MPoly numerator; // over K[t,h][W]/(W^r - t^r - z)
};

FamilyExponent build_family_exponent(const FamilyBlock& fb, unsigned k);

struct DaggerViolation {
    unsigned q, k, kprime;
};

struct DaggerResult {
    bool ok = false;
    FieldPtr field; // the tower where the roots b_q live
    std::vector<Scalar> roots;
    std::vector<DaggerViolation> violations;
};

// evaluates sum_{l>=1} c_l (zeta^{lk} - zeta^{lk'}) b_q^{l-1} for all q, k < k'
DaggerResult check_dagger(const FamilyBlock& fb, const Rat& t, const Rat& h);

enum class FiberKind { Ramified, Unramified, RegularSingular };

struct ResiduePoint {
    Rat kappa;
    bool nilpotent = false;                 // b_q = 0 (only for q >= 1)
    std::vector<Scalar> eigenvalues;        // the r residue eigenvalues when b_q != 0
    bool eigenvalues_distinct = false;
    Scalar beta;                            // single eigenvalue in the nilpotent case
    std::vector<Scalar> minimal_polynomial; // monic, coefficient of T^i at index i
    bool minpoly_is_full_power = false;     // == (T - beta)^r
};

struct FiberClassification {
    FiberKind kind = FiberKind::Ramified;
    FieldPtr field;
    std::vector<Scalar> ramified_coefficients; // (0,0) fiber
    std::vector<Scalar> unramified_leading;    // (t != 0, 0): sum_l c_l zeta^{lk} t^l
    bool leading_distinct = false;
    std::vector<ResiduePoint> residues;        // (., h != 0)
};

FiberClassification specialize(const FamilyBlock& fb, const Rat& t, const Rat& h);

// lambda_i of the family: sum over k of (sum_l c_{r l} (z + t^r)^l) dz/(z_0...z_{m-1})
// + k dz_0/(r z_0), as a single numerator over the same denominator
MPoly family_det_exponent(const FamilyBlock& fb);

} // namespace ramconn
