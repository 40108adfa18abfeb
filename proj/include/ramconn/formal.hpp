#pragma once

#include "ramconn/linalg.hpp"
#include "ramconn/series.hpp"

#include <string>
#include <vector>

namespace ramconn {

using SeriesVec = std::vector<TruncSeries>;
using SeriesMat = std::vector<SeriesVec>;
// polynomial in T with z-truncated series coefficients, coeff of T^i at index i
using TPoly = std::vector<TruncSeries>;

// Exponent nu = sum_l c[l] w^l dz/z^m with w^r = z, truncated at w^{mr-r+1}.
struct Exponent {
    unsigned r = 1;
    unsigned m = 1;
    std::vector<Scalar> c; // size m*r - r + 1

    Exponent() = default;
    Exponent(unsigned r_, unsigned m_, std::vector<Scalar> c_);

    const FieldPtr& field() const { return c[0].field(); }
    unsigned window() const { return m * r - r + 1; }
    // index of the dw/w coefficient slot
    unsigned top_index() const { return r * (m - 1); }

    bool generic_c1() const { return r == 1 || !c[1].is_zero(); }
    Scalar dw_residue() const; // r * c[top]

    OneForm as_dz_form() const;
    OneForm as_dw_form() const;

    Exponent galois_twist(long k) const;   // c_l -> c_l zeta_r^{k l}
    Exponent shifted_by_dw_over_w(const Rat& j) const; // adds j * dw/w

    friend bool operator==(const Exponent& a, const Exponent& b);
};

// true iff b = sigma^k(a) + j dw/w for some k and integer j
bool same_orbit_mod_int_shift(const Exponent& a, const Exponent& b);
// true iff b = sigma^k(a) exactly for some k
bool same_orbit_exact(const Exponent& a, const Exponent& b);

// Truncated formal connection nabla = d + A(z) dz/z^m on (K[z]/(z^M))^rank.
struct FormalConnection {
    unsigned rank = 1;
    unsigned m = 1;
    unsigned M = 1; // z-truncation, >= m
    SeriesMat A;    // rank x rank, entries in K[z]/(z^M) (ram_index 1)

    const FieldPtr& field() const { return A[0][0].field(); }
    static FormalConnection zero(const FieldPtr& f, unsigned rank, unsigned m, unsigned M);
};

// the rank-s block d + (nu I + (dw/w) N) with N the upper shift; entries in the
// dw basis at the common pole order of nu
std::vector<std::vector<OneForm>> normal_form_block(const OneForm& nu_dw, unsigned s);

// matrix of nabla_nu(f) = df + nu f on K[[w]] = K[[z]]^r in the basis 1,w,...,w^{r-1}
FormalConnection pushforward_ramified(const Exponent& nu, unsigned M = 0);

// det(T I - A), exact over K[z]/(z^M)
TPoly char_poly(const FormalConnection& conn);

struct PuiseuxOrbit {
    unsigned ram_index = 1;  // e with w^e = z for this orbit
    TruncSeries root;        // one representative, in K[w]/(w^target)
};

// roots of a monic polynomial over K[z]/(z^M) as Galois orbits, truncated at
// target_trunc in w; handles the single totally-ramified slope and the split
// distinct-root shape only
std::vector<PuiseuxOrbit> newton_puiseux(const TPoly& poly, unsigned target_trunc);

// Hukuhara-Turrittin exponent of a generic ramified connection, one orbit
// representative (deterministic choice)
Exponent recover_exponent(const FormalConnection& conn);

// quotient data pi: W (x) K[[w]] -> K[[w]] compatible with nabla_nu, solved
// digit by digit; psi[i] = pi(e_i), n = exponent coefficient series, both
// truncated at w_trunc
struct QuotientCovector {
    SeriesVec psi;
    TruncSeries n;
};
QuotientCovector find_quotient_covector(const FormalConnection& conn, unsigned w_trunc);

struct IrreducibilityVerdict {
    bool irreducible = false;
    std::string witness; // invariant subspace description when reducible
};

// exponent_hint bypasses the characteristic-polynomial detection when the
// caller already knows the exponent
IrreducibilityVerdict is_formally_irreducible(const FormalConnection& conn,
                                              const Exponent* exponent_hint = nullptr);

// gauge action g^{-1} A g + z^M-truncated g^{-1} g' z^m on connections
FormalConnection gauge_transform(const FormalConnection& conn, const SeriesMat& g);

// helpers shared by the local-data module
TruncSeries series_entry_derivative(const TruncSeries& s); // d/dz, truncating
SeriesMat series_mat_mul(const SeriesMat& a, const SeriesMat& b);
SeriesMat series_mat_inverse(const SeriesMat& a); // entries must form a unit matrix mod z

} // namespace ramconn
