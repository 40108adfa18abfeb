#pragma once

#include "ramconn/localdata.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ramconn {

// dense polynomials over the scalar field, coefficient of z^i at index i
using Poly = std::vector<Scalar>;

Poly poly_trim(Poly p);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, const Scalar& c);
Poly poly_derivative(const Poly& a);
Scalar poly_eval(const Poly& a, const Scalar& x);
int poly_degree(const Poly& a); // -1 for zero
// Taylor coefficients of a around z = t, n terms
std::vector<Scalar> poly_taylor(const Poly& a, const Scalar& t, unsigned n);
// series inverse of the Taylor expansion (unit constant term required)
std::vector<Scalar> series_inverse(const std::vector<Scalar>& a);

// exponent data of the full connection: per pole, per block, the chain
struct ExponentSet {
    int degree_a = 0;
    std::vector<unsigned> pole_orders;                 // m_i
    std::vector<std::vector<std::vector<Exponent>>> nu; // nu[i][j][k]
};

struct ExponentSetReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (c.status == CheckStatus::Fail) return false;
        return true;
    }
};

ExponentSetReport validate_exponent_set(const ExponentSet& ns);

// the det-map on exponents: lambda_i = sum_{j,k} Tr(nu_{j,k}) / r_j
ExponentSet det_exponent_set(const ExponentSet& ns);

struct ParabolicWeight {
    std::vector<std::vector<Rat>> alpha; // alpha[i][j], increasing in j, within (0,1)
};

// flag and block data at one pole, in the adapted frame given by P
struct PoleLocalStructure {
    Scalar position;                       // finite position; infinity flagged below
    bool at_infinity = false;
    unsigned m = 1;                        // multiplicity in D
    SeriesMat adapted_frame;               // P: columns are the adapted basis, over K[z_i]/(z_i^m)
    std::vector<unsigned> block_sizes;     // r_j with sum r
    std::vector<LocalRamifiedData> blocks; // per block, in the adapted frame
};

// connection d + omega on E = O(d_1) + ... + O(d_r) over P^1, omega given by
// numerator polynomials over den(z) = prod (z - t_i)^{m_i} (finite poles)
struct GlobalConnection {
    FieldPtr field;
    std::vector<int> splitting;                        // d_a
    std::vector<PoleLocalStructure> poles;
    std::vector<std::vector<Poly>> omega_num;          // omega_{ab} = num/den dz
    ParabolicWeight weight;

    unsigned rank() const { return (unsigned)splitting.size(); }
    int degree() const {
        int s = 0;
        for (int d : splitting) s += d;
        return s;
    }
    Poly denominator() const; // prod over finite poles
    ExponentSet exponent_set() const;
};

struct ConnectionReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (c.status == CheckStatus::Fail) return false;
        return true;
    }
};

// Leibniz/chart consistency, pole bounds at infinity, flag invariance, and
// delegation of every block to the local-data verification
ConnectionReport check_connection(const GlobalConnection& gc);

// the dz_i/z_i^{m_i} coefficient matrix at pole i in the standard frame,
// truncated at z_i^trunc (trunc >= m_i); for the infinity pole the matrix is
// taken in the zeta = 1/z chart
SeriesMat localized_matrix(const GlobalConnection& gc, size_t pole, unsigned trunc);

// single-block ramified pole structure: finds the quotient covector of the
// localized connection and installs the adapted local data
PoleLocalStructure ramified_pole_structure(const Scalar& position, bool at_infinity,
                                           const FormalConnection& local_conn);

// invariant line subbundle O(d) -> E with polynomial inclusion components
struct SubLine {
    int degree = 0;
    std::vector<Poly> inclusion; // component a: poly of degree <= d_a - d
    std::string note;
};

// deg F + sum alpha-weighted flag intersection lengths, for a saturated line
Rat parabolic_degree_line(const GlobalConnection& gc, const SubLine& line);
// same for the full bundle
Rat parabolic_degree_full(const GlobalConnection& gc);

enum class StabilityKind { AutoStable, Stable, SemistableNotStable, Unstable };

struct StabilityVerdict {
    StabilityKind kind = StabilityKind::Stable;
    std::string detail;
    std::optional<SubLine> witness; // destabilizing or slope-equal line
};

StabilityVerdict is_stable(const GlobalConnection& gc);

struct DetConnection {
    GlobalConnection line;                   // rank-1 connection tr(omega) on O(a)
    std::vector<std::vector<Scalar>> lambda; // per pole: dz_i/z_i^{m_i} coefficients of the target exponent
    bool principal_parts_match = false;      // tr(omega) principal part vs sum Tr(nu)/r_j
};

DetConnection det_connection(const GlobalConnection& gc);

// 2 r^2 (g-1) + 2 + sum (r^2 - r) m_i
long dimension_formula(long g, long r, const std::vector<long>& m);

struct EulerChars {
    long chi_f0 = 0;
    long chi_f1 = 0;
    long dim_h1 = 0; // chi(F^1) - chi(F^0) + 2
};

EulerChars euler_chars(long g, long r, const std::vector<long>& m,
                       const std::vector<std::vector<long>>& blocks);

} // namespace ramconn
