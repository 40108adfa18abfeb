#pragma once

#include "ramconn/formal.hpp"

#include <string>
#include <vector>

namespace ramconn {

// Local data of one ramified block at a pole of order m:
//   - V_0 = (K[z]/(z^m))^r with the adapted basis f_0..f_{r-1}, and
//     V_k = span(z f_0, ..., z f_{k-1}, f_k, ..., f_{r-1});
//   - A: the dz/z^m matrix of the induced connection on V_0 (mod z^m the
//     induced map is multiplication by A);
//   - pi[k][l]: the L_k-coordinate series of pi_k applied to the l-th adapted
//     generator of V_k (z f_l for l < k, f_l for l >= k), where
//     L_k = (w^k)/(w^{k+mr-r+1}) and w^k * s is stored as s in R_w;
//   - phi[k-1]: the ring element t_k with phi_k(w^k s) = w^{k-1} t_k s for
//     k = 1..r-1, and phi[r-1] = t_r with phi_r(z (x) s) = w^{r-1} t_r s.
struct LocalRamifiedData {
    unsigned r = 1;
    unsigned m = 1;
    std::vector<Exponent> exponents;            // nu_0 .. nu_{r-1}
    SeriesMat A;                                // r x r over K[z]/(z^m)
    std::vector<std::vector<TruncSeries>> pi;   // r rows of r entries in R_w
    std::vector<TruncSeries> phi;               // t_1 .. t_r in R_w

    unsigned window() const { return m * r - r + 1; }
    const FieldPtr& field() const { return exponents[0].field(); }
};

enum class CheckStatus { Pass, Fail, Skipped };

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    std::string witness;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (c.status == CheckStatus::Fail) return false;
        return true;
    }
    std::vector<std::string> failed_names() const {
        std::vector<std::string> out;
        for (const auto& c : checks)
            if (c.status == CheckStatus::Fail) out.push_back(c.name);
        return out;
    }
};

// checks every defining condition; dependent diagram checks are reported as
// skipped when their prerequisites fail
VerifyReport verify(const LocalRamifiedData& data);

// construction from a formal connection and a quotient row psi_l = pi(e_l),
// given in K[w]/(w^{r m}) (or finer); the adapted chart makes the pi rows the
// model rows and the phi maps multiplication by w
LocalRamifiedData build_from_formal(const FormalConnection& conn, const SeriesVec& pi_row);

// the model data of the rank-1 pushforward in the identity chart
LocalRamifiedData model_local_data(const Exponent& nu);

// data-level gauge: basis change g of V_0 (filtration compatible) together
// with unit rescales of each L_k
LocalRamifiedData data_gauge(const LocalRamifiedData& data, const SeriesMat& g,
                             const std::vector<TruncSeries>& units);

struct KernelPi {
    std::vector<SeriesVec> basis; // kernel vectors, r series per vector
    unsigned length = 0;          // K-length of ker Pi
};

// Pi = (pi_0, sigma^{-1} pi_0 sigma, ..., sigma^{1-r} pi_0 sigma^{r-1})
KernelPi kernel_Pi(const LocalRamifiedData& data);

struct ReconstructOutcome {
    bool ok = false;
    std::string detail;
    Exponent recovered;            // from a compatible connection
    unsigned solution_freedom = 0; // kernel dimension of the linear system
};

// solves for all connections compatible with the data, recovers the exponent
// of a solution and checks the normal-form congruences
ReconstructOutcome reconstruct_check(const LocalRamifiedData& data);

} // namespace ramconn
