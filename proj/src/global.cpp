#include "ramconn/global.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace ramconn {

// ---------------------------------------------------------------------------
// polynomial helpers

Poly poly_trim(Poly p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
    return p;
}

int poly_degree(const Poly& a) {
    for (size_t i = a.size(); i-- > 0;)
        if (!a[i].is_zero()) return (int)i;
    return -1;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out = a.size() >= b.size() ? a : b;
    const Poly& small = a.size() >= b.size() ? b : a;
    for (size_t i = 0; i < small.size(); ++i) out[i] += small[i];
    return out;
}

Poly poly_sub(const Poly& a, const Poly& b) {
    Poly nb = b;
    for (auto& c : nb) c = -c;
    return poly_add(a, nb);
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    const FieldPtr& f = a.empty() ? b[0].field() : a[0].field();
    Poly out(a.size() + b.size() - 1, f->zero());
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

Poly poly_scale(const Poly& a, const Scalar& c) {
    Poly out = a;
    for (auto& x : out) x *= c;
    return out;
}

Poly poly_derivative(const Poly& a) {
    if (a.size() <= 1) return {};
    Poly out(a.size() - 1, a[0].field()->zero());
    for (size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * a[0].field()->from_int((long)i);
    return out;
}

Scalar poly_eval(const Poly& a, const Scalar& x) {
    if (a.empty()) return x.field()->zero();
    Scalar v = a.back();
    for (size_t i = a.size() - 1; i-- > 0;) v = v * x + a[i];
    return v;
}

std::vector<Scalar> poly_taylor(const Poly& a, const Scalar& t, unsigned n) {
    const FieldPtr& f = t.field();
    std::vector<Scalar> out(n, f->zero());
    // synthetic division by (z - t), n times
    Poly rem = a;
    for (unsigned k = 0; k < n; ++k) {
        if (rem.empty()) break;
        // divide rem by (z - t): quotient q, remainder rem(t)
        Scalar r = f->zero();
        Poly q(rem.size() > 1 ? rem.size() - 1 : 0, f->zero());
        Scalar carry = f->zero();
        for (size_t i = rem.size(); i-- > 0;) {
            Scalar cur = rem[i] + carry;
            if (i > 0) {
                q[i - 1] = cur;
                carry = cur * t;
            } else {
                r = cur;
            }
        }
        out[k] = r;
        rem = std::move(q);
    }
    return out;
}

std::vector<Scalar> series_inverse(const std::vector<Scalar>& a) {
    const FieldPtr& f = a[0].field();
    if (a[0].is_zero()) fail(ErrCode::NotInvertible, "series has no unit constant term");
    std::vector<Scalar> out(a.size(), f->zero());
    Scalar lead = a[0].inverse();
    out[0] = lead;
    for (size_t n = 1; n < a.size(); ++n) {
        Scalar acc = f->zero();
        for (size_t k = 1; k <= n; ++k)
            if (k < a.size() && !a[k].is_zero()) acc += a[k] * out[n - k];
        out[n] = -(lead * acc);
    }
    return out;
}

// ---------------------------------------------------------------------------
// exponent sets

ExponentSetReport validate_exponent_set(const ExponentSet& ns) {
    ExponentSetReport rep;
    bool chain_ok = true;
    std::string wit;
    const FieldPtr f = ns.nu.empty() || ns.nu[0].empty() || ns.nu[0][0].empty()
                           ? nullptr
                           : ns.nu[0][0][0].field();
    for (size_t i = 0; i < ns.nu.size() && chain_ok; ++i)
        for (size_t j = 0; j < ns.nu[i].size() && chain_ok; ++j) {
            const auto& chain = ns.nu[i][j];
            for (size_t k = 0; k < chain.size() && chain_ok; ++k) {
                if (chain[k].m != ns.pole_orders[i] || chain[k].r != chain.size()) {
                    chain_ok = false;
                    wit = "exponent (" + std::to_string(i) + "," + std::to_string(j) +
                          ") has inconsistent (r, m)";
                    break;
                }
                if (k > 0 && !(chain[k - 1].shifted_by_dw_over_w(Rat(1)) == chain[k])) {
                    chain_ok = false;
                    wit = "nu(" + std::to_string(i) + "," + std::to_string(j) + "," +
                          std::to_string(k) + ") - previous != dw/w";
                }
            }
        }
    rep.checks.push_back(
        CheckResult{"exponent_chain", chain_ok ? CheckStatus::Pass : CheckStatus::Fail, wit});

    if (f) {
        Scalar sum = f->from_int(ns.degree_a);
        for (const auto& pole : ns.nu)
            for (const auto& chain : pole)
                for (const auto& nu : chain) {
                    // res_w(nu)/r_j, with res_w the dw/w coefficient
                    sum += nu.dw_residue() * f->from_rat(Rat(1, (long)nu.r));
                }
        bool ok = sum.is_zero();
        rep.checks.push_back(CheckResult{"fuchs_relation", ok ? CheckStatus::Pass : CheckStatus::Fail,
                                         ok ? "" : "a + sum res/r = " + sum.to_string()});
    } else {
        rep.checks.push_back(CheckResult{"fuchs_relation", CheckStatus::Skipped, "empty exponent set"});
    }
    return rep;
}

ExponentSet det_exponent_set(const ExponentSet& ns) {
    ExponentSet out;
    out.degree_a = ns.degree_a;
    out.pole_orders = ns.pole_orders;
    for (size_t i = 0; i < ns.nu.size(); ++i) {
        unsigned m = ns.pole_orders[i];
        const FieldPtr& f = ns.nu[i][0][0].field();
        std::vector<Scalar> lam(m, f->zero());
        for (const auto& chain : ns.nu[i]) {
            unsigned rj = (unsigned)chain.size();
            for (const auto& nu : chain) {
                // Tr(nu)/r_j: keep w-degrees divisible by r_j, no extra factor
                for (unsigned t = 0; t < m; ++t) lam[t] += nu.c[t * rj];
            }
        }
        out.nu.push_back({{Exponent(1, m, lam)}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// global connections

Poly GlobalConnection::denominator() const {
    Poly den{field->one()};
    for (const auto& p : poles) {
        if (p.at_infinity) continue;
        Poly lin{-p.position, field->one()};
        for (unsigned t = 0; t < p.m; ++t) den = poly_mul(den, lin);
    }
    return den;
}

ExponentSet GlobalConnection::exponent_set() const {
    ExponentSet ns;
    ns.degree_a = degree();
    for (const auto& p : poles) {
        ns.pole_orders.push_back(p.m);
        std::vector<std::vector<Exponent>> pole_nu;
        for (const auto& b : p.blocks) pole_nu.push_back(b.exponents);
        ns.nu.push_back(std::move(pole_nu));
    }
    return ns;
}

namespace {

// Laurent expansion at infinity of omega_{ab} in the zeta chart, including the
// twist term d_a dz/z on the diagonal; returns (base, coefficients of
// zeta^base, zeta^{base+1}, ..., zeta^{upto-1}) of the dzeta-coefficient
std::pair<int, std::vector<Scalar>> infinity_laurent(const GlobalConnection& gc, unsigned a, unsigned b,
                                                     int upto) {
    const FieldPtr& f = gc.field;
    Poly num = poly_trim(gc.omega_num[a][b]);
    Poly den = gc.denominator();
    int dd = poly_degree(den);
    int base = -1;
    if (!num.empty()) {
        int dn = poly_degree(num);
        base = std::min(base, dd - dn - 2 + gc.splitting[b] - gc.splitting[a]);
    }
    if (upto <= base) upto = base + 1;
    std::vector<Scalar> coeffs((size_t)(upto - base), f->zero());
    if (!num.empty()) {
        int dn = poly_degree(num);
        // num(1/zeta)/den(1/zeta) * (-zeta^{-2}) * zeta^{d_b - d_a}
        //   = -(fr/gr) zeta^E with fr, gr the degree-reversed polynomials
        int E = dd - dn - 2 + gc.splitting[b] - gc.splitting[a];
        size_t len = upto > E ? (size_t)(upto - E) : 1;
        std::vector<Scalar> fr(len, f->zero()), gr(len, f->zero());
        for (int t = 0; t <= dn; ++t)
            if ((size_t)(dn - t) < len) fr[(size_t)(dn - t)] = num[(size_t)t];
        for (int t = 0; t <= dd; ++t)
            if ((size_t)(dd - t) < len) gr[(size_t)(dd - t)] = den[(size_t)t];
        std::vector<Scalar> ginv = series_inverse(gr);
        for (size_t i = 0; i < len; ++i) {
            Scalar acc = f->zero();
            for (size_t k = 0; k <= i; ++k)
                if (!fr[k].is_zero()) acc += fr[k] * ginv[i - k];
            int pos = (int)i + E - base;
            if (pos >= 0 && pos < (int)coeffs.size()) coeffs[(size_t)pos] -= acc;
        }
    }
    if (a == b && gc.splitting[a] != 0) {
        // d_a dz/z = -d_a dzeta/zeta
        int pos = -1 - base;
        if (pos >= 0 && pos < (int)coeffs.size()) coeffs[(size_t)pos] -= f->from_int(gc.splitting[a]);
    }
    return {base, std::move(coeffs)};
}

// flag-adapted local matrix at pole p (trunc z_i^N): P^{-1} L P
SeriesMat adapted_local_matrix(const GlobalConnection& gc, size_t pole, unsigned N) {
    SeriesMat L = localized_matrix(gc, pole, N);
    const auto& P = gc.poles[pole].adapted_frame;
    // lift P to truncation N
    unsigned r = gc.rank();
    SeriesMat PN(r, SeriesVec(r, TruncSeries(gc.field, RingParams{1, N})));
    for (unsigned i = 0; i < r; ++i)
        for (unsigned j = 0; j < r; ++j)
            for (unsigned t = 0; t < std::min(N, P[i][j].params().trunc); ++t)
                PN[i][j].set_coeff(t, P[i][j].coeff(t));
    return series_mat_mul(series_mat_inverse(PN), series_mat_mul(L, PN));
}

} // namespace

SeriesMat localized_matrix(const GlobalConnection& gc, size_t pole, unsigned trunc) {
    const FieldPtr& f = gc.field;
    unsigned r = gc.rank();
    const auto& p = gc.poles[pole];
    SeriesMat out(r, SeriesVec(r, TruncSeries(f, RingParams{1, trunc})));
    if (!p.at_infinity) {
        // den = z_i^m * den_rest; entry = num(t + z_i) / den_rest(t + z_i) dz_i/z_i^m
        Poly den_rest{f->one()};
        for (const auto& q : gc.poles) {
            if (q.at_infinity || (&q == &p)) continue;
            Poly lin{-q.position, f->one()};
            for (unsigned t = 0; t < q.m; ++t) den_rest = poly_mul(den_rest, lin);
        }
        std::vector<Scalar> dr = poly_taylor(den_rest, p.position, trunc);
        std::vector<Scalar> drinv = series_inverse(dr);
        for (unsigned a = 0; a < r; ++a)
            for (unsigned b = 0; b < r; ++b) {
                std::vector<Scalar> nt = poly_taylor(gc.omega_num[a][b], p.position, trunc);
                for (unsigned i = 0; i < trunc; ++i) {
                    Scalar acc = f->zero();
                    for (unsigned k = 0; k <= i; ++k) acc += nt[k] * drinv[i - k];
                    out[a][b].set_coeff(i, acc);
                }
            }
        return out;
    }
    // infinity: Laurent in zeta, the dzeta/zeta^m coefficient series
    for (unsigned a = 0; a < r; ++a)
        for (unsigned b = 0; b < r; ++b) {
            auto [base, co] = infinity_laurent(gc, a, b, (int)trunc - (int)p.m);
            for (unsigned t = 0; t < trunc; ++t) {
                int idx = (int)t - (int)p.m - base;
                if (idx >= 0 && idx < (int)co.size()) out[a][b].set_coeff(t, co[(size_t)idx]);
            }
        }
    return out;
}

PoleLocalStructure ramified_pole_structure(const Scalar& position, bool at_infinity,
                                           const FormalConnection& local_conn) {
    unsigned r = local_conn.rank, m = local_conn.m;
    QuotientCovector qc = find_quotient_covector(local_conn, r * m);
    LocalRamifiedData data = build_from_formal(local_conn, qc.psi);
    // adapted frame G = Psi^{-1}: columns are the chart basis f_k
    const FieldPtr& f = local_conn.field();
    SeriesMat Psi(r, SeriesVec(r, TruncSeries(f, RingParams{1, m})));
    for (unsigned l = 0; l < r; ++l)
        for (unsigned t = 0; t < r * m; ++t) Psi[t % r][l].set_coeff(t / r, qc.psi[l].coeff(t));
    PoleLocalStructure p;
    p.position = position;
    p.at_infinity = at_infinity;
    p.m = m;
    p.adapted_frame = series_mat_inverse(Psi);
    p.block_sizes = {r};
    p.blocks = {std::move(data)};
    return p;
}

ConnectionReport check_connection(const GlobalConnection& gc) {
    ConnectionReport rep;
    const FieldPtr& f = gc.field;
    unsigned r = gc.rank();
    auto add = [&](const std::string& name, bool ok, const std::string& wit = "") {
        rep.checks.push_back(CheckResult{name, ok ? CheckStatus::Pass : CheckStatus::Fail, wit});
    };

    // weights
    {
        bool ok = true;
        std::string wit;
        std::vector<Rat> all;
        for (size_t i = 0; i < gc.weight.alpha.size() && ok; ++i) {
            const auto& as = gc.weight.alpha[i];
            for (size_t j = 0; j < as.size() && ok; ++j) {
                if (!(as[j] > 0 && as[j] < 1) || (j > 0 && !(as[j - 1] < as[j]))) {
                    ok = false;
                    wit = "weights at pole " + std::to_string(i) + " not increasing in (0,1)";
                }
                all.push_back(as[j]);
            }
        }
        std::sort(all.begin(), all.end());
        for (size_t t = 1; t < all.size() && ok; ++t)
            if (all[t] == all[t - 1]) {
                ok = false;
                wit = "weights not pairwise distinct";
            }
        add("weights_valid", ok, wit);
    }

    // distinct poles, one infinity at most
    {
        bool ok = true;
        std::string wit;
        unsigned inf_count = 0;
        for (size_t i = 0; i < gc.poles.size(); ++i) {
            if (gc.poles[i].at_infinity) {
                ++inf_count;
                continue;
            }
            for (size_t j = i + 1; j < gc.poles.size(); ++j)
                if (!gc.poles[j].at_infinity && gc.poles[i].position == gc.poles[j].position) {
                    ok = false;
                    wit = "coincident poles";
                }
        }
        if (inf_count > 1) {
            ok = false;
            wit = "duplicate pole at infinity";
        }
        add("poles_distinct", ok, wit);
    }

    // regularity at infinity (or pole bound m_inf when infinity is in D)
    {
        unsigned m_inf = 0;
        for (const auto& p : gc.poles)
            if (p.at_infinity) m_inf = p.m;
        bool ok = true;
        std::string wit;
        for (unsigned a = 0; a < r && ok; ++a)
            for (unsigned b = 0; b < r && ok; ++b) {
                auto [base, co] = infinity_laurent(gc, a, b, 4);
                for (int t = base; t < -(int)m_inf; ++t) {
                    size_t idx = (size_t)(t - base);
                    if (idx < co.size() && !co[idx].is_zero()) {
                        ok = false;
                        wit = "entry (" + std::to_string(a) + "," + std::to_string(b) +
                              ") has a pole of order " + std::to_string(-t) + " at infinity";
                        break;
                    }
                }
            }
        add("pole_bounds", ok, wit);
    }

    // per-pole structure
    for (size_t pi = 0; pi < gc.poles.size(); ++pi) {
        const auto& p = gc.poles[pi];
        std::string prefix = "pole" + std::to_string(pi) + ".";
        unsigned total = 0;
        for (unsigned s : p.block_sizes) total += s;
        if (total != r) {
            add(prefix + "block_sizes", false, "block sizes do not sum to the rank");
            continue;
        }
        if (p.m == 1) {
            bool ok = true;
            for (unsigned s : p.block_sizes)
                if (s != 1) ok = false;
            add(prefix + "regular_pole_blocks", ok, ok ? "" : "m = 1 requires all blocks of size 1");
            if (!ok) continue;
        }
        // adapted frame invertibility
        Mat P0 = mat_zero(f, r, r);
        for (unsigned i = 0; i < r; ++i)
            for (unsigned j = 0; j < r; ++j) P0[i][j] = p.adapted_frame[i][j].coeff(0);
        if (mat_det(P0).is_zero()) {
            add(prefix + "adapted_frame", false, "frame not invertible at the pole");
            continue;
        }
        SeriesMat Abar = adapted_local_matrix(gc, pi, p.m);
        // flag invariance: block-strictly-upper part vanishes mod z^m
        {
            bool ok = true;
            std::string wit;
            std::vector<unsigned> start(p.block_sizes.size() + 1, 0);
            for (size_t j = 0; j < p.block_sizes.size(); ++j) start[j + 1] = start[j] + p.block_sizes[j];
            for (size_t bj = 0; bj + 1 < p.block_sizes.size() && ok; ++bj)
                for (unsigned row = start[bj]; row < start[bj + 1] && ok; ++row)
                    for (unsigned col = start[bj + 1]; col < r && ok; ++col)
                        if (!Abar[row][col].is_zero()) {
                            ok = false;
                            wit = "flag level " + std::to_string(bj + 1) + " not preserved";
                        }
            add(prefix + "flag_invariance", ok, wit);
            if (!ok) continue;
        }
        // per-block data
        std::vector<unsigned> start(p.block_sizes.size() + 1, 0);
        for (size_t j = 0; j < p.block_sizes.size(); ++j) start[j + 1] = start[j] + p.block_sizes[j];
        for (size_t bj = 0; bj < p.block_sizes.size(); ++bj) {
            const LocalRamifiedData& blk = p.blocks[bj];
            std::string bprefix = prefix + "block" + std::to_string(bj) + ".";
            if (blk.r != p.block_sizes[bj] || blk.m != p.m) {
                add(bprefix + "shape", false, "block data (r, m) mismatch");
                continue;
            }
            bool match = true;
            for (unsigned i = 0; i < blk.r && match; ++i)
                for (unsigned j = 0; j < blk.r && match; ++j)
                    if (!(blk.A[i][j] == Abar[start[bj] + i][start[bj] + j])) match = false;
            add(bprefix + "connection_match", match,
                match ? "" : "block connection differs from the induced one");
            VerifyReport vr = verify(blk);
            for (const auto& c : vr.checks) rep.checks.push_back({bprefix + c.name, c.status, c.witness});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// parabolic degrees and stability

namespace {

// flag intersection orders of a localized vector: o[j] = min order of the
// components outside l_j (blocks < j), capped at m
std::vector<unsigned> flag_orders(const GlobalConnection& gc, size_t pole, const std::vector<Poly>& incl) {
    const auto& p = gc.poles[pole];
    const FieldPtr& f = gc.field;
    unsigned r = gc.rank(), m = p.m;
    // localize: u = P^{-1} v(t + z_i) mod z^m
    SeriesMat PN(r, SeriesVec(r, TruncSeries(f, RingParams{1, m})));
    for (unsigned i = 0; i < r; ++i)
        for (unsigned j = 0; j < r; ++j)
            for (unsigned t = 0; t < std::min(m, p.adapted_frame[i][j].params().trunc); ++t)
                PN[i][j].set_coeff(t, p.adapted_frame[i][j].coeff(t));
    SeriesMat Pinv = series_mat_inverse(PN);
    SeriesVec u(r, TruncSeries(f, RingParams{1, m}));
    for (unsigned i = 0; i < r; ++i) {
        auto tc = poly_taylor(incl[i], p.position, m);
        for (unsigned t = 0; t < m; ++t) u[i].set_coeff(t, tc[t]);
    }
    SeriesVec loc(r, TruncSeries(f, RingParams{1, m}));
    for (unsigned i = 0; i < r; ++i)
        for (unsigned j = 0; j < r; ++j) loc[i] += Pinv[i][j] * u[j];
    size_t s = p.block_sizes.size();
    std::vector<unsigned> start(s + 1, 0);
    for (size_t j = 0; j < s; ++j) start[j + 1] = start[j] + p.block_sizes[j];
    std::vector<unsigned> o(s + 1, m);
    for (size_t j = 1; j <= s; ++j) {
        unsigned best = m;
        for (unsigned comp = 0; comp < start[j]; ++comp) best = std::min(best, ord(loc[comp]));
        o[j] = best;
    }
    return o;
}

} // namespace

Rat parabolic_degree_line(const GlobalConnection& gc, const SubLine& line) {
    bool nonzero = false;
    for (const auto& p : line.inclusion)
        if (poly_degree(p) >= 0) nonzero = true;
    if (!nonzero) fail(ErrCode::SchemaError, "zero inclusion is not a subbundle");
    Rat deg((long)line.degree);
    for (size_t i = 0; i < gc.poles.size(); ++i) {
        auto o = flag_orders(gc, i, line.inclusion);
        for (size_t j = 1; j <= gc.poles[i].block_sizes.size(); ++j)
            deg += gc.weight.alpha[i][j - 1] * Rat((long)o[j - 1] - (long)o[j]);
    }
    return deg;
}

Rat parabolic_degree_full(const GlobalConnection& gc) {
    Rat deg((long)gc.degree());
    for (size_t i = 0; i < gc.poles.size(); ++i)
        for (size_t j = 0; j < gc.poles[i].block_sizes.size(); ++j)
            deg += gc.weight.alpha[i][j] * Rat((long)gc.poles[i].m * (long)gc.poles[i].block_sizes[j]);
    return deg;
}

namespace {

struct LineCandidate {
    std::vector<size_t> block_choice; // per pole: which rank-1 block
    std::vector<unsigned> shift;      // per pole: nonnegative residue shift k_i
    int degree = 0;
};

// rank-1 local exponent (z-series coefficients) of a block choice with shift
std::vector<Scalar> line_exponent(const GlobalConnection& gc, size_t pole, size_t block, unsigned shift) {
    const auto& blk = gc.poles[pole].blocks[block];
    std::vector<Scalar> c = blk.exponents[0].c; // rank-1: z-coefficients, length m
    c[gc.poles[pole].m - 1] -= gc.field->from_int((long)shift);
    return c;
}

} // namespace

StabilityVerdict is_stable(const GlobalConnection& gc) {
    const FieldPtr& f = gc.field;
    unsigned r = gc.rank();
    if (r == 1) return {StabilityKind::Stable, "rank one: no proper invariant subbundle", std::nullopt};

    // auto-stability: a single ramified block with c1 != 0 at some pole
    for (size_t i = 0; i < gc.poles.size(); ++i) {
        const auto& p = gc.poles[i];
        if (p.block_sizes.size() == 1 && p.block_sizes[0] == r && p.blocks[0].exponents[0].generic_c1())
            return {StabilityKind::AutoStable,
                    "pole " + std::to_string(i) +
                        " is a single ramified block with c1 != 0: stable for every weight",
                    std::nullopt};
    }
    if (r != 2) fail(ErrCode::Inconclusive, "exhaustive stability search implemented for rank 2 only");
    for (const auto& p : gc.poles)
        if (p.at_infinity)
            fail(ErrCode::Inconclusive, "move the infinity pole by a chart swap before the rank-2 search");

    // rank 2: enumerate candidate invariant lines through per-pole exponent choices
    std::vector<std::vector<size_t>> choices(gc.poles.size());
    for (size_t i = 0; i < gc.poles.size(); ++i) {
        for (size_t j = 0; j < gc.poles[i].block_sizes.size(); ++j)
            if (gc.poles[i].block_sizes[j] == 1) choices[i].push_back(j);
        if (choices[i].empty()) {
            // fully ramified pole with c1 = 0 was not caught by auto-stability
            fail(ErrCode::Inconclusive, "fully ramified pole without the c1 != 0 certificate");
        }
    }
    int dmax = *std::max_element(gc.splitting.begin(), gc.splitting.end());
    Rat muE = parabolic_degree_full(gc) / Rat(2);

    StabilityVerdict verdict{StabilityKind::Stable, "no invariant line reaches the total slope",
                             std::nullopt};
    std::vector<size_t> idx(gc.poles.size(), 0);
    bool done = false;
    while (!done) {
        // residue sum of the chosen block exponents
        Scalar S = f->zero();
        for (size_t i = 0; i < gc.poles.size(); ++i)
            S += line_exponent(gc, i, choices[i][idx[i]], 0)[gc.poles[i].m - 1];
        if (S.is_rational() && S.rational_part().get_den() == 1) {
            long base = -S.rational_part().get_num().get_si();
            for (int d = (int)base; d <= dmax; ++d) {
                unsigned extra = (unsigned)(d - (int)base);
                // distribute the shifts over poles
                std::vector<std::vector<unsigned>> shift_tuples;
                std::vector<unsigned> cur(gc.poles.size(), 0);
                std::function<void(size_t, unsigned)> gen = [&](size_t pos, unsigned left) {
                    if (pos + 1 == gc.poles.size()) {
                        cur[pos] = left;
                        shift_tuples.push_back(cur);
                        return;
                    }
                    for (unsigned k = 0; k <= left; ++k) {
                        cur[pos] = k;
                        gen(pos + 1, left - k);
                    }
                };
                if (!gc.poles.empty()) gen(0, extra);
                for (const auto& shifts : shift_tuples) {
                    // eta = sum of principal parts of the shifted exponents
                    Poly eta_num; // over the global denominator
                    Poly den = gc.denominator();
                    for (size_t i = 0; i < gc.poles.size(); ++i) {
                        std::vector<Scalar> c = line_exponent(gc, i, choices[i][idx[i]], shifts[i]);
                        // den / z_i^{m_i}
                        Poly den_rest{f->one()};
                        for (size_t q = 0; q < gc.poles.size(); ++q) {
                            if (q == i) continue;
                            Poly lin{-gc.poles[q].position, f->one()};
                            for (unsigned t = 0; t < gc.poles[q].m; ++t)
                                den_rest = poly_mul(den_rest, lin);
                        }
                        Poly zi{-gc.poles[i].position, f->one()};
                        Poly acc{f->one()};
                        Poly contrib;
                        for (unsigned t = 0; t < gc.poles[i].m; ++t) {
                            contrib = poly_add(contrib, poly_scale(acc, c[t]));
                            acc = poly_mul(acc, zi);
                        }
                        eta_num = poly_add(eta_num, poly_mul(contrib, den_rest));
                    }
                    // horizontality: den v_a' + sum_b num_{ab} v_b - eta v_a = 0
                    std::vector<int> vdeg(2);
                    bool possible = false;
                    for (unsigned a = 0; a < 2; ++a) {
                        vdeg[a] = gc.splitting[a] - d;
                        if (vdeg[a] >= 0) possible = true;
                    }
                    if (!possible) continue;
                    std::vector<size_t> offs(3, 0);
                    for (unsigned a = 0; a < 2; ++a)
                        offs[a + 1] = offs[a] + (size_t)std::max(vdeg[a] + 1, 0);
                    size_t nunk = offs[2];
                    if (nunk == 0) continue;
                    int dd = poly_degree(den);
                    int deqmax = 0;
                    for (unsigned a = 0; a < 2; ++a) {
                        deqmax = std::max(deqmax, dd + std::max(vdeg[a] - 1, 0));
                        for (unsigned b = 0; b < 2; ++b)
                            deqmax = std::max(deqmax, poly_degree(gc.omega_num[a][b]) +
                                                          std::max(vdeg[b], 0));
                        deqmax = std::max(deqmax, poly_degree(eta_num) + std::max(vdeg[a], 0));
                    }
                    Mat sys = mat_zero(f, 2 * (size_t)(deqmax + 1), nunk);
                    for (unsigned a = 0; a < 2; ++a) {
                        for (unsigned b = 0; b < 2; ++b) {
                            if (vdeg[b] < 0) continue;
                            for (int t = 0; t <= vdeg[b]; ++t) {
                                // coefficient polynomials acting on v_b[t]
                                Poly mono(t + 1, f->zero());
                                mono[t] = f->one();
                                Poly term = poly_mul(gc.omega_num[a][b], mono);
                                if (a == b) {
                                    Poly dmono = poly_derivative(mono);
                                    term = poly_add(term, poly_mul(den, dmono));
                                    term = poly_sub(term, poly_mul(eta_num, mono));
                                }
                                for (int row = 0; row <= deqmax; ++row)
                                    if (row < (int)term.size() && !term[(size_t)row].is_zero())
                                        sys[a * (size_t)(deqmax + 1) + (size_t)row][offs[b] + (size_t)t] +=
                                            term[(size_t)row];
                            }
                        }
                    }
                    auto kb = kernel_basis(sys);
                    for (const auto& sol : kb) {
                        SubLine line;
                        line.degree = d;
                        line.inclusion.assign(2, Poly{});
                        bool nonzero = false;
                        for (unsigned a = 0; a < 2; ++a) {
                            Poly pa;
                            for (int t = 0; t <= vdeg[a]; ++t) pa.push_back(sol[offs[a] + (size_t)t]);
                            line.inclusion[a] = poly_trim(pa);
                            nonzero = nonzero || !line.inclusion[a].empty();
                        }
                        if (!nonzero) continue;
                        Rat muL = parabolic_degree_line(gc, line);
                        std::ostringstream os;
                        os << "invariant line of degree " << d << " with slope " << rat_to_string(muL)
                           << " vs total slope " << rat_to_string(muE);
                        line.note = os.str();
                        if (muL > muE) {
                            verdict.kind = StabilityKind::Unstable;
                            verdict.detail = line.note;
                            verdict.witness = line;
                            return verdict;
                        }
                        if (muL == muE && verdict.kind == StabilityKind::Stable) {
                            verdict.kind = StabilityKind::SemistableNotStable;
                            verdict.detail = line.note;
                            verdict.witness = line;
                        }
                    }
                }
            }
        }
        // advance the block-choice counter
        done = true;
        for (size_t i = 0; i < idx.size(); ++i) {
            if (++idx[i] < choices[i].size()) {
                done = false;
                break;
            }
            idx[i] = 0;
        }
        if (gc.poles.empty()) break;
    }
    return verdict;
}

// ---------------------------------------------------------------------------
// det and numeric identities

DetConnection det_connection(const GlobalConnection& gc) {
    const FieldPtr& f = gc.field;
    unsigned r = gc.rank();
    DetConnection out;
    out.line.field = f;
    out.line.splitting = {gc.degree()};
    Poly tr;
    for (unsigned a = 0; a < r; ++a) tr = poly_add(tr, gc.omega_num[a][a]);
    out.line.omega_num = {{tr}};
    for (size_t i = 0; i < gc.poles.size(); ++i) {
        const auto& p = gc.poles[i];
        PoleLocalStructure lp;
        lp.position = p.position;
        lp.at_infinity = p.at_infinity;
        lp.m = p.m;
        lp.adapted_frame = SeriesMat(1, SeriesVec(1, TruncSeries::monomial(f, RingParams{1, p.m}, 0, f->one())));
        lp.block_sizes = {1};
        out.line.poles.push_back(std::move(lp));
    }
    // fill blocks once all poles are present (localized_matrix needs the divisor)
    for (size_t i = 0; i < gc.poles.size(); ++i) {
        SeriesMat loc = localized_matrix(out.line, i, gc.poles[i].m);
        std::vector<Scalar> lam(loc[0][0].coeffs());
        out.line.poles[i].blocks = {model_local_data(Exponent(1, gc.poles[i].m, lam))};
        out.line.weight.alpha.push_back({Rat(1, 2)});
    }
    // target exponents lambda_i = sum_{j,k} Tr(nu_{j,k})/r_j and the match check
    out.principal_parts_match = true;
    for (size_t i = 0; i < gc.poles.size(); ++i) {
        const auto& p = gc.poles[i];
        std::vector<Scalar> lam(p.m, f->zero());
        for (const auto& blk : p.blocks) {
            for (unsigned t = 0; t < p.m; ++t) lam[t] += f->from_int((long)blk.r) * blk.exponents[0].c[t * blk.r];
            lam[p.m - 1] += f->from_rat(Rat((long)blk.r - 1, 2));
        }
        out.lambda.push_back(lam);
        const auto& got = out.line.poles[i].blocks[0].exponents[0].c;
        for (unsigned t = 0; t < p.m; ++t)
            if (!(got[t] == lam[t])) out.principal_parts_match = false;
    }
    return out;
}

long dimension_formula(long g, long r, const std::vector<long>& m) {
    long dim = 2 * r * r * (g - 1) + 2;
    for (long mi : m) dim += (r * r - r) * mi;
    return dim;
}

EulerChars euler_chars(long g, long r, const std::vector<long>& m,
                       const std::vector<std::vector<long>>& blocks) {
    EulerChars ec;
    long f1 = r * r * (1 - g) + r * r * (2 * g - 2);
    long f0 = r * r * (1 - g);
    for (size_t i = 0; i < m.size(); ++i) {
        const auto& rj = blocks[i];
        for (size_t jp = 0; jp < rj.size(); ++jp)
            for (size_t j = jp + 1; j < rj.size(); ++j) f1 += m[i] * rj[jp] * rj[j];
        for (size_t jp = 0; jp < rj.size(); ++jp)
            for (size_t j = jp; j < rj.size(); ++j) f0 -= m[i] * rj[jp] * rj[j];
        for (long r_j : rj) {
            f0 += m[i] * r_j;
            for (long k = 0; k < r_j; ++k) {
                f1 += r_j - 1 - k;
                f0 += r_j - 1 - k;
            }
        }
    }
    ec.chi_f0 = f0;
    ec.chi_f1 = f1;
    ec.dim_h1 = f1 - f0 + 2;
    return ec;
}

} // namespace ramconn
