#include "ramconn/formal.hpp"

#include <algorithm>
#include <sstream>

namespace ramconn {

// ---------------------------------------------------------------------------
// Exponent

Exponent::Exponent(unsigned r_, unsigned m_, std::vector<Scalar> c_) : r(r_), m(m_), c(std::move(c_)) {
    if (r < 1 || m < 1) fail(ErrCode::SchemaError, "exponent needs r >= 1, m >= 1");
    if (c.size() != window()) fail(ErrCode::SchemaError, "exponent coefficient count must be m*r-r+1");
}

Scalar Exponent::dw_residue() const { return field()->from_int((long)r) * c[top_index()]; }

OneForm Exponent::as_dz_form() const {
    RingParams p{r, window()};
    return OneForm{TruncSeries(field(), p, c), m, FormBasis::dz};
}

OneForm Exponent::as_dw_form() const { return to_dw(as_dz_form()); }

Exponent Exponent::galois_twist(long k) const {
    Exponent out = *this;
    Scalar z = field()->root_of_unity(r);
    Scalar zk = z.pow(((k % (long)r) + r) % (long)r);
    Scalar f = field()->one();
    for (unsigned l = 0; l < c.size(); ++l) {
        if (l > 0) f *= zk;
        out.c[l] = c[l] * f;
    }
    return out;
}

Exponent Exponent::shifted_by_dw_over_w(const Rat& j) const {
    // dw/w = (1/r) z^{m-1} dz/z^m lands on the w^{r(m-1)} slot
    Exponent out = *this;
    out.c[top_index()] += field()->from_rat(j / Rat((long)r));
    return out;
}

bool operator==(const Exponent& a, const Exponent& b) {
    return a.r == b.r && a.m == b.m && a.c == b.c;
}

bool same_orbit_exact(const Exponent& a, const Exponent& b) {
    if (a.r != b.r || a.m != b.m) return false;
    for (unsigned k = 0; k < a.r; ++k)
        if (a.galois_twist(k) == b) return true;
    return false;
}

bool same_orbit_mod_int_shift(const Exponent& a, const Exponent& b) {
    if (a.r != b.r || a.m != b.m) return false;
    unsigned top = a.top_index();
    for (unsigned k = 0; k < a.r; ++k) {
        Exponent t = a.galois_twist(k);
        bool match = true;
        for (unsigned l = 0; l < t.c.size() && match; ++l)
            if (l != top && !(t.c[l] == b.c[l])) match = false;
        if (!match) continue;
        Scalar diff = b.c[top] - t.c[top];
        if (!diff.is_rational()) continue;
        Rat j = diff.rational_part() * Rat((long)a.r); // shift in dw/w units
        if (j.get_den() == 1) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// connections

FormalConnection FormalConnection::zero(const FieldPtr& f, unsigned rank, unsigned m, unsigned M) {
    FormalConnection c;
    c.rank = rank;
    c.m = m;
    c.M = M;
    c.A.assign(rank, SeriesVec(rank, TruncSeries(f, RingParams{1, M})));
    return c;
}

std::vector<std::vector<OneForm>> normal_form_block(const OneForm& nu_dw, unsigned s) {
    if (nu_dw.basis != FormBasis::dw) return normal_form_block(to_dw(nu_dw), s);
    if (s < 1) fail(ErrCode::SchemaError, "block size must be >= 1");
    const FieldPtr& f = nu_dw.numerator.field();
    RingParams p = nu_dw.numerator.params();
    unsigned pole = std::max(nu_dw.pole, 1u);
    // rebase everything to the common pole order
    auto at_pole = [&](const TruncSeries& num, unsigned from_pole) {
        return OneForm{num.shift_w(pole - from_pole), pole, FormBasis::dw};
    };
    OneForm zero{TruncSeries(f, p), pole, FormBasis::dw};
    OneForm nu = at_pole(nu_dw.numerator, nu_dw.pole);
    OneForm dw_over_w = at_pole(TruncSeries::monomial(f, p, 0, f->one()), 1);
    std::vector<std::vector<OneForm>> mat(s, std::vector<OneForm>(s, zero));
    for (unsigned i = 0; i < s; ++i) {
        mat[i][i] = nu;
        if (i + 1 < s) mat[i][i + 1] = dw_over_w;
    }
    return mat;
}

FormalConnection pushforward_ramified(const Exponent& nu, unsigned M) {
    unsigned r = nu.r, m = nu.m;
    if (M == 0) M = m + 2;
    const FieldPtr& f = nu.field();
    FormalConnection conn = FormalConnection::zero(f, r, m, M);
    // nabla(w^k) = (k/r)(dz/z) w^k + sum_l c_l w^{l+k} dz/z^m,
    // with w^{l+k} = z^{(l+k) div r} w^{(l+k) mod r}
    for (unsigned k = 0; k < r; ++k) {
        for (unsigned l = 0; l < nu.c.size(); ++l) {
            if (nu.c[l].is_zero()) continue;
            unsigned j = (l + k) % r;
            unsigned zdeg = (l + k) / r;
            if (zdeg < M)
                conn.A[j][k].set_coeff(zdeg, conn.A[j][k].coeff(zdeg) + nu.c[l]);
        }
        if (k > 0 && m - 1 < M) {
            Scalar kr = f->from_rat(Rat((long)k, (long)r));
            conn.A[k][k].set_coeff(m - 1, conn.A[k][k].coeff(m - 1) + kr);
        }
    }
    return conn;
}

// ---------------------------------------------------------------------------
// polynomials in T over truncated series

namespace {

TPoly tp_zero(const FieldPtr& f, RingParams p, size_t deg) {
    return TPoly(deg + 1, TruncSeries(f, p));
}

TPoly tp_mul(const TPoly& a, const TPoly& b) {
    const FieldPtr& f = a[0].field();
    TPoly out = tp_zero(f, a[0].params(), a.size() + b.size() - 2);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            if (b[j].is_zero()) continue;
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

TruncSeries tp_eval(const TPoly& p, const TruncSeries& x) {
    TruncSeries v = p.back();
    for (size_t i = p.size() - 1; i-- > 0;) v = v * x + p[i];
    return v;
}

TPoly tp_derivative(const TPoly& p) {
    const FieldPtr& f = p[0].field();
    if (p.size() == 1) return tp_zero(f, p[0].params(), 0);
    TPoly out(p.size() - 1, TruncSeries(f, p[0].params()));
    for (size_t i = 1; i < p.size(); ++i) out[i - 1] = p[i] * f->from_int((long)i);
    return out;
}

// P(T + c)
TPoly tp_shift(const TPoly& p, const Scalar& c) {
    const FieldPtr& f = p[0].field();
    RingParams rp = p[0].params();
    TPoly acc(1, p.back());
    for (size_t i = p.size() - 1; i-- > 0;) {
        // acc <- acc * (T + c) + p[i]
        TPoly nx = tp_zero(f, rp, acc.size());
        for (size_t t = 0; t < acc.size(); ++t) {
            nx[t + 1] += acc[t];
            nx[t] += acc[t] * c;
        }
        nx[0] += p[i];
        acc = std::move(nx);
    }
    return acc;
}

// re-express a z-series (ram 1) in w with w^r = z, truncation w_trunc
TruncSeries rebase_to_w(const TruncSeries& s, unsigned r, unsigned w_trunc) {
    TruncSeries out(s.field(), RingParams{r, w_trunc});
    for (unsigned j = 0; j < s.params().trunc; ++j) {
        if (s.coeff(j).is_zero()) continue;
        if ((unsigned long)j * r < w_trunc) out.set_coeff(j * r, s.coeff(j));
    }
    return out;
}

// one digit-by-digit lift of a simple root; Q monic over K[w]/(w^T)
TruncSeries lift_simple_root(const TPoly& q, TruncSeries tau, unsigned target) {
    unsigned T = tau.params().trunc;
    TPoly dq = tp_derivative(q);
    for (unsigned guard = 0; guard <= T + 2; ++guard) {
        TruncSeries rem = tp_eval(q, tau);
        unsigned o = ord(rem);
        TruncSeries dval = tp_eval(dq, tau);
        unsigned sep = ord(dval);
        if (o >= std::min<unsigned>(target + sep, T)) return tau;
        if (o < sep + 1) fail(ErrCode::DegenerateNewtonPolygon, "root lift lost contact");
        Scalar delta = -(rem.coeff(o) * dval.coeff(sep).inverse());
        tau.set_coeff(o - sep, tau.coeff(o - sep) + delta);
    }
    fail(ErrCode::DegenerateNewtonPolygon, "root lift failed to converge");
}

} // namespace

TPoly char_poly(const FormalConnection& conn) {
    const FieldPtr& f = conn.field();
    unsigned r = conn.rank;
    RingParams rp{1, conn.M};
    if (r > 6) fail(ErrCode::Internal, "char_poly supports rank <= 6");
    // entries of T I - A as degree <= 1 polynomials in T
    std::vector<std::vector<TPoly>> e(r, std::vector<TPoly>(r));
    for (unsigned i = 0; i < r; ++i)
        for (unsigned j = 0; j < r; ++j) {
            TPoly p = tp_zero(f, rp, i == j ? 1 : 0);
            p[0] = -conn.A[i][j];
            if (i == j) p[1] = TruncSeries::monomial(f, rp, 0, f->one());
            e[i][j] = std::move(p);
        }
    // Leibniz expansion
    std::vector<unsigned> perm(r);
    for (unsigned i = 0; i < r; ++i) perm[i] = i;
    TPoly det = tp_zero(f, rp, r);
    do {
        int inv = 0;
        for (unsigned i = 0; i < r; ++i)
            for (unsigned j = i + 1; j < r; ++j)
                if (perm[i] > perm[j]) ++inv;
        TPoly term = e[0][perm[0]];
        for (unsigned i = 1; i < r; ++i) term = tp_mul(term, e[i][perm[i]]);
        for (size_t t = 0; t < term.size(); ++t) {
            if (inv % 2) det[t] -= term[t];
            else det[t] += term[t];
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

std::vector<PuiseuxOrbit> newton_puiseux(const TPoly& poly, unsigned target_trunc) {
    const FieldPtr& f = poly[0].field();
    size_t n = poly.size() - 1;
    if (n == 0) return {};
    unsigned M = poly[0].params().trunc;
    if (!(poly.back() == TruncSeries::monomial(f, poly[0].params(), 0, f->one())))
        fail(ErrCode::Internal, "newton_puiseux expects a monic polynomial");

    // residual polynomial at z = 0
    std::vector<Scalar> res;
    for (const auto& c : poly) res.push_back(c.coeff(0));
    if (n == 1) {
        TruncSeries root = -poly[0];
        return {PuiseuxOrbit{1, root.truncated(std::min(target_trunc, M))}};
    }

    auto roots0 = f->poly_roots(res);
    // split shape: n distinct residual roots, each lifts by Hensel
    if (roots0.size() == n) {
        std::vector<PuiseuxOrbit> orbits;
        for (const auto& rt : roots0) {
            TruncSeries tau = TruncSeries::monomial(f, RingParams{1, M}, 0, rt);
            tau = lift_simple_root(poly, tau, std::min(target_trunc, M));
            orbits.push_back(PuiseuxOrbit{1, tau.truncated(std::min(target_trunc, M))});
        }
        return orbits;
    }

    // totally degenerate residual (T - c0)^n: the single ramified slope
    Scalar c0 = -(Rat(1, (long)n) * res[n - 1]);
    {
        std::vector<Scalar> pw = {-c0, f->one()};
        std::vector<Scalar> acc = pw;
        for (size_t i = 1; i < n; ++i) {
            std::vector<Scalar> nx(acc.size() + 1, f->zero());
            for (size_t a = 0; a < acc.size(); ++a)
                for (size_t b = 0; b < 2; ++b) nx[a + b] += acc[a] * pw[b];
            acc = std::move(nx);
        }
        if (!(acc == res))
            fail(ErrCode::DegenerateNewtonPolygon,
                 "residual polynomial is neither split nor a perfect power");
    }

    TPoly shifted = tp_shift(poly, c0);
    unsigned wT = (unsigned)n * M;
    TPoly q;
    for (const auto& cz : shifted) q.push_back(rebase_to_w(cz, (unsigned)n, wT));
    // Newton polygon must be the single segment from (0,n) to (n,0)
    for (size_t i = 0; i < n; ++i) {
        unsigned o = ord(q[i]);
        if (o < n - i) fail(ErrCode::DegenerateNewtonPolygon, "slope steeper than 1/r present");
        if (i > 0 && o == n - i)
            fail(ErrCode::NotGenericRamified, "interior Newton-polygon point on the segment");
    }
    if (ord(q[0]) > n) fail(ErrCode::C1Zero, "w-coefficient c1 vanishes (degenerate leading orbit)");
    Scalar gamma = -q[0].coeff((unsigned)n);
    auto c1s = f->kth_roots(gamma, (unsigned)n);
    if (c1s.empty())
        fail(ErrCode::MissingRoot, "leading Puiseux coefficient does not lie in the coefficient field");
    // lift the shifted root c1 w + ... against q, then undo the shift
    TruncSeries tau(f, RingParams{(unsigned)n, wT});
    tau.set_coeff(1, c1s.front());
    tau = lift_simple_root(q, tau, std::min(target_trunc, wT));
    tau.set_coeff(0, c0);
    return {PuiseuxOrbit{(unsigned)n, tau.truncated(std::min(target_trunc, wT))}};
}

Exponent recover_exponent(const FormalConnection& conn) {
    unsigned r = conn.rank, m = conn.m;
    unsigned W = m * r - r + 1;
    TPoly p = char_poly(conn);
    auto orbits = newton_puiseux(p, W);
    if (orbits.size() != 1 || orbits[0].ram_index != r)
        fail(ErrCode::NotGenericRamified, "eigenvalues do not form a single totally ramified orbit");
    const TruncSeries& tau = orbits[0].root;
    std::vector<Scalar> c(W, conn.field()->zero());
    for (unsigned l = 0; l < W && l < tau.params().trunc; ++l) c[l] = tau.coeff(l);
    // the pushforward of w^k carries (k/r) dz/z; its per-branch share shifts the
    // Puiseux eigenvalue by (r-1)/(2r) at the dw/w slot
    c[r * (m - 1)] -= conn.field()->from_rat(Rat((long)r - 1, 2 * (long)r));
    Exponent nu(r, m, std::move(c));
    if (r >= 2 && !nu.generic_c1()) fail(ErrCode::C1Zero, "recovered exponent has c1 = 0");
    return nu;
}

// ---------------------------------------------------------------------------
// quotient covector
//
// pi(e_i) = psi_i(w), compatibility pi(nabla x) = d(pi x) + nu * pi x gives
//   r * sum_j A_{ji}(w^r) psi_j = w^P psi_i' + r * n(w) psi_i,  P = mr - r + 1.
// The exponent window of n comes from recover_exponent (the order-1 digit is a
// branch choice, not a linear consequence); psi and the n tail beyond the
// window are then solved order by order.

QuotientCovector find_quotient_covector(const FormalConnection& conn, unsigned w_trunc) {
    unsigned r = conn.rank, m = conn.m;
    unsigned P = m * r - r + 1;
    const FieldPtr& f = conn.field();
    RingParams wp{r, w_trunc};

    Exponent nu = recover_exponent(conn);
    unsigned W = nu.window();

    // A_a^T blocks: coefficient of w^a of A(w^r), transposed
    auto AT = [&](unsigned a) -> std::optional<Mat> {
        if (a % r != 0 || a / r >= conn.M) return std::nullopt;
        unsigned zd = a / r;
        Mat out = mat_zero(f, r, r);
        bool nz = false;
        for (unsigned i = 0; i < r; ++i)
            for (unsigned j = 0; j < r; ++j) {
                out[i][j] = conn.A[j][i].coeff(zd);
                nz = nz || !out[i][j].is_zero();
            }
        if (!nz) return std::nullopt;
        return out;
    };

    Scalar n0 = nu.c[0];
    Mat M0 = *AT(0);
    for (unsigned i = 0; i < r; ++i) M0[i][i] -= n0;
    auto kb = kernel_basis(M0);
    if (kb.size() != 1)
        fail(ErrCode::NotGenericRamified, "leading matrix has no unique quotient eigencovector");
    Vec psi0 = kb[0];
    for (unsigned i = 0; i < r; ++i)
        if (!psi0[i].is_zero()) {
            Scalar inv = psi0[i].inverse();
            for (auto& x : psi0) x *= inv;
            break;
        }

    std::vector<Vec> psi_digits{psi0};       // psi_digits[o][i] = coeff of w^o in psi_i
    std::vector<Scalar> n_digits{n0};

    for (unsigned o = 1; o < w_trunc; ++o) {
        bool n_known = o < W;
        if (n_known) n_digits.push_back(nu.c[o]);
        // unknowns x = (psi^o [, n_o]):
        //   r(A0^T - n0) psi^o - [P==1] o psi^o - [o >= W] r n_o psi^0 = rhs
        unsigned cols = r + (n_known ? 0 : 1);
        Mat sys = mat_zero(f, r, cols);
        Scalar rs = f->from_int((long)r);
        for (unsigned i = 0; i < r; ++i) {
            for (unsigned j = 0; j < r; ++j) {
                sys[i][j] = rs * M0[i][j];
                if (P == 1 && i == j) sys[i][j] -= f->from_int((long)o);
            }
            if (!n_known) sys[i][r] = -(rs * psi0[i]);
        }
        Vec rhs(r, f->zero());
        for (unsigned a = 1; a <= o; ++a) {
            auto blk = AT(a);
            if (!blk) continue;
            Vec contrib = mat_apply(*blk, psi_digits[o - a]);
            for (unsigned i = 0; i < r; ++i) rhs[i] -= rs * contrib[i];
        }
        if (P >= 2 && o >= P) {
            unsigned t = o - P + 1; // (w^P psi')_o = t psi_t
            for (unsigned i = 0; i < r; ++i) rhs[i] += f->from_int((long)t) * psi_digits[t][i];
        }
        unsigned n_max = n_known ? o : o - 1;
        for (unsigned a = 1; a <= n_max; ++a)
            for (unsigned i = 0; i < r; ++i) rhs[i] += rs * n_digits[a] * psi_digits[o - a][i];
        auto sol = solve_affine(sys, rhs);
        if (!sol)
            fail(ErrCode::NotGenericRamified, "quotient covector obstruction at order " + std::to_string(o));
        Vec dig(r, f->zero());
        for (unsigned i = 0; i < r; ++i) dig[i] = sol->particular[i];
        psi_digits.push_back(std::move(dig));
        if (!n_known) n_digits.push_back(sol->particular[r]);
    }

    QuotientCovector out;
    out.psi.assign(r, TruncSeries(f, wp));
    out.n = TruncSeries(f, wp);
    for (unsigned o = 0; o < w_trunc; ++o) {
        for (unsigned i = 0; i < r; ++i) out.psi[i].set_coeff(o, psi_digits[o][i]);
        out.n.set_coeff(o, n_digits[o]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// irreducibility

namespace {

struct LineSearchResult {
    std::optional<std::string> line;
    bool conclusive = true; // false when a degenerate regime was skipped
};

// rank-2 search through the Riccati equation z^m g' = a g^2 + b g - c for the
// slope g of an invariant line in the chart v = (1, g) (and the swapped chart).
LineSearchResult riccati_line_search(const FormalConnection& conn) {
    const FieldPtr& f = conn.field();
    unsigned m = conn.m, M = conn.M;
    LineSearchResult res;
    for (int chart = 0; chart < 2; ++chart) {
        TruncSeries a = chart == 0 ? conn.A[0][1] : conn.A[1][0];
        TruncSeries b = chart == 0 ? conn.A[0][0] - conn.A[1][1] : conn.A[1][1] - conn.A[0][0];
        TruncSeries cc = chart == 0 ? conn.A[1][0] : conn.A[0][1];
        // leading equation a0 g0^2 + b0 g0 - c0 = 0
        Scalar a0 = a.coeff(0), b0 = b.coeff(0), c0 = cc.coeff(0);
        std::vector<Scalar> lead;
        if (!a0.is_zero()) {
            Scalar ai = a0.inverse();
            lead = {-(c0 * ai), b0 * ai, f->one()};
        } else if (!b0.is_zero()) {
            lead = {-(c0 * b0.inverse()), f->one()};
        } else if (c0.is_zero()) {
            // leading matrix scalar in this chart; the caller strips scalars first
            continue;
        } else {
            continue; // no leading root in this chart
        }
        for (const Scalar& g0 : f->poly_roots(lead)) {
            Scalar slope = f->from_int(2) * a0 * g0 + b0; // derivative of the leading equation
            if (slope.is_zero() && m >= 2) {
                res.conclusive = false; // deeper (ramified-type) regime, not handled here
                continue;
            }
            std::vector<Scalar> g{g0};
            bool ok = true;
            for (unsigned o = 1; o < M && ok; ++o) {
                // [a g^2 + b g - c - z^m g']_o = 0; coefficient of g_o is slope - [m==1] o
                Scalar known = f->zero();
                for (unsigned s = 0; s <= o; ++s) {
                    // a_s * (g^2)_{o-s} with the g_o terms removed
                    Scalar sq = f->zero();
                    for (unsigned u = 0; u + s <= o; ++u) {
                        unsigned vv = o - s - u;
                        if (u >= g.size() || vv >= g.size()) continue; // involves g_o
                        sq += g[u] * g[vv];
                    }
                    known += a.coeff(s) * sq;
                    if (o - s < g.size()) known += b.coeff(s) * g[o - s];
                }
                known -= cc.coeff(o);
                if (o >= m && o - m + 1 < g.size())
                    known -= f->from_int((long)(o - m + 1)) * g[o - m + 1];
                Scalar coef = slope;
                if (m == 1) coef -= f->from_int((long)o);
                if (!coef.is_zero()) {
                    g.push_back(-(known * coef.inverse()));
                } else if (known.is_zero()) {
                    g.push_back(f->zero()); // resonance passed; any value extends
                } else {
                    ok = false; // resonant obstruction: no line on this branch
                }
            }
            if (ok) {
                std::ostringstream os;
                os << "invariant line v = " << (chart == 0 ? "(1, g)" : "(g, 1)") << " with g(0) = "
                   << g0.to_string();
                res.line = os.str();
                return res;
            }
        }
    }
    return res;
}

// invariant line search for rank <= 3: scalar stripping, the rank-2 Riccati
// search, and digit extension from simple leading eigenlines at rank 3
LineSearchResult invariant_line(const FormalConnection& conn) {
    const FieldPtr& f = conn.field();
    unsigned r = conn.rank, m = conn.m, M = conn.M;
    Mat A0 = mat_zero(f, r, r);
    for (unsigned i = 0; i < r; ++i)
        for (unsigned j = 0; j < r; ++j) A0[i][j] = conn.A[i][j].coeff(0);

    // scalar leading matrix: strip the scalar part and recurse on the rest
    bool a0_scalar = true;
    for (unsigned i = 0; i < r && a0_scalar; ++i)
        for (unsigned j = 0; j < r && a0_scalar; ++j)
            if (!(A0[i][j] == (i == j ? A0[0][0] : f->zero()))) a0_scalar = false;
    if (a0_scalar && r >= 2) {
        TruncSeries tr(f, RingParams{1, M});
        for (unsigned i = 0; i < r; ++i) tr += conn.A[i][i];
        tr = tr * f->from_rat(Rat(1, (long)r));
        FormalConnection b = conn;
        for (unsigned i = 0; i < r; ++i) b.A[i][i] -= tr;
        unsigned o = M;
        for (unsigned i = 0; i < r; ++i)
            for (unsigned j = 0; j < r; ++j) o = std::min(o, ord(b.A[i][j]));
        if (o >= M || o >= m)
            return {std::string("scalar connection up to truncation: every line is invariant"), true};
        FormalConnection red = FormalConnection::zero(f, r, m - o, M - o);
        for (unsigned i = 0; i < r; ++i)
            for (unsigned j = 0; j < r; ++j)
                for (unsigned t = 0; t + o < M; ++t) red.A[i][j].set_coeff(t, b.A[i][j].coeff(t + o));
        return invariant_line(red);
    }

    if (r == 2) return riccati_line_search(conn);

    LineSearchResult res;
    std::vector<Scalar> cp; // char poly of A0
    {
        FormalConnection c0 = FormalConnection::zero(f, r, 1, 1);
        for (unsigned i = 0; i < r; ++i)
            for (unsigned j = 0; j < r; ++j) c0.A[i][j].set_coeff(0, A0[i][j]);
        for (const auto& s : char_poly(c0)) cp.push_back(s.coeff(0));
    }
    auto eigs = f->poly_roots(cp);
    if (eigs.empty()) res.conclusive = false; // leading eigenvalues outside the field
    for (const auto& lam : eigs) {
        Mat shifted = A0;
        for (unsigned i = 0; i < r; ++i) shifted[i][i] -= lam;
        auto eigsp = kernel_basis(shifted);
        if (eigsp.size() != 1) {
            res.conclusive = false;
            continue;
        }
        std::vector<Vec> v{eigsp[0]};
        std::vector<Scalar> mu{lam};
        bool ok = true;
        bool frees_seen = false;
        for (unsigned o = 1; o < M && ok; ++o) {
            // (A0 - mu0 + [m==1] o) v_o - mu_o v_0 = rhs
            Mat sys = mat_zero(f, r, r + 1);
            for (unsigned i = 0; i < r; ++i) {
                for (unsigned j = 0; j < r; ++j) {
                    sys[i][j] = shifted[i][j];
                    if (m == 1 && i == j) sys[i][j] += f->from_int((long)o);
                }
                sys[i][r] = -v[0][i];
            }
            Vec rhs(r, f->zero());
            for (unsigned a = 1; a <= o && a < conn.M; ++a)
                for (unsigned i = 0; i < r; ++i)
                    for (unsigned j = 0; j < r; ++j)
                        if (!conn.A[i][j].coeff(a).is_zero())
                            rhs[i] -= conn.A[i][j].coeff(a) * v[o - a][j];
            for (unsigned a = 1; a < o; ++a)
                for (unsigned i = 0; i < r; ++i) rhs[i] += mu[a] * v[o - a][i];
            if (m >= 2 && o >= m) {
                unsigned t = o - m + 1;
                for (unsigned i = 0; i < r; ++i) rhs[i] -= f->from_int((long)t) * v[t][i];
            }
            auto sol = solve_affine(sys, rhs);
            if (!sol) {
                ok = false;
                // a greedy choice of earlier free digits may be to blame
                if (frees_seen) res.conclusive = false;
                break;
            }
            if (sol->kernel.size() > 1) frees_seen = true;
            Vec dig(r, f->zero());
            for (unsigned i = 0; i < r; ++i) dig[i] = sol->particular[i];
            v.push_back(std::move(dig));
            mu.push_back(sol->particular[r]);
        }
        if (ok) {
            std::ostringstream os;
            os << "invariant line with leading eigenvalue " << lam.to_string() << ", v(0) = (";
            for (unsigned i = 0; i < r; ++i) os << (i ? "," : "") << v[0][i].to_string();
            os << ")";
            res.line = os.str();
            return res;
        }
    }
    return res;
}

FormalConnection dual_connection(const FormalConnection& conn) {
    FormalConnection d = conn;
    for (unsigned i = 0; i < conn.rank; ++i)
        for (unsigned j = 0; j < conn.rank; ++j) d.A[i][j] = -conn.A[j][i];
    return d;
}

} // namespace

IrreducibilityVerdict is_formally_irreducible(const FormalConnection& conn, const Exponent* hint) {
    // generic ramified criterion: single totally ramified orbit with c1 != 0
    if (hint && conn.rank >= 2 && hint->r == conn.rank && hint->m == conn.m && hint->generic_c1())
        return {true, "generic ramified criterion (hinted exponent, c1 != 0)"};
    try {
        Exponent nu = recover_exponent(conn);
        if (nu.generic_c1() && conn.rank >= 1)
            return {true, conn.rank == 1 ? "rank one" : "generic ramified criterion (c1 != 0)"};
    } catch (const Error&) {
        // not of generic ramified type; fall through to the exhaustive branch
    }
    if (conn.rank == 1) return {true, "rank one"};
    if (conn.rank > 3)
        fail(ErrCode::Inconclusive, "no generic criterion and exhaustive search limited to rank <= 3");
    LineSearchResult primal = invariant_line(conn);
    if (primal.line) return {false, *primal.line};
    bool conclusive = primal.conclusive;
    if (conn.rank == 3) {
        LineSearchResult dual = invariant_line(dual_connection(conn));
        if (dual.line) return {false, "corank-1 invariant subbundle (dual line: " + *dual.line + ")"};
        conclusive = conclusive && dual.conclusive;
    }
    if (!conclusive)
        fail(ErrCode::Inconclusive, "invariant-subbundle search hit a regime it cannot decide");
    return {true, "exhaustive invariant-subbundle search found none"};
}

// ---------------------------------------------------------------------------
// gauge and series-matrix helpers

TruncSeries series_entry_derivative(const TruncSeries& s) {
    TruncSeries out(s.field(), s.params());
    for (unsigned t = 1; t < s.params().trunc; ++t)
        out.set_coeff(t - 1, s.coeff(t) * s.field()->from_int((long)t));
    return out;
}

SeriesMat series_mat_mul(const SeriesMat& a, const SeriesMat& b) {
    const FieldPtr& f = a[0][0].field();
    SeriesMat out(a.size(), SeriesVec(b[0].size(), TruncSeries(f, a[0][0].params())));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < b.size(); ++k) {
            if (a[i][k].is_zero()) continue;
            for (size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

SeriesMat series_mat_inverse(const SeriesMat& a) {
    const FieldPtr& f = a[0][0].field();
    size_t n = a.size();
    unsigned M = a[0][0].params().trunc;
    Mat a0 = mat_zero(f, n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) a0[i][j] = a[i][j].coeff(0);
    Mat a0inv = mat_inverse(a0);
    // digit solve sum_{a+b=c} A_a X_b = delta_{c0} I
    std::vector<Mat> X{a0inv};
    for (unsigned c = 1; c < M; ++c) {
        Mat acc = mat_zero(f, n, n);
        for (unsigned aidx = 1; aidx <= c; ++aidx)
            for (size_t i = 0; i < n; ++i)
                for (size_t k = 0; k < n; ++k) {
                    if (a[i][k].coeff(aidx).is_zero()) continue;
                    for (size_t j = 0; j < n; ++j) acc[i][j] += a[i][k].coeff(aidx) * X[c - aidx][k][j];
                }
        Mat xc = mat_zero(f, n, n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                Scalar s = f->zero();
                for (size_t k = 0; k < n; ++k) s += a0inv[i][k] * acc[k][j];
                xc[i][j] = -s;
            }
        X.push_back(std::move(xc));
    }
    SeriesMat out(n, SeriesVec(n, TruncSeries(f, a[0][0].params())));
    for (unsigned c = 0; c < M; ++c)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) out[i][j].set_coeff(c, X[c][i][j]);
    return out;
}

FormalConnection gauge_transform(const FormalConnection& conn, const SeriesMat& g) {
    FormalConnection out = conn;
    SeriesMat ginv = series_mat_inverse(g);
    SeriesMat ag = series_mat_mul(conn.A, g);
    out.A = series_mat_mul(ginv, ag);
    // + z^m g^{-1} g'
    SeriesMat gp = g;
    for (auto& row : gp)
        for (auto& e : row) e = series_entry_derivative(e);
    SeriesMat corr = series_mat_mul(ginv, gp);
    for (unsigned i = 0; i < conn.rank; ++i)
        for (unsigned j = 0; j < conn.rank; ++j) out.A[i][j] += corr[i][j].shift_z(conn.m);
    return out;
}

} // namespace ramconn
