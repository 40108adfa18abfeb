#include "ramconn/localdata.hpp"

#include <sstream>

namespace ramconn {

namespace {

RingParams rw_params(const LocalRamifiedData& d) { return RingParams{d.r, d.window()}; }

// z-series -> element of R_w (w^r = z)
TruncSeries to_rw(const LocalRamifiedData& d, const TruncSeries& zs) {
    return TruncSeries::from_z_coeffs(zs.field(), rw_params(d), zs.coeffs());
}

// z-series divided by z (the constant term must vanish)
TruncSeries div_z(const TruncSeries& zs) {
    TruncSeries out(zs.field(), zs.params());
    for (unsigned t = 1; t < zs.params().trunc; ++t) out.set_coeff(t - 1, zs.coeff(t));
    return out;
}

// canonical exponent chain nu_0 + k dw/w as an R_w series of dz/z^m coefficients
TruncSeries chain_series(const LocalRamifiedData& d, unsigned k) {
    const Exponent& nu0 = d.exponents[0];
    std::vector<Scalar> c = nu0.c;
    c[nu0.top_index()] += d.field()->from_rat(Rat((long)k, (long)d.r));
    return TruncSeries(d.field(), rw_params(d), c);
}

// pi_k applied to nabla(g^k_l), as an L_k coordinate series; requires the
// filtration pattern (A_{jl} in (z) for j < l)
TruncSeries diagram_lhs(const LocalRamifiedData& d, unsigned k, unsigned l) {
    const FieldPtr& f = d.field();
    TruncSeries acc(f, rw_params(d));
    for (unsigned j = 0; j < d.r; ++j) {
        const TruncSeries& a = d.A[j][l];
        if (l >= k) {
            // nabla f_l = sum_j A_{jl} f_j; for j < k write A_{jl} = z * (A_{jl}/z)
            if (j < k) acc += to_rw(d, div_z(a)) * d.pi[k][j];
            else acc += to_rw(d, a) * d.pi[k][j];
        } else {
            // nabla(z f_l) = sum_{j<k} A_{jl} (z f_j) + sum_{j>=k} (z A_{jl}) f_j
            if (j < k) acc += to_rw(d, a) * d.pi[k][j];
            else acc += (to_rw(d, a) * d.pi[k][j]).shift_w(d.r);
        }
    }
    return acc;
}

} // namespace

VerifyReport verify(const LocalRamifiedData& data) {
    VerifyReport rep;
    const FieldPtr& f = data.field();
    unsigned r = data.r, m = data.m, W = data.window();
    auto add = [&](const std::string& name, CheckStatus st, const std::string& wit = "") {
        rep.checks.push_back(CheckResult{name, st, wit});
    };

    // exponent chain nu_k - nu_{k-1} = dw/w
    {
        bool ok = true;
        std::string wit;
        for (unsigned k = 0; k < r && ok; ++k) {
            if (data.exponents[k].r != r || data.exponents[k].m != m) {
                ok = false;
                wit = "exponent " + std::to_string(k) + " has wrong (r, m)";
                break;
            }
            TruncSeries expect = chain_series(data, k);
            TruncSeries got(f, rw_params(data), data.exponents[k].c);
            if (!(expect == got)) {
                ok = false;
                wit = "nu_" + std::to_string(k) + " != nu_0 + " + std::to_string(k) + " dw/w";
            }
        }
        add("exponent_chain", ok ? CheckStatus::Pass : CheckStatus::Fail, wit);
    }
    bool chain_ok = rep.checks.back().status == CheckStatus::Pass;

    // nabla(V_k) in V_k (x) Omega: entries above the diagonal divisible by z
    {
        bool ok = true;
        std::string wit;
        for (unsigned j = 0; j < r && ok; ++j)
            for (unsigned l = j + 1; l < r && ok; ++l)
                if (!data.A[j][l].coeff(0).is_zero()) {
                    ok = false;
                    wit = "A[" + std::to_string(j) + "][" + std::to_string(l) + "] not divisible by z";
                }
        add("filtration_invariance", ok ? CheckStatus::Pass : CheckStatus::Fail, wit);
    }
    bool filt_ok = rep.checks.back().status == CheckStatus::Pass;

    // torsion compatibility: pi_k(z f_l) must vanish against z^{m-1}
    {
        bool ok = true;
        std::string wit;
        for (unsigned k = 0; k < r && ok; ++k)
            for (unsigned l = 0; l < k && ok; ++l)
                if (ord(data.pi[k][l]) < 1) {
                    ok = false;
                    wit = "pi_" + std::to_string(k) + "(z f_" + std::to_string(l) + ") has w-order 0";
                }
        add("pi_torsion", ok ? CheckStatus::Pass : CheckStatus::Fail, wit);
    }
    bool tors_ok = rep.checks.back().status == CheckStatus::Pass;

    // pi_k restricted to V_k surjective onto L_k: the K[z]-span of the row is R_w
    {
        bool ok = true;
        std::string wit;
        for (unsigned k = 0; k < r && ok; ++k) {
            Mat span;
            for (unsigned l = 0; l < r; ++l) {
                TruncSeries s = data.pi[k][l];
                for (unsigned j = 0; j < m; ++j) {
                    TruncSeries zj = s.shift_w(j * r);
                    Vec row;
                    for (unsigned t = 0; t < W; ++t) row.push_back(zj.coeff(t));
                    span.push_back(std::move(row));
                }
            }
            if (rank(span) != W) {
                ok = false;
                wit = "pi_" + std::to_string(k) + " not surjective onto L_" + std::to_string(k);
            }
        }
        add("pi_surjectivity", ok ? CheckStatus::Pass : CheckStatus::Fail, wit);
    }
    bool surj_ok = rep.checks.back().status == CheckStatus::Pass;

    // im(phi_k) = w L_{k-1}: the multiplier has w-order exactly 1
    {
        bool ok = true;
        std::string wit;
        for (unsigned k = 1; k <= r && ok; ++k)
            if (ord(data.phi[k - 1]) != 1) {
                ok = false;
                wit = "phi_" + std::to_string(k) + " has w-order " + std::to_string(ord(data.phi[k - 1]));
            }
        add("phi_image", ok ? CheckStatus::Pass : CheckStatus::Fail, wit);
    }
    bool phi_ok = rep.checks.back().status == CheckStatus::Pass;

    // condition (5) diagrams pi_k nabla = nu_k pi_k, against the canonical chain
    if (chain_ok && filt_ok && tors_ok && surj_ok) {
        bool ok = true;
        std::string wit;
        for (unsigned k = 0; k < r && ok; ++k) {
            TruncSeries nu_k = chain_series(data, k);
            for (unsigned l = 0; l < r && ok; ++l) {
                TruncSeries lhs = diagram_lhs(data, k, l);
                TruncSeries rhs = nu_k * data.pi[k][l];
                if (!(lhs == rhs)) {
                    ok = false;
                    wit = "pi_" + std::to_string(k) + " nabla != nu_" + std::to_string(k) +
                          " pi_" + std::to_string(k) + " on generator " + std::to_string(l);
                }
            }
        }
        add("diagram_nabla", ok ? CheckStatus::Pass : CheckStatus::Fail, wit);
    } else {
        add("diagram_nabla", CheckStatus::Skipped, "prerequisite failed");
    }
    bool nabla_ok = rep.checks.back().status == CheckStatus::Pass;

    // condition (6) diagrams phi_k pi_k = pi_{k-1}, including the z-shift square
    if (phi_ok && tors_ok && surj_ok) {
        bool ok = true;
        std::string wit;
        for (unsigned k = 1; k <= r && ok; ++k) {
            const auto& src = data.pi[k % r]; // k = r uses pi_0 through the z-tensor square
            const auto& dst = data.pi[k - 1];
            for (unsigned l = 0; l < r && ok; ++l) {
                TruncSeries lhs = data.phi[k - 1] * src[l];
                TruncSeries rhs = (l + 1 == k) ? dst[l].shift_w(r) : dst[l];
                if (!(lhs == rhs)) {
                    ok = false;
                    wit = (k == r ? std::string("phi_r z-shift square") : "phi_" + std::to_string(k)) +
                          " fails on generator " + std::to_string(l);
                }
            }
        }
        add("diagram_phi", ok ? CheckStatus::Pass : CheckStatus::Fail, wit);
    } else {
        add("diagram_phi", CheckStatus::Skipped, "prerequisite failed");
    }
    bool dphi_ok = rep.checks.back().status == CheckStatus::Pass;

    // the composite phi_1 ... phi_r must be the canonical z-multiplication
    if (phi_ok && dphi_ok) {
        TruncSeries prod = data.phi[0];
        for (unsigned k = 1; k < r; ++k) prod = prod * data.phi[k];
        TruncSeries target = TruncSeries::monomial(f, rw_params(data), r, f->one());
        add("composite_canonical", prod == target ? CheckStatus::Pass : CheckStatus::Fail,
            prod == target ? "" : "phi_1 ... phi_r != z");
    } else {
        add("composite_canonical", CheckStatus::Skipped, "prerequisite failed");
    }
    (void)nabla_ok;
    return rep;
}

LocalRamifiedData build_from_formal(const FormalConnection& conn, const SeriesVec& pi_row) {
    unsigned r = conn.rank, m = conn.m;
    const FieldPtr& f = conn.field();
    if (m == 1 && r > 1) fail(ErrCode::SchemaError, "ramified blocks require pole order m >= 2");
    if (pi_row.size() != r) fail(ErrCode::SchemaError, "quotient row must have one entry per basis vector");
    if (pi_row[0].params().trunc < r * m)
        fail(ErrCode::SchemaError, "quotient row must carry at least w^(r m) precision");

    // Psi_{j l}(z): the w^j-part of psi_l, as a z-series mod z^m
    SeriesMat Psi(r, SeriesVec(r, TruncSeries(f, RingParams{1, m})));
    for (unsigned l = 0; l < r; ++l)
        for (unsigned t = 0; t < r * m && t < pi_row[l].params().trunc; ++t)
            Psi[t % r][l].set_coeff(t / r, pi_row[l].coeff(t));
    Mat psi0 = mat_zero(f, r, r);
    for (unsigned j = 0; j < r; ++j)
        for (unsigned l = 0; l < r; ++l) psi0[j][l] = Psi[j][l].coeff(0);
    if (mat_det(psi0).is_zero())
        fail(ErrCode::NotIso, "quotient row is not an isomorphism on W (not surjective mod w)");
    SeriesMat G = series_mat_inverse(Psi); // f_k = sum_l G_{lk} e_l, pi(f_k) = w^k

    // connection matrix in the adapted basis, mod z^m; the z^m g^{-1}g' term
    // vanishes at this truncation and G^{-1} is Psi itself
    SeriesMat Am(r, SeriesVec(r, TruncSeries(f, RingParams{1, m})));
    for (unsigned i = 0; i < r; ++i)
        for (unsigned j = 0; j < r; ++j)
            for (unsigned t = 0; t < m; ++t) Am[i][j].set_coeff(t, conn.A[i][j].coeff(t));
    SeriesMat Af = series_mat_mul(Psi, series_mat_mul(Am, G));

    LocalRamifiedData d;
    d.r = r;
    d.m = m;
    d.A = Af;

    unsigned W = m * r - r + 1;
    std::vector<Scalar> c0(W, f->zero());
    for (unsigned j = 0; j < r; ++j)
        for (unsigned t = 0; t < m; ++t) {
            unsigned deg = j + t * r;
            if (deg < W) c0[deg] = Af[j][0].coeff(t);
        }
    Exponent nu0(r, m, c0);
    for (unsigned k = 0; k < r; ++k) d.exponents.push_back(nu0.shifted_by_dw_over_w(Rat((long)k)));

    RingParams rw{r, W};
    d.pi.assign(r, std::vector<TruncSeries>(r, TruncSeries(f, rw)));
    for (unsigned k = 0; k < r; ++k)
        for (unsigned l = 0; l < r; ++l) {
            unsigned deg = l >= k ? l - k : r + l - k;
            d.pi[k][l] = TruncSeries::monomial(f, rw, deg, f->one());
        }
    d.phi.assign(r, TruncSeries::monomial(f, rw, 1, f->one()));
    return d;
}

LocalRamifiedData model_local_data(const Exponent& nu) {
    FormalConnection conn = pushforward_ramified(nu, nu.m + 1);
    const FieldPtr& f = nu.field();
    SeriesVec chart;
    RingParams wp{nu.r, nu.r * nu.m};
    for (unsigned l = 0; l < nu.r; ++l) chart.push_back(TruncSeries::monomial(f, wp, l, f->one()));
    return build_from_formal(conn, chart);
}

LocalRamifiedData data_gauge(const LocalRamifiedData& data, const SeriesMat& g,
                             const std::vector<TruncSeries>& units) {
    unsigned r = data.r;
    const FieldPtr& f = data.field();
    for (unsigned j = 0; j < r; ++j)
        for (unsigned l = j + 1; l < r; ++l)
            if (!g[j][l].coeff(0).is_zero())
                fail(ErrCode::SchemaError, "data gauge must preserve the filtration pattern");
    LocalRamifiedData out = data;
    // A' = g^{-1} A g  (z^m g' term vanishes mod z^m)
    out.A = series_mat_mul(series_mat_inverse(g), series_mat_mul(data.A, g));
    // pi'_k = pi_k o g on the adapted generators
    for (unsigned k = 0; k < r; ++k)
        for (unsigned l = 0; l < r; ++l) {
            TruncSeries acc(f, rw_params(data));
            for (unsigned j = 0; j < r; ++j) {
                const TruncSeries& gjl = g[j][l];
                if (l >= k) {
                    if (j < k) acc += to_rw(data, div_z(gjl)) * data.pi[k][j];
                    else acc += to_rw(data, gjl) * data.pi[k][j];
                } else {
                    if (j < k) acc += to_rw(data, gjl) * data.pi[k][j];
                    else acc += (to_rw(data, gjl) * data.pi[k][j]).shift_w(r);
                }
            }
            out.pi[k][l] = acc;
        }
    // L_k rescale: pi'_k = u_k pi_k, phi'_k = u_{k-1} t_k / u_k  (phi_r wraps to u_0)
    for (unsigned k = 0; k < r; ++k) {
        if (ord(units[k]) != 0) fail(ErrCode::SchemaError, "L_k rescale must be a unit");
        for (unsigned l = 0; l < r; ++l) out.pi[k][l] = units[k] * out.pi[k][l];
    }
    for (unsigned k = 1; k <= r; ++k) {
        const TruncSeries& u_src = units[k % r];
        const TruncSeries& u_dst = units[k - 1];
        out.phi[k - 1] = u_dst * data.phi[k - 1] * u_src.unit_inverse();
    }
    return out;
}

KernelPi kernel_Pi(const LocalRamifiedData& data) {
    unsigned r = data.r, W = data.window();
    const FieldPtr& f = data.field();
    if (!f->has_root_of_unity(r))
        fail(ErrCode::MissingRoot, "kernel_Pi needs zeta_" + std::to_string(r));
    // Pi row k, entry l: multiplication by sigma^{-k}(pi_0[l]) on R_w
    Mat big = mat_zero(f, r * W, r * W);
    for (unsigned k = 0; k < r; ++k)
        for (unsigned l = 0; l < r; ++l) {
            TruncSeries s = galois(-(long)k, data.pi[0][l]);
            // column: coefficient a of w^a in the argument; row: w^b of the value
            for (unsigned a = 0; a < W; ++a) {
                if (s.is_zero()) break;
                for (unsigned b = a; b < W; ++b) {
                    Scalar c = s.coeff(b - a);
                    if (!c.is_zero()) big[k * W + b][l * W + a] += c;
                }
            }
        }
    auto kb = kernel_basis(big);
    KernelPi out;
    out.length = (unsigned)kb.size();
    for (const auto& v : kb) {
        SeriesVec vec(r, TruncSeries(f, rw_params(data)));
        for (unsigned l = 0; l < r; ++l)
            for (unsigned a = 0; a < W; ++a) vec[l].set_coeff(a, v[l * W + a]);
        out.basis.push_back(std::move(vec));
    }
    return out;
}

ReconstructOutcome reconstruct_check(const LocalRamifiedData& data) {
    unsigned r = data.r, m = data.m, W = data.window();
    const FieldPtr& f = data.field();
    if (r >= 2 && data.exponents[0].c[1].is_zero())
        fail(ErrCode::C1Zero, "the w dw/w^{mr-r+1} coefficient of mu_0 vanishes");

    // unknown connection matrix B (r x r over K[z]/(z^m)) subject to the
    // filtration pattern and the condition-(5) diagrams
    unsigned nunk = r * r * m;
    auto col_of = [&](unsigned i, unsigned j, unsigned t) { return (i * r + j) * m + t; };
    Mat sys;
    Vec rhs;
    auto add_row = [&](Vec row, Scalar b) {
        sys.push_back(std::move(row));
        rhs.push_back(b);
    };
    // pattern: B[j][l] z-coefficient 0 vanishes for j < l
    for (unsigned j = 0; j < r; ++j)
        for (unsigned l = j + 1; l < r; ++l) {
            Vec row(nunk, f->zero());
            row[col_of(j, l, 0)] = f->one();
            add_row(std::move(row), f->zero());
        }
    // diagrams: for each k, generator l, w-power t:
    //   [pi_k(nabla g^k_l)]_t = [nu_k pi_k(g^k_l)]_t, linear in B
    for (unsigned k = 0; k < r; ++k) {
        TruncSeries nu_k = chain_series(data, k);
        for (unsigned l = 0; l < r; ++l) {
            // coefficient of B[j][l][zdeg] in the L_k series of pi_k(nabla g^k_l)
            std::vector<Vec> coeff(W, Vec(nunk, f->zero()));
            for (unsigned j = 0; j < r; ++j)
                for (unsigned zd = 0; zd < m; ++zd) {
                    // the multiplier series of B[j][l] z^zd against pi[k][j]
                    TruncSeries mult(f, rw_params(data));
                    if (l >= k) {
                        if (j < k) {
                            if (zd == 0) continue; // needs the z-divisible part
                            mult = data.pi[k][j].shift_w((zd - 1) * r);
                        } else {
                            mult = data.pi[k][j].shift_w(zd * r);
                        }
                    } else {
                        if (j < k) mult = data.pi[k][j].shift_w(zd * r);
                        else mult = data.pi[k][j].shift_w(zd * r + r);
                    }
                    for (unsigned t = 0; t < W; ++t)
                        if (!mult.coeff(t).is_zero()) coeff[t][col_of(j, l, zd)] += mult.coeff(t);
                }
            TruncSeries target = nu_k * data.pi[k][l];
            for (unsigned t = 0; t < W; ++t) add_row(std::move(coeff[t]), target.coeff(t));
        }
    }
    auto sol = solve_affine(sys, rhs);
    if (!sol) fail(ErrCode::EmptySolutionSet, "no connection is compatible with the given local data");

    auto make_conn = [&](const Vec& x) {
        FormalConnection conn = FormalConnection::zero(f, r, m, m);
        for (unsigned i = 0; i < r; ++i)
            for (unsigned j = 0; j < r; ++j)
                for (unsigned t = 0; t < m; ++t) conn.A[i][j].set_coeff(t, x[col_of(i, j, t)]);
        return conn;
    };

    ReconstructOutcome out;
    out.solution_freedom = (unsigned)sol->kernel.size();
    FormalConnection conn = make_conn(sol->particular);
    out.recovered = recover_exponent(conn);
    if (!same_orbit_mod_int_shift(out.recovered, data.exponents[0])) {
        out.ok = false;
        out.detail = "recovered exponent is not in the Galois orbit of mu_0 modulo Z dw/w";
        return out;
    }

    // normal-form congruences: with e_k = (pi'|_W)^{-1}(w^k) for the solved
    // connection's quotient, the normalized pi_k(e_k) is w^k mod w^{mr-r+k};
    // the covector must first be Galois-aligned with mu_0
    QuotientCovector qc = find_quotient_covector(conn, r * m);
    long align = -1;
    for (unsigned k = 0; k < r && align < 0; ++k)
        if (out.recovered.galois_twist(k) == data.exponents[0]) align = (long)k;
    if (align < 0) {
        out.ok = false;
        out.detail = "recovered exponent matches mu_0 only up to a nonzero integer dw/w shift";
        return out;
    }
    for (unsigned l = 0; l < r; ++l) qc.psi[l] = galois(align, qc.psi[l]);
    SeriesMat Psi(r, SeriesVec(r, TruncSeries(f, RingParams{1, m})));
    for (unsigned l = 0; l < r; ++l)
        for (unsigned t = 0; t < r * m; ++t) Psi[t % r][l].set_coeff(t / r, qc.psi[l].coeff(t));
    Mat psi0 = mat_zero(f, r, r);
    for (unsigned j = 0; j < r; ++j)
        for (unsigned l = 0; l < r; ++l) psi0[j][l] = Psi[j][l].coeff(0);
    if (mat_det(psi0).is_zero()) {
        out.ok = false;
        out.detail = "solved connection's quotient is not an isomorphism on W";
        return out;
    }
    SeriesMat E = series_mat_inverse(Psi); // e_k = sum_l E[l][k] f_l

    // e_k must lie in V_k: components below k divisible by z
    for (unsigned k = 1; k < r; ++k)
        for (unsigned l = 0; l < k; ++l)
            if (!E[l][k].coeff(0).is_zero()) {
                out.ok = false;
                out.detail = "e_" + std::to_string(k) + " does not lie in V_" + std::to_string(k);
                return out;
            }

    // sigma_k := pi_k(e_k) as an L_k coordinate series
    std::vector<TruncSeries> sigma(r, TruncSeries(f, rw_params(data)));
    for (unsigned k = 0; k < r; ++k) {
        TruncSeries acc(f, rw_params(data));
        for (unsigned l = 0; l < r; ++l) {
            if (l < k) acc += to_rw(data, div_z(E[l][k])) * data.pi[k][l];
            else acc += to_rw(data, E[l][k]) * data.pi[k][l];
        }
        sigma[k] = acc;
    }
    if (ord(sigma[0]) != 0) {
        out.ok = false;
        out.detail = "pi_0(e_0) is not a unit";
        return out;
    }
    // normalize through the L_k identifications pinned by the phi chain:
    // u_0 = sigma_0^{-1}, u_k = u_{k-1} t_k / w; then u_k sigma_k must be
    // 1 mod w^{mr-r} (the congruence pi_k(e_k) = w^k mod w^{mr-r+k} in L_k)
    TruncSeries u = sigma[0].unit_inverse();
    for (unsigned k = 0; k < r; ++k) {
        TruncSeries norm = u * sigma[k];
        bool ok = norm.coeff(0).is_one();
        for (unsigned t = 1; t + 1 < W && ok; ++t)
            if (!norm.coeff(t).is_zero()) ok = false;
        if (!ok) {
            out.ok = false;
            out.detail = "normal-form congruence fails for pi_" + std::to_string(k) + "(e_" +
                         std::to_string(k) + ")";
            return out;
        }
        if (k + 1 < r) {
            TruncSeries uk = u * data.phi[k];
            TruncSeries shifted(f, rw_params(data));
            for (unsigned t = 1; t < W; ++t) shifted.set_coeff(t - 1, uk.coeff(t));
            u = shifted;
        }
    }
    out.ok = true;
    out.detail = "reconstruction succeeded";
    return out;
}

} // namespace ramconn
