#include "ramconn/cohomology.hpp"

#include <map>
#include <sstream>

namespace ramconn {

unsigned default_degree_bound(const GlobalConnection& gc) {
    unsigned s = 0;
    for (const auto& p : gc.poles) s += p.m;
    int dmax = gc.splitting[0], dmin = gc.splitting[0];
    for (int d : gc.splitting) {
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    return s * gc.rank() + (unsigned)(dmax - dmin) + 4;
}


namespace {
inline void map_add(std::map<int, Scalar>& m, int k, const Scalar& v) {
    auto it = m.find(k);
    if (it == m.end()) m.emplace(k, v);
    else it->second += v;
}
inline void map_sub(std::map<int, Scalar>& m, int k, const Scalar& v) {
    auto it = m.find(k);
    if (it == m.end()) m.emplace(k, -v);
    else it->second -= v;
}

// incremental exact row reduction for rank/membership bookkeeping
struct RowReducer {
    std::vector<Vec> rows;        // reduced, each with a leading 1
    std::vector<size_t> pivots;
    // reduces v against the stored rows; returns true (and stores) when v
    // adds a new direction
    bool add(Vec v) {
        for (size_t i = 0; i < rows.size(); ++i) {
            const Scalar& c = v[pivots[i]];
            if (c.is_zero()) continue;
            Scalar fac = c;
            for (size_t t = 0; t < v.size(); ++t)
                if (!rows[i][t].is_zero()) v[t] -= fac * rows[i][t];
        }
        size_t piv = v.size();
        for (size_t t = 0; t < v.size(); ++t)
            if (!v[t].is_zero()) {
                piv = t;
                break;
            }
        if (piv == v.size()) return false;
        Scalar inv = v[piv].inverse();
        for (auto& c : v) c *= inv;
        rows.push_back(std::move(v));
        pivots.push_back(piv);
        return true;
    }
};
} // namespace

// implementation scaffold carrying all layouts and matrices
struct CechBuild {
    const GlobalConnection& gc;
    unsigned B;
    bool tracefree;
    FieldPtr f;
    unsigned r;
    unsigned delta; // deg den
    int smax;
    Poly den;

    using WinRow = std::vector<CechComplex::Win>;
    using WinMat = std::vector<WinRow>;

    WinMat u0, u1, u01, v0, v1, w01;
    size_t c0_dim = 0, c1_dim = 0, c2_dim = 0;

    struct PoleCtx {
        size_t index;
        unsigned m;
        std::vector<Scalar> denrest_inv;
        SeriesMat P, Pinv;
        // pairwise products Pinv[x][a] * P[b][y]
        std::vector<TruncSeries> pp; // indexed x*r^3 + a*r^2 + b*r + y
        // kernel bases of pi-bar_{j,k}: per block j, per k, list of r-series vectors
        std::vector<std::vector<std::vector<SeriesVec>>> piker;
        std::map<int, std::vector<Scalar>> taylor_cache;
    };
    std::vector<PoleCtx> ctx;

    CechBuild(const GlobalConnection& g, unsigned bound, bool tf)
        : gc(g), B(bound), tracefree(tf), f(g.field), r(g.rank()) {
        den = gc.denominator();
        delta = (unsigned)std::max(poly_degree(den), 0);
        smax = 0;
        for (int da : gc.splitting)
            for (int db : gc.splitting) smax = std::max(smax, da - db);
        for (const auto& p : gc.poles)
            if (p.at_infinity)
                fail(ErrCode::Inconclusive, "tangent computation requires finite poles (chart swap first)");
        build_windows();
        build_pole_ctx();
    }

    static size_t place(WinMat& wm, size_t& dim) {
        for (auto& row : wm)
            for (auto& w : row) {
                w.off = dim;
                dim += w.size();
            }
        return dim;
    }

    void build_windows() {
        auto mk = [&](int lo_base, int hi_base, bool twist) {
            WinMat wm(r, WinRow(r));
            for (unsigned a = 0; a < r; ++a)
                for (unsigned b = 0; b < r; ++b) {
                    int tw = twist ? gc.splitting[a] - gc.splitting[b] : 0;
                    wm[a][b].lo = lo_base + (twist ? tw : 0);
                    wm[a][b].hi = hi_base + (twist ? tw : 0);
                }
            return wm;
        };
        u0 = mk(0, (int)B, false);
        u1 = mk(-(int)B, 0, true);
        u01 = mk(-(int)B - smax, (int)B + smax, false);
        v0 = mk(0, (int)B + (int)delta, false);
        // v1 entry (a,b): [-B, delta - 2 + d_a - d_b]
        v1 = WinMat(r, WinRow(r));
        for (unsigned a = 0; a < r; ++a)
            for (unsigned b = 0; b < r; ++b) {
                v1[a][b].lo = -(int)B;
                v1[a][b].hi = (int)delta - 2 + gc.splitting[a] - gc.splitting[b];
            }
        w01 = mk(-(int)B - smax - 1, (int)B + 2 * smax + (int)delta, false);
        c0_dim = 0;
        place(u0, c0_dim);
        place(u1, c0_dim);
        c1_dim = 0;
        place(u01, c1_dim);
        place(v0, c1_dim);
        place(v1, c1_dim);
        c2_dim = 0;
        place(w01, c2_dim);
    }

    void build_pole_ctx() {
        for (size_t i = 0; i < gc.poles.size(); ++i) {
            const auto& p = gc.poles[i];
            PoleCtx c;
            c.index = i;
            c.m = p.m;
            Poly den_rest{f->one()};
            for (size_t q = 0; q < gc.poles.size(); ++q) {
                if (q == i) continue;
                Poly lin{-gc.poles[q].position, f->one()};
                for (unsigned t = 0; t < gc.poles[q].m; ++t) den_rest = poly_mul(den_rest, lin);
            }
            c.denrest_inv = series_inverse(poly_taylor(den_rest, p.position, p.m));
            c.P.assign(r, SeriesVec(r, TruncSeries(f, RingParams{1, p.m})));
            for (unsigned x = 0; x < r; ++x)
                for (unsigned y = 0; y < r; ++y)
                    for (unsigned t = 0; t < std::min(p.m, p.adapted_frame[x][y].params().trunc); ++t)
                        c.P[x][y].set_coeff(t, p.adapted_frame[x][y].coeff(t));
            c.Pinv = series_mat_inverse(c.P);
            c.pp.assign((size_t)r * r * r * r, TruncSeries(f, RingParams{1, p.m}));
            for (unsigned x = 0; x < r; ++x)
                for (unsigned a = 0; a < r; ++a)
                    for (unsigned b = 0; b < r; ++b)
                        for (unsigned y = 0; y < r; ++y)
                            c.pp[((x * r + a) * r + b) * r + y] = c.Pinv[x][a] * c.P[b][y];
            // kernels of pi-bar_{j,k}
            for (size_t bj = 0; bj < p.blocks.size(); ++bj) {
                const LocalRamifiedData& blk = p.blocks[bj];
                unsigned rb = blk.r, W = blk.window();
                std::vector<std::vector<SeriesVec>> per_k;
                for (unsigned k = 0; k < rb; ++k) {
                    // presentation: column (l, a) with a < W for l >= k and
                    // a < rb (m-1) for l < k (the torsion cut)
                    std::vector<std::pair<unsigned, unsigned>> cols;
                    for (unsigned l = 0; l < rb; ++l) {
                        unsigned amax = l >= k ? W : rb * (blk.m - 1);
                        for (unsigned a = 0; a < amax; ++a) cols.push_back({l, a});
                    }
                    Mat big = mat_zero(f, W, cols.size());
                    for (size_t cidx = 0; cidx < cols.size(); ++cidx) {
                        auto [l, a] = cols[cidx];
                        TruncSeries img = blk.pi[k][l].shift_w(a);
                        for (unsigned t = 0; t < W; ++t) big[t][cidx] = img.coeff(t);
                    }
                    auto kb = kernel_basis(big);
                    std::vector<SeriesVec> kers;
                    for (const auto& kv : kb) {
                        SeriesVec vec(rb, TruncSeries(f, RingParams{rb, W}));
                        for (size_t cidx = 0; cidx < cols.size(); ++cidx)
                            if (!kv[cidx].is_zero()) vec[cols[cidx].first].set_coeff(cols[cidx].second, kv[cidx]);
                        kers.push_back(std::move(vec));
                    }
                    per_k.push_back(std::move(kers));
                }
                c.piker.push_back(std::move(per_k));
            }
            ctx.push_back(std::move(c));
        }
    }

    // Taylor coefficients of z^k around the pole position, m terms
    const std::vector<Scalar>& taylor_pow(PoleCtx& c, int k) {
        auto it = c.taylor_cache.find(k);
        if (it != c.taylor_cache.end()) return it->second;
        const Scalar& t0 = gc.poles[c.index].position;
        unsigned m = c.m;
        std::vector<Scalar> out(m, f->zero());
        if (k >= 0) {
            // (t + z)^k binomial up to z^{m-1}
            std::vector<Scalar> cur(m, f->zero());
            cur[0] = f->one();
            for (int it2 = 0; it2 < k; ++it2) {
                std::vector<Scalar> nx(m, f->zero());
                for (unsigned a = 0; a < m; ++a) {
                    if (cur[a].is_zero()) continue;
                    nx[a] += cur[a] * t0;
                    if (a + 1 < m) nx[a + 1] += cur[a];
                }
                cur = std::move(nx);
            }
            out = cur;
        } else {
            if (t0.is_zero()) fail(ErrCode::Internal, "negative power at the zero pole");
            // (t + z)^{-1} series, then powers
            // (t + z)^{-1} = sum (-1)^a t^{-(a+1)} z^a
            std::vector<Scalar> inv(m, f->zero());
            Scalar ti = t0.inverse();
            Scalar acc = ti;
            for (unsigned a = 0; a < m; ++a) {
                inv[a] = (a % 2 == 0) ? acc : -acc;
                acc = acc * ti;
            }
            std::vector<Scalar> cur(m, f->zero());
            cur[0] = f->one();
            for (int it2 = 0; it2 < -k; ++it2) {
                std::vector<Scalar> nx(m, f->zero());
                for (unsigned a = 0; a < m; ++a)
                    for (unsigned b = 0; a + b < m; ++b) nx[a + b] += cur[a] * inv[b];
                cur = std::move(nx);
            }
            out = cur;
        }
        return c.taylor_cache.emplace(k, std::move(out)).first->second;
    }

    // adapted localized linear forms: for a segment with windows wm (function
    // kind or form kind), produce Abar[x][y][t] as dense rows over [0, dim)
    // (the full group dimension), at pole ctx c
    std::vector<Vec> adapted_forms(PoleCtx& c, const WinMat& wm, size_t dim, bool form_kind) {
        unsigned m = c.m;
        // loc[a][b][t]: dense rows
        std::vector<Vec> loc((size_t)r * r * m, Vec(dim, f->zero()));
        for (unsigned a = 0; a < r; ++a)
            for (unsigned b = 0; b < r; ++b) {
                const auto& w = wm[a][b];
                for (int k = w.lo; k <= w.hi; ++k) {
                    size_t col = w.off + (size_t)(k - w.lo);
                    const auto& tp = taylor_pow(c, k);
                    for (unsigned t = 0; t < m; ++t) {
                        Scalar val = f->zero();
                        if (form_kind) {
                            for (unsigned s = 0; s <= t; ++s)
                                if (!tp[s].is_zero()) val += tp[s] * c.denrest_inv[t - s];
                        } else {
                            val = tp[t];
                        }
                        if (!val.is_zero()) loc[((size_t)a * r + b) * m + t][col] += val;
                    }
                }
            }
        // Abar[x][y][t] = sum_{a,b} sum_{t1+t2=t} pp[x,a,b,y][t1] loc[a][b][t2]
        std::vector<Vec> abar((size_t)r * r * m, Vec(dim, f->zero()));
        for (unsigned x = 0; x < r; ++x)
            for (unsigned y = 0; y < r; ++y)
                for (unsigned a = 0; a < r; ++a)
                    for (unsigned b = 0; b < r; ++b) {
                        const TruncSeries& s = c.pp[((x * r + a) * r + b) * r + y];
                        for (unsigned t1 = 0; t1 < m; ++t1) {
                            if (s.coeff(t1).is_zero()) continue;
                            for (unsigned t2 = 0; t1 + t2 < m; ++t2) {
                                const Vec& src = loc[((size_t)a * r + b) * m + t2];
                                Vec& dst = abar[((size_t)x * r + y) * m + t1 + t2];
                                for (size_t col = 0; col < dim; ++col)
                                    if (!src[col].is_zero()) dst[col] += s.coeff(t1) * src[col];
                            }
                        }
                    }
        return abar;
    }

    // pole conditions for one segment; appends rows over [0, dim)
    void segment_conditions(const WinMat& wm, size_t dim, bool form_kind, bool include_zero_pole,
                            std::vector<Vec>& rows) {
        for (auto& c : ctx) {
            bool at_zero = gc.poles[c.index].position.is_zero();
            if (at_zero && !include_zero_pole) continue;
            const auto& p = gc.poles[c.index];
            unsigned m = c.m;
            auto abar = adapted_forms(c, wm, dim, form_kind);
            auto entry = [&](unsigned x, unsigned y, unsigned t) -> const Vec& {
                return abar[((size_t)x * r + y) * m + t];
            };
            std::vector<unsigned> start(p.block_sizes.size() + 1, 0);
            for (size_t j = 0; j < p.block_sizes.size(); ++j)
                start[j + 1] = start[j] + p.block_sizes[j];
            // flag: block-strictly-upper vanishes mod z^m
            for (size_t bj = 0; bj + 1 < p.block_sizes.size(); ++bj)
                for (unsigned row = start[bj]; row < start[bj + 1]; ++row)
                    for (unsigned col = start[bj + 1]; col < r; ++col)
                        for (unsigned t = 0; t < m; ++t) rows.push_back(entry(row, col, t));
            // within blocks: V-pattern and the pi conditions
            for (size_t bj = 0; bj < p.block_sizes.size(); ++bj) {
                const LocalRamifiedData& blk = p.blocks[bj];
                unsigned rb = blk.r, W = blk.window(), base = start[bj];
                // above-diagonal entries divisible by z
                for (unsigned x = 0; x < rb; ++x)
                    for (unsigned y = x + 1; y < rb; ++y) rows.push_back(entry(base + x, base + y, 0));
                if (rb == 1 && !form_kind) continue; // ker pi_0 is 0 for rank-1 blocks
                for (unsigned k = 0; k < rb; ++k) {
                    // symbolic image series of u(g^k_l) under pi_k, as linear
                    // forms: coefficient of w^t, for each generator l
                    // decomposition of u(g^k_l) in the g^k_x basis:
                    //  l >= k: x >= k -> E_{xl}; x < k -> E_{xl}/z
                    //  l < k:  x < k -> E_{xl};  x >= k -> z E_{xl}
                    if (!form_kind) {
                        // condition: pi(u(kappa)) = 0 for kernel elements kappa
                        for (const SeriesVec& kap : c.piker[bj][k]) {
                            std::vector<Vec> img(W, Vec(dim, f->zero()));
                            for (unsigned l = 0; l < rb; ++l) {
                                if (kap[l].is_zero()) continue;
                                for (unsigned x = 0; x < rb; ++x) {
                                    // multiplier series pi[k][x] * kappa_l
                                    TruncSeries mult = blk.pi[k][x] * kap[l];
                                    for (unsigned zd = 0; zd < blk.m; ++zd) {
                                        // contribution of entry coefficient z^zd
                                        int wshift;
                                        if (l >= k) wshift = x >= k ? (int)(zd * rb) : (int)zd * (int)rb - (int)rb;
                                        else wshift = x < k ? (int)(zd * rb) : (int)((zd + 1) * rb);
                                        if (wshift < 0) continue; // z^0 of a /z-entry is pattern-zero
                                        TruncSeries sh = mult.shift_w((unsigned)wshift);
                                        const Vec& src = entry(base + x, base + l, zd);
                                        for (unsigned t = 0; t < W; ++t) {
                                            if (sh.coeff(t).is_zero()) continue;
                                            for (size_t colc = 0; colc < dim; ++colc)
                                                if (!src[colc].is_zero())
                                                    img[t][colc] += sh.coeff(t) * src[colc];
                                        }
                                    }
                                }
                            }
                            for (unsigned t = 0; t < W; ++t) rows.push_back(std::move(img[t]));
                        }
                    } else {
                        // condition: pi_k(v(g^k_l)) = 0 for every generator l
                        for (unsigned l = 0; l < rb; ++l) {
                            std::vector<Vec> img(W, Vec(dim, f->zero()));
                            for (unsigned x = 0; x < rb; ++x) {
                                for (unsigned zd = 0; zd < blk.m; ++zd) {
                                    int wshift;
                                    if (l >= k) wshift = x >= k ? (int)(zd * rb) : (int)zd * (int)rb - (int)rb;
                                    else wshift = x < k ? (int)(zd * rb) : (int)((zd + 1) * rb);
                                    if (wshift < 0) continue;
                                    TruncSeries sh = blk.pi[k][x].shift_w((unsigned)wshift);
                                    const Vec& src = entry(base + x, base + l, zd);
                                    for (unsigned t = 0; t < W; ++t) {
                                        if (sh.coeff(t).is_zero()) continue;
                                        for (size_t colc = 0; colc < dim; ++colc)
                                            if (!src[colc].is_zero()) img[t][colc] += sh.coeff(t) * src[colc];
                                    }
                                }
                            }
                            for (unsigned t = 0; t < W; ++t) rows.push_back(std::move(img[t]));
                        }
                    }
                }
            }
        }
        // trace-free variant: Tr vanishes identically over the window
        if (tracefree) {
            int lo = wm[0][0].lo, hi = wm[0][0].hi;
            for (unsigned a = 1; a < r; ++a) {
                lo = std::min(lo, wm[a][a].lo);
                hi = std::max(hi, wm[a][a].hi);
            }
            for (int k = lo; k <= hi; ++k) {
                Vec row(dim, f->zero());
                bool nz = false;
                for (unsigned a = 0; a < r; ++a) {
                    const auto& w = wm[a][a];
                    if (k < w.lo || k > w.hi) continue;
                    row[w.off + (size_t)(k - w.lo)] += f->one();
                    nz = true;
                }
                if (nz) rows.push_back(std::move(row));
            }
        }
    }

    // decode one segment entry of an ambient vector into a Laurent coefficient map
    std::map<int, Scalar> read_entry(const Vec& x, const WinMat& wm, unsigned a, unsigned b) const {
        std::map<int, Scalar> out;
        const auto& w = wm[a][b];
        for (int k = w.lo; k <= w.hi; ++k) {
            const Scalar& c = x[w.off + (size_t)(k - w.lo)];
            if (!c.is_zero()) out[k] = c;
        }
        return out;
    }

    // apply d0 to a C0 ambient vector
    Vec apply_d0(const Vec& x) const {
        Vec out(c1_dim, f->zero());
        // u01 = u1 - u0 restricted to U01
        for (unsigned a = 0; a < r; ++a)
            for (unsigned b = 0; b < r; ++b) {
                auto copy_into = [&](const WinMat& src, const Scalar& sign) {
                    const auto& ws = src[a][b];
                    const auto& wd = u01[a][b];
                    for (int k = ws.lo; k <= ws.hi; ++k) {
                        const Scalar& c = x[ws.off + (size_t)(k - ws.lo)];
                        if (c.is_zero()) continue;
                        if (k < wd.lo || k > wd.hi) fail(ErrCode::Internal, "u01 window too small");
                        out[wd.off + (size_t)(k - wd.lo)] += sign * c;
                    }
                };
                copy_into(u1, f->one());          // +u1
                copy_into(u0, f->from_int(-1));   // -u0
            }
        commutator_into(x, u0, v0, out);
        commutator_into(x, u1, v1, out);
        return out;
    }

    // numerator of [nabla, u] = den u' + sum (num u - u num), written into the
    // destination form windows of `out`
    void commutator_into(const Vec& x, const WinMat& usrc, const WinMat& vdst, Vec& out) const {
        for (unsigned a = 0; a < r; ++a)
            for (unsigned b = 0; b < r; ++b) {
                std::map<int, Scalar> acc;
                // den * d(u_ab)
                {
                    const auto& w = usrc[a][b];
                    for (int k = w.lo; k <= w.hi; ++k) {
                        const Scalar& c = x[w.off + (size_t)(k - w.lo)];
                        if (c.is_zero() || k == 0) continue;
                        for (int t = 0; t <= poly_degree(den); ++t)
                            if (!den[(size_t)t].is_zero())
                                map_add(acc, k - 1 + t, f->from_int(k) * c * den[(size_t)t]);
                    }
                }
                for (unsigned cmid = 0; cmid < r; ++cmid) {
                    // num_{a c} u_{c b}
                    const Poly& nac = gc.omega_num[a][cmid];
                    const auto& w1 = usrc[cmid][b];
                    for (int t = 0; t <= poly_degree(nac); ++t) {
                        if (nac[(size_t)t].is_zero()) continue;
                        for (int k = w1.lo; k <= w1.hi; ++k) {
                            const Scalar& c = x[w1.off + (size_t)(k - w1.lo)];
                            if (!c.is_zero()) map_add(acc, k + t, nac[(size_t)t] * c);
                        }
                    }
                    // - u_{a c} num_{c b}
                    const Poly& ncb = gc.omega_num[cmid][b];
                    const auto& w2 = usrc[a][cmid];
                    for (int t = 0; t <= poly_degree(ncb); ++t) {
                        if (ncb[(size_t)t].is_zero()) continue;
                        for (int k = w2.lo; k <= w2.hi; ++k) {
                            const Scalar& c = x[w2.off + (size_t)(k - w2.lo)];
                            if (!c.is_zero()) map_sub(acc, k + t, ncb[(size_t)t] * c);
                        }
                    }
                }
                const auto& wd = vdst[a][b];
                for (auto& [k, c] : acc) {
                    if (c.is_zero()) continue;
                    if (k < wd.lo || k > wd.hi)
                        fail(ErrCode::Internal, "commutator escapes the form window (bound too small?)");
                    out[wd.off + (size_t)(k - wd.lo)] += c;
                }
            }
    }

    // d1(u01, v0, v1) = [nabla, u01] - (v1 - v0), in the w01 layout
    Vec apply_d1(const Vec& x) const {
        Vec out(c2_dim, f->zero());
        // commutator of the u01 part
        Vec tmp(c2_dim, f->zero());
        // reuse commutator_into with a shim: build a fake C1-sized vector? The
        // u01 windows live inside x already; write a local version
        for (unsigned a = 0; a < r; ++a)
            for (unsigned b = 0; b < r; ++b) {
                std::map<int, Scalar> acc;
                {
                    const auto& w = u01[a][b];
                    for (int k = w.lo; k <= w.hi; ++k) {
                        const Scalar& c = x[w.off + (size_t)(k - w.lo)];
                        if (c.is_zero() || k == 0) continue;
                        for (int t = 0; t <= poly_degree(den); ++t)
                            if (!den[(size_t)t].is_zero())
                                map_add(acc, k - 1 + t, f->from_int(k) * c * den[(size_t)t]);
                    }
                }
                for (unsigned cmid = 0; cmid < r; ++cmid) {
                    const Poly& nac = gc.omega_num[a][cmid];
                    const auto& w1 = u01[cmid][b];
                    for (int t = 0; t <= poly_degree(nac); ++t) {
                        if (nac[(size_t)t].is_zero()) continue;
                        for (int k = w1.lo; k <= w1.hi; ++k) {
                            const Scalar& c = x[w1.off + (size_t)(k - w1.lo)];
                            if (!c.is_zero()) map_add(acc, k + t, nac[(size_t)t] * c);
                        }
                    }
                    const Poly& ncb = gc.omega_num[cmid][b];
                    const auto& w2 = u01[a][cmid];
                    for (int t = 0; t <= poly_degree(ncb); ++t) {
                        if (ncb[(size_t)t].is_zero()) continue;
                        for (int k = w2.lo; k <= w2.hi; ++k) {
                            const Scalar& c = x[w2.off + (size_t)(k - w2.lo)];
                            if (!c.is_zero()) map_sub(acc, k + t, ncb[(size_t)t] * c);
                        }
                    }
                }
                // - v1 + v0
                const auto& wv1 = v1[a][b];
                for (int k = wv1.lo; k <= wv1.hi; ++k) {
                    const Scalar& c = x[wv1.off + (size_t)(k - wv1.lo)];
                    if (!c.is_zero()) map_sub(acc, k, c);
                }
                const auto& wv0 = v0[a][b];
                for (int k = wv0.lo; k <= wv0.hi; ++k) {
                    const Scalar& c = x[wv0.off + (size_t)(k - wv0.lo)];
                    if (!c.is_zero()) map_add(acc, k, c);
                }
                const auto& wd = w01[a][b];
                for (auto& [k, c] : acc) {
                    if (c.is_zero()) continue;
                    if (k < wd.lo || k > wd.hi) fail(ErrCode::Internal, "d1 escapes the C2 window");
                    out[wd.off + (size_t)(k - wd.lo)] += c;
                }
            }
        return out;
    }
};

CechComplex::CechComplex(const GlobalConnection& gc, unsigned bound, bool tracefree)
    : gc_(gc), B_(bound), tracefree_(tracefree) {
    CechBuild bld(gc_, B_, tracefree_);
    const FieldPtr& f = gc_.field;
    c1_dim_ = bld.c1_dim;
    u01_ = bld.u01;
    v0_ = bld.v0;
    v1_ = bld.v1;

    // constrained bases per segment, computed in segment-local coordinates
    auto constrained_basis = [&](const CechBuild::WinMat& wm, size_t dim, bool form_kind,
                                 bool include_zero_pole) {
        CechBuild::WinMat local = wm;
        size_t seg_dim = 0;
        size_t base = wm[0][0].off;
        for (auto& row : local)
            for (auto& w : row) {
                base = std::min(base, w.off);
            }
        for (auto& row : local)
            for (auto& w : row) {
                w.off -= base;
                seg_dim = std::max(seg_dim, w.off + w.size());
            }
        std::vector<Vec> rows;
        bld.segment_conditions(local, seg_dim, form_kind, include_zero_pole, rows);
        std::vector<Vec> local_basis;
        if (rows.empty()) {
            for (size_t t = 0; t < seg_dim; ++t) {
                Vec v(seg_dim, f->zero());
                v[t] = f->one();
                local_basis.push_back(std::move(v));
            }
        } else {
            Mat cmat(rows.begin(), rows.end());
            local_basis = kernel_basis(std::move(cmat));
        }
        std::vector<Vec> basis;
        for (const Vec& lv : local_basis) {
            Vec v(dim, f->zero());
            for (size_t t = 0; t < seg_dim; ++t) v[base + t] = lv[t];
            basis.push_back(std::move(v));
        }
        return basis;
    };

    // zero-pole conditions apply on U0 only; U1 and U01 exclude z = 0.
    // poles away from zero constrain every chart that contains them.
    std::vector<Vec> x_u0 = constrained_basis(bld.u0, bld.c0_dim, false, true);
    std::vector<Vec> x_u1 = constrained_basis(bld.u1, bld.c0_dim, false, false);
    std::vector<Vec> x_u01 = constrained_basis(bld.u01, bld.c1_dim, false, false);
    std::vector<Vec> x_v0 = constrained_basis(bld.v0, bld.c1_dim, true, true);
    std::vector<Vec> x_v1 = constrained_basis(bld.v1, bld.c1_dim, true, false);

    // kernel basis vectors returned above live in their own segment但 share the
    // group coordinates; a window basis for one segmentレaves the rest zero.

    // d0 image
    std::vector<Vec> image;
    for (const auto& xs : {x_u0, x_u1})
        for (const Vec& x : xs) image.push_back(bld.apply_d0(x));

    // cocycles: combine segment bases, then kernel of d1 restricted
    std::vector<Vec> c1_basis;
    for (auto& xs : {x_u01, x_v0, x_v1})
        for (const Vec& x : xs) c1_basis.push_back(x);
    Mat d1_of_basis;
    for (const Vec& x : c1_basis) d1_of_basis.push_back(bld.apply_d1(x));
    // kernel over the coefficients: rows are basis images; we need
    // combinations summing to zero -> kernel of the transpose layout
    Mat d1_cols = mat_transpose(d1_of_basis);
    auto combo = kernel_basis(std::move(d1_cols));
    std::vector<Vec> cocycles;
    for (const Vec& cmb : combo) {
        Vec v(bld.c1_dim, f->zero());
        for (size_t i = 0; i < c1_basis.size(); ++i)
            if (!cmb[i].is_zero())
                for (size_t t = 0; t < bld.c1_dim; ++t)
                    if (!c1_basis[i][t].is_zero()) v[t] += cmb[i] * c1_basis[i][t];
        cocycles.push_back(std::move(v));
    }

    // H1 representatives: cocycles modulo the image
    RowReducer red;
    for (const Vec& x : image) red.add(x);
    b1_ = image; // keep the raw spanning set
    for (const Vec& x : cocycles)
        if (red.add(x)) h1_.push_back(x);
}

bool CechComplex::is_cocycle(const Vec& x) const {
    CechBuild bld(gc_, B_, tracefree_);
    Vec img = bld.apply_d1(x);
    for (const auto& c : img)
        if (!c.is_zero()) return false;
    return true;
}

Scalar CechComplex::pair(const Vec& x, const Vec& y) const {
    const FieldPtr& f = gc_.field;
    unsigned r = gc_.rank();
    Poly den = gc_.denominator();
    // xi = tr(u01_x v1_y) - tr(v0_x u01_y), a 1-form on U01; poles at the
    // finite divisor must cancel, leaving a Laurent polynomial in z
    std::map<int, Scalar> xi_num; // numerator over den
    auto entry = [&](const Vec& v, const std::vector<std::vector<Win>>& seg, unsigned a,
                     unsigned b) {
        std::map<int, Scalar> out;
        const Win& w = seg[a][b];
        for (int k = w.lo; k <= w.hi; ++k) {
            const Scalar& c = v[w.off + (size_t)(k - w.lo)];
            if (!c.is_zero()) out[k] = c;
        }
        return out;
    };
    for (unsigned a = 0; a < r; ++a)
        for (unsigned b = 0; b < r; ++b) {
            auto u_ab = entry(x, u01_, a, b);
            auto vy = entry(y, v1_, b, a);
            for (auto& [k1, c1] : u_ab)
                for (auto& [k2, c2] : vy) map_add(xi_num, k1 + k2, c1 * c2);
            auto v_ab = entry(x, v0_, a, b);
            auto uy = entry(y, u01_, b, a);
            for (auto& [k1, c1] : v_ab)
                for (auto& [k2, c2] : uy) map_sub(xi_num, k1 + k2, c1 * c2);
        }
    // exact Laurent division by den
    int lo = 0, hi = -1;
    for (auto& [k, c] : xi_num) {
        if (c.is_zero()) continue;
        lo = std::min(lo, k);
        hi = std::max(hi, k);
    }
    if (hi < lo) return f->zero();
    int dd = poly_degree(den);
    // long division from the top
    std::map<int, Scalar> q;
    for (int k = hi; k >= lo;) {
        Scalar c = xi_num.count(k) ? xi_num[k] : f->zero();
        if (c.is_zero()) {
            --k;
            continue;
        }
        int e = k - dd;
        Scalar lead = den[(size_t)dd];
        Scalar qc = c * lead.inverse();
        map_add(q, e, qc);
        for (int t = 0; t <= dd; ++t)
            if (!den[(size_t)t].is_zero()) map_sub(xi_num, e + t, qc * den[(size_t)t]);
    }
    for (auto& [k, c] : xi_num)
        if (!c.is_zero()) fail(ErrCode::Internal, "pairing form has uncancelled poles on U01");
    auto it = q.find(-1);
    return it == q.end() ? f->zero() : it->second;
}

TangentSpaceResult tangent_space(const GlobalConnection& gc, unsigned bound, bool tracefree) {
    unsigned B = bound ? bound : default_degree_bound(gc);
    auto c0 = std::make_shared<CechComplex>(gc, B, tracefree);
    CechComplex c1(gc, B + 1, tracefree);
    CechComplex c2(gc, B + 2, tracefree);
    if (c0->h1_dim() != c1.h1_dim() || c1.h1_dim() != c2.h1_dim())
        fail(ErrCode::BoundTooSmall, "H^1 dimension did not stabilize across B, B+1, B+2");
    TangentSpaceResult out;
    out.dim = c0->h1_dim();
    out.bound = B;
    out.complex = c0;
    return out;
}

} // namespace ramconn
