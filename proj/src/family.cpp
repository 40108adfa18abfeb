#include "ramconn/family.hpp"

#include <sstream>

namespace ramconn {

void FamilyBlock::validate() const {
    if (r < 1 || m < 1) fail(ErrCode::SchemaError, "family block needs r >= 1, m >= 1");
    if (c.size() != m * r - r + 1) fail(ErrCode::SchemaError, "family block needs m r - r + 1 coefficients");
    if (kappa.size() != m) fail(ErrCode::SchemaError, "family block needs m collision parameters");
    if (kappa[0] != 0) fail(ErrCode::SchemaError, "kappa_0 must vanish");
    for (size_t i = 0; i < kappa.size(); ++i)
        for (size_t j = i + 1; j < kappa.size(); ++j)
            if (kappa[i] == kappa[j])
                fail(ErrCode::DegenerateParameters, "collision parameters kappa must be pairwise distinct");
    if (!field()->has_root_of_unity(r)) fail(ErrCode::MissingRoot, "base tower lacks zeta_r");
}

// ---------------------------------------------------------------------------
// multivariate polynomials with W^r = t^r + z

MPoly MPoly::monomial(FieldPtr f, unsigned r, Key k, const Scalar& c) {
    MPoly p(std::move(f), r);
    p.add_term(k, c);
    return p;
}

void MPoly::add_term(Key k, const Scalar& c) {
    if (c.is_zero()) return;
    if (k[3] >= r_) {
        // W^r = t^r + z
        Key a = k, b = k;
        a[3] -= r_;
        a[0] += r_;
        b[3] -= r_;
        b[2] += 1;
        add_term(a, c);
        add_term(b, c);
        return;
    }
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(k, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

MPoly& MPoly::operator+=(const MPoly& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
}

MPoly& MPoly::operator-=(const MPoly& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
}

MPoly operator*(const MPoly& a, const MPoly& b) {
    MPoly out(a.f_ ? a.f_ : b.f_, a.f_ ? a.r_ : b.r_);
    for (const auto& [ka, ca] : a.terms_)
        for (const auto& [kb, cb] : b.terms_) {
            MPoly::Key k{ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2], ka[3] + kb[3]};
            out.add_term(k, ca * cb);
        }
    return out;
}

bool operator==(const MPoly& a, const MPoly& b) { return a.terms_ == b.terms_; }

MPoly MPoly::substitute_th(const Scalar& t, const Scalar& h) const {
    MPoly out(f_, r_);
    for (const auto& [k, c] : terms_) {
        Scalar v = c;
        if (k[0]) v *= t.pow(k[0]);
        if (k[1]) v *= h.pow(k[1]);
        if (v.is_zero()) continue;
        out.add_term(Key{0, 0, k[2], k[3]}, v);
    }
    return out;
}

// ---------------------------------------------------------------------------

FamilyExponent build_family_exponent(const FamilyBlock& fb, unsigned k) {
    fb.validate();
    if (k >= fb.r) fail(ErrCode::SchemaError, "chain index k must lie below r");
    const FieldPtr& f = fb.field();
    FamilyExponent out;
    out.k = k;
    out.r = fb.r;
    out.m = fb.m;
    MPoly num(f, fb.r);
    for (unsigned l = 0; l < fb.c.size(); ++l) num.add_term(MPoly::Key{0, 0, 0, l}, fb.c[l]);
    if (k > 0) {
        // + (k/r) * prod_{q >= 1} (z - h kappa_q) over the common denominator
        MPoly tail = MPoly::monomial(f, fb.r, MPoly::Key{0, 0, 0, 0}, f->from_rat(Rat((long)k, (long)fb.r)));
        for (unsigned q = 1; q < fb.m; ++q) {
            MPoly lin(f, fb.r);
            lin.add_term(MPoly::Key{0, 0, 1, 0}, f->one());
            lin.add_term(MPoly::Key{0, 1, 0, 0}, f->from_rat(-fb.kappa[q]));
            tail = tail * lin;
        }
        num += tail;
    }
    out.numerator = std::move(num);
    return out;
}

MPoly family_det_exponent(const FamilyBlock& fb) {
    fb.validate();
    const FieldPtr& f = fb.field();
    MPoly num(f, fb.r);
    // r copies of the z-part sum_l c_{r l} (z + t^r)^l
    for (unsigned lp = 0; lp * fb.r < fb.c.size(); ++lp) {
        // (z + t^r)^lp expanded
        MPoly pw = MPoly::monomial(f, fb.r, MPoly::Key{0, 0, 0, 0}, f->one());
        for (unsigned it = 0; it < lp; ++it) {
            MPoly lin(f, fb.r);
            lin.add_term(MPoly::Key{0, 0, 1, 0}, f->one());
            lin.add_term(MPoly::Key{(unsigned)fb.r, 0, 0, 0}, f->one());
            pw = pw * lin;
        }
        MPoly term = pw;
        Scalar coeff = fb.c[lp * fb.r] * f->from_int((long)fb.r);
        MPoly scaled(f, fb.r);
        for (const auto& [kk, cc] : term.terms()) scaled.add_term(kk, cc * coeff);
        num += scaled;
    }
    // + sum_k k/r * prod_{q>=1} z_q = ((r-1)/2) prod_{q>=1}(z - h kappa_q)
    MPoly tail = MPoly::monomial(f, fb.r, MPoly::Key{0, 0, 0, 0},
                                 f->from_rat(Rat((long)fb.r * ((long)fb.r - 1), 2 * (long)fb.r)));
    for (unsigned q = 1; q < fb.m; ++q) {
        MPoly lin(f, fb.r);
        lin.add_term(MPoly::Key{0, 0, 1, 0}, f->one());
        lin.add_term(MPoly::Key{0, 1, 0, 0}, f->from_rat(-fb.kappa[q]));
        tail = tail * lin;
    }
    num += tail;
    return num;
}

// ---------------------------------------------------------------------------

namespace {

// the tower over fb's base containing every b_q with b_q^r = t^r + h kappa_q;
// returns the field together with one chosen root per q
std::pair<FieldPtr, std::vector<Scalar>> root_tower(const FamilyBlock& fb, const Rat& t, const Rat& h) {
    FieldPtr f = fb.field();
    std::vector<Scalar> roots(fb.m, f->zero());
    for (unsigned q = 0; q < fb.m; ++q) {
        Rat radq = Rat(1);
        // t^r + h kappa_q as a rational
        Rat tr(1);
        for (unsigned i = 0; i < fb.r; ++i) tr *= t;
        radq = tr + h * fb.kappa[q];
        Scalar rad = f->from_rat(radq);
        auto rts = f->kth_roots(rad, fb.r);
        if (!rts.empty()) {
            // prefer the canonical root t when q = 0
            Scalar pick = rts.back();
            if (q == 0) {
                for (const auto& x : rts)
                    if (x == f->from_rat(t)) pick = x;
            }
            roots[q] = pick;
            continue;
        }
        // adjoin the radical
        FieldPtr ext = f->extend(fb.r, rad);
        for (auto& x : roots) x = lift(ext, x);
        roots[q] = ext->radical_generator(ext->radical_count() - 1);
        f = ext;
    }
    return {f, roots};
}

// residue of the W-multiplier part at the point z = h kappa_q:
// sum_l c_l W^l / prod_{q' != q} (h kappa_q - h kappa_{q'})
Scalar residue_prefactor(const FamilyBlock& fb, const FieldPtr& f, const Rat& h, unsigned q) {
    Rat denom(1);
    for (unsigned qp = 0; qp < fb.m; ++qp) {
        if (qp == q) continue;
        denom *= h * (fb.kappa[q] - fb.kappa[qp]);
    }
    return f->from_rat(Rat(1) / denom);
}

} // namespace

DaggerResult check_dagger(const FamilyBlock& fb, const Rat& t, const Rat& h) {
    fb.validate();
    auto [f, roots] = root_tower(fb, t, h);
    Scalar zr = f->root_of_unity(fb.r);
    DaggerResult out;
    out.field = f;
    out.roots = roots;
    out.ok = true;
    for (unsigned q = 0; q < fb.m; ++q) {
        for (unsigned k = 0; k < fb.r; ++k)
            for (unsigned kp = k + 1; kp < fb.r; ++kp) {
                Scalar sum = f->zero();
                Scalar bp = f->one(); // b_q^{l-1}
                for (unsigned l = 1; l < fb.c.size(); ++l) {
                    Scalar zl = zr.pow((long)l * k) - zr.pow((long)l * kp);
                    sum += lift(f, fb.c[l]) * zl * bp;
                    bp *= roots[q];
                }
                if (sum.is_zero()) {
                    out.ok = false;
                    out.violations.push_back(DaggerViolation{q, k, kp});
                }
            }
    }
    return out;
}

FiberClassification specialize(const FamilyBlock& fb, const Rat& t, const Rat& h) {
    fb.validate();
    FiberClassification out;
    if (t == 0 && h == 0) {
        out.kind = FiberKind::Ramified;
        out.field = fb.field();
        out.ramified_coefficients = fb.c;
        return out;
    }
    if (h == 0) {
        // unramified fiber: r distinct leading coefficients sum_l c_l zeta^{lk} t^l
        const FieldPtr& f = fb.field();
        Scalar zr = f->root_of_unity(fb.r);
        out.kind = FiberKind::Unramified;
        out.field = f;
        Scalar ts = f->from_rat(t);
        for (unsigned k = 0; k < fb.r; ++k) {
            Scalar lead = f->zero();
            Scalar tp = f->one();
            for (unsigned l = 0; l < fb.c.size(); ++l) {
                lead += fb.c[l] * zr.pow((long)l * k) * tp;
                tp *= ts;
            }
            out.unramified_leading.push_back(lead);
        }
        out.leading_distinct = true;
        for (size_t i = 0; i < out.unramified_leading.size(); ++i)
            for (size_t j = i + 1; j < out.unramified_leading.size(); ++j)
                if (out.unramified_leading[i] == out.unramified_leading[j]) out.leading_distinct = false;
        return out;
    }
    // regular singular fiber
    auto [f, roots] = root_tower(fb, t, h);
    Scalar zr = f->root_of_unity(fb.r);
    out.kind = FiberKind::RegularSingular;
    out.field = f;
    for (unsigned q = 0; q < fb.m; ++q) {
        ResiduePoint rp;
        rp.kappa = fb.kappa[q];
        Scalar pref = residue_prefactor(fb, f, h, q);
        // q = 0 carries the parabolic chain: the k dz_0/(r z_0) shifts split the
        // residue into r distinct eigenvalues even when b_0 = t = 0
        if (q == 0 || !roots[q].is_zero()) {
            // semisimple: eigenvalues from W = zeta^k b_q
            for (unsigned k = 0; k < fb.r; ++k) {
                Scalar ev = f->zero();
                Scalar wp = f->one();
                Scalar wval = zr.pow((long)k) * roots[q];
                for (unsigned l = 0; l < fb.c.size(); ++l) {
                    ev += lift(f, fb.c[l]) * wp;
                    wp *= wval;
                }
                ev *= pref;
                if (q == 0) ev += f->from_rat(Rat((long)k, (long)fb.r)); // the k dz_0/(r z_0) residues
                rp.eigenvalues.push_back(ev);
            }
            rp.eigenvalues_distinct = true;
            for (size_t i = 0; i < rp.eigenvalues.size(); ++i)
                for (size_t j = i + 1; j < rp.eigenvalues.size(); ++j)
                    if (rp.eigenvalues[i] == rp.eigenvalues[j]) rp.eigenvalues_distinct = false;
        } else {
            // nilpotent branch: W acts nilpotently on K[W]/(W^r)
            rp.nilpotent = true;
            rp.beta = lift(f, fb.c[0]) * pref;
            // residue matrix in the basis 1, W, ..., W^{r-1}
            Mat R = mat_zero(f, fb.r, fb.r);
            for (unsigned l = 0; l < fb.c.size(); ++l) {
                if (l >= fb.r) break; // W^l = 0 beyond the nilpotency order
                for (unsigned col = 0; col + l < fb.r; ++col)
                    R[col + l][col] += lift(f, fb.c[l]) * pref;
            }
            // minimal polynomial: first dependency among I, R, R^2, ...
            std::vector<Mat> pows{mat_identity(f, fb.r)};
            std::vector<Scalar> mp;
            for (unsigned d = 1; d <= fb.r; ++d) {
                pows.push_back(mat_mul(pows.back(), R));
                Mat sys = mat_zero(f, fb.r * fb.r, d);
                Vec rhs(fb.r * fb.r, f->zero());
                for (unsigned i = 0; i < fb.r; ++i)
                    for (unsigned j = 0; j < fb.r; ++j) {
                        for (unsigned e = 0; e < d; ++e) sys[i * fb.r + j][e] = pows[e][i][j];
                        rhs[i * fb.r + j] = -pows[d][i][j];
                    }
                auto sol = solve(sys, rhs);
                if (sol) {
                    mp = *sol;
                    mp.push_back(f->one());
                    break;
                }
            }
            rp.minimal_polynomial = mp;
            // compare against (T - beta)^r
            std::vector<Scalar> target{f->one()};
            for (unsigned i = 0; i < fb.r; ++i) {
                std::vector<Scalar> nx(target.size() + 1, f->zero());
                for (size_t a = 0; a < target.size(); ++a) {
                    nx[a + 1] += target[a];
                    nx[a] -= target[a] * rp.beta;
                }
                target = std::move(nx);
            }
            rp.minpoly_is_full_power = (mp == target);
        }
        out.residues.push_back(std::move(rp));
    }
    return out;
}

} // namespace ramconn
