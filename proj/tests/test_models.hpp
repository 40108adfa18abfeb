#pragma once

// shared instance builders for the global/cohomology tests and the
// acceptance suite

#include "ramconn/global.hpp"

#include <random>

namespace ramconn::testmodels {

// rank 2 on O + O over P^1 with the single pole m*{0}; the numerator
//   N = [[0, 1], [z u(z), z tau(z)]], u(0) != 0,
// keeps the infinity chart regular (entry degrees <= m - 2) and produces a
// generic ramified local type (disc = z(4u + z tau^2), order exactly 1).
inline GlobalConnection rank2_single_pole_model(const FieldPtr& f, unsigned m, const Poly& u,
                                                const Poly& tau) {
    GlobalConnection gc;
    gc.field = f;
    gc.splitting = {0, 0};
    gc.omega_num.assign(2, std::vector<Poly>(2));
    gc.omega_num[0][1] = {f->one()};
    gc.omega_num[1][0] = poly_mul({f->zero(), f->one()}, u);
    gc.omega_num[1][1] = poly_mul({f->zero(), f->one()}, tau);
    // local formal connection at 0
    FormalConnection local = FormalConnection::zero(f, 2, m, m);
    for (unsigned a = 0; a < 2; ++a)
        for (unsigned b = 0; b < 2; ++b)
            for (unsigned t = 0; t < m && t < gc.omega_num[a][b].size(); ++t)
                local.A[a][b].set_coeff(t, gc.omega_num[a][b][t]);
    gc.poles.push_back(ramified_pole_structure(f->zero(), false, local));
    gc.weight.alpha.push_back({Rat(1, 2)});
    return gc;
}

// direct sum of two rank-1 regular singular connections on O(d1) + O(d2),
// with residues rho[a][i] at pole positions t_i (m_i = 1) and per-pole flag
// frames P_i
inline GlobalConnection rank2_split_model(const FieldPtr& f, int d1, int d2,
                                          const std::vector<Scalar>& positions,
                                          const std::vector<std::vector<Scalar>>& rho,
                                          const std::vector<Mat>& frames,
                                          const std::vector<std::vector<Rat>>& weights) {
    GlobalConnection gc;
    gc.field = f;
    gc.splitting = {d1, d2};
    size_t n = positions.size();
    gc.omega_num.assign(2, std::vector<Poly>(2));
    // omega_aa = sum_i rho[a][i] dz/(z - t_i): numerator over prod (z - t_i)
    for (unsigned a = 0; a < 2; ++a) {
        Poly num;
        for (size_t i = 0; i < n; ++i) {
            Poly rest{f->one()};
            for (size_t q = 0; q < n; ++q) {
                if (q == i) continue;
                rest = poly_mul(rest, Poly{-positions[q], f->one()});
            }
            num = poly_add(num, poly_scale(rest, rho[a][i]));
        }
        gc.omega_num[a][a] = num;
    }
    for (size_t i = 0; i < n; ++i) {
        PoleLocalStructure p;
        p.position = positions[i];
        p.m = 1;
        p.block_sizes = {1, 1};
        p.adapted_frame.assign(2, SeriesVec(2, TruncSeries(f, RingParams{1, 1})));
        for (unsigned x = 0; x < 2; ++x)
            for (unsigned y = 0; y < 2; ++y) p.adapted_frame[x][y].set_coeff(0, frames[i][x][y]);
        // blocks carry the residues of the columns of the frame
        for (unsigned j = 0; j < 2; ++j) {
            // the adapted local matrix is P^{-1} diag(rho0, rho1) P; with the
            // permutation/identity frames used here its (j,j) entry is the
            // residue of the line the j-th column selects
            unsigned which = frames[i][0][j].is_zero() ? 1 : 0;
            p.blocks.push_back(model_local_data(Exponent(1, 1, {rho[which][i]})));
        }
        gc.poles.push_back(std::move(p));
        gc.weight.alpha.push_back(weights[i]);
    }
    return gc;
}

inline Scalar rnd_scalar(const FieldPtr& f, std::mt19937_64& rng, int nb = 5, int db = 3) {
    std::uniform_int_distribution<int> num(-nb, nb);
    std::uniform_int_distribution<int> den(1, db);
    std::vector<Rat> c(f->dim());
    for (auto& q : c) q = Rat(num(rng), den(rng));
    return Scalar(f, c);
}

} // namespace ramconn::testmodels
