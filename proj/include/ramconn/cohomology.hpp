#pragma once

#include "ramconn/global.hpp"

#include <memory>

namespace ramconn {

// Cech hypercohomology of the two-term complex F^0 -> F^1 on P^1 for the
// two-chart cover U0 = P^1 - {inf}, U1 = P^1 - {0}. Sections are windowed by
// the degree bound B; H^1 comes out of exact kernel/image computations.
//
// A 1-hypercochain is stored as one coordinate vector over the layout
//   (u01, v0, v1)
// with u01 a Laurent-window endomorphism matrix on U01 and v0, v1 numerator
// matrices over the common pole denominator.
class CechComplex {
  public:
    CechComplex(const GlobalConnection& gc, unsigned bound, bool tracefree);

    unsigned bound() const { return B_; }
    unsigned h1_dim() const { return (unsigned)h1_.size(); }
    const std::vector<Vec>& h1_basis() const { return h1_; }
    const std::vector<Vec>& coboundary_basis() const { return b1_; }

    bool is_cocycle(const Vec& x) const;

    // the symplectic pairing: the H^1(P^1, Omega^1) class of
    // tr(u01 o v1') - tr(v0 o u01'), read off as the dz/z coefficient
    Scalar pair(const Vec& x, const Vec& y) const;

    size_t c1_ambient_dim() const { return c1_dim_; }

  private:
    friend struct CechBuild;
    GlobalConnection gc_;
    unsigned B_ = 0;
    bool tracefree_ = false;
    size_t c1_dim_ = 0;

    // per-entry exponent windows: seg, a, b -> [lo, hi] and offset
    struct Win {
        int lo = 0, hi = -1;
        size_t off = 0;
        size_t size() const { return hi >= lo ? (size_t)(hi - lo + 1) : 0; }
    };
    std::vector<std::vector<Win>> u01_, v0_, v1_; // layout inside C1
    std::vector<Vec> h1_; // representatives in C1 coordinates
    std::vector<Vec> b1_; // basis of the coboundary space
};

struct TangentSpaceResult {
    unsigned dim = 0;
    unsigned bound = 0; // the certified degree window
    std::shared_ptr<CechComplex> complex;
};

// dimension of H^1(F*) with a stabilization certificate: the dimension must
// agree at bounds B, B+1 and B+2, otherwise BoundTooSmall is raised
TangentSpaceResult tangent_space(const GlobalConnection& gc, unsigned bound = 0, bool tracefree = false);

// default window: sum m_i r + spread of the splitting + 4
unsigned default_degree_bound(const GlobalConnection& gc);

} // namespace ramconn
