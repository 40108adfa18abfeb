// acceptance suite: one pass/fail line per criterion, nonzero exit on failure

#include "ramconn/cohomology.hpp"
#include "ramconn/family.hpp"
#include "test_models.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace ramconn;
using namespace ramconn::testmodels;

namespace {

int failures = 0;

void criterion(int n, const std::string& what, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    auto t0 = std::chrono::steady_clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
                  .count();
    std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << " — " << what << " [" << ms
              << " ms]";
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
}

Scalar rnd(const FieldPtr& f, std::mt19937_64& rng, int nb = 6, int db = 4) {
    std::uniform_int_distribution<int> num(-nb, nb);
    std::uniform_int_distribution<int> den(1, db);
    std::vector<Rat> c(f->dim());
    for (auto& q : c) q = Rat(num(rng), den(rng));
    return Scalar(f, c);
}

Exponent random_generic_exponent(const FieldPtr& f, unsigned r, unsigned m, std::mt19937_64& rng) {
    std::vector<Scalar> c;
    for (unsigned l = 0; l < m * r - r + 1; ++l) c.push_back(rnd(f, rng));
    if (r >= 2 && c[1].is_zero()) c[1] = f->one();
    return Exponent(r, m, std::move(c));
}

SeriesMat random_data_gauge(const FieldPtr& f, unsigned r, unsigned m, std::mt19937_64& rng) {
    SeriesMat g(r, SeriesVec(r, TruncSeries(f, RingParams{1, m})));
    for (unsigned i = 0; i < r; ++i)
        for (unsigned j = 0; j < r; ++j)
            for (unsigned t = 0; t < m; ++t) {
                if (i < j && t == 0) continue;
                g[i][j].set_coeff(t, rnd(f, rng, 3, 2));
            }
    // lower-triangular constant part: nonzero diagonal keeps it invertible
    for (unsigned i = 0; i < r; ++i) g[i][i].set_coeff(0, rnd(f, rng, 2, 2) + f->from_int(3));
    return g;
}

std::vector<TruncSeries> random_units(const FieldPtr& f, unsigned r, unsigned W, std::mt19937_64& rng) {
    std::vector<TruncSeries> us;
    for (unsigned k = 0; k < r; ++k) {
        TruncSeries u(f, RingParams{r, W});
        for (unsigned t = 0; t < W; ++t) u.set_coeff(t, rnd(f, rng, 2, 2));
        u.set_coeff(0, rnd(f, rng, 2, 2) + f->from_int(3)); // keep the constant term away from zero
        us.push_back(u);
    }
    return us;
}

} // namespace

int main() {
    // 1. ker Pi has length r(r-1)/2 for 2 <= r <= 5, 2 <= m <= 4
    criterion(1, "kernel_Pi length equals r(r-1)/2 for r in 2..5, m in 2..4", [](std::string& detail) {
        std::mt19937_64 rng(10101);
        for (unsigned r = 2; r <= 5; ++r) {
            auto f = Field::cyclotomic(r <= 2 ? 1 : r);
            for (unsigned m = 2; m <= 4; ++m) {
                Exponent nu = random_generic_exponent(f, r, m, rng);
                LocalRamifiedData d = model_local_data(nu);
                KernelPi k = kernel_Pi(d);
                if (k.length != r * (r - 1) / 2) {
                    detail = "r=" + std::to_string(r) + " m=" + std::to_string(m) + " gave " +
                             std::to_string(k.length);
                    return false;
                }
            }
        }
        return true;
    });

    // 2. seeded round-trip exponent recovery, 100 per (r, m) in {2,3} x {2,3,4}
    criterion(2, "recover_exponent o pushforward_ramified is the identity on 600 seeded exponents",
              [](std::string& detail) {
                  std::mt19937_64 rng(20202);
                  for (unsigned r : {2u, 3u}) {
                      auto f = Field::cyclotomic(r == 2 ? 1 : 3);
                      for (unsigned m : {2u, 3u, 4u}) {
                          for (int it = 0; it < 100; ++it) {
                              Exponent nu = random_generic_exponent(f, r, m, rng);
                              Exponent rec = recover_exponent(pushforward_ramified(nu));
                              if (!same_orbit_mod_int_shift(rec, nu) || !same_orbit_exact(rec, nu)) {
                                  detail = "mismatch at r=" + std::to_string(r) + " m=" +
                                           std::to_string(m) + " iteration " + std::to_string(it);
                                  return false;
                              }
                          }
                      }
                  }
                  return true;
              });

    // 3. reconstruction on 50 gauge-randomized instances per (r, m)
    criterion(3, "reconstruct_check passes on 50 seeded gauge-randomized instances for (2,2),(2,3),(3,2)",
              [](std::string& detail) {
                  std::mt19937_64 rng(30303);
                  for (auto [r, m] : std::vector<std::pair<unsigned, unsigned>>{{2, 2}, {2, 3}, {3, 2}}) {
                      auto f = Field::cyclotomic(r == 2 ? 1 : 3);
                      for (int it = 0; it < 50; ++it) {
                          Exponent nu = random_generic_exponent(f, r, m, rng);
                          LocalRamifiedData d = model_local_data(nu);
                          LocalRamifiedData gd =
                              data_gauge(d, random_data_gauge(f, r, m, rng), random_units(f, r, d.window(), rng));
                          ReconstructOutcome out = reconstruct_check(gd);
                          if (!out.ok || !same_orbit_mod_int_shift(out.recovered, nu)) {
                              detail = "r=" + std::to_string(r) + " m=" + std::to_string(m) +
                                       " it=" + std::to_string(it) + ": " + out.detail;
                              return false;
                          }
                      }
                  }
                  return true;
              });

    // 4. dimension identity and parity over 1000 seeded tuples
    criterion(4, "euler_chars = dimension = 2r^2(g-1)+2+sum(r^2-r)m_i with even parity, 1000 tuples",
              [](std::string& detail) {
                  std::mt19937_64 rng(40404);
                  std::uniform_int_distribution<long> gd(0, 3), rd(1, 6), nd(1, 4), md(1, 5);
                  for (int it = 0; it < 1000; ++it) {
                      long g = gd(rng), r = rd(rng), n = nd(rng);
                      std::vector<long> m;
                      std::vector<std::vector<long>> blocks;
                      for (long i = 0; i < n; ++i) {
                          m.push_back(md(rng));
                          std::vector<long> bl;
                          if (m.back() == 1) {
                              bl.assign((size_t)r, 1);
                          } else {
                              long left = r;
                              while (left > 0) {
                                  std::uniform_int_distribution<long> bd(1, left);
                                  long b = bd(rng);
                                  bl.push_back(b);
                                  left -= b;
                              }
                          }
                          blocks.push_back(bl);
                      }
                      long dim = dimension_formula(g, r, m);
                      long manual = 2 * r * r * (g - 1) + 2;
                      for (long mi : m) manual += (r * r - r) * mi;
                      EulerChars ec = euler_chars(g, r, m, blocks);
                      if (ec.dim_h1 != dim || dim != manual || dim % 2 != 0) {
                          detail = "tuple " + std::to_string(it) + ": chi gives " +
                                   std::to_string(ec.dim_h1) + ", formula " + std::to_string(dim);
                          return false;
                      }
                  }
                  return true;
              });

    // 5. tangent space of the rank-2, single-pole m=4 model
    criterion(5, "tangent space of the m=4 model: dim 2 certified, pairing skew of rank 2",
              [](std::string& detail) {
                  auto q = Field::rationals();
                  Poly u{q->from_int(1), q->from_rat(Rat(1, 3))};
                  Poly tau{q->from_rat(Rat(-1, 2)), q->one()};
                  GlobalConnection gc = rank2_single_pole_model(q, 4, u, tau);
                  if (!check_connection(gc).all_pass()) {
                      detail = "model fails check_connection";
                      return false;
                  }
                  TangentSpaceResult ts = tangent_space(gc); // stabilization certificate inside
                  if (ts.dim != 2) {
                      detail = "dim = " + std::to_string(ts.dim);
                      return false;
                  }
                  const CechComplex& cx = *ts.complex;
                  Mat pairing = mat_zero(q, 2, 2);
                  for (unsigned i = 0; i < 2; ++i)
                      for (unsigned j = 0; j < 2; ++j)
                          pairing[i][j] = cx.pair(cx.h1_basis()[i], cx.h1_basis()[j]);
                  for (unsigned i = 0; i < 2; ++i)
                      if (!pairing[i][i].is_zero()) {
                          detail = "pair(x, x) != 0";
                          return false;
                      }
                  for (unsigned i = 0; i < 2; ++i)
                      for (unsigned j = 0; j < 2; ++j)
                          if (!(pairing[i][j] + pairing[j][i]).is_zero()) {
                              detail = "pairing not skew";
                              return false;
                          }
                  if (rank(pairing) != 2) {
                      detail = "pairing rank " + std::to_string(rank(pairing));
                      return false;
                  }
                  return true;
              });

    // 6. 20 single-break mutations each flag exactly the broken check
    criterion(6, "verification mutation suite: 20 mutations, one named failure each",
              [](std::string& detail) {
                  std::mt19937_64 rng(60606);
                  int count = 0;
                  for (auto [r, m] : std::vector<std::pair<unsigned, unsigned>>{
                           {2, 2}, {2, 3}, {3, 2}, {3, 3}}) {
                      auto f = Field::cyclotomic(r == 2 ? 1 : 3);
                      Exponent nu = random_generic_exponent(f, r, m, rng);
                      LocalRamifiedData base = model_local_data(nu);
                      std::vector<std::pair<std::string, std::function<void(LocalRamifiedData&)>>> muts = {
                          {"exponent_chain", [&](LocalRamifiedData& d) { d.exponents[1] = d.exponents[0]; }},
                          {"phi_image", [&](LocalRamifiedData& d) { d.phi[0] = d.phi[0].shift_w(1); }},
                          {"diagram_phi",
                           [&](LocalRamifiedData& d) {
                               TruncSeries unit(f, RingParams{d.r, d.window()});
                               unit.set_coeff(0, f->one());
                               unit.set_coeff(1, f->one());
                               d.phi[d.r - 1] = d.phi[d.r - 1] * unit;
                           }},
                          {"diagram_nabla",
                           [&](LocalRamifiedData& d) {
                               d.A[1][0].set_coeff(0, d.A[1][0].coeff(0) + f->one());
                           }},
                          {"filtration_invariance",
                           [&](LocalRamifiedData& d) {
                               d.A[0][d.r - 1].set_coeff(0, d.A[0][d.r - 1].coeff(0) + f->one());
                           }},
                      };
                      for (auto& [name, mut] : muts) {
                          LocalRamifiedData d = base;
                          mut(d);
                          auto failed = verify(d).failed_names();
                          ++count;
                          if (failed.size() != 1 || failed[0] != name) {
                              std::ostringstream os;
                              os << "mutation '" << name << "' on (r,m)=(" << r << "," << m << ") flagged {";
                              for (auto& s : failed) os << s << " ";
                              os << "}";
                              detail = os.str();
                              return false;
                          }
                      }
                  }
                  if (count != 20) {
                      detail = "ran " + std::to_string(count) + " mutations";
                      return false;
                  }
                  return true;
              });

    // 7. degeneration trichotomy on a fixed 12-point grid
    criterion(7, "specialize classifies the fixed 12-point (t,h) grid exactly", [](std::string& detail) {
        auto q = Field::rationals();
        FamilyBlock fb;
        fb.r = 2;
        fb.m = 2;
        fb.c = {q->one(), q->one(), q->from_rat(Rat(-1, 4))};
        fb.kappa = {Rat(0), Rat(1)};
        struct Point {
            Rat t, h;
            FiberKind kind;
            bool nilpotent_somewhere;
        };
        std::vector<Point> grid = {
            {Rat(0), Rat(0), FiberKind::Ramified, false},
            {Rat(1), Rat(0), FiberKind::Unramified, false},
            {Rat(2), Rat(0), FiberKind::Unramified, false},
            {Rat(-1), Rat(0), FiberKind::Unramified, false},
            {Rat(1, 2), Rat(0), FiberKind::Unramified, false},
            {Rat(0), Rat(1), FiberKind::RegularSingular, false},
            {Rat(1), Rat(-1), FiberKind::RegularSingular, true}, // t^2 + h kappa_1 = 0
            {Rat(1), Rat(1), FiberKind::RegularSingular, false}, // adjoins sqrt(2)
            {Rat(2), Rat(5), FiberKind::RegularSingular, false},
            {Rat(1), Rat(3), FiberKind::RegularSingular, false},
            {Rat(0), Rat(-1), FiberKind::RegularSingular, false}, // adjoins sqrt(-1)
            {Rat(1), Rat(8), FiberKind::RegularSingular, false},
        };
        if (grid.size() != 12) {
            detail = "grid size";
            return false;
        }
        for (size_t i = 0; i < grid.size(); ++i) {
            const Point& pt = grid[i];
            FiberClassification fc = specialize(fb, pt.t, pt.h);
            if (fc.kind != pt.kind) {
                detail = "point " + std::to_string(i) + " misclassified";
                return false;
            }
            if (fc.kind == FiberKind::Ramified) {
                for (size_t l = 0; l < fb.c.size(); ++l)
                    if (!(fc.ramified_coefficients[l] == fb.c[l])) {
                        detail = "ramified invariants differ";
                        return false;
                    }
            }
            if (fc.kind == FiberKind::Unramified) {
                if (!fc.leading_distinct) {
                    detail = "leading coefficients not distinct at point " + std::to_string(i);
                    return false;
                }
                if (!check_dagger(fb, pt.t, pt.h).ok) {
                    detail = "dagger fails at an unramified point";
                    return false;
                }
            }
            if (fc.kind == FiberKind::RegularSingular) {
                bool nil_seen = false;
                for (const auto& rp : fc.residues) {
                    if (rp.nilpotent) {
                        nil_seen = true;
                        if (!rp.minpoly_is_full_power || rp.minimal_polynomial.size() != fb.r + 1) {
                            detail = "nilpotent residue without (T-beta)^r minimal polynomial";
                            return false;
                        }
                    } else if (!rp.eigenvalues_distinct) {
                        detail = "semisimple residue with repeated eigenvalues at point " +
                                 std::to_string(i);
                        return false;
                    }
                }
                if (nil_seen != pt.nilpotent_somewhere) {
                    detail = "nilpotent-point detection wrong at point " + std::to_string(i);
                    return false;
                }
            }
        }
        return true;
    });

    // 8. auto-stability of single-block ramified rank-2 instances; the split
    //    direct sum is unstable with a witness
    criterion(8, "auto-stability for single-block c1 != 0 instances; split example unstable",
              [](std::string& detail) {
                  auto q = Field::rationals();
                  std::vector<std::pair<Poly, Poly>> instances = {
                      {Poly{q->from_int(1)}, Poly{q->one()}},
                      {Poly{q->from_int(4)}, Poly{q->from_int(-1)}},
                      {Poly{q->from_int(1), q->from_rat(Rat(1, 3))}, Poly{q->from_rat(Rat(-1, 2)), q->one()}},
                      {Poly{q->from_rat(Rat(1, 4)), q->one()}, Poly{q->zero(), q->from_int(2)}},
                  };
                  for (size_t i = 0; i < instances.size(); ++i) {
                      for (unsigned m : {2u, 4u}) {
                          // entry degrees must respect the infinity bound m - 2
                          Poly u = instances[i].first, tau = instances[i].second;
                          if (m == 2) {
                              u.resize(1);
                              tau.assign(1, q->zero());
                          }
                          if (poly_degree(u) < 0 || u[0].is_zero()) continue;
                          GlobalConnection gc = rank2_single_pole_model(q, m, u, tau);
                          StabilityVerdict v = is_stable(gc);
                          if (v.kind != StabilityKind::AutoStable) {
                              detail = "instance " + std::to_string(i) + " m=" + std::to_string(m) +
                                       " not auto-stable";
                              return false;
                          }
                      }
                  }
                  // the constructed split example with an invariant O(0) of larger slope
                  GlobalConnection gc;
                  gc.field = q;
                  gc.splitting = {0, -2};
                  gc.omega_num.assign(2, std::vector<Poly>(2));
                  gc.omega_num[1][1] = Poly{q->from_int(2)};
                  PoleLocalStructure p;
                  p.position = q->zero();
                  p.m = 1;
                  p.block_sizes = {1, 1};
                  p.adapted_frame.assign(2, SeriesVec(2, TruncSeries(q, RingParams{1, 1})));
                  p.adapted_frame[0][0].set_coeff(0, q->one());
                  p.adapted_frame[1][1].set_coeff(0, q->one());
                  p.blocks = {model_local_data(Exponent(1, 1, {q->zero()})),
                              model_local_data(Exponent(1, 1, {q->from_int(2)}))};
                  gc.poles.push_back(p);
                  gc.weight.alpha = {{Rat(1, 3), Rat(2, 3)}};
                  StabilityVerdict v = is_stable(gc);
                  if (v.kind != StabilityKind::Unstable || !v.witness) {
                      detail = "split example not reported unstable with a witness";
                      return false;
                  }
                  if (!(parabolic_degree_line(gc, *v.witness) * Rat(2) > parabolic_degree_full(gc))) {
                      detail = "witness slope is not larger than the total slope";
                      return false;
                  }
                  return true;
              });

    // 9. det-map exponent sets validate whenever the input validates
    criterion(9, "validate_exponent_set accepts det_exponent_set on 100 seeded valid inputs",
              [](std::string& detail) {
                  std::mt19937_64 rng(90909);
                  auto q = Field::rationals();
                  std::uniform_int_distribution<int> nd(1, 3), md(2, 4), rd(1, 3), ad(-3, 3);
                  for (int it = 0; it < 100; ++it) {
                      int n = nd(rng);
                      ExponentSet ns;
                      ns.degree_a = ad(rng);
                      for (int i = 0; i < n; ++i) {
                          unsigned m = (unsigned)md(rng);
                          ns.pole_orders.push_back(m);
                          unsigned r = (unsigned)rd(rng);
                          std::vector<Scalar> c;
                          for (unsigned l = 0; l < m * r - r + 1; ++l) c.push_back(rnd(q, rng));
                          ns.nu.push_back({{}});
                          Exponent nu0(r, m, c);
                          for (unsigned k = 0; k < r; ++k)
                              ns.nu.back()[0].push_back(nu0.shifted_by_dw_over_w(Rat((long)k)));
                      }
                      Scalar sum = q->from_int(ns.degree_a);
                      for (const auto& pole : ns.nu)
                          for (const auto& chain : pole)
                              for (const auto& nu : chain)
                                  sum += nu.dw_residue() * q->from_rat(Rat(1, (long)nu.r));
                      unsigned r0 = (unsigned)ns.nu[0][0].size();
                      Scalar fix = sum * q->from_rat(Rat(1, (long)r0));
                      for (unsigned k = 0; k < r0; ++k) {
                          Exponent& nu = ns.nu[0][0][k];
                          nu.c[nu.top_index()] -= fix;
                      }
                      if (!validate_exponent_set(ns).all_pass()) {
                          detail = "random input " + std::to_string(it) + " failed to validate";
                          return false;
                      }
                      if (!validate_exponent_set(det_exponent_set(ns)).all_pass()) {
                          detail = "det image of input " + std::to_string(it) + " failed";
                          return false;
                      }
                  }
                  return true;
              });

    std::cout << (failures == 0 ? "all acceptance criteria passed" : "ACCEPTANCE FAILURES PRESENT")
              << "\n";
    return failures == 0 ? 0 : 1;
}
