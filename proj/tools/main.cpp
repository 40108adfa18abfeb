// command-line front end: exact reports for the connection toolkit

#include "ramconn/json_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <random>

using namespace ramconn;

namespace {

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrCode::SchemaError:
        case ErrCode::FileError:
            return 2;
        default:
            return 1;
    }
}

Json load(const std::string& path) { return parse_json_file(path); }

FieldPtr field_of_document(const Json& j) {
    if (j.contains("field")) return field_from_json(j["field"]);
    return Field::rationals();
}

int cmd_dimension(long g, long r, const std::vector<long>& m) {
    std::cout << dimension_formula(g, r, m) << "\n";
    return 0;
}

// seeded random sweep of the Euler-characteristic identity
int cmd_dimension_sweep(unsigned long count, unsigned long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> gd(0, 3), rd(1, 6), nd(1, 4), md(1, 5);
    for (unsigned long it = 0; it < count; ++it) {
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
        EulerChars ec = euler_chars(g, r, m, blocks);
        if (ec.dim_h1 != dim || dim % 2 != 0) {
            std::cout << "MISMATCH at tuple " << it << "\n";
            return 1;
        }
    }
    std::cout << "sweep ok: " << count << " tuples, chi identity and parity hold\n";
    return 0;
}

int cmd_kernel(unsigned r, unsigned m) {
    FieldPtr f = Field::cyclotomic(r <= 2 ? 1 : r);
    std::vector<Scalar> c(m * r - r + 1, f->zero());
    c[0] = f->one();
    if (c.size() > 1) c[1] = f->one();
    LocalRamifiedData data = model_local_data(Exponent(r, m, c));
    KernelPi k = kernel_Pi(data);
    std::cout << "length " << k.length << "\n";
    return 0;
}

int cmd_validate(const std::string& path) {
    Json j = load(path);
    Json out;
    bool pass = false;
    if (j.contains("matrix") && j.contains("poles")) {
        GlobalConnection gc = global_connection_from_json(j);
        ConnectionReport rep = check_connection(gc);
        out["kind"] = "global_connection";
        out["checks"] = report_to_json(rep.checks);
        ExponentSetReport ns = validate_exponent_set(gc.exponent_set());
        out["exponent_set"] = report_to_json(ns.checks);
        pass = rep.all_pass() && ns.all_pass();
    } else if (j.contains("pi")) {
        FieldPtr f = field_of_document(j);
        LocalRamifiedData d = local_data_from_json(f, j);
        VerifyReport rep = verify(d);
        out["kind"] = "local_data";
        out["checks"] = report_to_json(rep.checks);
        pass = rep.all_pass();
    } else if (j.contains("a") && j.contains("poles")) {
        FieldPtr f = field_of_document(j);
        ExponentSet ns = exponent_set_from_json(f, j);
        ExponentSetReport rep = validate_exponent_set(ns);
        out["kind"] = "exponent_set";
        out["checks"] = report_to_json(rep.checks);
        pass = rep.all_pass();
    } else {
        fail(ErrCode::SchemaError, "unrecognized document shape");
    }
    out["pass"] = pass;
    std::cout << out.dump(2) << "\n";
    return pass ? 0 : 1;
}

int cmd_exponents(const std::string& path, bool with_float) {
    Json j = load(path);
    FieldPtr f = field_of_document(j);
    FormalConnection conn = formal_connection_from_json(f, j);
    Exponent nu = recover_exponent(conn);
    Json out;
    out["exponent"] = exponent_to_json(nu);
    out["orbit_size"] = nu.r;
    out["dw_residue"] = scalar_to_json(nu.dw_residue());
    if (with_float) {
        Json fl = Json::array();
        for (const auto& c : nu.c) {
            auto v = f->embed(c);
            fl.push_back({v.real(), v.imag()});
        }
        out["float"] = fl;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_stability(const std::string& path) {
    Json j = load(path);
    GlobalConnection gc = global_connection_from_json(j);
    StabilityVerdict v = is_stable(gc);
    Json out;
    switch (v.kind) {
        case StabilityKind::AutoStable: out["verdict"] = "auto-stable"; break;
        case StabilityKind::Stable: out["verdict"] = "stable"; break;
        case StabilityKind::SemistableNotStable: out["verdict"] = "semistable-not-stable"; break;
        case StabilityKind::Unstable: out["verdict"] = "unstable"; break;
    }
    out["detail"] = v.detail;
    if (v.witness) {
        Json w;
        w["degree"] = v.witness->degree;
        Json incl = Json::array();
        for (const auto& p : v.witness->inclusion) {
            Json cs = Json::array();
            for (const auto& s : p) cs.push_back(scalar_to_json(s));
            incl.push_back(cs);
        }
        w["inclusion"] = incl;
        out["witness"] = w;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

// RAMCONN_TRUNC_BUFFER widens the default degree window of `tangent`
unsigned trunc_buffer_env() {
    const char* v = std::getenv("RAMCONN_TRUNC_BUFFER");
    if (!v) return 0;
    long b = std::strtol(v, nullptr, 10);
    return b > 0 && b < 64 ? (unsigned)b : 0;
}

int cmd_tangent(const std::string& path, unsigned bound, bool tracefree) {
    Json j = load(path);
    GlobalConnection gc = global_connection_from_json(j);
    if (bound == 0) bound = default_degree_bound(gc) + trunc_buffer_env();
    TangentSpaceResult ts = tangent_space(gc, bound, tracefree);
    const CechComplex& cx = *ts.complex;
    Json out;
    out["dimension"] = ts.dim;
    out["bound"] = ts.bound;
    Mat pairing = mat_zero(gc.field, ts.dim, ts.dim);
    bool skew = true;
    for (unsigned i = 0; i < ts.dim; ++i)
        for (unsigned k = 0; k < ts.dim; ++k) {
            pairing[i][k] = cx.pair(cx.h1_basis()[i], cx.h1_basis()[k]);
            if (i == k && !pairing[i][k].is_zero()) skew = false;
        }
    for (unsigned i = 0; i < ts.dim && skew; ++i)
        for (unsigned k = 0; k < ts.dim && skew; ++k)
            if (!(pairing[i][k] + pairing[k][i]).is_zero()) skew = false;
    Json pm = Json::array();
    for (unsigned i = 0; i < ts.dim; ++i) {
        Json row = Json::array();
        for (unsigned k = 0; k < ts.dim; ++k) row.push_back(scalar_to_json(pairing[i][k]));
        pm.push_back(row);
    }
    out["pairing_matrix"] = pm;
    out["rank"] = ts.dim ? (unsigned)rank(pairing) : 0u;
    out["skew_check"] = skew;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_family(const std::string& path, const std::string& tstr, const std::string& hstr,
               const std::string& samples_path) {
    Json j = load(path);
    FamilyBlock fb = family_block_from_json(j);
    std::vector<std::pair<Rat, Rat>> pts;
    if (!samples_path.empty()) {
        Json s = load(samples_path);
        for (const auto& p : s) pts.push_back({rat_from_string(p[0].get<std::string>()),
                                               rat_from_string(p[1].get<std::string>())});
    } else {
        pts.push_back({rat_from_string(tstr), rat_from_string(hstr)});
    }
    Json table = Json::array();
    for (const auto& [t, h] : pts) {
        FiberClassification fc = specialize(fb, t, h);
        Json row;
        row["t"] = rat_to_string(t);
        row["h"] = rat_to_string(h);
        switch (fc.kind) {
            case FiberKind::Ramified: {
                row["kind"] = "ramified";
                Json cs = Json::array();
                for (const auto& c : fc.ramified_coefficients) cs.push_back(scalar_to_json(c));
                row["invariants"] = cs;
                break;
            }
            case FiberKind::Unramified: {
                row["kind"] = "unramified";
                Json ls = Json::array();
                for (const auto& c : fc.unramified_leading) ls.push_back(scalar_to_json(c));
                row["leading"] = ls;
                row["leading_distinct"] = fc.leading_distinct;
                break;
            }
            case FiberKind::RegularSingular: {
                row["kind"] = "regular-singular";
                Json rs = Json::array();
                for (const auto& rp : fc.residues) {
                    Json q;
                    q["kappa"] = rat_to_string(rp.kappa);
                    q["nilpotent"] = rp.nilpotent;
                    if (rp.nilpotent) {
                        q["beta"] = scalar_to_json(rp.beta);
                        Json mp = Json::array();
                        for (const auto& c : rp.minimal_polynomial) mp.push_back(scalar_to_json(c));
                        q["minimal_polynomial"] = mp;
                        q["minpoly_is_full_power"] = rp.minpoly_is_full_power;
                    } else {
                        Json evs = Json::array();
                        for (const auto& e : rp.eigenvalues) evs.push_back(scalar_to_json(e));
                        q["eigenvalues"] = evs;
                        q["distinct"] = rp.eigenvalues_distinct;
                    }
                    rs.push_back(q);
                }
                row["residues"] = rs;
                break;
            }
        }
        auto dag = check_dagger(fb, t, h);
        row["dagger"] = dag.ok;
        table.push_back(row);
    }
    std::cout << table.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact toolkit for truncated ramified connection data"};
    app.require_subcommand(1);

    long g = 0, r = 1;
    std::vector<long> ms;
    unsigned long sweep = 0, seed = 1;
    auto* dim = app.add_subcommand("dimension", "moduli dimension 2r^2(g-1)+2+sum (r^2-r)m_i");
    dim->add_option("--g", g, "genus");
    dim->add_option("--r", r, "rank");
    dim->add_option("--m", ms, "pole multiplicities (repeatable)");
    dim->add_option("--sweep", sweep, "run a seeded random chi-identity sweep of this size");
    dim->add_option("--seed", seed, "seed for --sweep");

    unsigned kr = 2, km = 2;
    auto* ker = app.add_subcommand("kernel", "length of ker Pi for the rank-r model block");
    ker->add_option("--r", kr, "block size")->required();
    ker->add_option("--m", km, "pole order")->required();

    std::string vpath;
    auto* val = app.add_subcommand("validate", "verify a connection / local data / exponent set file");
    val->add_option("file", vpath, "input JSON")->required();

    std::string epath;
    bool efloat = false;
    auto* exps = app.add_subcommand("exponents", "Hukuhara-Turrittin exponent of a formal connection");
    exps->add_option("file", epath, "input JSON")->required();
    exps->add_flag("--float", efloat, "add a floating-point rendering");

    std::string spath;
    auto* stab = app.add_subcommand("stability", "parabolic stability of a global connection");
    stab->add_option("file", spath, "input JSON")->required();

    std::string tpath;
    unsigned bound = 0;
    bool tracefree = false;
    auto* tang = app.add_subcommand("tangent", "Cech tangent space and symplectic pairing");
    tang->add_option("file", tpath, "input JSON")->required();
    tang->add_option("--bound", bound, "degree window override");
    tang->add_flag("--tracefree", tracefree, "use the trace-free subcomplex");

    std::string fpath, ft = "0", fh = "0", fsamples;
    auto* fam = app.add_subcommand("family", "classify degeneration-family fibers");
    fam->set_help_flag("--help", "print help");
    fam->add_option("file", fpath, "family block JSON")->required();
    fam->add_option("--t", ft, "sample t (exact rational)");
    fam->add_option("--h", fh, "sample h (exact rational)");
    fam->add_option("--samples", fsamples, "JSON list of [t, h] sample pairs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dim->parsed()) {
            if (sweep > 0) return cmd_dimension_sweep(sweep, seed);
            if (ms.empty()) fail(ErrCode::SchemaError, "either --m ... or --sweep N is required");
            return cmd_dimension(g, r, ms);
        }
        if (ker->parsed()) return cmd_kernel(kr, km);
        if (val->parsed()) return cmd_validate(vpath);
        if (exps->parsed()) return cmd_exponents(epath, efloat);
        if (stab->parsed()) return cmd_stability(spath);
        if (tang->parsed()) return cmd_tangent(tpath, bound, tracefree);
        if (fam->parsed()) return cmd_family(fpath, ft, fh, fsamples);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
