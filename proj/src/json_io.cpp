#include "ramconn/json_io.hpp"

#include <fstream>

namespace ramconn {

namespace {

[[noreturn]] void schema(const std::string& what) { fail(ErrCode::SchemaError, what); }

const Json& need(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) schema(std::string("missing key '") + key + "'");
    return *it;
}

} // namespace

Json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrCode::FileError, "cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        fail(ErrCode::SchemaError, std::string("malformed JSON: ") + e.what());
    }
    return j;
}

Json scalar_to_json(const Scalar& x) {
    if (x.is_rational()) return rat_to_string(x.rational_part());
    Json arr = Json::array();
    for (const auto& q : x.coeffs()) arr.push_back(rat_to_string(q));
    return arr;
}

Scalar scalar_from_json(const FieldPtr& f, const Json& j) {
    std::vector<Rat> c(f->dim(), Rat(0));
    if (j.is_string()) {
        c[0] = rat_from_string(j.get<std::string>());
    } else if (j.is_number_integer()) {
        c[0] = Rat(j.get<long>());
    } else if (j.is_array()) {
        if (j.size() > f->dim()) schema("scalar has more coefficients than the tower dimension");
        for (size_t i = 0; i < j.size(); ++i) {
            if (j[i].is_string()) c[i] = rat_from_string(j[i].get<std::string>());
            else if (j[i].is_number_integer()) c[i] = Rat(j[i].get<long>());
            else schema("scalar coefficients must be exact strings or integers");
        }
    } else {
        schema("scalar must be a string, an integer, or a coefficient array");
    }
    return Scalar(f, c);
}

Json field_to_json(const FieldPtr& f) {
    Json j;
    j["L"] = f->cyclotomic_order();
    Json rads = Json::array();
    // reconstruct the radical tower description from the generators
    // (radicands serialize over the sub-tower; round-trips through make())
    size_t prefix = f->dim();
    for (unsigned i = f->radical_count(); i-- > 0;) prefix /= f->radical_exponent(i) ? f->radical_exponent(i) : 1;
    for (unsigned i = 0; i < f->radical_count(); ++i) {
        Json r;
        r["e"] = f->radical_exponent(i);
        // b_i^{e_i} lives in the sub-tower below the radical: emit that prefix
        Scalar be = f->radical_generator(i).pow((long)f->radical_exponent(i));
        Json arr = Json::array();
        for (size_t t = 0; t < prefix; ++t) arr.push_back(rat_to_string(be.coeffs()[t]));
        r["radicand"] = arr;
        rads.push_back(r);
        prefix *= f->radical_exponent(i);
    }
    if (!rads.empty()) j["radicals"] = rads;
    return j;
}

FieldPtr field_from_json(const Json& j) {
    FieldSpec spec;
    spec.cyclotomic_order = need(j, "L").get<unsigned>();
    if (j.contains("radicals")) {
        // radicands are given over the sub-tower (shorter vectors accepted)
        FieldPtr cur = Field::cyclotomic(spec.cyclotomic_order);
        for (const auto& r : j["radicals"]) {
            RadicalSpec rs;
            rs.exponent = need(r, "e").get<unsigned>();
            Scalar u = scalar_from_json(cur, need(r, "radicand"));
            rs.radicand = u.coeffs();
            spec.radicals.push_back(rs);
            cur = cur->extend(rs.exponent, u);
        }
        return cur;
    }
    return Field::make(spec);
}

Json series_to_json(const TruncSeries& s) {
    Json j;
    j["r"] = s.params().ram_index;
    j["N"] = s.params().trunc;
    Json arr = Json::array();
    for (const auto& c : s.coeffs()) arr.push_back(scalar_to_json(c));
    j["coeffs"] = arr;
    return j;
}

TruncSeries series_from_json(const FieldPtr& f, const Json& j) {
    RingParams p{need(j, "r").get<unsigned>(), need(j, "N").get<unsigned>()};
    const Json& arr = need(j, "coeffs");
    if (!arr.is_array() || arr.size() != p.trunc) schema("series needs exactly N coefficients");
    std::vector<Scalar> c;
    for (const auto& e : arr) c.push_back(scalar_from_json(f, e));
    return TruncSeries(f, p, std::move(c));
}

Json form_to_json(const OneForm& w) {
    Json j = series_to_json(w.numerator);
    j["pole"] = w.pole;
    j["basis"] = w.basis == FormBasis::dw ? "dw" : "dz";
    return j;
}

OneForm form_from_json(const FieldPtr& f, const Json& j) {
    OneForm w;
    w.numerator = series_from_json(f, j);
    w.pole = need(j, "pole").get<unsigned>();
    std::string b = need(j, "basis").get<std::string>();
    if (b == "dw") w.basis = FormBasis::dw;
    else if (b == "dz") w.basis = FormBasis::dz;
    else schema("basis must be 'dw' or 'dz'");
    return w;
}

Json exponent_to_json(const Exponent& e) {
    Json j;
    j["r"] = e.r;
    j["m"] = e.m;
    Json arr = Json::array();
    for (const auto& c : e.c) arr.push_back(scalar_to_json(c));
    j["c"] = arr;
    return j;
}

Exponent exponent_from_json(const FieldPtr& f, const Json& j) {
    unsigned r = need(j, "r").get<unsigned>(), m = need(j, "m").get<unsigned>();
    const Json& arr = need(j, "c");
    std::vector<Scalar> c;
    for (const auto& e : arr) c.push_back(scalar_from_json(f, e));
    return Exponent(r, m, std::move(c));
}

Json formal_connection_to_json(const FormalConnection& c) {
    Json j;
    j["r"] = c.rank;
    j["m"] = c.m;
    j["M"] = c.M;
    Json rows = Json::array();
    for (const auto& row : c.A) {
        Json jr = Json::array();
        for (const auto& e : row) {
            Json cs = Json::array();
            for (const auto& s : e.coeffs()) cs.push_back(scalar_to_json(s));
            jr.push_back(cs);
        }
        rows.push_back(jr);
    }
    j["A"] = rows;
    return j;
}

FormalConnection formal_connection_from_json(const FieldPtr& f, const Json& j) {
    unsigned r = need(j, "r").get<unsigned>();
    unsigned m = need(j, "m").get<unsigned>();
    unsigned M = need(j, "M").get<unsigned>();
    if (r < 1 || m < 1 || M < m) schema("connection needs r >= 1 and M >= m >= 1");
    FormalConnection c = FormalConnection::zero(f, r, m, M);
    const Json& rows = need(j, "A");
    if (rows.size() != r) schema("connection matrix must have r rows");
    for (unsigned i = 0; i < r; ++i) {
        if (rows[i].size() != r) schema("connection matrix must be square");
        for (unsigned k = 0; k < r; ++k) {
            const Json& cs = rows[i][k];
            if (cs.size() > M) schema("entry has more than M coefficients");
            for (size_t t = 0; t < cs.size(); ++t) c.A[i][k].set_coeff((unsigned)t, scalar_from_json(f, cs[t]));
        }
    }
    return c;
}

Json local_data_to_json(const LocalRamifiedData& d) {
    Json j;
    j["r"] = d.r;
    j["m"] = d.m;
    Json exps = Json::array();
    for (const auto& e : d.exponents) exps.push_back(exponent_to_json(e));
    j["exponents"] = exps;
    Json rows = Json::array();
    for (const auto& row : d.A) {
        Json jr = Json::array();
        for (const auto& e : row) {
            Json cs = Json::array();
            for (const auto& s : e.coeffs()) cs.push_back(scalar_to_json(s));
            jr.push_back(cs);
        }
        rows.push_back(jr);
    }
    j["A"] = rows;
    Json pis = Json::array();
    for (const auto& row : d.pi) {
        Json jr = Json::array();
        for (const auto& s : row) jr.push_back(series_to_json(s));
        pis.push_back(jr);
    }
    j["pi"] = pis;
    Json phis = Json::array();
    for (const auto& s : d.phi) phis.push_back(series_to_json(s));
    j["phi"] = phis;
    return j;
}

LocalRamifiedData local_data_from_json(const FieldPtr& f, const Json& j) {
    LocalRamifiedData d;
    d.r = need(j, "r").get<unsigned>();
    d.m = need(j, "m").get<unsigned>();
    for (const auto& e : need(j, "exponents")) d.exponents.push_back(exponent_from_json(f, e));
    if (d.exponents.size() != d.r) schema("local data needs r exponents");
    const Json& rows = need(j, "A");
    d.A.assign(d.r, SeriesVec(d.r, TruncSeries(f, RingParams{1, d.m})));
    for (unsigned i = 0; i < d.r; ++i)
        for (unsigned k = 0; k < d.r; ++k) {
            const Json& cs = rows[i][k];
            for (size_t t = 0; t < cs.size() && t < d.m; ++t)
                d.A[i][k].set_coeff((unsigned)t, scalar_from_json(f, cs[t]));
        }
    for (const auto& row : need(j, "pi")) {
        std::vector<TruncSeries> r;
        for (const auto& s : row) r.push_back(series_from_json(f, s));
        d.pi.push_back(std::move(r));
    }
    for (const auto& s : need(j, "phi")) d.phi.push_back(series_from_json(f, s));
    if (d.pi.size() != d.r || d.phi.size() != d.r) schema("local data needs r pi rows and r phi maps");
    return d;
}

Json global_connection_to_json(const GlobalConnection& gc) {
    Json j;
    j["field"] = field_to_json(gc.field);
    j["splitting"] = gc.splitting;
    Json mats = Json::array();
    for (const auto& row : gc.omega_num) {
        Json jr = Json::array();
        for (const auto& p : row) {
            Json cs = Json::array();
            for (const auto& s : p) cs.push_back(scalar_to_json(s));
            jr.push_back(cs);
        }
        mats.push_back(jr);
    }
    j["matrix"] = mats;
    Json poles = Json::array();
    for (const auto& p : gc.poles) {
        Json jp;
        jp["t"] = p.at_infinity ? Json("inf") : scalar_to_json(p.position);
        jp["m"] = p.m;
        Json fr = Json::array();
        for (const auto& row : p.adapted_frame) {
            Json jr = Json::array();
            for (const auto& s : row) jr.push_back(series_to_json(s));
            fr.push_back(jr);
        }
        jp["frame"] = fr;
        jp["block_sizes"] = p.block_sizes;
        Json bl = Json::array();
        for (const auto& b : p.blocks) bl.push_back(local_data_to_json(b));
        jp["blocks"] = bl;
        poles.push_back(jp);
    }
    j["poles"] = poles;
    Json ws = Json::array();
    for (const auto& al : gc.weight.alpha) {
        Json jr = Json::array();
        for (const auto& a : al) jr.push_back(rat_to_string(a));
        ws.push_back(jr);
    }
    j["weights"] = ws;
    return j;
}

GlobalConnection global_connection_from_json(const Json& j) {
    GlobalConnection gc;
    gc.field = field_from_json(need(j, "field"));
    for (const auto& d : need(j, "splitting")) gc.splitting.push_back(d.get<int>());
    unsigned r = gc.rank();
    if (r == 0) schema("empty splitting");
    const Json& mats = need(j, "matrix");
    if (mats.size() != r) schema("matrix must have rank rows");
    gc.omega_num.assign(r, std::vector<Poly>(r));
    for (unsigned a = 0; a < r; ++a)
        for (unsigned b = 0; b < r; ++b)
            for (const auto& s : mats[a][b]) gc.omega_num[a][b].push_back(scalar_from_json(gc.field, s));
    for (const auto& jp : need(j, "poles")) {
        PoleLocalStructure p;
        const Json& t = need(jp, "t");
        if (t.is_string() && t.get<std::string>() == "inf") {
            p.at_infinity = true;
            p.position = gc.field->zero();
        } else {
            p.position = scalar_from_json(gc.field, t);
        }
        p.m = need(jp, "m").get<unsigned>();
        for (const auto& row : need(jp, "frame")) {
            SeriesVec rv;
            for (const auto& s : row) rv.push_back(series_from_json(gc.field, s));
            p.adapted_frame.push_back(std::move(rv));
        }
        for (const auto& s : need(jp, "block_sizes")) p.block_sizes.push_back(s.get<unsigned>());
        for (const auto& b : need(jp, "blocks")) p.blocks.push_back(local_data_from_json(gc.field, b));
        gc.poles.push_back(std::move(p));
    }
    for (const auto& al : need(j, "weights")) {
        std::vector<Rat> ws;
        for (const auto& a : al) ws.push_back(rat_from_string(a.get<std::string>()));
        gc.weight.alpha.push_back(std::move(ws));
    }
    if (gc.weight.alpha.size() != gc.poles.size()) schema("one weight list per pole required");
    return gc;
}

Json exponent_set_to_json(const ExponentSet& ns) {
    Json j;
    j["a"] = ns.degree_a;
    Json poles = Json::array();
    for (size_t i = 0; i < ns.nu.size(); ++i) {
        Json jp;
        jp["m"] = ns.pole_orders[i];
        Json blocks = Json::array();
        for (const auto& chain : ns.nu[i]) {
            Json ch = Json::array();
            for (const auto& nu : chain) ch.push_back(exponent_to_json(nu));
            blocks.push_back(ch);
        }
        jp["blocks"] = blocks;
        poles.push_back(jp);
    }
    j["poles"] = poles;
    return j;
}

ExponentSet exponent_set_from_json(const FieldPtr& f, const Json& j) {
    ExponentSet ns;
    ns.degree_a = need(j, "a").get<int>();
    for (const auto& jp : need(j, "poles")) {
        ns.pole_orders.push_back(need(jp, "m").get<unsigned>());
        std::vector<std::vector<Exponent>> pole;
        for (const auto& ch : need(jp, "blocks")) {
            std::vector<Exponent> chain;
            for (const auto& nu : ch) chain.push_back(exponent_from_json(f, nu));
            pole.push_back(std::move(chain));
        }
        ns.nu.push_back(std::move(pole));
    }
    return ns;
}

Json family_block_to_json(const FamilyBlock& fb) {
    Json j;
    j["field"] = field_to_json(fb.field());
    j["r"] = fb.r;
    j["m"] = fb.m;
    Json cs = Json::array();
    for (const auto& c : fb.c) cs.push_back(scalar_to_json(c));
    j["c"] = cs;
    Json ks = Json::array();
    for (const auto& k : fb.kappa) ks.push_back(rat_to_string(k));
    j["kappa"] = ks;
    return j;
}

FamilyBlock family_block_from_json(const Json& j) {
    FamilyBlock fb;
    FieldPtr f = j.contains("field") ? field_from_json(j["field"]) : Field::rationals();
    fb.r = need(j, "r").get<unsigned>();
    fb.m = need(j, "m").get<unsigned>();
    if (!f->has_root_of_unity(fb.r)) f = Field::cyclotomic(fb.r);
    for (const auto& c : need(j, "c")) fb.c.push_back(scalar_from_json(f, c));
    for (const auto& k : need(j, "kappa")) fb.kappa.push_back(rat_from_string(k.get<std::string>()));
    fb.validate();
    return fb;
}

Json report_to_json(const std::vector<CheckResult>& checks) {
    Json arr = Json::array();
    for (const auto& c : checks) {
        Json j;
        j["check"] = c.name;
        j["pass"] = c.status == CheckStatus::Pass;
        if (c.status == CheckStatus::Skipped) j["skipped"] = true;
        if (!c.witness.empty()) j["witness"] = c.witness;
        arr.push_back(j);
    }
    return arr;
}

} // namespace ramconn
