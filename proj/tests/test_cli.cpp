#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ramconn/json_io.hpp"
#include "test_models.hpp"

#include <array>
#include <cstdio>
#include <fstream>

using namespace ramconn;
using namespace ramconn::testmodels;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(RAMCONN_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult res;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) res.out.append(buf.data(), n);
    int status = pclose(p);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string write_temp(const std::string& name, const Json& j) {
    std::string path = std::string("cli_") + name;
    std::ofstream out(path);
    out << j.dump(2);
    return path;
}

} // namespace

TEST_CASE("dimension and kernel commands") {
    RunResult d = run_cli("dimension --g 0 --r 2 --m 4");
    CHECK(d.exit_code == 0);
    CHECK(d.out == "2\n");
    RunResult k = run_cli("kernel --r 3 --m 2");
    CHECK(k.exit_code == 0);
    CHECK(k.out == "length 3\n");
}

TEST_CASE("malformed JSON exits with code 2 and an annotated error") {
    std::ofstream bad("cli_bad.json");
    bad << "{\"r\": 2,";
    bad.close();
    RunResult r = run_cli("validate cli_bad.json");
    CHECK(r.exit_code == 2);
}

TEST_CASE("validate a global connection file, pass and fail") {
    auto q = Field::rationals();
    Poly u{q->from_int(1), q->from_rat(Rat(1, 3))};
    Poly tau{q->from_rat(Rat(-1, 2)), q->one()};
    GlobalConnection gc = rank2_single_pole_model(q, 4, u, tau);
    std::string good = write_temp("gc_good.json", global_connection_to_json(gc));
    RunResult rg = run_cli("validate " + good);
    CHECK(rg.exit_code == 0);
    CHECK(rg.out.find("\"pass\": true") != std::string::npos);

    GlobalConnection broken = gc;
    broken.omega_num[0][0] = Poly{q->one()};
    std::string badp = write_temp("gc_bad.json", global_connection_to_json(broken));
    RunResult rb = run_cli("validate " + badp);
    CHECK(rb.exit_code == 1);
}

TEST_CASE("round-trip serialization") {
    auto q = Field::rationals();
    Poly u{q->from_int(1), q->from_rat(Rat(1, 3))};
    Poly tau{q->from_rat(Rat(-1, 2)), q->one()};
    GlobalConnection gc = rank2_single_pole_model(q, 4, u, tau);
    Json j = global_connection_to_json(gc);
    GlobalConnection back = global_connection_from_json(j);
    CHECK(global_connection_to_json(back) == j);
    CHECK(check_connection(back).all_pass());

    // local data round trip over a cyclotomic tower
    auto f3 = Field::cyclotomic(3);
    Exponent nu(3, 2, {f3->one(), f3->zeta(), f3->from_int(2), f3->from_rat(Rat(1, 2))});
    LocalRamifiedData d = model_local_data(nu);
    Json jd = local_data_to_json(d);
    jd["field"] = field_to_json(f3);
    LocalRamifiedData dback = local_data_from_json(f3, jd);
    CHECK(local_data_to_json(dback) == local_data_to_json(d));
    CHECK(verify(dback).all_pass());

    // field with a radical round trip
    auto qr = Field::rationals()->extend(2, Field::rationals()->from_int(2));
    Json jf = field_to_json(qr);
    FieldPtr fback = field_from_json(jf);
    CHECK(fback->same_as(*qr));
}

TEST_CASE("exponents command recovers the pushforward exponent") {
    auto q = Field::rationals();
    Exponent nu(2, 2, {q->from_int(2), q->from_int(3), q->from_rat(Rat(1, 5))});
    FormalConnection conn = pushforward_ramified(nu);
    std::string path = write_temp("conn.json", formal_connection_to_json(conn));
    RunResult r = run_cli("exponents " + path);
    CHECK(r.exit_code == 0);
    Json out = Json::parse(r.out);
    Exponent rec = exponent_from_json(q, out["exponent"]);
    CHECK(same_orbit_exact(rec, nu));
}

TEST_CASE("family command classifies a grid point") {
    auto q = Field::rationals();
    FamilyBlock fb;
    fb.r = 2;
    fb.m = 2;
    fb.c = {q->one(), q->one(), q->from_rat(Rat(-1, 4))};
    fb.kappa = {Rat(0), Rat(1)};
    std::string path = write_temp("family.json", family_block_to_json(fb));
    RunResult r0 = run_cli("family " + path + " --t 0 --h 0");
    CHECK(r0.exit_code == 0);
    CHECK(r0.out.find("ramified") != std::string::npos);
    RunResult r1 = run_cli("family " + path + " --t 1 --h -1");
    CHECK(r1.exit_code == 0);
    CHECK(r1.out.find("regular-singular") != std::string::npos);
    CHECK(r1.out.find("minpoly_is_full_power\": true") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs") {
    auto q = Field::rationals();
    Poly u{q->from_int(1)};
    Poly tau{q->one()};
    GlobalConnection gc = rank2_single_pole_model(q, 4, u, tau);
    std::string path = write_temp("gc_det.json", global_connection_to_json(gc));
    RunResult a = run_cli("tangent " + path);
    RunResult b = run_cli("tangent " + path);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    Json out = Json::parse(a.out);
    CHECK(out["dimension"] == 2);
    CHECK(out["rank"] == 2);
    CHECK(out["skew_check"] == true);
    RunResult s1 = run_cli("stability " + path);
    RunResult s2 = run_cli("stability " + path);
    CHECK(s1.out == s2.out);
    CHECK(s1.out.find("auto-stable") != std::string::npos);
}
