#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stratmilp/families.hpp"
#include "stratmilp/mps.hpp"
#include "stratmilp/model.hpp"
#include "stratmilp/random_milp.hpp"

using namespace stratmilp;

// Hand-written fixture:
//   min  x + 2 y      (y integer)
//   s.t. r1:  x + y   <= 4
//        r2: 2x - y    = 1
//        0 <= x <= 10, 0 <= y <= 3
static const char* kFixture = R"(* tiny fixture
NAME tiny
ROWS
 N  COST
 L  R1
 E  R2
COLUMNS
    X  COST  1.0  R1  1.0
    X  R2  2.0
    MARK1  'MARKER'  'INTORG'
    Y  COST  2.0  R1  1.0
    Y  R2  -1.0
    MARK2  'MARKER'  'INTEND'
RHS
    RHS  R1  4.0  R2  1.0
BOUNDS
 UP BND  X  10.0
 UP BND  Y  3.0
ENDATA
)";

TEST_CASE("hand fixture parses to exact matrices") {
    MILPInstance inst = parse_mps(kFixture);
    CHECK(inst.name == "tiny");
    CHECK(inst.n == 2);
    CHECK(inst.m == 2);
    CHECK(inst.c == std::vector<double>{1.0, 2.0});
    CHECK(inst.A == std::vector<double>{1.0, 1.0, 2.0, -1.0});
    CHECK(inst.b == std::vector<double>{4.0, 1.0});
    CHECK(inst.row_sense[0] == RowSense::LE);
    CHECK(inst.row_sense[1] == RowSense::EQ);
    CHECK(inst.integer_index_set == std::vector<int>{1});
    CHECK(inst.lo == std::vector<double>{0.0, 0.0});
    CHECK(inst.hi == std::vector<double>{10.0, 3.0});
}

TEST_CASE("GE rows are negated to LE") {
    MILPInstance inst = parse_mps(
        "NAME g\nROWS\n N OBJ\n G R1\nCOLUMNS\n X OBJ 1 R1 3\nRHS\n RHS R1 6\nENDATA\n");
    CHECK(inst.m == 1);
    CHECK(inst.row_sense[0] == RowSense::LE);
    CHECK(inst.A == std::vector<double>{-3.0});
    CHECK(inst.b == std::vector<double>{-6.0});
}

TEST_CASE("OBJSENSE MAX negates the objective") {
    MILPInstance inst = parse_mps(
        "NAME mx\nOBJSENSE\n MAX\nROWS\n N OBJ\n L R1\nCOLUMNS\n X OBJ 2 R1 1\n"
        "RHS\n RHS R1 5\nENDATA\n");
    CHECK(inst.c == std::vector<double>{-2.0});
}

TEST_CASE("RANGES expands to a second inequality") {
    // L row with rhs 8 and range 3: 5 <= a x <= 8.
    MILPInstance inst = parse_mps(
        "NAME rg\nROWS\n N OBJ\n L R1\nCOLUMNS\n X OBJ 1 R1 1\nRHS\n RHS R1 8\n"
        "RANGES\n RNG R1 3\nENDATA\n");
    REQUIRE(inst.m == 2);
    CHECK(inst.A == std::vector<double>{1.0, -1.0});
    CHECK(inst.b == std::vector<double>{8.0, -5.0});
}

TEST_CASE("bound keywords") {
    MILPInstance inst = parse_mps(
        "NAME bd\nROWS\n N OBJ\n L R1\nCOLUMNS\n"
        " A OBJ 1 R1 1\n B OBJ 1 R1 1\n C OBJ 1 R1 1\n D OBJ 1 R1 1\n"
        "RHS\n RHS R1 9\nBOUNDS\n"
        " FR BND A\n FX BND B 2.5\n MI BND C\n UP BND C 7\n BV BND D\nENDATA\n");
    CHECK(inst.lo[0] == -kInf);
    CHECK(inst.hi[0] == kInf);
    CHECK(inst.lo[1] == 2.5);
    CHECK(inst.hi[1] == 2.5);
    CHECK(inst.lo[2] == -kInf);
    CHECK(inst.hi[2] == 7.0);
    CHECK(inst.lo[3] == 0.0);
    CHECK(inst.hi[3] == 1.0);
    CHECK(inst.integer_index_set == std::vector<int>{3});
}

TEST_CASE("empty COLUMNS gives a zero-variable instance rejected by validation") {
    MILPInstance inst = parse_mps(
        "NAME e\nROWS\n N OBJ\n L R1\nCOLUMNS\nRHS\n RHS R1 1\nENDATA\n");
    CHECK(inst.n == 0);
    CHECK_FALSE(validate_instance(inst).ok());
}

TEST_CASE("malformed input reports line numbers") {
    try {
        parse_mps("NAME x\nROWS\n N OBJ\n L R1\nCOLUMNS\n X OBJ abc\nENDATA\n");
        FAIL("expected throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 6") != std::string::npos);
    }
    CHECK_THROWS(parse_mps("NAME x\nROWS\n Q R1\nENDATA\n"));
    CHECK_THROWS(parse_mps("NAME x\nSTACKS\n foo\nENDATA\n"));
    CHECK_THROWS(parse_mps(
        "NAME x\nROWS\n N OBJ\nCOLUMNS\n X OBJ 1 R9 1\nENDATA\n"));
}

static void check_same(const MILPInstance& a, const MILPInstance& b) {
    CHECK(a.n == b.n);
    CHECK(a.m == b.m);
    CHECK(a.c == b.c);
    CHECK(a.A == b.A);
    CHECK(a.b == b.b);
    CHECK(a.row_sense == b.row_sense);
    CHECK(a.integer_index_set == b.integer_index_set);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
}

TEST_CASE("parse-serialize-parse fixpoint on 5 fixtures") {
    std::vector<MILPInstance> fixtures;
    fixtures.push_back(parse_mps(kFixture));
    for (uint64_t seed : {11u, 22u, 33u}) fixtures.push_back(make_random_milp(seed));
    fixtures.push_back(build_fuel_cell_family(FuelCellParams{}, 0.0).base_instance);

    for (const auto& inst : fixtures) {
        MILPInstance once = parse_mps(serialize_mps(inst));
        MILPInstance twice = parse_mps(serialize_mps(once));
        check_same(once, twice);
        // and the first parse already reproduces the source instance
        check_same(inst, once);
    }
}
