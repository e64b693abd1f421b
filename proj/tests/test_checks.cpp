#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "maputil.hpp"
#include "mtop/checks.hpp"
#include "mtop/parse.hpp"

using namespace mtop;

namespace {

MapExpr e1() {
    return parse_map("(entries (+ (x 2) (x 3)) (+ (x 1) (x 3)) (* 0.5 (avg -1 (0.5 0.5 0))))");
}

MapExpr e2() {
    return parse_map("(entries (+ (x 1) (avg 0 (0.5 0.5))) (+ (x 2) (avg 0 (0.5 0.5))))");
}

MapExpr matrix_A() { return parse_map("(entries (x 2) (x 2))"); }

MapExpr e4() { return parse_map("(entries (x 1) (avg inf (0.5 0.5)))"); }

Verdict verdict_of(const MapExpr& f, Condition c, Engine e = Engine::Auto) { return check(f, c, e).verdict; }

} // namespace

TEST_CASE("adjacency graph of the worked examples") {
    Digraph g1 = adjacency_graph(e1());
    CHECK(g1.has_arc(0, 1));
    CHECK(g1.has_arc(0, 2));
    CHECK(g1.has_arc(1, 0));
    CHECK(g1.has_arc(1, 2));
    CHECK_FALSE(g1.has_arc(2, 0));
    CHECK_FALSE(g1.has_arc(2, 1));
    CHECK(g1.scc_count() == 2);
    REQUIRE(g1.final_classes().size() == 1);
    CHECK(g1.scc_members(g1.final_classes()[0]) == std::vector<int>{2});

    Digraph g2 = adjacency_graph(e2());
    CHECK(g2.strongly_connected());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(g2.has_arc(i, j));

    Digraph gid = adjacency_graph(MapExpr::identity(3));
    CHECK(gid.scc_count() == 3);
    CHECK(gid.final_classes().size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(gid.has_arc(i, i));
}

TEST_CASE("golden verdicts for the paper-style examples") {
    // first example: facially irreducible but not graphically irreducible
    CHECK(verdict_of(e1(), Condition::Facial) == Verdict::Holds);
    CHECK(verdict_of(e1(), Condition::Graphical) == Verdict::Fails);
    CHECK(verdict_of(e1(), Condition::Indecomposable) == Verdict::Holds);

    // second example: graphically irreducible, invariant parts {1} and {2}
    CHECK(verdict_of(e2(), Condition::Graphical) == Verdict::Holds);
    CHECK(verdict_of(e2(), Condition::Indecomposable) == Verdict::Holds);
    CheckReport partial = check(e2(), Condition::Partial);
    CHECK(partial.verdict == Verdict::Fails);
    REQUIRE(partial.witness_J);
    CHECK(partial.witness_J->to_set_string() == "{1}");
    CHECK(verdict_of(e2(), Condition::Facial) == Verdict::Fails);

    // the 2x2 matrix: partially irreducible and imperturbable, not facially
    CHECK(verdict_of(matrix_A(), Condition::Partial) == Verdict::Holds);
    CHECK(verdict_of(matrix_A(), Condition::Imperturbable) == Verdict::Holds);
    CHECK(verdict_of(matrix_A(), Condition::Facial) == Verdict::Fails);
}

TEST_CASE("encode: SAT means the condition fails") {
    BoolMap lo = lower_signature(matrix_A());
    BoolMap up = upper_signature(matrix_A());

    CHECK(solve(encode(Condition::Partial, lo, up)).status == SolveStatus::Unsat);

    SolveResult facial = solve(encode(Condition::Facial, lo, up));
    REQUIRE(facial.status == SolveStatus::Sat);
    CHECK(facial.model.get(1));
    CHECK_FALSE(facial.model.get(2));

    // indecomposability encoding of the first example is unsatisfiable
    CHECK(solve(encode(Condition::Indecomposable, lower_signature(e1()), upper_signature(e1()))).status ==
          SolveStatus::Unsat);

    // the max-map has the imperturbability counterexample x = y = e_2
    SolveResult imp = solve(encode(Condition::Imperturbable, lower_signature(e4()), upper_signature(e4())));
    REQUIRE(imp.status == SolveStatus::Sat);
    CHECK_FALSE(imp.model.get(1));
    CHECK(imp.model.get(2));
    CHECK_FALSE(imp.model.get(3));
    CHECK(imp.model.get(4));

    CHECK_THROWS_AS(encode(Condition::Graphical, lo, up), Error);
}

TEST_CASE("brute force enumerates and reports first witnesses") {
    BoolMap lo = lower_signature(matrix_A());
    BoolMap up = upper_signature(matrix_A());
    CheckReport indec = brute_force(Condition::Indecomposable, lo, up);
    CHECK(indec.verdict == Verdict::Fails);
    CHECK(indec.witness_J->to_set_string() == "{1}");

    CheckReport facial = brute_force(Condition::Facial, lower_signature(e1()), upper_signature(e1()));
    CHECK(facial.verdict == Verdict::Holds);

    BoolMap ident_sig = lower_signature(MapExpr::identity(4));
    CheckReport part = brute_force(Condition::Partial, ident_sig, ident_sig);
    CHECK(part.verdict == Verdict::Fails);
    CHECK(part.witness_J->to_set_string() == "{1}");

    CHECK_THROWS_AS(brute_force(Condition::Imperturbable, lower_signature(MapExpr::identity(16)),
                                upper_signature(MapExpr::identity(16))),
                    Error);
}

TEST_CASE("imperturbability via the nested-pair engines on the max-map") {
    CheckReport rep = check(e4(), Condition::Imperturbable, Engine::Brute);
    CHECK(rep.verdict == Verdict::Fails);
    REQUIRE(rep.witness_I);
    CHECK(rep.witness_I->to_set_string() == "{2}");
    CHECK(rep.witness_J->to_set_string() == "{2}");

    CheckReport sat = check(e4(), Condition::Imperturbable, Engine::Sat);
    CHECK(sat.verdict == Verdict::Fails);
    CHECK(sat.witness_I->to_set_string() == "{2}");
    CHECK(sat.witness_J->to_set_string() == "{2}");
}

TEST_CASE("classify_class stratifies by exponent sign") {
    CHECK(classify_class(e2()) == MapClass::Plus);
    CHECK(classify_class(e1()) == MapClass::Mixed);
    CHECK(classify_class(MapExpr::identity(3)) == MapClass::Plus);
    CHECK(classify_class(parse_map("(entries (avg -1 (0.5 0.5)) (avg -inf (1 0)))")) == MapClass::Minus);
}

TEST_CASE("imperturbability fast path for nonnegative exponents") {
    CheckReport a = imperturbable_fastpath_mconvex(matrix_A());
    CHECK(a.verdict == Verdict::Holds);
    CHECK(a.engine == Engine::Fastpath);

    CheckReport m = imperturbable_fastpath_mconvex(e4());
    CHECK(m.verdict == Verdict::Fails);
    REQUIRE(m.witness_I);
    CHECK(detail::witness_valid(Condition::Imperturbable, lower_signature(e4()), upper_signature(e4()),
                                *m.witness_J, &*m.witness_I));

    CheckReport ident = imperturbable_fastpath_mconvex(MapExpr::identity(2));
    CHECK(ident.verdict == Verdict::Fails);

    // mixed-class maps are rejected up front
    CHECK_THROWS_AS(imperturbable_fastpath_mconvex(e1()), Error);
}

TEST_CASE("dimension-1 maps hold vacuously; engine misuse is rejected") {
    MapExpr one = MapExpr::identity(1);
    for (Condition c : {Condition::Facial, Condition::Graphical, Condition::Partial, Condition::Indecomposable,
                        Condition::Imperturbable})
        CHECK(check(one, c).verdict == Verdict::Holds);
    CHECK_THROWS_AS(check(e2(), Condition::Facial, Engine::Graph), Error);
    CHECK_THROWS_AS(check(e2(), Condition::Facial, Engine::Fastpath), Error);
}

TEST_CASE("property: engines agree on random maps") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 60; ++trial) {
        testutil::GenOptions o;
        o.n = 2 + static_cast<int>(rng() % 9); // n <= 10
        o.nonneg_r_only = trial % 2 == 0;
        MapExpr f = testutil::random_map(rng, o);
        for (Condition c :
             {Condition::Facial, Condition::Partial, Condition::Indecomposable, Condition::Imperturbable}) {
            Verdict sat = check(f, c, Engine::Sat).verdict;
            Verdict brute = check(f, c, Engine::Brute).verdict;
            CHECK(sat == brute);
        }
    }
}

TEST_CASE("property: implications between the conditions") {
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 80; ++trial) {
        testutil::GenOptions o;
        o.n = 2 + static_cast<int>(rng() % 7);
        o.nonneg_r_only = trial % 2 == 0;
        MapExpr f = testutil::random_map(rng, o);
        Verdict facial = verdict_of(f, Condition::Facial);
        Verdict graphical = verdict_of(f, Condition::Graphical);
        Verdict indec = verdict_of(f, Condition::Indecomposable);
        Verdict partial = verdict_of(f, Condition::Partial);
        Verdict imper = verdict_of(f, Condition::Imperturbable);

        if (facial == Verdict::Holds) CHECK(indec == Verdict::Holds);
        if (graphical == Verdict::Holds) CHECK(indec == Verdict::Holds);
        if (partial == Verdict::Holds) CHECK(imper == Verdict::Holds);
        if (classify_class(f) == MapClass::Plus) {
            CHECK((indec == Verdict::Holds) == (graphical == Verdict::Holds));
            CHECK((imperturbable_fastpath_mconvex(f).verdict == Verdict::Holds) == (imper == Verdict::Holds));
        }
    }
}

TEST_CASE("property: failure witnesses replay against the signatures") {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 40; ++trial) {
        testutil::GenOptions o;
        o.n = 2 + static_cast<int>(rng() % 7);
        MapExpr f = testutil::random_map(rng, o);
        BoolMap lo = lower_signature(f);
        BoolMap up = upper_signature(f);
        for (Condition c : {Condition::Facial, Condition::Graphical, Condition::Partial, Condition::Indecomposable,
                            Condition::Imperturbable}) {
            CheckReport rep = check(f, c);
            if (rep.verdict != Verdict::Fails) continue;
            REQUIRE(rep.witness_J);
            CHECK(detail::witness_valid(c, lo, up, *rep.witness_J, rep.witness_I ? &*rep.witness_I : nullptr));
        }
    }
}

TEST_CASE("check reports carry engine, timing, and render stably") {
    CheckReport rep = check(e1(), Condition::Facial, Engine::Sat);
    CHECK(rep.engine == Engine::Sat);
    CHECK(rep.wall_seconds >= 0.0);
    std::string text = to_text(rep);
    CHECK(text.find("facial: holds") == 0);
    std::string rec = to_structured(rep);
    CHECK(rec.find("record: check\n") == 0);
    CHECK(rec.find("end: record\n") != std::string::npos);
}
