#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "mtop/cnf.hpp"

namespace {

struct RunResult {
    int exit_code;
    std::string output; // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(MTOP_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    int status = pclose(pipe);
    return RunResult{WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string map_path(const std::string& name) { return std::string(MTOP_MAPS_DIR) + "/" + name; }

} // namespace

TEST_CASE("check --all on the golden maps honors the exit-code contract") {
    RunResult e1 = run_cli("check --all " + map_path("e1.map"));
    CHECK(e1.exit_code == 1); // graphical fails
    CHECK(e1.output.find("facial: holds") != std::string::npos);
    CHECK(e1.output.find("graphical: fails") != std::string::npos);
    CHECK(e1.output.find("indecomposable: holds") != std::string::npos);

    RunResult a = run_cli("check --partial " + map_path("matrix_A.map"));
    CHECK(a.exit_code == 0);
    CHECK(a.output.find("partial: holds") != std::string::npos);

    RunResult e2 = run_cli("check --all " + map_path("e2.map"));
    CHECK(e2.exit_code == 1);
    CHECK(e2.output.find("graphical: holds") != std::string::npos);
    CHECK(e2.output.find("partial: fails") != std::string::npos);
    CHECK(e2.output.find("facial: fails") != std::string::npos);
}

TEST_CASE("check rejects unusable inputs with exit 2") {
    CHECK(run_cli("check --all " + map_path("no_such.map")).exit_code == 2);
    CHECK(run_cli("check " + map_path("e1.map")).exit_code == 2); // no condition selected
    CHECK(run_cli("check --facial --engine graph " + map_path("e1.map")).exit_code == 2);
}

TEST_CASE("signature prints simplified circuit text") {
    RunResult r = run_cli("signature " + map_path("e2.map"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("upper[1]: (or (x 1) (x 2))") != std::string::npos);
    CHECK(r.output.find("upper[2]: (or (x 1) (x 2))") != std::string::npos);
    CHECK(r.output.find("lower[1]: (x 1)") != std::string::npos);
    CHECK(r.output.find("lower[2]: (x 2)") != std::string::npos);

    RunResult local = run_cli("signature --point 1,2 " + map_path("e4.map"));
    CHECK(local.exit_code == 0);
    CHECK(local.output.find("upper_local[2]: (x 2)") != std::string::npos);
}

TEST_CASE("eigen converges on the second example and flags oscillation") {
    RunResult r = run_cli("eigen " + map_path("e2.map"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("eigenvalue 2") != std::string::npos);

    std::string swap_path = std::string(MTOP_MAPS_DIR) + "/../build/swap_test.map";
    {
        std::ofstream out(swap_path);
        out << "(entries (x 2) (x 1))\n";
    }
    RunResult osc = run_cli("eigen --point 2,1 --max-iter 200 " + swap_path);
    CHECK(osc.exit_code == 3);
    CHECK(osc.output.find("did not converge") != std::string::npos);
}

TEST_CASE("unique certifies and refutes per the worked examples") {
    RunResult e2 = run_cli("unique --n " + map_path("e2.map"));
    CHECK(e2.exit_code == 0);
    CHECK(e2.output.find("certified") != std::string::npos);

    RunResult e4 = run_cli("unique --n --point 1,2 " + map_path("e4.map"));
    CHECK(e4.exit_code == 1);
    CHECK(e4.output.find("refuted") != std::string::npos);
    CHECK(e4.output.find("I={1}") != std::string::npos);
    CHECK(e4.output.find("J={2}") != std::string::npos);

    RunResult both = run_cli("unique --point 1,1 " + map_path("e2.map"));
    CHECK(both.exit_code == 0);
    CHECK(both.output.find("condition (M)") != std::string::npos);
    CHECK(both.output.find("condition (N)") != std::string::npos);
}

TEST_CASE("structured output is self-delimiting") {
    RunResult r = run_cli("check --all --format structured " + map_path("matrix_A.map"));
    CHECK(r.exit_code == 1); // facial fails for the matrix example
    size_t records = 0, ends = 0, pos = 0;
    while ((pos = r.output.find("record: check", pos)) != std::string::npos) {
        ++records;
        pos += 1;
    }
    pos = 0;
    while ((pos = r.output.find("end: record", pos)) != std::string::npos) {
        ++ends;
        pos += 1;
    }
    CHECK(records == 5);
    CHECK(ends == records);
    CHECK(r.output.find("witness_J: {1}") != std::string::npos);
}

TEST_CASE("export writes DIMACS and DOT artifacts") {
    std::string dimacs = std::string(MTOP_MAPS_DIR) + "/../build/e1_indec.cnf";
    std::string dot = std::string(MTOP_MAPS_DIR) + "/../build/e1.dot";
    RunResult r = run_cli("export --indecomposable --dimacs " + dimacs + " --dot " + dot + " " + map_path("e1.map"));
    CHECK(r.exit_code == 0);

    std::ifstream in(dimacs);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("c x1 = 1\n") != std::string::npos);
    CHECK(text.find("c x3 = 3\n") != std::string::npos);
    CHECK(text.find("p cnf ") != std::string::npos);
    // the emitted encoding must round-trip
    mtop::CnfFormula parsed = mtop::parse_dimacs(text);
    CHECK(mtop::to_dimacs(parsed) == text);

    std::ifstream din(dot);
    REQUIRE(din.good());
    std::string dtext((std::istreambuf_iterator<char>(din)), std::istreambuf_iterator<char>());
    CHECK(dtext.find("digraph G {") != std::string::npos);
    CHECK(dtext.find("(final)") != std::string::npos);

    CHECK(run_cli("export --dimacs /tmp/x.cnf " + map_path("e1.map")).exit_code == 2); // no condition flag
    CHECK(run_cli("export --graphical --dimacs /tmp/x.cnf " + map_path("e1.map")).exit_code == 2);
    CHECK(run_cli("export " + map_path("nope.map") + " --dot /tmp/x.dot").exit_code == 2);
}
