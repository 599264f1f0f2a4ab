#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"

// End-to-end exit-code contract of the command-line tool:
//   0 all satisfied, 1 violation found, 2 usage/parse/prerequisite, 3 resource.

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
    std::string command = std::string(TAMC_BINARY_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string corpus(const std::string& name) { return tamc_test::corpus_path(name); }

fs::path scratch() {
    fs::path dir = fs::temp_directory_path() / "tamc_cli_test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("check exit codes reflect the verdict") {
    CHECK(run("check " + corpus("casestudy.ta") + " " + corpus("collision.prop")) == 1);

    // The compliant pedestrian closed loop is satisfied.
    fs::path model = scratch() / "safe_loop.ta";
    {
        tamc::Network context = tamc_test::load_corpus_model("context.ta");
        tamc::Network ped = tamc_test::load_corpus_model("pedestrian0_2.ta");
        std::ofstream out(model);
        out << tamc::unparse_model(tamc::compose(context, ped.automata[0]));
    }
    CHECK(run("check " + model.string() + " " + corpus("collision.prop")) == 0);
}

TEST_CASE("missing and malformed inputs exit with 2") {
    CHECK(run("check /nonexistent/missing.ta " + corpus("collision.prop")) == 2);
    fs::path bad = scratch() / "bad.prop";
    std::ofstream(bad) << "E<> P.Crossing\n";
    CHECK(run("check " + corpus("casestudy.ta") + " " + bad.string()) == 2);
}

TEST_CASE("exhausting the state cap exits with 3, never a verdict") {
    CHECK(run("check " + corpus("casestudy.ta") + " " + corpus("collision.prop") +
              " --max-states 3") == 3);
}

TEST_CASE("TAMC_MAX_STATES provides the default cap") {
    std::string command = "TAMC_MAX_STATES=3 " + std::string(TAMC_BINARY_PATH) + " check " +
                          corpus("casestudy.ta") + " " + corpus("collision.prop") +
                          " > /dev/null 2>&1";
    int status = std::system(command.c_str());
    CHECK(WEXITSTATUS(status) == 3);
}

TEST_CASE("oracle include distinguishes the widening direction") {
    fs::path narrow = scratch() / "narrow.ta";
    fs::path wide = scratch() / "wide.ta";
    std::ofstream(narrow) << tamc::unparse_model(tamc_test::speaker(5, 10));
    std::ofstream(wide) << tamc::unparse_model(tamc_test::speaker(3, 13));
    CHECK(run("oracle include " + narrow.string() + " " + wide.string() +
              " --horizon 20 --step 1") == 0);
    CHECK(run("oracle include " + wide.string() + " " + narrow.string() +
              " --horizon 20 --step 1/2") == 1);
}

TEST_CASE("abstract applies a single rule from the command line") {
    fs::path out = scratch() / "widened.ta";
    CHECK(run("abstract " + corpus("pedestrian0_2.ta") +
              " --rule r1 --inv-delta 'P.Crossing t 6' --guard-delta 'P.Crossing->Idle#0 t 1'"
              " -o " +
              out.string()) == 0);
    tamc::Network widened = tamc_test::parse_ok(tamc_test::read_file(out.string()), "widened");
    auto iv = tamc::enabled_interval(widened.automata[0], "P.Crossing->Idle#0").at(0);
    CHECK(iv.lower == 0);
    CHECK(*iv.upper == 10);

    CHECK(run("abstract " + corpus("pedestrian0_2.ta") + " --rule r3 --channel greenP -o " +
              (scratch() / "erased.ta").string()) == 0);
    CHECK(run("abstract " + corpus("pedestrian0_2.ta") + " --rule r3 --channel greenC -o " +
              (scratch() / "bad.ta").string()) == 2);
}

TEST_CASE("tree build, traverse and refine round-trip through files") {
    fs::path dir = scratch();
    fs::path tree = dir / "tree.json";
    fs::path annotated = dir / "annotated.json";
    fs::path refinements = dir / "refinements";

    CHECK(run("tree build " + corpus("crossing.plan") + " -o " + tree.string()) == 0);
    CHECK(run("tree traverse " + tree.string() + " " + corpus("context.ta") + " " +
              corpus("collision.prop") + " --save-tree " + annotated.string()) == 1);
    CHECK(run("tree traverse " + tree.string() + " " + corpus("safecar.ta") + " " +
              corpus("collision.prop") + " --jobs 2") == 0);
    CHECK(run("refine " + annotated.string() + " Pedestrian1_2 -o " + refinements.string()) ==
          0);
    CHECK(fs::exists(refinements / "Pedestrian1_2_refine_1.ta"));
    // Refining an unannotated tree is a prerequisite error.
    CHECK(run("refine " + tree.string() + " Pedestrian1_2 -o " + refinements.string()) == 2);
}
