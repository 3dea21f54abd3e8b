#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <string>

#include "helpers.hpp"
#include "json.hpp"
#include "multiree/entropy.hpp"
#include "multiree/io.hpp"
#include "multiree/separable.hpp"

using namespace multiree;
using namespace multiree::test;

namespace {

std::string tmpdir() {
    static std::string dir = [] {
        std::string d = "/tmp/multiree_io_test";
        std::system(("mkdir -p " + d).c_str());
        return d;
    }();
    return dir;
}

std::string cli_path() {
    const char* p = std::getenv("MULTIREE_CLI");
    return p ? p : "";
}

int run_cli(const std::string& args, const std::string& out_file = "") {
    std::string cmd = cli_path() + " " + args;
    if (!out_file.empty()) cmd += " > " + out_file;
    cmd += " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

nlohmann::json load_json(const std::string& path) { return nlohmann::json::parse(read_text_file(path)); }

}  // namespace

TEST_CASE("matrix round trip is lossless and stable") {
    RandomStream rng(5);
    CMatrix m = random_density(6, 4, rng);
    SubsystemLayout ly({2, 3});
    std::string text = matrix_to_json(m, ly);
    LoadedMatrix back = matrix_from_json(text);
    CHECK(back.layout.dims == ly.dims);
    CHECK(back.matrix.re_data() == m.re_data());
    CHECK(back.matrix.im_data() == m.im_data());
    // re-serialization is byte-identical
    CHECK(matrix_to_json(back.matrix, back.layout) == text);
}

TEST_CASE("ensemble round trip") {
    SubsystemLayout ly({2, 3});
    ProductEnsemble e = random_separable(ly, 4, uint64_t{9});
    std::string text = ensemble_to_json(e);
    ProductEnsemble back = ensemble_from_json(text);
    CHECK(back.atoms.size() == e.atoms.size());
    CHECK(max_entry_diff(assemble(back), assemble(e)) == 0.0);
    CHECK(ensemble_to_json(back) == text);
}

TEST_CASE("hamiltonian parsing: levels and oscillator") {
    HamiltonianSpec h = hamiltonian_from_json(R"({"version":1,"eigenvalues":[0.0,1.0,2.5]})");
    CHECK(h.levels() == 3);
    CHECK(h.e0() == 0.0);

    HamiltonianSpec osc = hamiltonian_from_json(
        R"({"version":1,"oscillator":{"l":1,"omegas":[1.0],"hbar":1.0},"truncation":5})");
    CHECK(osc.levels() == 5);
    CHECK(osc.eigenvalues[0] == doctest::Approx(0.5));
    CHECK(osc.eigenvalues[4] == doctest::Approx(4.5));

    CHECK_THROWS_AS(hamiltonian_from_json(R"({"version":1})"), validation_error);
    CHECK_THROWS_AS(hamiltonian_from_json(R"({"version":1,"eigenvalues":[1.0,0.0]})"),
                    validation_error);
}

TEST_CASE("matrix file validation errors") {
    CHECK_THROWS_AS(matrix_from_json(R"({"version":2,"dims":[2],"re":[[0,0],[0,0]],"im":[[0,0],[0,0]]})"),
                    validation_error);
    CHECK_THROWS_AS(matrix_from_json(R"({"version":1,"dims":[2],"re":[[0,0]],"im":[[0,0]]})"),
                    validation_error);
}

TEST_CASE("cli: entropy subcommand on a Bell state") {
    if (cli_path().empty()) return;  // library-only build
    std::string state = tmpdir() + "/bell.json";
    save_matrix(state, bell_state().projector(), SubsystemLayout({2, 2}));

    std::string out = tmpdir() + "/entropy.json";
    REQUIRE(run_cli("entropy " + state + " --layout 2,2", out) == 0);
    CHECK(load_json(out)["value"].get<double>() == doctest::Approx(0.0).epsilon(1e-9));

    REQUIRE(run_cli("entropy " + state + " --layout 2,2 --qmi", out) == 0);
    CHECK(load_json(out)["value"].get<double>() == doctest::Approx(2.0 * std::log(2.0)));

    REQUIRE(run_cli("entropy " + state + " --layout 2,2 --cond 'A|B'", out) == 0);
    CHECK(load_json(out)["value"].get<double>() == doctest::Approx(-std::log(2.0)));
}

TEST_CASE("cli: validation failures exit with code 2") {
    if (cli_path().empty()) return;
    CHECK(run_cli("entropy /nonexistent.json") == 2);
    std::string state = tmpdir() + "/bell2.json";
    save_matrix(state, bell_state().projector(), SubsystemLayout({2, 2}));
    CHECK(run_cli("entropy " + state + " --layout 3,2") == 2);
    CHECK(run_cli("truncate " + state + " --layout 2,2 --subset 1 --f nope --rmax 2") == 2);
}

TEST_CASE("cli: ree on Bell state emits a certified result file") {
    if (cli_path().empty()) return;
    std::string state = tmpdir() + "/bell3.json";
    save_matrix(state, bell_state().projector(), SubsystemLayout({2, 2}));
    std::string out = tmpdir() + "/ree.json";
    REQUIRE(run_cli("ree " + state + " --layout 2,2 --seed 0 --out " + out) == 0);
    nlohmann::json j = load_json(out);
    CHECK(std::abs(j["value"].get<double>() - std::log(2.0)) < 2e-3);
    CHECK(j["gap"].get<double>() <= 1e-3);
    CHECK(j["converged"].get<bool>());
}

TEST_CASE("cli: truncate emits the documented csv header") {
    if (cli_path().empty()) return;
    std::string state = tmpdir() + "/ghz.json";
    save_matrix(state, ghz_state(3).projector(), SubsystemLayout({2, 2, 2}));
    std::string out = tmpdir() + "/table.csv";
    REQUIRE(run_cli("truncate " + state + " --layout 2,2,2 --subset 1,2,3 --f qmi --rmax 2", out) == 0);
    std::string text = read_text_file(out);
    CHECK(text.rfind("r,c_r,delta_r,value,bound,valid_regime\n", 0) == 0);
    // rank-2 marginals: exact at r = 2
    std::stringstream ss(text);
    std::string line, last;
    while (std::getline(ss, line))
        if (!line.empty()) last = line;
    std::stringstream row(last);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 6);
    CHECK(fields[0] == "2");
    CHECK(std::stod(fields[1]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(std::stod(fields[2])) < 1e-7);
    CHECK(std::stod(fields[3]) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-7));
}

TEST_CASE("cli: bounds finite scalar and sweep") {
    if (cli_path().empty()) return;
    std::string out = tmpdir() + "/bounds.json";
    REQUIRE(run_cli("bounds finite --epsilon 0 --dims 2", out) == 0);
    CHECK(load_json(out)["value"].get<double>() == 0.0);

    std::string csv = tmpdir() + "/sweep.csv";
    REQUIRE(run_cli("bounds oscillator --epsilon 0.01 --energy 2 --t 5 --l 1 --omegas 1 --m 1 --n 2 "
                    "--sweep epsilon=0.01:0.1:5",
                    csv) == 0);
    std::string text = read_text_file(csv);
    CHECK(text.rfind("epsilon,t,E,value", 0) == 0);
    CHECK(text.find("term1") != std::string::npos);
}

TEST_CASE("cli: gibbs and fa-check") {
    if (cli_path().empty()) return;
    std::string ham = tmpdir() + "/qubit.json";
    write_text_file(ham, R"({"version":1,"eigenvalues":[0.0,1.0]})");
    std::string out = tmpdir() + "/gibbs.json";
    REQUIRE(run_cli("gibbs --ham " + ham + " --energy 0.25", out) == 0);
    CHECK(load_json(out)["beta"].get<double>() == doctest::Approx(std::log(3.0)).epsilon(1e-7));

    REQUIRE(run_cli("fa-check --spectrum model:geometric:0.5 --weights model:lnpow:3 --terms 500", out) == 0);
    CHECK(load_json(out)["overall"].get<std::string>() == "holds");

    REQUIRE(run_cli("fa-check --spectrum model:geometric:0.5 --weights model:lnpow:1 --terms 500", out) == 0);
    CHECK(load_json(out)["overall"].get<std::string>() == "fails");
}

TEST_CASE("cli: lemma-omega writes an ensemble and the bound check") {
    if (cli_path().empty()) return;
    std::string state = tmpdir() + "/ghz2.json";
    save_matrix(state, ghz_state(3).projector(), SubsystemLayout({2, 2, 2}));
    std::string ens = tmpdir() + "/ens.json";
    std::string out = tmpdir() + "/lemma.json";
    REQUIRE(run_cli("lemma-omega " + state + " --layout 2,2,2 --out " + ens, out) == 0);
    nlohmann::json j = load_json(out);
    CHECK(j["atoms"].get<int>() == 2);
    CHECK(j["rel_entropy"].get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-8));
    ProductEnsemble e = load_ensemble(ens);
    CHECK(e.atoms.size() == 2);
}

TEST_CASE("cli: byte-identical reruns with the same seed") {
    if (cli_path().empty()) return;
    std::string state = tmpdir() + "/bd.json";
    RandomStream rng(12);
    save_matrix(state, random_density(4, 4, rng), SubsystemLayout({2, 2}));
    std::string o1 = tmpdir() + "/r1.json", o2 = tmpdir() + "/r2.json";
    REQUIRE(run_cli("ree " + state + " --layout 2,2 --seed 7 --out " + o1) == 0);
    REQUIRE(run_cli("ree " + state + " --layout 2,2 --seed 7 --out " + o2) == 0);
    CHECK(read_text_file(o1) == read_text_file(o2));
}
