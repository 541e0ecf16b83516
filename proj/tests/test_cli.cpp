#include "test_util.hpp"

#include "palmtex/descriptors.hpp"
#include "palmtex/manifest.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sys/wait.h>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

RunResult run_cli(const std::string& args, const TempDir& scratch) {
    const auto err = scratch / "stderr.txt";
    const std::string cmd = std::string("\"") + PALMTEX_CLI_PATH + "\" " + args + " >/dev/null 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

std::string strip_metadata(const std::filesystem::path& report) {
    auto j = nlohmann::ordered_json::parse(slurp(report));
    j.erase("metadata");
    return j.dump();
}

}  // namespace

TEST_CASE("cli exit codes") {
    TempDir dir("cli");
    const std::string d = dir.path().string();

    CHECK(run_cli("", dir).exit_code == 1);
    CHECK(run_cli("evaluate --manifest x.csv", dir).exit_code == 1);  // --seed missing
    CHECK(run_cli("frobnicate", dir).exit_code == 1);

    REQUIRE(run_cli("synth --out-dir " + d + "/one --subjects 3 --samples 6 --sessions 1 --side 64 --seed 2", dir).exit_code == 0);
    REQUIRE(run_cli("synth --out-dir " + d + "/two --subjects 3 --samples 6 --sessions 2 --side 64 --seed 2", dir).exit_code == 0);

    SUBCASE("session split on a one-session manifest") {
        const auto r = run_cli("evaluate -d lbp --manifest " + d + "/one/manifest.csv --protocol session_split --seed 1 --out-dir " + d + "/o", dir);
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("session 2") != std::string::npos);
    }
    SUBCASE("too few samples for the template count") {
        CHECK(run_cli("evaluate -d lbp --manifest " + d + "/one/manifest.csv --templates 6 --seed 1 --out-dir " + d + "/o", dir).exit_code == 1);
    }
    SUBCASE("bsif without a bank") {
        CHECK(run_cli("evaluate --manifest " + d + "/one/manifest.csv --seed 1", dir).exit_code == 1);
    }
    SUBCASE("missing image is a runtime failure naming the row") {
        auto rows = palmtex::read_manifest(d + "/one/manifest.csv");
        rows[2].path = dir / "nowhere.pgm";
        palmtex::write_manifest(rows, dir / "broken.csv");
        const auto r = run_cli("evaluate -d lbp --manifest " + (dir / "broken.csv").string() + " --templates 2 --seed 1 --out-dir " + d + "/o", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("manifest row 3") != std::string::npos);
        CHECK(r.err.find("nowhere.pgm") != std::string::npos);
    }
    SUBCASE("evaluate, session split succeeds") {
        const auto r = run_cli("evaluate -d ldp --manifest " + d + "/two/manifest.csv --protocol session_split --seed 1 --out-dir " + d + "/ss", dir);
        CHECK(r.exit_code == 0);
        const auto j = nlohmann::json::parse(slurp(dir / "ss/report.json"));
        CHECK(j["runs"].size() == 2);
        CHECK(j["runs"][0]["genuine_scores"] == 3 * 3);
    }
    SUBCASE("learn-filters and extract") {
        REQUIRE(run_cli("learn-filters --corpus " + d + "/two -k 8 -s 17 --patches 2000 --seed 4 --out " + d + "/bank.txt", dir).exit_code == 0);
        std::ifstream in(dir / "bank.txt");
        std::string a, b, c;
        in >> a >> b >> c;
        CHECK(a + " " + b + " " + c == "BSIF 8 17");
        CHECK(palmtex::FilterBank::load(dir / "bank.txt").count() == 8);
        CHECK(run_cli("extract --manifest " + d + "/two/manifest.csv --filter-bank " + d + "/bank.txt --out " + d + "/f.csv", dir).exit_code == 0);
        std::ifstream f(dir / "f.csv");
        int lines = 0;
        for (std::string l; std::getline(f, l);) ++lines;
        CHECK(lines == 18);
        CHECK(run_cli("extract --manifest " + d + "/two/manifest.csv --filter-bank " + d + "/bank.txt --out " + d + "/g.csv", dir).exit_code == 0);
        CHECK(slurp(dir / "f.csv") == slurp(dir / "g.csv"));
        REQUIRE(run_cli("learn-filters --corpus " + d + "/two -k 1 -s 9 --patches 500 --seed 4 --out " + d + "/k1.txt", dir).exit_code == 0);
        REQUIRE(run_cli("learn-filters --corpus " + d + "/two -k 1 -s 9 --patches 500 --seed 4 --out " + d + "/k1b.txt", dir).exit_code == 0);
        CHECK(palmtex::FilterBank::load(dir / "k1.txt").count() == 1);
        CHECK(slurp(dir / "k1.txt") == slurp(dir / "k1b.txt"));
        std::filesystem::create_directories(dir / "empty");
        CHECK(run_cli("learn-filters --corpus " + d + "/empty --seed 4 --out " + d + "/b2.txt", dir).exit_code == 1);
    }
    SUBCASE("reports are reproducible") {
        const std::string base = "evaluate -d lbp --manifest " + d + "/one/manifest.csv --templates 2 --repetitions 3 --seed 9 ";
        REQUIRE(run_cli("-j 1 " + base + "--out-dir " + d + "/r1", dir).exit_code == 0);
        REQUIRE(run_cli("-j 3 " + base + "--out-dir " + d + "/r2", dir).exit_code == 0);
        CHECK(strip_metadata(dir / "r1/report.json") == strip_metadata(dir / "r2/report.json"));
        CHECK(slurp(dir / "r1/roc.csv") == slurp(dir / "r2/roc.csv"));
        CHECK(slurp(dir / "r1/cmc.csv") == slurp(dir / "r2/cmc.csv"));
    }
}
