#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

/// Locates the lzctl binary (via the LZCTL environment variable set by
/// the test harness) and a scratch directory, and pins
/// SOURCE_DATE_EPOCH so manifests are reproducible across runs.
struct CliEnv {
    std::string exe;
    std::string dir;

    CliEnv() {
        if (const char* e = std::getenv("LZCTL")) exe = e;
        setenv("SOURCE_DATE_EPOCH", "1500000000", 1);
        char tmpl[] = "/tmp/lzctl_cli_XXXXXX";
        if (char* d = mkdtemp(tmpl)) dir = d;
    }
};

CliEnv& env() {
    static CliEnv e;
    return e;
}

std::string path(const std::string& name) { return env().dir + "/" + name; }

/// Runs `lzctl <args>` with stdout/stderr captured; returns the exit code.
int run_cli(const std::string& args) {
    REQUIRE_FALSE(env().exe.empty());
    REQUIRE_FALSE(env().dir.empty());
    const std::string cmd = env().exe + " " + args + " > " + path("stdout.txt") +
                            " 2> " + path("stderr.txt");
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& file_path) {
    std::ifstream in(file_path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("exit codes: help and argument errors") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("scan --help") == 0);
    CHECK(run_cli("") == 2);             // a subcommand is required
    CHECK(run_cli("frobnicate") == 2);   // unknown subcommand
    CHECK(run_cli("scan --N 3") == 2);   // scans are 1-D or 2-D only
    CHECK(run_cli("optimize --objective gate --gate bogus") == 2);
    // Non-normalized states are rejected, not silently normalized.
    CHECK(run_cli("optimize --i 0.5,0,0.5,0") == 2);
}

TEST_CASE("scan: 1-D CSV structure and closed-form footer") {
    REQUIRE(run_cli("scan --N 1 --T 10 --range -3:3 --res 601 --out " +
                    path("scan1.csv")) == 0);
    const auto lines = lines_of(slurp(path("scan1.csv")));
    REQUIRE(lines.size() == 604);  // manifest + header + 601 rows + footer
    CHECK(lines[0].rfind("# manifest {", 0) == 0);
    CHECK(lines[1] == "a1,J,closed_form");
    const std::string footer_key = "# max_closed_form_discrepancy=";
    REQUIRE(lines.back().rfind(footer_key, 0) == 0);
    const double disc = std::stod(lines.back().substr(footer_key.size()));
    CHECK(disc < 1e-12);
}

TEST_CASE("scan: 2-D CSV structure") {
    REQUIRE(run_cli("scan --N 2 --T 10 --range -2:2 --res 5 --res2 5 --out " +
                    path("scan2.csv")) == 0);
    const auto lines = lines_of(slurp(path("scan2.csv")));
    REQUIRE(lines.size() == 27);  // manifest + header + 25 rows
    CHECK(lines[1] == "a1,a2,J");
}

TEST_CASE("trap-prob: identical commands produce identical bytes, and replay works") {
    const std::string flags = "trap-prob --N 1,2 --T 10 --runs 3 --seed 9 --out ";
    REQUIRE(run_cli(flags + path("tp_a.csv")) == 0);
    const std::string first = slurp(path("tp_a.csv"));
    REQUIRE(run_cli(flags + path("tp_a.csv")) == 0);
    CHECK(first == slurp(path("tp_a.csv")));

    // A different --out changes only the argv echo in the manifest;
    // every data line and all other manifest fields must match.
    REQUIRE(run_cli(flags + path("tp_b.csv")) == 0);
    const auto lines_a = lines_of(first);
    const auto lines_b = lines_of(slurp(path("tp_b.csv")));
    REQUIRE(lines_a.size() == lines_b.size());
    CHECK(std::equal(lines_a.begin() + 1, lines_a.end(), lines_b.begin() + 1));
    auto manifest_of = [](const std::string& line) {
        auto doc = nlohmann::json::parse(line.substr(line.find('{')));
        doc.erase("argv");
        return doc;
    };
    CHECK(manifest_of(lines_a[0]) == manifest_of(lines_b[0]));

    REQUIRE(run_cli("replay --manifest " + path("tp_a.csv") + " --out " +
                    path("tp_c.csv")) == 0);
    CHECK(first == slurp(path("tp_c.csv")));
}

TEST_CASE("trap-prob: per-run records dump") {
    REQUIRE(run_cli("trap-prob --N 2 --runs 3 --seed 4 --out " + path("tp.csv") +
                    " --dump-records " + path("tpr.json")) == 0);
    const auto doc = nlohmann::json::parse(slurp(path("tpr.json")));
    REQUIRE(doc.contains("records"));
    REQUIRE(doc["records"].size() == 3);
    for (const auto& rec : doc["records"]) {
        CHECK(rec["n"] == 2);
        CHECK(rec["initial_amplitudes"].size() == 2);
    }
}

TEST_CASE("optimize: converged run, pulse round trip into noise") {
    REQUIRE(run_cli("optimize --N 6 --T 10 --seed 7 --out " + path("opt.json") +
                    " --pulse-out " + path("pulse.json")) == 0);
    const auto doc = nlohmann::json::parse(slurp(path("opt.json")));
    const auto& rec = doc["record"];
    CHECK(rec["termination"] == "Converged");
    CHECK(rec["classification"] == "GlobalMax");
    CHECK(rec["final_objective"].get<double>() > 0.999);
    CHECK(rec["final_amplitudes"].size() == 6);

    REQUIRE(run_cli("noise --pulse " + path("pulse.json") +
                    " --kind additive --sigma 0.01 --samples 16 --seed 3 --out " +
                    path("noise.csv")) == 0);
    const auto lines = lines_of(slurp(path("noise.csv")));
    REQUIRE(lines.size() == 3);  // manifest + header + one sigma row
    CHECK(lines[1] ==
          "sigma,kind,predicted_decrease,bound,energy,baseline,mc_mean,"
          "mc_stderr,samples");
}

TEST_CASE("optimize: the zero control is reported as the zero-control critical point") {
    REQUIRE(run_cli("optimize --N 4 --T 10 --init 0,0,0,0 --out " +
                    path("opt0.json")) == 0);
    const auto doc = nlohmann::json::parse(slurp(path("opt0.json")));
    CHECK(doc["record"]["classification"] == "ZeroControl");
    CHECK(doc["record"]["iterations"] == 0);
}

TEST_CASE("optimize: iteration cap maps to exit code 6") {
    CHECK(run_cli("optimize --N 4 --T 10 --init 2,2,2,2 --max-iter 1 --out " +
                  path("optcap.json")) == 6);
}

TEST_CASE("noise: unreadable or malformed pulse files map to exit code 4") {
    CHECK(run_cli("noise --pulse " + path("missing.json") + " --sigma 0.01") ==
          4);
    std::ofstream(path("corrupt.json")) << "{ not json";
    CHECK(run_cli("noise --pulse " + path("corrupt.json") + " --sigma 0.01") ==
          4);
    std::ofstream(path("wrong.json")) << "{\"schema\": \"other\"}";
    CHECK(run_cli("noise --pulse " + path("wrong.json") + " --sigma 0.01") == 4);
}

TEST_CASE("qsl: prints the pi/2 speed limit for the basis flip") {
    REQUIRE(run_cli("qsl --i 0 --f 1 --delta 1 --out " + path("qsl.json")) == 0);
    const auto doc = nlohmann::json::parse(slurp(path("qsl.json")));
    CHECK(doc["T_qsl"].get<double>() ==
          doctest::Approx(M_PI / 2.0).epsilon(1e-15));
}

TEST_CASE("appendix: runs at the default horizon, rejects T < pi") {
    REQUIRE(run_cli("appendix --out " + path("app.json")) == 0);
    const auto doc = nlohmann::json::parse(slurp(path("app.json")));
    CHECK(doc["alpha"].get<double>() ==
          doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
    REQUIRE(doc["variations"].size() == 2);
    CHECK(doc["variations"][0]["name"] == "indicator_0_pi");
    // The analytic quadrature and the nonlinear propagation oracle
    // agree with each other to high precision.
    for (const auto& v : doc["variations"]) {
        const double dj2 = v["dJ2_quadrature"].get<double>();
        const double rich = v["dJ2_nonlinear"].get<double>();
        CHECK(std::abs(dj2 - rich) <= 1e-3 * std::abs(dj2));
    }

    CHECK(run_cli("appendix --T 2") == 2);
}

TEST_CASE("stdout output equals file output apart from the recorded argv") {
    REQUIRE(run_cli("qsl --i 0 --f + --delta 2") == 0);
    const auto doc = nlohmann::json::parse(slurp(path("stdout.txt")));
    CHECK(doc["T_qsl"].get<double>() ==
          doctest::Approx(M_PI / 8.0).epsilon(1e-14));
}
