#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef WEYLVOL_CLI_PATH
#error "WEYLVOL_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& tag) {
    return "/tmp/weylvol_cli_test_" + std::to_string(::getpid()) + "_" + tag;
}

RunResult run(const std::string& args, const std::string& env = "") {
    std::string out_file = temp_path("stdout"), err_file = temp_path("stderr");
    std::string cmd = env + (env.empty() ? "" : " ") + std::string(WEYLVOL_CLI_PATH) + " " + args +
                      " > " + out_file + " 2> " + err_file;
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    std::remove(out_file.c_str());
    std::remove(err_file.c_str());
    return r;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

}  // namespace

TEST_CASE("cli: roots table output") {
    RunResult r = run("roots --group A2");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("m=3") != std::string::npos);
    CHECK(r.out.find("[1 1]  2") != std::string::npos);
    CHECK(r.err.empty());
}

TEST_CASE("cli: roots json carries exact pairings") {
    RunResult r = run("roots --group B2 --format json");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("group") == "B2");
    CHECK(j.at("m") == 4);
    CHECK(j.at("hc_product") == "3/2");
    bool has_half = false;
    for (const auto& p : j.at("rho_pairings"))
        if (p == "1/2") has_half = true;
    CHECK(has_half);
}

TEST_CASE("cli: invalid group exits 2") {
    RunResult r = run("roots --group A0");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("error") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("cli: missing subcommand exits 2") {
    RunResult r = run("");
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: help exits 0") {
    RunResult r = run("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("verify") != std::string::npos);
}

TEST_CASE("cli: volume json matches the closed form") {
    RunResult r = run("volume --group A1 --format json");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("hc_product_exact") == "1");
    double vol = j.at("group_volume").get<double>();
    CHECK(std::abs(vol - 55.83091359711102) < 1e-10);
}

TEST_CASE("cli: cartan file input") {
    std::string path = temp_path("cartan.json");
    write_file(path, "{\"cartan\": [[2,-2],[-1,2]], \"scale\": [\"1\"]}");
    RunResult r = run("volume --cartan-file " + path + " --format json");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("group") == "B2");
    CHECK(j.at("hc_product_exact") == "3/2");
    std::remove(path.c_str());
}

TEST_CASE("cli: non-finite cartan file exits 2") {
    std::string path = temp_path("affine.json");
    write_file(path, "{\"cartan\": [[2,-2],[-2,2]]}");
    RunResult r = run("roots --cartan-file " + path);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("finite type") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("cli: malformed json exits 2") {
    std::string path = temp_path("broken.json");
    write_file(path, "{\"cartan\": [[2,");
    RunResult r = run("roots --cartan-file " + path);
    CHECK(r.exit_code == 2);
    std::remove(path.c_str());
}

TEST_CASE("cli: scale count mismatch exits 2") {
    RunResult r = run("volume --group A2 --scale 2 --scale 3");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("scale") != std::string::npos);
}

TEST_CASE("cli: weyl-law verification passes for A1") {
    RunResult r = run("verify weyl-law --group A1 --format json");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("group") == "A1");
    CHECK(j.at("rel_error").get<double>() < 0.01);
    CHECK(j.contains("slope"));
    CHECK(j.at("samples").size() == 8);
}

TEST_CASE("cli: custom grid flags are honored") {
    RunResult r = run("verify weyl-law --group A1 --t-start 0.04 --t-stop 0.004 --t-points 6 "
                      "--format json");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("t_grid").size() == 6);
    CHECK(j.at("t_grid")[0].get<double>() == 0.04);
}

TEST_CASE("cli: oversized group falls back to formulas only") {
    RunResult r = run("verify weyl-law --group E8");
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("formula-only") != std::string::npos);
    CHECK(r.out.find("formula-only") != std::string::npos);
    CHECK(r.out.find("vol(G)") != std::string::npos);
}

TEST_CASE("cli: out-of-scope integration formula exits 2 when explicit") {
    RunResult r = run("verify integration-formula --group D4");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("scope") != std::string::npos);
}

TEST_CASE("cli: verify all on A1") {
    RunResult r = run("verify all --group A1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("weyl-law") != std::string::npos);
    CHECK(r.out.find("integration-formula") != std::string::npos);
    CHECK(r.out.find("all checks passed") != std::string::npos);
}

TEST_CASE("cli: euler-maclaurin suite") {
    RunResult r = run("verify euler-maclaurin --format json");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("all_pass").get<bool>());
}

TEST_CASE("cli: csv output has the documented header") {
    RunResult r = run("verify weyl-law --group A1 --format csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("t,z,scaled,cutoff_radius,terms_used,tail_estimate\n", 0) == 0);
    int lines = 0;
    for (char c : r.out)
        if (c == '\n') ++lines;
    CHECK(lines == 9);  // header + 8 samples
}

TEST_CASE("cli: --out writes the payload to a file") {
    std::string path = temp_path("payload.json");
    RunResult r = run("volume --group A2 --format json --out " + path);
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    nlohmann::json j = nlohmann::json::parse(slurp(path));
    CHECK(j.at("group") == "A2");
    std::remove(path.c_str());
}

TEST_CASE("cli: thread count does not change output bytes") {
    std::string a = run("verify weyl-law --group A1 --format json", "WEYLVOL_THREADS=1").out;
    std::string b = run("verify weyl-law --group A1 --format json", "WEYLVOL_THREADS=4").out;
    CHECK(!a.empty());
    CHECK(a == b);
}
