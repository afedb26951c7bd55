#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(PROPHET_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof buf, p)) r.out.append(buf, got);
    const int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("help lists flags with defaults") {
    const Run top = cli("--help");
    CHECK(top.code == 0);
    for (const char* sub : {"theta", "gamma", "dp", "certify", "ssap", "simulate", "table1"})
        CHECK(top.out.find(sub) != std::string::npos);
    const Run g = cli("gamma --help");
    CHECK(g.out.find("--grid") != std::string::npos);
    CHECK(g.out.find("[256]") != std::string::npos);
    const Run t = cli("theta --help");
    CHECK(t.out.find("--m") != std::string::npos);
    CHECK(t.out.find("[200000]") != std::string::npos);
    const Run s = cli("simulate --help");
    CHECK(s.out.find("--seed") != std::string::npos);
    CHECK(s.out.find("--threads") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(cli("gamma --n 2 --k 3").code == 1);
    CHECK(cli("dp --n 2 --k 1 --dist cauchy").code == 1);
    CHECK(cli("theta --k abc").code == 1);
    CHECK(cli("nosuchcommand").code == 1);
    CHECK(cli("certify --n 10 --k 5").code == 3);
    CHECK(cli("certify --n 2000 --k 2 --atoms log").code == 2);
    CHECK(cli("certify --n 2000 --k 1").code == 0);
}

TEST_CASE("theta output") {
    const Run r = cli("theta --k 2 --m 20000 --no-richardson");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["command"] == "theta");
    const auto th = j["result"]["theta"];
    CHECK(std::abs(th[0].get<double>() - 0.346) < 2e-3);
    CHECK(std::abs(th[1].get<double>() - 0.483) < 2e-3);
    const Run c = cli("theta --k 2 --m 1000 --no-richardson --format csv --stride 500");
    CHECK(c.out.rfind("t,Y_1,Y_2\n", 0) == 0);
}

TEST_CASE("dp and ssap json") {
    const auto d = nlohmann::json::parse(cli("dp --n 2 --k 1").out);
    CHECK(std::abs(d["result"]["ratio"].get<double>() - 0.9375) < 1e-9);
    const auto s = nlohmann::json::parse(cli("ssap --n 2 --rewards 0,1").out);
    CHECK(std::abs(s["result"]["value"].get<double>() - 0.625) < 1e-12);
}

TEST_CASE("outputs are byte identical across runs") {
    const std::string a = cli("simulate --n 4 --k 2 --dist exponential --reps 20000 --seed 9 --policy all").out;
    const std::string b = cli("simulate --n 4 --k 2 --dist exponential --reps 20000 --seed 9 --policy all --threads 1").out;
    CHECK_FALSE(a.empty());
    CHECK(a == b);
    CHECK(cli("gamma --n 2 --k 1 -M 32").out == cli("gamma --n 2 --k 1 -M 32").out);
}

TEST_CASE("output destinations") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::absolute("cli_out_dir");
    fs::remove_all(dir);
    fs::create_directories(dir);
    const Run r = cli("dp --n 3 --k 2 --format csv", "PROPHET_OUT_DIR=" + dir.string());
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    const std::string body = slurp((dir / "dp.csv").string());
    CHECK(body.rfind("t,l,A,q\n", 0) == 0);
    const std::string explicit_path = (dir / "mine.json").string();
    CHECK(cli("dp --n 3 --k 2 --out " + explicit_path, "PROPHET_OUT_DIR=" + dir.string()).code == 0);
    CHECK(nlohmann::json::parse(slurp(explicit_path))["command"] == "dp");
    CHECK(cli("dp --n 3 --k 2 --out /nonexistent/dir/x.json").code == 1);
}
