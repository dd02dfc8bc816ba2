#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "maxlab/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("maxlab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    fs::path write(const std::string& name, const std::string& content) const {
        std::ofstream(dir / name) << content;
        return dir / name;
    }
    std::string read(const std::string& name) const {
        std::ifstream in(dir / name);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }
    int run(std::vector<std::string> args) const {
        args.insert(args.begin(), "maxlab");
        args.push_back("--output-dir");
        args.push_back((dir / "out").string());
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        return maxlab::cli::run(static_cast<int>(argv.size()), argv.data());
    }
    nlohmann::json report(const std::string& command) const {
        return nlohmann::json::parse(read("out/" + command + ".json"));
    }
};

}  // namespace

TEST_CASE("cli: ap reports a_2") {
    Sandbox s;
    CHECK(s.run({"ap", "--p", "2", "--tol", "1e-8"}) == 0);
    const auto j = s.report("ap");
    CHECK(j["solutions"][0]["a_p"].get<double>() == doctest::Approx(1.6119).epsilon(1e-4));
    CHECK(fs::exists(s.dir / "out/ap.meta.json"));
}

TEST_CASE("cli: reports are byte-identical across runs") {
    Sandbox s;
    CHECK(s.run({"ap", "--p", "1.5,3"}) == 0);
    const auto first = s.read("out/ap.json");
    CHECK(s.run({"ap", "--p", "1.5,3"}) == 0);
    CHECK(s.read("out/ap.json") == first);
    CHECK(first.find("timestamp") == std::string::npos);
}

TEST_CASE("cli: indicator check on the unit interval") {
    Sandbox s;
    const auto e = s.write("E.json", R"({"intervals": [[0, 1]]})");
    CHECK(s.run({"indicator-check", "--intervals", e.string(), "--p", "2"}) == 0);
    const auto j = s.report("indicator-check");
    CHECK(j["reports"][0]["lhs"].get<double>() == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(s.read("out/indicator-check_summary.csv").rfind("name,lhs,rhs,slack,pass\n", 0) == 0);
}

TEST_CASE("cli: eval writes x, Mf(x) rows") {
    Sandbox s;
    const auto f = s.write("f.json", R"({"segments": [[0, 1, 1, 1]]})");
    CHECK(s.run({"eval", "--function", f.string(), "--points", "0,0.5,2", "--op", "centered"}) == 0);
    const auto csv = s.read("out/eval.csv");
    CHECK(csv.find("0,2,0.25") != std::string::npos);
    CHECK(s.run({"eval", "--function", f.string(), "--points", "2", "--op", "uncentered"}) == 0);
    CHECK(s.read("out/eval.csv").find("0,2,0.5") != std::string::npos);
}

TEST_CASE("cli: usage errors") {
    Sandbox s;
    const auto f = s.write("f.json", R"({"segments": [[0, 1, 1, 1]]})");
    const auto bad = s.write("bad.json", R"({"segments": [[1, 2, 1, 1], [0, 1, 1, 1]]})");
    const auto overlap = s.write("E.json", R"({"intervals": [[0, 2], [1, 3]]})");
    const auto garbage = s.write("g.json", "{not json");
    CHECK(s.run({"ap", "--bogus"}) == 2);
    CHECK(s.run({"frobnicate"}) == 2);
    CHECK(s.run({"eval", "--points", "1"}) == 2);
    CHECK(s.run({"norm", "--function", bad.string()}) == 2);
    CHECK(s.run({"norm", "--function", garbage.string()}) == 2);
    CHECK(s.run({"indicator-check", "--intervals", overlap.string()}) == 2);
    CHECK(s.run({"theorem1-check", "--function", f.string(), "--p", "2.5"}) == 2);
    CHECK(s.run({"search", "--family", "spline", "--budget", "100"}) == 2);
    CHECK_FALSE(fs::exists(s.dir / "out/theorem1-check.json"));
    CHECK_FALSE(fs::exists(s.dir / "out/search.json"));
}

TEST_CASE("cli: numeric budget exit code") {
    Sandbox s;
    const auto f = s.write("f.json", R"({"segments": [[0, 1, 1, 1]]})");
    const auto cfg = s.write("cfg.json", R"({"refine_factor": 4, "tail_grid_ratio": 1.05, "tail_tol": 1e-9, "max_tail_points": 5})");
    CHECK(s.run({"growth", "--function", f.string(), "--config", cfg.string(), "--k", "3"}) == 3);
    CHECK(s.run({"gbar-check", "--n", "12"}) == 3);
    CHECK_FALSE(fs::exists(s.dir / "out/growth.json"));
}

TEST_CASE("cli: failing check exit code") {
    Sandbox s;
    // a four-cell minorant is far too coarse for the one-step bound
    CHECK(s.run({"gbar-check", "--n", "1", "--knots", "4", "--grid", "100", "--tol", "1e-9"}) == 1);
    CHECK(s.report("gbar-check")["pass"] == false);
}

TEST_CASE("cli: checks on a tent") {
    Sandbox s;
    const auto f = s.write("f.json", R"({"segments": [[-1, 0, 0, 1], [0, 1, 1, 0]]})");
    CHECK(s.run({"sunrise-check", "--function", f.string(), "--levels", "0.2,0.6"}) == 0);
    CHECK(s.run({"inclusion-check", "--function", f.string(), "--levels", "0.2", "--grid", "500"}) == 0);
    CHECK(s.run({"theorem1-check", "--function", f.string(), "--p", "1.5"}) == 0);
    CHECK(s.run({"stability-check", "--function", f.string(), "--p", "2"}) == 0);
    CHECK(s.run({"psi-check", "--function", f.string(), "--mode", "0", "--p", "2"}) == 0);
    CHECK(s.run({"norm", "--function", f.string(), "--p", "2", "--maximal"}) == 0);
    CHECK(s.report("norm")["norms"][0]["norm_p"].get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(s.run({"h-check", "--p", "2", "--delta", "0.1", "--grid", "50"}) == 0);
}

TEST_CASE("cli: search logs its seed and family") {
    Sandbox s;
    const auto cfg = s.write("cfg.json", R"({"tail_grid_ratio": 1.2, "tail_tol": 1e-7, "quad_rel_tol": 1e-8})");
    CHECK(s.run({"search", "--p", "1.5", "--family", "pwl-free", "--dof", "3", "--budget", "100", "--seed", "5",
                 "--config", cfg.string()}) == 0);
    const auto j = s.report("search");
    CHECK(j["header"]["seed"] == 5);
    CHECK(j["header"]["family"] == "pwl-free");
    CHECK(j["result"]["best_ratio"].get<double>() >= 1.31037 - 1e-6);
}
