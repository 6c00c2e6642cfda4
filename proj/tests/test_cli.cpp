#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mcascade/cli.hpp"

using namespace mcascade;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("mcascade_cli_" + std::to_string(std::rand()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    std::string model(const std::string& name, const std::string& text) const {
        const fs::path p = dir / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string out(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const char* kLognormal = "kind = lognormal\nbase = 2\nalpha = 1\nbeta = 0.25\n";
const char* kFractional = "kind = fractional\nbase = 2\nalpha = 0.75\n";

}  // namespace

TEST_CASE("predict writes the KPZ table") {
    Sandbox s;
    const Result r = run({"predict", "--model", s.model("e1.txt", kLognormal), "--xi0-grid", "65", "--out", s.out("p")});
    REQUIRE(r.code == 0);
    std::istringstream csv(slurp(fs::path(s.out("p")) / "predict.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "xi0,xi,zeta,xistar,predicted_dim,branch");
    int rows = 0;
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        std::string a, b;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        const double xi0 = std::stod(a), xi = std::stod(b);
        CHECK(std::abs(xi0 - xi - 0.25 * xi * (1 - xi)) < 1e-8);
        ++rows;
    }
    CHECK(rows == 65);
    const auto manifest = nlohmann::json::parse(slurp(fs::path(s.out("p")) / "predict.manifest.json"));
    CHECK(manifest["command"] == "predict");
    CHECK(manifest["model_digest"].get<std::string>().size() == 16);
    CHECK(manifest.contains("wall_time_s"));
    CHECK(manifest["config"]["xi0_grid"].size() == 65);
}

TEST_CASE("check-model reports assumption failures") {
    Sandbox s;
    const Result bad =
        run({"check-model", "--model", s.model("bad.txt", "kind = lognormal\nbase = 2\nalpha = 0.7\nbeta = 0.25\n"),
             "--out", s.out("c")});
    CHECK(bad.code == kExitAssumption);
    const auto report = nlohmann::json::parse(bad.out);
    CHECK(report["a1_ok"] == false);
    const Result good = run({"check-model", "--model", s.model("good.txt", kFractional), "--out", s.out("c")});
    CHECK(good.code == 0);
    CHECK(nlohmann::json::parse(good.out)["ok"] == true);
    // other commands refuse the model unless forced
    const Result refused = run({"predict", "--model", s.model("bad.txt", "kind = lognormal\nbase = 2\nalpha = 0.7\nbeta = 0.25\n"),
                                "--out", s.out("c")});
    CHECK(refused.code == kExitAssumption);
    CHECK(nlohmann::json::parse(refused.err)["kind"] == "assumption");
}

TEST_CASE("image-dim is deterministic and regenerable from its manifest") {
    Sandbox s;
    const std::string model = s.model("f.txt", kFractional);
    const std::vector<std::string> base{"image-dim", "--model", model, "--seed", "3", "--seeds", "2", "--depth", "14"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", s.out("a")});
    b.insert(b.end(), {"--out", s.out("b")});
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    for (const char* f : {"image-dim.csv", "image-dim_counts_seed3.csv", "image-dim_counts_seed4.csv"}) {
        CHECK(slurp(fs::path(s.out("a")) / f) == slurp(fs::path(s.out("b")) / f));
    }
    CHECK(slurp(fs::path(s.out("a")) / "image-dim.csv").rfind("estimate,stderr,r2,j_min,j_max,seed,model_digest\n", 0) == 0);

    // rebuild the run from the manifest alone
    const auto manifest = nlohmann::json::parse(slurp(fs::path(s.out("a")) / "image-dim.manifest.json"));
    const std::string copy = s.model("copy.txt", manifest["model_text"].get<std::string>());
    std::vector<std::string> args = manifest["args"].get<std::vector<std::string>>();
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--model") {
            args[i + 1] = copy;
        }
        if (args[i] == "--out") {
            args[i + 1] = s.out("c");
        }
    }
    REQUIRE(run(args).code == 0);
    CHECK(slurp(fs::path(s.out("a")) / "image-dim.csv") == slurp(fs::path(s.out("c")) / "image-dim.csv"));
}

TEST_CASE("error records and exit codes") {
    Sandbox s;
    const std::string model = s.model("f.txt", kFractional);
    const Result missing = run({"predict", "--model", s.out("nope.txt")});
    CHECK(missing.code == kExitConfig);
    CHECK(nlohmann::json::parse(missing.err)["status"] == "error");
    CHECK(run({"frobnicate"}).code == kExitConfig);
    CHECK(run({"predict", "--model", model, "--xi0-grid", "0.2,1.7", "--out", s.out("e")}).code == kExitConfig);
    const Result degenerate =
        run({"image-dim", "--model", model, "--depth", "12", "--scales", "4:6", "--out", s.out("e")});
    CHECK(degenerate.code == kExitNumeric);
    CHECK(nlohmann::json::parse(degenerate.err)["code"] == "degenerate-range");
    const Result big = run({"simulate", "--model", model, "--depth", "40", "--out", s.out("e")});
    CHECK(big.code == kExitResource);
    const Result scope = run({"uniform-sweep", "--model", s.model("l.txt", kLognormal), "--depth", "10", "--set", "full",
                              "--out", s.out("e")});
    CHECK(scope.code == kExitAssumption);
}

TEST_CASE("every subcommand runs") {
    Sandbox s;
    const std::string model = s.model("f.txt", "kind = fractional\nbase = 2\nalpha1 = 0.7\nalpha2 = 0.8\n");
    const std::string out = s.out("all");
    CHECK(run({"spectrum-predict", "--model", model, "--out", out}).code == 0);
    CHECK(run({"spectrum-predict", "--model", model, "--q", "1,1", "--q", "0.5,0", "--out", out}).code == 0);
    CHECK(run({"simulate", "--model", model, "--depth", "8", "--level", "4", "--out", out, "--cache", s.out("cache")}).code ==
          0);
    const fs::path cached = fs::path(s.out("cache"));
    CHECK(std::distance(fs::directory_iterator(cached), fs::directory_iterator{}) == 1);
    const std::string first = slurp(fs::path(out) / "simulate_seed1.csv");
    CHECK(run({"simulate", "--model", model, "--depth", "8", "--level", "4", "--out", out, "--cache", s.out("cache")}).code ==
          0);
    CHECK(slurp(fs::path(out) / "simulate_seed1.csv") == first);
    CHECK(run({"partition", "--model", model, "--depth", "12", "--seeds", "2", "--q", "1,1", "--out", out}).code == 0);
    CHECK(run({"holder", "--model", model, "--depth", "12", "--paths", "5", "--tilt", "subtree", "--out", out}).code == 0);
    CHECK(run({"levelset", "--model", model, "--depth", "12", "--levels", "3", "--out", out}).code == 0);
    CHECK(run({"levelset", "--model", model, "--depth", "12", "--y", "0.2", "--k", "2", "--out", out}).code == 0);
    const std::string eq = s.model("eq.txt", kFractional);
    CHECK(run({"uniform-sweep", "--model", eq, "--depth", "14", "--set", "full", "--set", "digits:0", "--set",
               "blocks:2:0,3", "--out", out})
              .code == 0);
    // set specs with commas are quoted, so every row keeps 9 fields
    std::istringstream sweep(slurp(fs::path(out) / "uniform-sweep.csv"));
    std::string line;
    std::getline(sweep, line);
    REQUIRE(std::getline(sweep, line));
    std::getline(sweep, line);
    std::getline(sweep, line);
    CHECK(line.rfind("1,\"blocks:2:0,3\",0.5,", 0) == 0);
    for (const char* m : {"spectrum-predict", "simulate", "partition", "holder", "levelset", "uniform-sweep"}) {
        CHECK(fs::exists(fs::path(out) / (std::string(m) + ".manifest.json")));
    }
}

TEST_CASE("the installed binary reports exit codes") {
    const char* exe = std::getenv("MCASCADE_CLI");
    if (exe == nullptr) {
        MESSAGE("MCASCADE_CLI not set; skipping process-level check");
        return;
    }
    Sandbox s;
    const std::string bad = s.model("bad.txt", "kind = lognormal\nbase = 2\nalpha = 0.7\nbeta = 0.25\n");
    const std::string cmd = std::string(exe) + " check-model --model " + bad + " --out " + s.out("x") + " > /dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == kExitAssumption);
}
