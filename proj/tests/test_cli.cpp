#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string env_or_fail(const char* name) {
    const char* v = std::getenv(name);
    REQUIRE_MESSAGE(v != nullptr, "environment variable ", name, " must point at the build");
    return v;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args, bool merge_stderr = false) {
    std::string cmd = env_or_fail("FREERG_BIN") + " " + args;
    cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    RunResult r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE_MESSAGE(f.good(), "missing file ", p.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Headers must match exactly; numeric cells within 1e-12 relative.
void compare_csv(const std::string& got, const std::string& want) {
    auto gl = split(got, '\n'), wl = split(want, '\n');
    REQUIRE(gl.size() == wl.size());
    REQUIRE(gl[0] == wl[0]);
    for (size_t i = 1; i < wl.size(); ++i) {
        if (wl[i].empty()) {
            CHECK(gl[i].empty());
            continue;
        }
        auto gc = split(gl[i], ','), wc = split(wl[i], ',');
        REQUIRE(gc.size() == wc.size());
        for (size_t c = 0; c < wc.size(); ++c) {
            if (wc[c].empty()) {
                CHECK(gc[c].empty());
                continue;
            }
            double g = std::stod(gc[c]), w = std::stod(wc[c]);
            CHECK(std::abs(g - w) <= 1e-12 * std::max(1.0, std::abs(w)));
        }
    }
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("freerg_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

fs::path golden(const std::string& name) { return fs::path(env_or_fail("FREERG_GOLDEN")) / name; }
fs::path preset(const std::string& name) { return fs::path(env_or_fail("FREERG_PRESETS")) / name; }

} // namespace

TEST_CASE("clt-run reproduces the golden rademacher table") {
    TempDir td;
    auto r = run("clt-run --seed rademacher --nmax 4 --out " + td.path.string());
    CHECK(r.exit_code == 0);
    compare_csv(slurp(td.path / "clt_run.csv"), slurp(golden("clt_run_rademacher_n4.csv")));
}

TEST_CASE("clt-run accepts a config file and flag overrides win") {
    TempDir td;
    {
        std::ofstream f(td.path / "cfg.json");
        f << R"({"seed_measure": "rademacher", "n_max": 9, "output_dir": ")"
          << (td.path / "cfgout").string() << R"("})";
    }
    auto r = run("clt-run --config " + (td.path / "cfg.json").string() + " --nmax 2");
    CHECK(r.exit_code == 0);
    auto csv = slurp(td.path / "cfgout" / "clt_run.csv");
    CHECK(split(csv, '\n').size() == 5); // header + n=0..2 + trailing empty
}

TEST_CASE("distance matches the golden report") {
    auto r = run("distance rademacher semicircle");
    CHECK(r.exit_code == 0);
    auto got = json::parse(r.out);
    auto want = json::parse(slurp(golden("distance_rad_semi.json")));
    CHECK(got["argmax_y"].get<double>() == doctest::Approx(want["argmax_y"].get<double>()));
    CHECK(got["value"].get<double>() ==
          doctest::Approx(want["value"].get<double>()).epsilon(1e-12));
    CHECK(got["axis"] == want["axis"]);
    CHECK(got["extended_domain"] == want["extended_domain"]);
}

TEST_CASE("distance writes the residual curve on request") {
    TempDir td;
    auto csv_path = (td.path / "resid.csv").string();
    auto r = run("distance rademacher semicircle --points 50 --csv " + csv_path);
    CHECK(r.exit_code == 0);
    auto lines = split(slurp(csv_path), '\n');
    REQUIRE(lines.size() == 52); // header + 50 rows + trailing empty
    CHECK(lines[0] == "y,residual");
    // curve is increasing for this pair; last row at y = 1/4 carries the sup
    auto last = split(lines[50], ',');
    CHECK(std::stod(last[0]) == doctest::Approx(0.25));
    CHECK(std::stod(last[1]) == doctest::Approx(0.2871870788979633).epsilon(1e-10));
}

TEST_CASE("cumulants matches the golden exact output") {
    auto r = run("cumulants rademacher --order 8");
    CHECK(r.exit_code == 0);
    CHECK(json::parse(r.out) == json::parse(slurp(golden("cumulants_rademacher_8.json"))));
}

TEST_CASE("convolve matches the golden exact output") {
    auto r = run("convolve rademacher rademacher --order 6");
    CHECK(r.exit_code == 0);
    CHECK(json::parse(r.out) == json::parse(slurp(golden("convolve_rad_rad_6.json"))));
}

TEST_CASE("preset measure files load and stay exact") {
    auto r = run("cumulants " + preset("bernoulli_p15.json").string() + " --order 4");
    CHECK(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["exact"] == true);
    CHECK(j["cumulants"][2] == "3/2");
    CHECK(j["cumulants"][3] == "5/4");

    auto r2 = run("distance " + preset("rademacher.json").string() + " " +
                  preset("semicircle.json").string());
    CHECK(r2.exit_code == 0);
    CHECK(json::parse(r2.out)["value"].get<double>() ==
          doctest::Approx(0.2871870788979633).epsilon(1e-10));
}

TEST_CASE("density-run on the semicircle seed: fixed point to inversion accuracy") {
    TempDir td;
    auto r = run("density-run --seed semicircle --nmax 2 --xs -2.2:2.2:0.02 --out " +
                 td.path.string());
    CHECK(r.exit_code == 0);
    auto summary = json::parse(slurp(td.path / "summary.json"));
    CHECK(summary["core_gaps_decreasing"] == true);
    for (const auto& row : summary["rows"]) {
        CHECK(row["status"] == "ok");
        CHECK(row["core_sup_gap"].get<double>() <= 2e-3); // away from the +-2 edges
        CHECK(row["sup_gap"].get<double>() <= 1e-2);      // edge smoothing dominates here
        CHECK(std::abs(row["mass"].get<double>() - 1.0) <= 1e-3);
    }
    // per-n CSV carries the three documented columns
    auto lines = split(slurp(td.path / "density_n1.csv"), '\n');
    CHECK(lines[0] == "x,density,semicircle");
}

TEST_CASE("density-run reports atomic n=0 as skipped and continues") {
    TempDir td;
    auto r = run("density-run --seed rademacher --nmax 2 --xs -2.2:2.2:0.05 --out " +
                 td.path.string());
    CHECK(r.exit_code == 0);
    auto summary = json::parse(slurp(td.path / "summary.json"));
    CHECK(summary["rows"][0]["status"] == "skipped");
    CHECK(summary["rows"][1]["status"] == "ok");
    CHECK(summary["rows"][2]["status"] == "ok");
    CHECK_FALSE(fs::exists(td.path / "density_n0.csv"));
    CHECK(fs::exists(td.path / "density_n2.csv"));
}

TEST_CASE("exit code 2 on malformed and invalid input") {
    TempDir td;
    auto bad = td.path / "bad.json";
    std::ofstream(bad) << "{this is not json";
    CHECK(run("distance " + bad.string() + " semicircle").exit_code == 2);
    CHECK(run("cumulants " + bad.string()).exit_code == 2);

    CHECK(run("distance unknown_alias semicircle").exit_code == 2);
    CHECK(run("distance rademacher semicircle --ymax 0.5").exit_code == 2);
    CHECK(run("distance rademacher semicircle --points 1").exit_code == 2);
    CHECK(run("cumulants rademacher --order 0").exit_code == 2);
    CHECK(run("convolve rademacher semicircle --density").exit_code == 2);
    CHECK(run("nonexistent-command").exit_code == 2);
    CHECK(run("").exit_code == 2); // a subcommand is required
}

TEST_CASE("non-standardized seeds exit 2 with a certificate on stderr") {
    auto r = run("clt-run --seed arcsine --nmax 2", /*merge_stderr=*/true);
    CHECK(r.exit_code == 2);
    auto start = r.out.find('{');
    REQUIRE(start != std::string::npos);
    auto end = r.out.rfind('}');
    auto cert = json::parse(r.out.substr(start, end - start + 1));
    CHECK(cert["certificate"]["is_member"] == false);
    CHECK(cert["certificate"]["variance"].get<double>() == doctest::Approx(2.0));

    CHECK(run("distance arcsine semicircle").exit_code == 2);
    CHECK(run("density-run --seed arcsine --nmax 1").exit_code == 2);
}

TEST_CASE("upper axis flag mirrors the lower-axis value for symmetric laws") {
    auto r = run("distance rademacher semicircle --axis-sign upper");
    CHECK(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["axis"] == "upper");
    CHECK(j["value"].get<double>() == doctest::Approx(0.2871870788979633).epsilon(1e-9));
}
