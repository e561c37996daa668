#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "svevt/date.hpp"
#include "svevt/var_engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bin() {
    const char* b = std::getenv("SVEVT_BIN");
    REQUIRE(b != nullptr);
    return b;
}

struct RunResult {
    int code = -1;
    std::string out;
};

fs::path scratch_root() {
    static fs::path root = [] {
        fs::path p = fs::temp_directory_path() / "svevt_cli_test";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

RunResult run(const std::string& args) {
    fs::path cap = scratch_root() / "capture.txt";
    std::string cmd = bin() + " " + args + " > " + cap.string() + " 2>&1";
    int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(cap);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t data_rows(const fs::path& csv) {
    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);  // header
    std::size_t n = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("").code == 2);
    CHECK(run("--help").code == 0);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("simulate --dist weibull --out " + (scratch_root() / "x.csv").string()).code == 2);

    fs::path d = scratch_root() / "u";
    fs::create_directories(d);
    // any data file so the flag parse gets past --data
    { std::ofstream f(d / "r.csv"); f << "date,return\n2020-01-01,0.5\n2020-01-02,-0.5\n"; }
    RunResult r = run("fit --data " + (d / "r.csv").string() + " --model nope --out " +
                      (d / "out").string());
    CHECK(r.code == 2);
}

TEST_CASE("data errors exit with code 3 and numeric errors with 4") {
    fs::path d = scratch_root() / "err";
    fs::create_directories(d);

    CHECK(run("summary --data " + (d / "absent.csv").string()).code == 3);

    { std::ofstream f(d / "junk.csv"); f << "date,return\n2020-01-01,zzz\n"; }
    CHECK(run("summary --data " + (d / "junk.csv").string()).code == 3);

    { std::ofstream f(d / "r.csv"); f << "date,return\n2020-01-01,0.5\n2020-01-02,-0.5\n"; }
    CHECK(run("summary --data " + (d / "r.csv").string() + " --schema parquet").code == 3);

    {
        std::ofstream f(d / "flat.csv");
        f << "date,return\n";
        svevt::Date day{2020, 1, 1};
        for (int i = 0; i < 40; ++i) {
            f << day.to_string() << ",1\n";
            day = day.next();
        }
    }
    RunResult r = run("summary --data " + (d / "flat.csv").string());
    CHECK(r.code == 4);
}

TEST_CASE("simulate is seed-deterministic") {
    fs::path d = scratch_root() / "sim";
    fs::create_directories(d);
    std::string a = (d / "a.csv").string(), b = (d / "b.csv").string(), c = (d / "c.csv").string();

    CHECK(run("simulate --dist t --df 15 --n 300 --seed 42 --out " + a).code == 0);
    CHECK(run("simulate --dist t --df 15 --n 300 --seed 42 --out " + b).code == 0);
    CHECK(run("simulate --dist t --df 15 --n 300 --seed 43 --out " + c).code == 0);
    CHECK(data_rows(a) == 300);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));

    std::string sv = (d / "sv.csv").string(), path = (d / "path.csv").string();
    CHECK(run("simulate --dist sv --model svtl --n 200 --seed 1 --out " + sv +
              " --path-out " + path)
              .code == 0);
    CHECK(data_rows(sv) == 200);
    CHECK(data_rows(path) == 200);
}

TEST_CASE("summary prints json and honors the training split") {
    fs::path d = scratch_root() / "sum";
    fs::create_directories(d);
    std::string csv = (d / "r.csv").string();
    REQUIRE(run("simulate --dist t --df 10 --n 400 --seed 5 --out " + csv).code == 0);

    RunResult r = run("summary --data " + csv);
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.contains("mean"));
    CHECK(j.contains("jarque_bera"));
    CHECK(j.contains("acf1"));
    CHECK(j.contains("acf3"));

    std::string to_file = (d / "s.json").string();
    CHECK(run("summary --data " + csv + " --train-n 300 --train-only --out " + to_file).code == 0);
    json jt = json::parse(slurp(to_file));
    CHECK(jt.contains("sd"));
    // a 300-point prefix is a different sample than the full series
    CHECK(jt.at("mean").get<double>() != j.at("mean").get<double>());
}

TEST_CASE("pipeline: simulate, fit, var, backtest") {
    fs::path d = scratch_root() / "pipe";
    fs::create_directories(d);
    std::string csv = (d / "t15.csv").string();
    std::string out = (d / "out").string();
    REQUIRE(run("simulate --dist t --df 15 --n 900 --seed 42 --out " + csv).code == 0);

    std::string base = " --data " + csv + " --train-n 500 --test-len 400 --out " + out;

    // fit garch and one sv variant at small chain sizes
    RunResult fit = run("fit" + base + " --model garch,svt --draws 400 --burnin 150 --seed 7");
    CHECK(fit.code == 0);
    CHECK(fs::exists(out + "/garch/garch.json"));
    CHECK(fs::exists(out + "/garch/sigma2_path.csv"));
    CHECK(fs::exists(out + "/svt/summary.json"));
    CHECK(fs::exists(out + "/svt/trace_mu.csv"));
    CHECK(fs::exists(out + "/svt/h_band.csv"));
    CHECK(fs::exists(out + "/svt/vol_hat.csv"));

    // identical seeds reproduce the artifacts byte for byte
    std::string snap_sv = slurp(out + "/svt/summary.json");
    std::string snap_garch = slurp(out + "/garch/garch.json");
    REQUIRE(run("fit" + base + " --model garch,svt --draws 400 --burnin 150 --seed 7").code == 0);
    CHECK(slurp(out + "/svt/summary.json") == snap_sv);
    CHECK(slurp(out + "/garch/garch.json") == snap_garch);

    // var for all four methods; defaults alpha to 0.95
    RunResult var = run("var" + base +
                        " --model svt,garch,garch-evt,empirical --particles 1200 --seed 9");
    CHECK(var.code == 0);
    for (const char* f : {"var_svt-evt.csv", "var_garch.csv", "var_garch-evt.csv",
                          "var_empirical.csv", "qq_raw.csv", "qq_svt.csv", "qq_garch.csv",
                          "tail_svt.json", "tail_garch.json"})
        CHECK(fs::exists(out + "/" + std::string(f)));
    for (const char* f : {"var_svt-evt.csv", "var_garch.csv", "var_garch-evt.csv",
                          "var_empirical.csv"})
        CHECK(data_rows(out + "/" + std::string(f)) == 400);

    svevt::VarSeries loaded = svevt::load_var_csv(out + "/var_svt-evt.csv");
    CHECK(loaded.alpha == 0.95);
    CHECK(loaded.model_tag == "svt-evt");
    for (double v : loaded.var_values) CHECK(v > 0.0);

    // var reruns are idempotent for identical seeds
    std::string snap_var = slurp(out + "/var_svt-evt.csv");
    REQUIRE(run("var" + base +
                " --model svt,garch,garch-evt,empirical --particles 1200 --seed 9")
                .code == 0);
    CHECK(slurp(out + "/var_svt-evt.csv") == snap_var);

    // backtest over the saved series
    RunResult bt = run("backtest" + base);
    CHECK(bt.code == 0);
    CHECK(bt.out.find("model") != std::string::npos);
    CHECK(bt.out.find("empirical") != std::string::npos);
    CHECK(fs::exists(out + "/report.csv"));
    CHECK(fs::exists(out + "/report.txt"));

    // the json and csv report the same verdicts
    json rep = json::parse(slurp(out + "/report.json"));
    REQUIRE(rep.size() == 4);
    std::ifstream csvin(out + "/report.csv");
    std::string line;
    std::getline(csvin, line);
    std::size_t i = 0;
    while (std::getline(csvin, line)) {
        std::stringstream ss(line);
        std::vector<std::string> f;
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        REQUIRE(f.size() == 11);
        CHECK(f[0] == rep[i].at("model").get<std::string>());
        CHECK(std::stoul(f[1]) == rep[i].at("exceedance").get<std::size_t>());
        CHECK((f[6] == "1") == rep[i].at("uc_reject").get<bool>());
        CHECK((f[10] == "1") == rep[i].at("cc_reject").get<bool>());
        ++i;
    }
    CHECK(i == 4);
}

TEST_CASE("var artifact preconditions") {
    fs::path d = scratch_root() / "pre";
    fs::create_directories(d);
    std::string csv = (d / "r.csv").string();
    REQUIRE(run("simulate --dist t --df 12 --n 700 --seed 3 --out " + csv).code == 0);
    std::string base = " --data " + csv + " --train-n 400 --test-len 300 --out ";

    // empirical needs no fit artifacts
    std::string emp_out = (d / "emp").string();
    CHECK(run("var" + base + emp_out + " --model empirical").code == 0);
    CHECK(fs::exists(emp_out + "/var_empirical.csv"));

    // sv and garch do
    CHECK(run("var" + base + (d / "nofit1").string() + " --model svtl --particles 1000").code == 3);
    CHECK(run("var" + base + (d / "nofit2").string() + " --model garch").code == 3);

    // backtest with no VaR files is an explicit data error
    CHECK(run("backtest --data " + csv + " --out " + (d / "novar").string()).code == 3);

    // backtest against a series missing the VaR dates
    svevt::VarSeries stray;
    stray.dates = svevt::synthetic_dates(40, {2050, 1, 1});
    stray.alpha = 0.95;
    stray.var_values.assign(40, 1.0);
    stray.mu_fore.assign(40, 0.0);
    stray.sigma_fore.assign(40, 1.0);
    stray.model_tag = "stray";
    fs::create_directories(d / "stray");
    svevt::write_var_csv((d / "stray" / "var_stray.csv").string(), stray);
    RunResult mis = run("backtest --data " + csv + " --var-dir " + (d / "stray").string() +
                        " --out " + (d / "strayout").string());
    CHECK(mis.code == 3);
    CHECK(mis.out.find("not present") != std::string::npos);
}

TEST_CASE("config file values apply and flags override them") {
    fs::path d = scratch_root() / "cfg";
    fs::create_directories(d);
    std::string cfg = (d / "run.ini").string();
    std::string out1 = (d / "one.csv").string();
    {
        std::ofstream f(cfg);
        f << "[simulate]\n";
        f << "dist=t\n";
        f << "df=8\n";
        f << "n=50\n";
        f << "seed=11\n";
        f << "out=" << out1 << "\n";
    }
    CHECK(run("--config " + cfg + " simulate").code == 0);
    CHECK(data_rows(out1) == 50);

    std::string out2 = (d / "two.csv").string();
    CHECK(run("--config " + cfg + " simulate --n 30 --out " + out2).code == 0);
    CHECK(data_rows(out2) == 30);
}
