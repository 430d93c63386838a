#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "report.hpp"

namespace fs = std::filesystem;
using namespace mfa;
using namespace mfa::cli;

namespace {

fs::path tmp_dir() {
    auto dir = fs::temp_directory_path() / "mfa_cli_test";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(MFA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("ingest: log returns from price levels") {
    auto p = tmp_dir() / "prices.csv";
    write_file(p, "1\n2\n4\n8\n");
    IngestOptions opts;
    opts.log_returns = true;
    auto res = ingest_csv(p.string(), opts);
    REQUIRE(res.series.size() == 3);
    for (double v : res.series.values) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(res.series.role == Role::increments);
}

TEST_CASE("ingest: column selection and header detection") {
    auto p = tmp_dir() / "two_col.csv";
    write_file(p, "timestamp,value\n1,10.5\n2,11.5\n3,9.5\n");
    IngestOptions opts;
    opts.column = 2;
    opts.role = Role::levels;
    auto res = ingest_csv(p.string(), opts);
    REQUIRE(res.series.size() == 3);
    CHECK(res.series.values[0] == doctest::Approx(10.5));
    CHECK(res.series.values[2] == doctest::Approx(9.5));
}

TEST_CASE("ingest: blank row handling") {
    auto p = tmp_dir() / "blank.csv";
    write_file(p, "1.0\n2.0\n\n3.0\n");
    IngestOptions strict;
    CHECK_THROWS_AS(ingest_csv(p.string(), strict), std::runtime_error);

    IngestOptions lenient;
    lenient.drop_nan = true;
    auto res = ingest_csv(p.string(), lenient);
    CHECK(res.series.size() == 3);
    CHECK(res.dropped_rows == 1);
    CHECK(res.warnings.size() == 1);
}

TEST_CASE("ingest: non-numeric cell names the row") {
    auto p = tmp_dir() / "badcell.csv";
    write_file(p, "1.0\n2.0\noops\n4.0\n");
    IngestOptions opts;
    CHECK_THROWS_WITH_AS(ingest_csv(p.string(), opts), doctest::Contains("row 3"),
                         std::runtime_error);
}

TEST_CASE("ingest: volatility measure normalization") {
    auto p = tmp_dir() / "vol.csv";
    write_file(p, "0.5\n-1.5\n1.0\n-2.0\n");
    IngestOptions opts;
    opts.as_volatility = true;
    auto res = ingest_csv(p.string(), opts);
    CHECK(res.series.role == Role::measure);
    for (double v : res.series.values) CHECK(v >= 0.0);
}

TEST_CASE("report numbers are rounded to 12 significant digits") {
    CHECK(sig12(1.0 / 3.0) == doctest::Approx(0.333333333333).epsilon(1e-13));
    CHECK(sig12(123456789012345.0) == doctest::Approx(1.23456789012e14).epsilon(1e-11));
    CHECK(sig12(0.0) == 0.0);
}

TEST_CASE("cli: generate then analyze round trip") {
    auto dir = tmp_dir();
    auto measure_csv = (dir / "m.csv").string();
    auto report_json = (dir / "r.json").string();

    REQUIRE(run_cli("generate --model pmodel --m 0.3 --levels 16 --output " + measure_csv) == 0);

    // generated file round-trips through ingestion bit-faithfully
    IngestOptions opts;
    opts.role = Role::measure;
    auto back = ingest_csv(measure_csv, opts);
    CHECK(back.series.size() == (1u << 16));

    REQUIRE(run_cli("analyze --method mfpf --input " + measure_csv +
                    " --role measure --q -4:4:0.5 --scales dyadic --smin 8 --output " +
                    report_json) == 0);
    auto body = nlohmann::json::parse(slurp(report_json));
    CHECK(body["schema"] == "mfa-report/1");
    REQUIRE(body.contains("spectrum"));
    // tau(2) close to the binomial closed form -ln(0.09+0.49)/ln 2
    auto qs = body["spectrum"]["q"];
    auto taus = body["spectrum"]["tau"];
    for (std::size_t i = 0; i < qs.size(); ++i)
        if (std::abs(double(qs[i]) - 2.0) < 1e-9)
            CHECK(double(taus[i]) == doctest::Approx(0.785875).epsilon(0.02));
}

TEST_CASE("cli: stochastic commands demand a seed") {
    auto dir = tmp_dir();
    auto out = (dir / "x.csv").string();
    CHECK(run_cli("generate --model fgn --hurst 0.5 --n 1024 --output " + out) == 1);
    CHECK(run_cli("generate --model fgn --hurst 0.5 --n 1024 --seed 7 --output " + out) == 0);
    CHECK(run_cli("surrogate --method iaaft --input " + out + " --output " + out + "2") == 1);
}

TEST_CASE("cli: validation and compute error exit codes") {
    auto dir = tmp_dir();
    CHECK(run_cli("analyze --method nosuch --input missing.csv") == 1);

    // constant series: structure functions degenerate -> compute error
    auto flat = dir / "flat.csv";
    write_file(flat, std::string(1, '1'));
    {
        std::ofstream out(flat);
        for (int i = 0; i < 4096; ++i) out << "7.5\n";
    }
    CHECK(run_cli("analyze --method mfsf --role levels --q 0:2:0.5 --scales geometric "
                  "--smin 4 --input " +
                  flat.string()) == 2);
}

TEST_CASE("cli: byte-identical reports for identical config and seed") {
    auto dir = tmp_dir();
    auto x_csv = (dir / "fgn.csv").string();
    REQUIRE(run_cli("generate --model fgn --hurst 0.6 --n 8192 --seed 99 --output " + x_csv) == 0);
    auto x2_csv = (dir / "fgn2.csv").string();
    REQUIRE(run_cli("generate --model fgn --hurst 0.6 --n 8192 --seed 99 --output " + x2_csv) ==
            0);
    CHECK(slurp(x_csv) == slurp(x2_csv));

    auto r1 = (dir / "r1.json").string();
    auto r2 = (dir / "r2.json").string();
    std::string analyze = "analyze --method mfdfa --order 1 --q -2:2:0.5 --scales geometric "
                          "--smin 16 --input " +
                          x_csv + " --output ";
    REQUIRE(run_cli(analyze + r1) == 0);
    REQUIRE(run_cli(analyze + r2) == 0);
    CHECK(slurp(r1) == slurp(r2));

    auto t1 = (dir / "t1.json").string();
    auto t2 = (dir / "t2.json").string();
    std::string test_cmd = "test --statistic delta_alpha --null shuffle -n 20 --seed 5 --input " +
                           x_csv + " --output ";
    REQUIRE(run_cli(test_cmd + t1) == 0);
    REQUIRE(run_cli(test_cmd + t2) == 0);
    CHECK(slurp(t1) == slurp(t2));
}

TEST_CASE("cli: cross command produces rho curves in bounds") {
    auto dir = tmp_dir();
    auto a_csv = (dir / "a.csv").string();
    auto b_csv = (dir / "b.csv").string();
    REQUIRE(run_cli("generate --model fgn --hurst 0.5 --n 4096 --seed 1 --output " + a_csv) == 0);
    REQUIRE(run_cli("generate --model fgn --hurst 0.5 --n 4096 --seed 2 --output " + b_csv) == 0);
    auto rj = (dir / "rho.json").string();
    REQUIRE(run_cli("cross --method rho --input " + a_csv + " --input2 " + b_csv +
                    " --scales geometric --smin 16 --output " + rj) == 0);
    auto body = nlohmann::json::parse(slurp(rj));
    for (auto& v : body["rho"]["values"]) {
        CHECK(double(v) <= 1.0);
        CHECK(double(v) >= -1.0);
    }
}
