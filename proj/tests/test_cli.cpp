#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "glassfx/cli.hpp"
#include "glassfx/ctrw_sim.hpp"
#include "glassfx/fitkit.hpp"
#include "glassfx/io.hpp"
#include "glassfx/market_data.hpp"
#include "glassfx/observables.hpp"

using namespace glassfx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("cli_test_tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path.string() : (path / rel).string();
    }
};

std::string write_synthetic_series(const TempDir& dir) {
    sim::SimConfig cfg{trap::ModelParams{2.5e-7, 100.0, 1e-30, 1e12, 1e12}, 1.0, 20000.0, 1, 11};
    const auto series = sim::synthesize_series(cfg, 60, 1.0);
    const std::string path = dir.str("input.csv");
    io::write_file_atomic(path, io::series_csv(series));
    return path;
}

int run_cli(const std::vector<std::string>& args) { return cli::run(args); }

} // namespace

TEST_CASE("cli: mspd over the standard lag ladder") {
    TempDir dir("mspd");
    const std::string input = write_synthetic_series(dir);
    const int code = run_cli({"mspd", "--input", input, "--lags", "5,25,125", "--out",
                              dir.str("out")});
    REQUIRE(code == 0);
    const auto curve = io::parse_curve_csv(io::read_file(dir.str("out/mspd.csv")));
    REQUIRE(curve.size() == 3);
    CHECK(curve.lags_seconds[0] == doctest::Approx(300.0));
    CHECK(curve.lags_seconds[2] == doctest::Approx(7500.0));
    CHECK(fs::exists(dir.str("out/manifest.json")));

    const auto manifest = nlohmann::json::parse(io::read_file(dir.str("out/manifest.json")));
    CHECK(manifest["command"] == "mspd");
    CHECK(manifest["outputs"].size() == 1);
}

TEST_CASE("cli: windowed observables with a clock anchor") {
    TempDir dir("windowed");
    // nine days of minute data via the simulator
    sim::SimConfig cfg{trap::ModelParams{2.5e-7, 100.0, 1e-30, 1e12, 1e12}, 1.0,
                       9.0 * 1440.0, 1, 3};
    const auto series = sim::synthesize_series(cfg, 60, 1.0);
    io::write_file_atomic(dir.str("input.csv"), io::series_csv(series));

    const int code = run_cli({"mspd", "--input", dir.str("input.csv"), "--lags", "5,25",
                              "--origin", "18:00", "--utc-offset", "-300", "--out",
                              dir.str("out")});
    REQUIRE(code == 0);
    const auto curve = io::parse_curve_csv(io::read_file(dir.str("out/mspd.csv")));
    REQUIRE(curve.size() == 2);
    CHECK(curve.counts[0] >= 4);  // a handful of weekday anchors
    CHECK(curve.counts[0] <= 7);
}

TEST_CASE("cli: model tables at the published parameters") {
    TempDir dir("model");
    const int code = run_cli({"model", "--D", "2e-8", "--l", "3e-3", "--d", "1.5e-3",
                              "--tau1", "400", "--tau2", "300", "--lags", "125", "--out",
                              dir.str("out")});
    REQUIRE(code == 0);
    REQUIRE(fs::exists(dir.str("out/model_pdf_tau125.csv")));
    REQUIRE(fs::exists(dir.str("out/model_ccdf_tau125.csv")));
    REQUIRE(fs::exists(dir.str("out/model_mspd.csv")));

    const auto ccdf = io::parse_distribution_csv(
        io::read_file(dir.str("out/model_ccdf_tau125.csv")), obs::DistKind::ccdf, 125.0);
    CHECK(ccdf.ordinates.front() == doctest::Approx(1.0).epsilon(1e-6));
    const auto pdf = io::parse_distribution_csv(
        io::read_file(dir.str("out/model_pdf_tau125.csv")), obs::DistKind::pdf, 125.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < pdf.ordinates.size(); ++i)
        mass += pdf.ordinates[i] * (pdf.abscissae[1] - pdf.abscissae[0]);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("cli: simulate is byte-reproducible for a fixed seed") {
    TempDir dir("sim");
    const std::vector<std::string> base = {
        "simulate", "--D", "1e-9",  "--l", "1e-4", "--d", "1.5e-4", "--tau1", "400",
        "--tau2",   "300", "--dt",  "1",   "--duration", "2000", "--seed", "7",
        "--series", "--histogram-t", "500", "--bin-width", "5e-5", "--n-traj", "500"};
    auto with_out = [&](const std::string& out) {
        auto v = base;
        v.push_back("--out");
        v.push_back(out);
        return v;
    };
    REQUIRE(run_cli(with_out(dir.str("a"))) == 0);
    REQUIRE(run_cli(with_out(dir.str("b"))) == 0);
    for (const char* name : {"series.csv", "histogram_t500.csv"})
        CHECK(io::read_file(dir.str("a/") + name) == io::read_file(dir.str("b/") + name));
}

TEST_CASE("cli: ingest round trip") {
    TempDir dir("ingest");
    const std::string ascii =
        "20150105 093000;1.19415;1.19433;1.19401;1.19420;0\n"
        "20150105 093100;1.19420;1.19433;1.19401;1.19425;0\n"
        "20150105 093200;1.19425;1.19433;1.19401;1.19419;0\n";
    io::write_file_atomic(dir.str("quotes.txt"), ascii);
    REQUIRE(run_cli({"ingest", "--input", dir.str("quotes.txt"), "--format", "minute-ascii",
                     "--utc-offset", "-300", "--out", dir.str("out")}) == 0);

    market::ParseOptions opt;
    opt.format = market::QuoteFormat::generic_csv;
    const auto series =
        market::parse_quote_file(io::read_file(dir.str("out/series.csv")), opt);
    REQUIRE(series.size() == 3);
    CHECK(series.epoch_times[0] == 1420450200 + 300 * 60);
    CHECK(series.prices[2] == doctest::Approx(1.19419));
}

TEST_CASE("cli: sqt then fit-sqt end to end") {
    TempDir dir("fitsqt");
    // exact single-form table, bypassing estimation noise
    obs::Curve curve;
    for (double t : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        curve.lags_seconds.push_back(t * 60.0);
        curve.values.push_back(fit::sqt_single_form(t, 3.25, 0.95));
        curve.counts.push_back(100);
    }
    io::write_file_atomic(dir.str("sqt.csv"), io::curve_csv(curve));
    REQUIRE(run_cli({"fit-sqt", "--data", dir.str("sqt.csv"), "--form", "single", "--out",
                     dir.str("out")}) == 0);
    const auto fit_json = nlohmann::json::parse(io::read_file(dir.str("out/fit.json")));
    CHECK(fit_json["form"] == "single");
    CHECK(double(fit_json["values"]["tau0"]) == doctest::Approx(3.25).epsilon(0.01));
    CHECK(double(fit_json["values"]["p"]) == doctest::Approx(0.95).epsilon(0.01));
}

TEST_CASE("cli: distribution and correlation subcommands") {
    TempDir dir("obs");
    const std::string input = write_synthetic_series(dir);

    REQUIRE(run_cli({"pdf", "--input", input, "--lags", "5,25", "--bin-width", "2e-4",
                     "--out", dir.str("pdf")}) == 0);
    const auto pdf = io::parse_distribution_csv(io::read_file(dir.str("pdf/pdf_tau5.csv")),
                                                obs::DistKind::pdf, 5.0);
    double mass = 0.0;
    for (double y : pdf.ordinates) mass += y * 2e-4;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

    REQUIRE(run_cli({"ccdf", "--input", input, "--lags", "5", "--out", dir.str("ccdf")}) == 0);
    const auto ccdf = io::parse_distribution_csv(io::read_file(dir.str("ccdf/ccdf_tau5.csv")),
                                                 obs::DistKind::ccdf, 5.0);
    CHECK(ccdf.ordinates.front() <= 1.0);
    CHECK(ccdf.ordinates.back() == 0.0);

    REQUIRE(run_cli({"alpha2", "--input", input, "--lags", "5,25", "--out",
                     dir.str("a2")}) == 0);
    const auto a2 = io::parse_curve_csv(io::read_file(dir.str("a2/alpha2.csv")));
    CHECK(std::abs(a2.values[0]) < 0.2);  // Brownian input

    REQUIRE(run_cli({"sqt", "--input", input, "--lags", "5,25", "--r-l", "1e-3", "--out",
                     dir.str("sqt")}) == 0);
    const auto sqt = io::parse_curve_csv(io::read_file(dir.str("sqt/sqt.csv")));
    CHECK(sqt.values[0] <= 1.0);
    CHECK(sqt.values[0] >= -1.0);
    CHECK(sqt.values[1] < sqt.values[0]);  // decaying correlation

    // stride thins the origin set
    REQUIRE(run_cli({"mspd", "--input", input, "--lags", "5", "--stride", "5", "--out",
                     dir.str("strided")}) == 0);
    const auto full = io::parse_curve_csv(io::read_file(dir.str("sqt/sqt.csv")));
    const auto strided = io::parse_curve_csv(io::read_file(dir.str("strided/mspd.csv")));
    CHECK(strided.counts[0] * 4 < full.counts[0]);
}

TEST_CASE("cli: compare reports a null difference against itself") {
    TempDir dir("compare");
    const std::string input = write_synthetic_series(dir);
    REQUIRE(run_cli({"mspd", "--input", input, "--lags", "5,25", "--out", dir.str("out")}) == 0);
    REQUIRE(run_cli({"compare", "--a", dir.str("out/mspd.csv"), "--b", dir.str("out/mspd.csv"),
                     "--kind", "curve", "--out", dir.str("cmp")}) == 0);
    const auto summary = nlohmann::json::parse(io::read_file(dir.str("cmp/summary.json")));
    CHECK(double(summary["sup_abs"]) == 0.0);
    CHECK(fs::exists(dir.str("cmp/overlay.csv")));
}

TEST_CASE("cli: exit codes separate usage from data errors") {
    TempDir dir("errors");
    CHECK(run_cli({"no-such-command"}) == 2);
    CHECK(run_cli({"mspd", "--lags", "5", "--out", dir.str("x")}) == 2);  // missing --input
    CHECK(run_cli({"mspd", "--input", dir.str("absent.csv"), "--lags", "5", "--out",
                   dir.str("x")}) == 1);
    CHECK(run_cli({"--help"}) == 0);
}
