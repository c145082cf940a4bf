#include "glassfx/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "glassfx/ctrw_sim.hpp"
#include "glassfx/errors.hpp"
#include "glassfx/fitkit.hpp"
#include "glassfx/io.hpp"
#include "glassfx/market_data.hpp"
#include "glassfx/numeric.hpp"
#include "glassfx/observables.hpp"
#include "glassfx/trapmodel.hpp"

namespace glassfx::cli {

namespace {

constexpr const char* kModule = "cli";

namespace fs = std::filesystem;

struct OutputSet {
    fs::path dir;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    explicit OutputSet(const std::string& out_dir) : dir(out_dir) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        require(!ec, kModule, "cannot create output directory " + dir.string());
    }

    void write(const std::string& name, std::string_view content) {
        io::write_file_atomic(dir / name, content);
        outputs.push_back(name);
        std::cout << "wrote " << (dir / name).string() << "\n";
    }

    void manifest(const std::string& command, const std::vector<std::string>& args,
                  std::optional<std::uint64_t> seed = std::nullopt) {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["arguments"] = args;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        if (seed) j["seed"] = *seed;
        j["version"] = version;
        io::write_file_atomic(dir / "manifest.json", j.dump(2) + "\n");
    }
};

struct InputOpts {
    std::string path;
    std::string format = "generic-csv";
    std::int64_t step = 60;

    market::ParseOptions parse_options(int utc_offset) const {
        market::ParseOptions opt;
        if (format == "minute-ascii")
            opt.format = market::QuoteFormat::minute_ascii;
        else if (format == "generic-csv")
            opt.format = market::QuoteFormat::generic_csv;
        else
            fail(kModule, "unknown format '" + format + "'");
        opt.utc_offset_minutes = utc_offset;
        opt.nominal_step = step;
        return opt;
    }
};

struct WindowOpts {
    std::string origin;  // "hh:mm", empty = whole series
    int utc_offset = 0;
    std::int64_t horizon = 86400;
    bool include_weekends = false;

    std::optional<market::WindowSpec> spec() const {
        if (origin.empty()) return std::nullopt;
        require(origin.size() == 5 && origin[2] == ':' && std::isdigit((unsigned char)origin[0]) &&
                    std::isdigit((unsigned char)origin[1]) && std::isdigit((unsigned char)origin[3]) &&
                    std::isdigit((unsigned char)origin[4]),
                kModule, "--origin must be hh:mm");
        const int hh = (origin[0] - '0') * 10 + (origin[1] - '0');
        const int mm = (origin[3] - '0') * 10 + (origin[4] - '0');
        market::WindowSpec spec;
        spec.origin_minute_of_day = hh * 60 + mm;
        spec.utc_offset_minutes = utc_offset;
        spec.horizon_seconds = horizon;
        spec.skip_weekends = !include_weekends;
        spec.validate();
        return spec;
    }
};

struct ModelOpts {
    double D = 0, l = 0, d = 0, tau1 = 0, tau2 = 0;

    trap::ModelParams params() const {
        trap::ModelParams p{D, l, d, tau1, tau2};
        p.validate();
        return p;
    }

    void add_to(CLI::App* cmd, const char* flag_prefix = "") {
        const std::string fp = flag_prefix;
        cmd->add_option("--" + fp + "D", D, "short-time diffusion (price^2/min)")->required();
        cmd->add_option("--" + fp + "l", l, "cage size (price)")->required();
        cmd->add_option("--" + fp + "d", d, "jump width (price)")->required();
        cmd->add_option("--" + fp + "tau1", tau1, "first-jump timescale (min)")->required();
        cmd->add_option("--" + fp + "tau2", tau2, "subsequent-jump timescale (min)")->required();
    }
};

std::string lag_tag(double lag_minutes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", lag_minutes);
    return buf;
}

market::PriceSeries load_series(const InputOpts& in, int utc_offset, OutputSet& out) {
    const std::string bytes = io::read_file(in.path);
    out.inputs.push_back(in.path);
    return market::parse_quote_file(bytes, in.parse_options(utc_offset));
}

std::vector<double> lags_to_seconds(const std::vector<double>& lags_minutes) {
    require(!lags_minutes.empty(), kModule, "no lags given");
    std::vector<double> out;
    for (double lag : lags_minutes) {
        require(lag > 0, kModule, "lags must be positive minutes");
        out.push_back(lag * 60.0);
    }
    require(std::is_sorted(out.begin(), out.end()) &&
                std::adjacent_find(out.begin(), out.end()) == out.end(),
            kModule, "lag ladder must be strictly increasing");
    return out;
}

void add_input_options(CLI::App* cmd, InputOpts& in) {
    cmd->add_option("--input", in.path, "quote file")->required();
    cmd->add_option("--format", in.format, "minute-ascii or generic-csv (default)");
    cmd->add_option("--step", in.step, "nominal grid step in seconds (default 60)");
}

void add_window_options(CLI::App* cmd, WindowOpts& w) {
    cmd->add_option("--origin", w.origin, "daily commencing time hh:mm (local clock)");
    cmd->add_option("--utc-offset", w.utc_offset,
                    "UTC offset in minutes of the data's local clock (ET: -300 EST, -240 EDT)");
    cmd->add_option("--horizon", w.horizon, "window horizon in seconds (default 86400)");
    cmd->add_flag("--include-weekends", w.include_weekends, "keep Saturday/Sunday anchors");
}

// ---------------------------------------------------------------- commands

void cmd_ingest(const InputOpts& in, int utc_offset, const std::string& out_dir,
                const std::vector<std::string>& args) {
    OutputSet out(out_dir);
    const market::PriceSeries series = load_series(in, utc_offset, out);
    out.write("series.csv", io::series_csv(series));
    out.manifest("ingest", args);
    std::cout << "ingested " << series.size() << " records\n";
}

struct ObservableArgs {
    InputOpts in;
    WindowOpts window;
    std::vector<double> lags_minutes;
    std::int64_t stride = 1;
    double bin_width = 0;   // pdf only
    double q = 0;           // sqt only
    double r_l = 0;         // sqt alternative
    std::string out_dir;
};

void cmd_distribution(const ObservableArgs& a, bool want_pdf,
                      const std::vector<std::string>& args) {
    OutputSet out(a.out_dir);
    const market::PriceSeries series = load_series(a.in, a.window.utc_offset, out);
    const auto lag_seconds = lags_to_seconds(a.lags_minutes);
    const auto samples = obs::fluctuation_ladder(series, lag_seconds, a.window.spec(), a.stride);
    require(!samples.empty(), kModule, "no lag produced any fluctuation sample");
    for (const auto& sample : samples) {
        const double lag_minutes = double(sample.lag_seconds) / 60.0;
        if (want_pdf) {
            const auto dist = obs::pdf_estimate(sample, a.bin_width);
            out.write("pdf_tau" + lag_tag(lag_minutes) + ".csv", io::distribution_csv(dist));
        } else {
            const auto dist = obs::ccdf_estimate(sample);
            out.write("ccdf_tau" + lag_tag(lag_minutes) + ".csv", io::distribution_csv(dist));
        }
    }
    out.manifest(want_pdf ? "pdf" : "ccdf", args);
}

void cmd_curve(const ObservableArgs& a, const std::string& which,
               const std::vector<std::string>& args) {
    OutputSet out(a.out_dir);
    const market::PriceSeries series = load_series(a.in, a.window.utc_offset, out);
    const auto lag_seconds = lags_to_seconds(a.lags_minutes);
    obs::Curve curve;
    if (which == "mspd") {
        curve = obs::mspd(series, lag_seconds, a.window.spec(), a.stride);
    } else {
        const auto samples =
            obs::fluctuation_ladder(series, lag_seconds, a.window.spec(), a.stride);
        require(!samples.empty(), kModule, "no lag produced any fluctuation sample");
        if (which == "sqt") {
            obs::Wavevector q{a.q};
            if (a.q <= 0) q = obs::wavevector_from_localization(a.r_l);
            curve = obs::sqt(samples, q);
        } else {
            curve = obs::alpha2(samples);
        }
    }
    require(curve.size() > 0, kModule, "no lag produced a value");
    out.write(which + ".csv", io::curve_csv(curve));
    out.manifest(which, args);
}

void cmd_model(const ModelOpts& m, const std::vector<double>& lags_minutes,
               const std::string& out_dir, const std::vector<std::string>& args) {
    OutputSet out(out_dir);
    const trap::ModelParams params = m.params();
    require(!lags_minutes.empty(), kModule, "no lags given");
    for (double lag : lags_minutes) {
        out.write("model_pdf_tau" + lag_tag(lag) + ".csv",
                  io::distribution_csv(trap::g_of_p_auto(lag, params)));
        out.write("model_ccdf_tau" + lag_tag(lag) + ".csv",
                  io::distribution_csv(trap::model_ccdf_auto(lag, params)));
    }
    out.write("model_mspd.csv", io::curve_csv(trap::model_mspd(lags_minutes, params)));
    out.manifest("model", args);
}

std::set<std::string> freeze_set(const std::vector<std::string>& freeze) {
    return {freeze.begin(), freeze.end()};
}

void cmd_fit_ccdf(const std::vector<std::string>& data_files, const std::vector<double>& lags,
                  const ModelOpts& init, const std::vector<std::string>& freeze,
                  double weight_floor, const std::string& out_dir,
                  const std::vector<std::string>& args) {
    require(data_files.size() >= 2, kModule, "need ccdf tables at two or more lags");
    require(data_files.size() == lags.size(), kModule,
            "--lags must list one lag per data file");
    OutputSet out(out_dir);
    std::vector<std::pair<double, obs::Distribution>> data;
    for (std::size_t i = 0; i < data_files.size(); ++i) {
        const std::string bytes = io::read_file(data_files[i]);
        out.inputs.push_back(data_files[i]);
        data.emplace_back(lags[i],
                          io::parse_distribution_csv(bytes, obs::DistKind::ccdf, lags[i]));
    }
    fit::FitOptions options;
    options.ccdf_weight_floor = weight_floor;
    const fit::FitResult result =
        fit::fit_model_to_ccdfs(data, init.params(), freeze_set(freeze), options);
    out.write("fit.json", io::fit_result_json(result));
    out.manifest("fit-ccdf", args);
}

void cmd_fit_mspd(const std::string& data_file, const ModelOpts& init,
                  const std::vector<std::string>& freeze, const std::string& out_dir,
                  const std::vector<std::string>& args) {
    OutputSet out(out_dir);
    const obs::Curve curve = io::parse_curve_csv(io::read_file(data_file));
    out.inputs.push_back(data_file);
    const fit::FitResult result =
        fit::fit_model_to_mspd(curve, init.params(), freeze_set(freeze), {});
    out.write("fit.json", io::fit_result_json(result));
    out.manifest("fit-mspd", args);
}

void cmd_fit_sqt(const std::string& data_file, const std::string& form,
                 const std::string& out_dir, const std::vector<std::string>& args) {
    OutputSet out(out_dir);
    const obs::Curve curve = io::parse_curve_csv(io::read_file(data_file));
    out.inputs.push_back(data_file);
    require(form == "single" || form == "double", kModule, "--form must be single or double");
    const fit::SqtFitForm result =
        fit::fit_sqt(curve, form == "single" ? fit::SqtForm::single : fit::SqtForm::double_exp);
    out.write("fit.json", io::sqt_fit_json(result));
    out.manifest("fit-sqt", args);
}

struct SimulateArgs {
    ModelOpts model;
    double dt = 0;
    double duration = 0;
    std::int64_t n_traj = 1;
    std::uint64_t seed = 0;
    bool series = false;
    std::int64_t step = 60;
    double base = 1.0;
    double histogram_t = -1.0;
    double bin_width = 0;
    std::string out_dir;
};

void cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& args) {
    OutputSet out(a.out_dir);
    sim::SimConfig config{a.model.params(), a.dt, a.duration, a.n_traj, a.seed};
    bool did_anything = false;
    if (a.series) {
        out.write("series.csv", io::series_csv(sim::synthesize_series(config, a.step, a.base)));
        did_anything = true;
    }
    if (a.histogram_t >= 0) {
        require(a.bin_width > 0, kModule, "--bin-width required with --histogram-t");
        require(a.histogram_t <= a.duration, kModule, "--histogram-t beyond --duration");
        config.validate();
        const auto positions =
            sim::sample_positions(config.params, std::vector<double>{a.histogram_t},
                                  config.n_traj, config.seed);
        std::vector<double> displacements;
        displacements.reserve(positions.size());
        for (const auto& row : positions) displacements.push_back(row[0]);
        const auto hist = sim::displacement_histogram(displacements, a.histogram_t, a.bin_width);
        out.write("histogram_t" + lag_tag(a.histogram_t) + ".csv", io::distribution_csv(hist));
        did_anything = true;
    }
    require(did_anything, kModule, "simulate needs --series and/or --histogram-t");
    out.manifest("simulate", args, a.seed);
}

void cmd_compare(const std::string& file_a, const std::string& file_b, const std::string& kind,
                 const std::string& out_dir, const std::vector<std::string>& args) {
    OutputSet out(out_dir);
    std::vector<double> xs, ya, yb;
    if (kind == "curve") {
        const obs::Curve a = io::parse_curve_csv(io::read_file(file_a));
        const obs::Curve b = io::parse_curve_csv(io::read_file(file_b));
        xs = a.lags_seconds;
        ya = a.values;
        for (double x : xs)
            yb.push_back(interp_linear(b.lags_seconds, b.values, x));
    } else if (kind == "dist") {
        const obs::Distribution a =
            io::parse_distribution_csv(io::read_file(file_a), obs::DistKind::ccdf, 0);
        const obs::Distribution b =
            io::parse_distribution_csv(io::read_file(file_b), obs::DistKind::ccdf, 0);
        xs = a.abscissae;
        ya = a.ordinates;
        for (double x : xs)
            yb.push_back(interp_linear(b.abscissae, b.ordinates, x));
    } else {
        fail(kModule, "--kind must be curve or dist");
    }
    out.inputs.push_back(file_a);
    out.inputs.push_back(file_b);

    double sup_abs = 0, sup_rel = 0;
    std::string overlay = "x,a,b,diff\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double diff = ya[i] - yb[i];
        sup_abs = std::max(sup_abs, std::abs(diff));
        const double denom = std::max(std::abs(ya[i]), std::abs(yb[i]));
        if (denom > 0) sup_rel = std::max(sup_rel, std::abs(diff) / denom);
        const double x_col = kind == "curve" ? xs[i] / 60.0 : xs[i];
        overlay += format_g17(x_col) + "," + format_g17(ya[i]) + "," + format_g17(yb[i]) + "," +
                   format_g17(diff) + "\n";
    }
    out.write("overlay.csv", overlay);
    nlohmann::ordered_json j;
    j["sup_abs"] = sup_abs;
    j["sup_rel"] = sup_rel;
    j["n"] = xs.size();
    out.write("summary.json", j.dump(2) + "\n");
    out.manifest("compare", args);
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"observables of glassy colloidal dynamics for 1-D price trajectories\n"
                 "(GLASSFX_THREADS caps internal parallelism)"};
    app.require_subcommand(1);

    // ingest -----------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "validate and convert a quote file");
    InputOpts ingest_in;
    int ingest_offset = 0;
    std::string ingest_out;
    add_input_options(ingest, ingest_in);
    ingest->add_option("--utc-offset", ingest_offset, "UTC offset of file timestamps (minutes)");
    ingest->add_option("--out", ingest_out, "output directory")->required();
    ingest->callback([&] { cmd_ingest(ingest_in, ingest_offset, ingest_out, args); });

    // observables ------------------------------------------------------
    ObservableArgs pdf_args, ccdf_args, mspd_args, sqt_args, alpha2_args;
    auto add_observable = [&](const char* name, const char* help, ObservableArgs& a) {
        auto* cmd = app.add_subcommand(name, help);
        add_input_options(cmd, a.in);
        add_window_options(cmd, a.window);
        cmd->add_option("--lags", a.lags_minutes, "lag ladder in minutes")
            ->required()
            ->delimiter(',');
        cmd->add_option("--stride", a.stride, "origin stride in grid steps (default 1)");
        cmd->add_option("--out", a.out_dir, "output directory")->required();
        return cmd;
    };

    auto* pdf = add_observable("pdf", "fluctuation pdfs over a lag ladder", pdf_args);
    pdf->add_option("--bin-width", pdf_args.bin_width, "price bin width")->required();
    pdf->callback([&] { cmd_distribution(pdf_args, true, args); });

    auto* ccdf = add_observable("ccdf", "fluctuation tail ccdfs over a lag ladder", ccdf_args);
    ccdf->callback([&] { cmd_distribution(ccdf_args, false, args); });

    auto* mspd = add_observable("mspd", "mean squared price displacement", mspd_args);
    mspd->callback([&] { cmd_curve(mspd_args, "mspd", args); });

    auto* sqt = add_observable("sqt", "price correlation S(q,tau)", sqt_args);
    sqt->add_option("--q", sqt_args.q, "wavevector (inverse price)");
    sqt->add_option("--r-l", sqt_args.r_l, "localization length (sets q = 2*pi/10r_l)");
    sqt->callback([&] {
        require(sqt_args.q > 0 || sqt_args.r_l > 0, kModule, "sqt needs --q or --r-l");
        cmd_curve(sqt_args, "sqt", args);
    });

    auto* alpha2 = add_observable("alpha2", "non-Gaussian parameter", alpha2_args);
    alpha2->callback([&] { cmd_curve(alpha2_args, "alpha2", args); });

    // model ------------------------------------------------------------
    auto* model = app.add_subcommand("model", "evaluate the trap model pdf/ccdf/MSPD");
    ModelOpts model_opts;
    std::vector<double> model_lags;
    std::string model_out;
    model_opts.add_to(model);
    model->add_option("--lags", model_lags, "times in minutes")->required()->delimiter(',');
    model->add_option("--out", model_out, "output directory")->required();
    model->callback([&] { cmd_model(model_opts, model_lags, model_out, args); });

    // fits ---------------------------------------------------------------
    auto* fit_ccdf = app.add_subcommand("fit-ccdf", "fit model parameters to measured ccdfs");
    std::vector<std::string> fit_ccdf_files, fit_ccdf_freeze;
    std::vector<double> fit_ccdf_lags;
    ModelOpts fit_ccdf_init;
    double fit_ccdf_floor = 1e-4;
    std::string fit_ccdf_out;
    fit_ccdf->add_option("--data", fit_ccdf_files, "ccdf tables")->required()->delimiter(',');
    fit_ccdf->add_option("--lags", fit_ccdf_lags, "lag (minutes) per table")
        ->required()
        ->delimiter(',');
    fit_ccdf_init.add_to(fit_ccdf, "init-");
    fit_ccdf->add_option("--freeze", fit_ccdf_freeze, "parameters to hold fixed")->delimiter(',');
    fit_ccdf->add_option("--weight-floor", fit_ccdf_floor,
                         "ignore tail probabilities below this (default 1e-4)");
    fit_ccdf->add_option("--out", fit_ccdf_out, "output directory")->required();
    fit_ccdf->callback([&] {
        cmd_fit_ccdf(fit_ccdf_files, fit_ccdf_lags, fit_ccdf_init, fit_ccdf_freeze,
                     fit_ccdf_floor, fit_ccdf_out, args);
    });

    auto* fit_mspd = app.add_subcommand("fit-mspd", "fit model parameters to a measured MSPD");
    std::string fit_mspd_file, fit_mspd_out;
    std::vector<std::string> fit_mspd_freeze;
    ModelOpts fit_mspd_init;
    fit_mspd->add_option("--data", fit_mspd_file, "curve table")->required();
    fit_mspd_init.add_to(fit_mspd, "init-");
    fit_mspd->add_option("--freeze", fit_mspd_freeze, "parameters to hold fixed")->delimiter(',');
    fit_mspd->add_option("--out", fit_mspd_out, "output directory")->required();
    fit_mspd->callback(
        [&] { cmd_fit_mspd(fit_mspd_file, fit_mspd_init, fit_mspd_freeze, fit_mspd_out, args); });

    auto* fit_sqt = app.add_subcommand("fit-sqt", "fit a relaxation form to S(q,tau)");
    std::string fit_sqt_file, fit_sqt_form = "single", fit_sqt_out;
    fit_sqt->add_option("--data", fit_sqt_file, "curve table")->required();
    fit_sqt->add_option("--form", fit_sqt_form, "single or double");
    fit_sqt->add_option("--out", fit_sqt_out, "output directory")->required();
    fit_sqt->callback([&] { cmd_fit_sqt(fit_sqt_file, fit_sqt_form, fit_sqt_out, args); });

    // simulate -----------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo trap-process ensembles");
    SimulateArgs sim_args;
    sim_args.model = {};
    sim_args.histogram_t = -1.0;
    sim_args.seed = 1;
    auto& sa = sim_args;
    sa.model.add_to(simulate);
    simulate->add_option("--dt", sa.dt, "sampling step (minutes)")->required();
    simulate->add_option("--duration", sa.duration, "trajectory length (minutes)")->required();
    simulate->add_option("--n-traj", sa.n_traj, "ensemble size (default 1)");
    simulate->add_option("--seed", sa.seed, "RNG seed (default 1)");
    simulate->add_flag("--series", sa.series, "emit a synthetic price series");
    simulate->add_option("--step", sa.step, "series step in seconds (default 60)");
    simulate->add_option("--base", sa.base, "series base price (default 1.0)");
    simulate->add_option("--histogram-t", sa.histogram_t,
                         "emit the displacement histogram at this time (minutes)");
    simulate->add_option("--bin-width", sa.bin_width, "histogram bin width (price)");
    simulate->add_option("--out", sa.out_dir, "output directory")->required();
    simulate->callback([&] { cmd_simulate(sim_args, args); });

    // compare ------------------------------------------------------------
    auto* compare = app.add_subcommand("compare", "overlay two tables and report sup norms");
    std::string cmp_a, cmp_b, cmp_kind = "curve", cmp_out;
    compare->add_option("--a", cmp_a, "first table")->required();
    compare->add_option("--b", cmp_b, "second table")->required();
    compare->add_option("--kind", cmp_kind, "curve or dist (default curve)");
    compare->add_option("--out", cmp_out, "output directory")->required();
    compare->callback([&] { cmd_compare(cmp_a, cmp_b, cmp_kind, cmp_out, args); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const glassfx::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace glassfx::cli
