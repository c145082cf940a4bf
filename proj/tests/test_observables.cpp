#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "glassfx/errors.hpp"
#include "glassfx/numeric.hpp"
#include "glassfx/observables.hpp"
#include "glassfx/rng.hpp"

using namespace glassfx;
using market::FluctuationSample;

namespace {

FluctuationSample sample_of(std::vector<double> deltas, std::int64_t lag_seconds = 300) {
    FluctuationSample s;
    s.lag_seconds = lag_seconds;
    s.origin_count = std::int64_t(deltas.size());
    s.deltas = std::move(deltas);
    return s;
}

market::PriceSeries series_from_steps(const std::vector<double>& steps, double base = 10.0) {
    market::PriceSeries s;
    s.nominal_step = 60;
    double p = base;
    s.epoch_times.push_back(1420416000);
    s.prices.push_back(p);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        p += steps[i];
        s.epoch_times.push_back(1420416000 + std::int64_t(60 * (i + 1)));
        s.prices.push_back(p);
    }
    return s;
}

} // namespace

TEST_CASE("pdf_estimate: three-point and degenerate samples") {
    const auto three = obs::pdf_estimate(sample_of({-1.0, 0.0, 1.0}), 1.0);
    REQUIRE(three.abscissae.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(three.abscissae[i] == doctest::Approx(double(i) - 1.0));
        CHECK(three.ordinates[i] == doctest::Approx(1.0 / 3.0));
    }

    const auto zeros = obs::pdf_estimate(sample_of({0.0, 0.0, 0.0, 0.0}), 0.25);
    REQUIRE(zeros.abscissae.size() == 1);
    CHECK(zeros.abscissae[0] == 0.0);
    CHECK(zeros.ordinates[0] == doctest::Approx(4.0));  // 1 / bin_width

    CHECK_THROWS_WITH_AS(obs::pdf_estimate(sample_of({-1.0, 1.0}), 10.0),
                         doctest::Contains("bin"), error);
    CHECK_THROWS_AS(obs::pdf_estimate(sample_of({}), 1.0), error);
}

TEST_CASE("pdf_estimate: Gaussian peak density and normalization") {
    Rng rng(20240811);
    std::vector<double> deltas(100000);
    for (double& d : deltas) d = rng.gauss();
    const auto pdf = obs::pdf_estimate(sample_of(std::move(deltas)), 0.1);

    double peak = 0.0, mass = 0.0;
    for (double y : pdf.ordinates) {
        peak = std::max(peak, y);
        mass += y * 0.1;
    }
    CHECK(peak == doctest::Approx(1.0 / std::sqrt(2.0 * pi)).epsilon(0.05));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ccdf_estimate: counting, degenerate input, complement identity") {
    const auto tail = obs::ccdf_estimate(sample_of({1.0, -2.0, 3.0}));
    REQUIRE(tail.abscissae.size() == 4);  // 0, 1, 2, 3
    CHECK(tail.ordinates[0] == doctest::Approx(1.0));
    CHECK(tail.ordinates[1] == doctest::Approx(2.0 / 3.0));  // P(|dp| > 1), holds at x = 1.5
    CHECK(tail.ordinates[2] == doctest::Approx(1.0 / 3.0));
    CHECK(tail.ordinates[3] == doctest::Approx(0.0));

    const auto zeros = obs::ccdf_estimate(sample_of({0.0, 0.0}));
    REQUIRE(zeros.abscissae.size() == 1);
    CHECK(zeros.abscissae[0] == 0.0);
    CHECK(zeros.ordinates[0] == 0.0);  // P(|dp| > x) = 0 for any x > 0

    // ccdf(x) + P(|dp| <= x) = 1 at every threshold
    Rng rng(7);
    std::vector<double> deltas(512);
    for (double& d : deltas) d = rng.gauss() + 0.2 * rng.gauss();
    const auto sample = sample_of(deltas);
    const auto est = obs::ccdf_estimate(sample);
    for (std::size_t i = 0; i < est.abscissae.size(); ++i) {
        std::size_t less_equal = 0;
        for (double d : deltas)
            if (std::abs(d) <= est.abscissae[i]) ++less_equal;
        CHECK(est.ordinates[i] + double(less_equal) / double(deltas.size()) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ccdf_estimate: exponential tail slope recovered") {
    Rng rng(99);
    const double rate = 2.0;
    std::vector<double> deltas(100000);
    for (double& d : deltas) d = rng.exponential(1.0 / rate) * (rng.uniform() < 0.5 ? -1 : 1);
    const auto tail = obs::ccdf_estimate(sample_of(std::move(deltas)));

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < tail.abscissae.size(); ++i) {
        if (tail.ordinates[i] >= 1e-3 && tail.abscissae[i] > 0) {
            xs.push_back(tail.abscissae[i]);
            ys.push_back(std::log(tail.ordinates[i]));
        }
    }
    CHECK(lsq_slope(xs, ys) == doctest::Approx(-rate).epsilon(0.05));
}

TEST_CASE("mspd on deterministic series") {
    std::vector<double> prices(200);
    const double c = 3e-4;
    for (std::size_t i = 0; i < prices.size(); ++i) prices[i] = 1.0 + c * 60.0 * double(i);
    market::PriceSeries ramp;
    ramp.nominal_step = 60;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        ramp.epoch_times.push_back(1420416000 + std::int64_t(i) * 60);
        ramp.prices.push_back(prices[i]);
    }
    const std::vector<double> lags = {300.0, 600.0};
    const auto curve = obs::mspd(ramp, lags);
    REQUIRE(curve.size() == 2);
    CHECK(curve.values[0] == doctest::Approx(c * c * 300.0 * 300.0).epsilon(1e-9));
    CHECK(curve.values[1] == doctest::Approx(c * c * 600.0 * 600.0).epsilon(1e-9));

    market::PriceSeries flat = ramp;
    for (double& p : flat.prices) p = 2.0;
    const auto zero = obs::mspd(flat, lags);
    CHECK(zero.values[0] == 0.0);

    // oversized lags are omitted, not raised
    const std::vector<double> with_huge = {300.0, 1e9};
    CHECK(obs::mspd(ramp, with_huge).size() == 1);
}

TEST_CASE("mspd on a Brownian walk recovers the step variance") {
    Rng rng(123);
    const double step_sd = 7e-4;
    std::vector<double> steps(1000000);
    for (double& s : steps) s = step_sd * rng.gauss();
    const auto series = series_from_steps(steps);

    const std::vector<double> lags = {60.0, 300.0, 1200.0};
    const auto curve = obs::mspd(series, lags);
    REQUIRE(curve.size() == 3);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double per_step = curve.values[i] / (curve.lags_seconds[i] / 60.0);
        CHECK(per_step == doctest::Approx(step_sd * step_sd).epsilon(0.05));
    }
}

TEST_CASE("mspd equals the second moment of the same fluctuation sample") {
    Rng rng(5);
    std::vector<double> steps(5000);
    for (double& s : steps) s = 1e-3 * rng.gauss();
    const auto series = series_from_steps(steps);
    const std::vector<double> lags = {300.0};
    const auto curve = obs::mspd(series, lags);
    const auto sample = market::fluctuations(series, 300);
    const auto m = obs::sample_moments(sample.deltas);
    CHECK(curve.values[0] == doctest::Approx(m.m2).epsilon(1e-14));
    CHECK(curve.counts[0] == m.n);
}

TEST_CASE("sqt basics") {
    const obs::Wavevector q{100.0};

    std::vector<market::FluctuationSample> flat = {sample_of({0.0, 0.0, 0.0}, 60),
                                                   sample_of({0.0}, 120)};
    const auto ones = obs::sqt(flat, q);
    CHECK(ones.values[0] == doctest::Approx(1.0));
    CHECK(ones.values[1] == doctest::Approx(1.0));

    // deltas of +-pi/q give cos = -1
    std::vector<market::FluctuationSample> pm = {
        sample_of({pi / q.q, -pi / q.q, pi / q.q}, 60)};
    CHECK(obs::sqt(pm, q).values[0] == doctest::Approx(-1.0).epsilon(1e-12));

    // lag zero is 1 by definition
    std::vector<market::FluctuationSample> zero_lag = {sample_of({0.5, -0.3}, 0)};
    CHECK(obs::sqt(zero_lag, q).values[0] == 1.0);

    CHECK_THROWS_AS(obs::sqt(pm, obs::Wavevector{0.0}), error);
}

TEST_CASE("sqt equals the Gaussian characteristic function") {
    Rng rng(2024);
    const double sd = 2e-3;
    const double q = 0.7 / sd;
    std::vector<market::FluctuationSample> samples;
    std::vector<double> deltas(200000);
    for (double& d : deltas) d = sd * rng.gauss();
    samples.push_back(sample_of(std::move(deltas), 60));

    const auto curve = obs::sqt(samples, obs::Wavevector{q});
    const double expected = std::exp(-0.5 * q * q * sd * sd);
    double var_cos = 0.0, mean = curve.values[0];
    for (double d : samples[0].deltas) {
        const double c = std::cos(q * d) - mean;
        var_cos += c * c;
    }
    var_cos /= double(samples[0].deltas.size());
    const double se = std::sqrt(var_cos / double(samples[0].deltas.size()));
    CHECK(std::abs(curve.values[0] - expected) <= 3.0 * se);
    CHECK(curve.values[0] <= 1.0);
    CHECK(curve.values[0] >= -1.0);
}

TEST_CASE("alpha2 on closed-form samples") {
    // deterministic |dp| = c: m4/(3 m2^2) - 1 = -2/3
    std::vector<market::FluctuationSample> fixed = {sample_of({0.01, -0.01, 0.01}, 60)};
    CHECK(obs::alpha2(fixed).values[0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));

    // Gaussian: zero
    Rng rng(31);
    std::vector<double> gauss(100000);
    for (double& d : gauss) d = 1e-3 * rng.gauss();
    std::vector<market::FluctuationSample> g = {sample_of(std::move(gauss), 60)};
    CHECK(std::abs(obs::alpha2(g).values[0]) <= 0.05);

    // 50/50 mixture of variances v and 9v: alpha2 = 123/75 - 1 = 0.64
    const double v = 1e-6;
    std::vector<double> mix(200000);
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = std::sqrt(i % 2 == 0 ? v : 9.0 * v) * rng.gauss();
    std::vector<market::FluctuationSample> m = {sample_of(mix, 60)};
    const double got = obs::alpha2(m).values[0];

    // delta-method standard error from empirical moments
    double m2 = 0, m4 = 0, m6 = 0, m8 = 0;
    for (double d : mix) {
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
        m6 += d2 * d2 * d2;
        m8 += d2 * d2 * d2 * d2;
    }
    const double n = double(mix.size());
    m2 /= n; m4 /= n; m6 /= n; m8 /= n;
    const double var =
        (m8 - m4 * m4) / (9 * m2 * m2 * m2 * m2) +
        4.0 * m4 * m4 * (m4 - m2 * m2) / (9.0 * std::pow(m2, 6)) -
        4.0 * m4 * (m6 - m2 * m4) / (9.0 * std::pow(m2, 5));
    const double se = std::sqrt(std::max(var, 0.0) / n);
    CHECK(std::abs(got - 0.64) <= 3.0 * se);

    std::vector<market::FluctuationSample> degenerate = {sample_of({0.0, 0.0}, 60)};
    CHECK_THROWS_WITH_AS(obs::alpha2(degenerate), doctest::Contains("degenerate"), error);
}

TEST_CASE("alpha2 is never below -2/3") {
    Rng rng(88);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> deltas(64);
        for (double& d : deltas) d = rng.gauss() * (rng.uniform() < 0.3 ? 5.0 : 0.2);
        std::vector<market::FluctuationSample> s = {sample_of(std::move(deltas), 60)};
        CHECK(obs::alpha2(s).values[0] >= -2.0 / 3.0 - 1e-12);
    }
}

TEST_CASE("wavevector from localization length") {
    CHECK(obs::wavevector_from_localization(1.611e-4).q ==
          doctest::Approx(3.9e3).epsilon(0.003));
    CHECK(obs::wavevector_from_localization(2.0 * pi / 10.0).q == doctest::Approx(1.0));
    CHECK(obs::wavevector_from_localization(1e-4).q ==
          doctest::Approx(6283.185307179586).epsilon(1e-12));
    CHECK_THROWS_AS(obs::wavevector_from_localization(0.0), error);
}

TEST_CASE("property: estimators invariant under shift and negation") {
    Rng rng(17);
    std::vector<double> steps(20000);
    for (double& s : steps) s = 5e-4 * rng.gauss();
    const auto series = series_from_steps(steps);

    auto negated = series;
    for (double& p : negated.prices) p = 25.0 - p;  // negation plus shift keeps prices > 0

    const std::vector<double> lags = {60.0, 300.0, 1500.0};
    const auto base_mspd = obs::mspd(series, lags);
    const auto neg_mspd = obs::mspd(negated, lags);
    const auto base_samples = obs::fluctuation_ladder(series, lags);
    const auto neg_samples = obs::fluctuation_ladder(negated, lags);
    const obs::Wavevector q{900.0};
    const auto base_sqt = obs::sqt(base_samples, q);
    const auto neg_sqt = obs::sqt(neg_samples, q);
    const auto base_a2 = obs::alpha2(base_samples);
    const auto neg_a2 = obs::alpha2(neg_samples);
    for (std::size_t i = 0; i < lags.size(); ++i) {
        CHECK(base_mspd.values[i] == doctest::Approx(neg_mspd.values[i]).epsilon(1e-9));
        CHECK(base_sqt.values[i] == doctest::Approx(neg_sqt.values[i]).epsilon(1e-9));
        CHECK(base_a2.values[i] == doctest::Approx(neg_a2.values[i]).epsilon(1e-9));
    }
}
