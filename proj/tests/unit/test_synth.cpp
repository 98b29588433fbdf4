#include "edcast/core/errors.hpp"
#include "edcast/core/text.hpp"
#include "edcast/ingest/attendance.hpp"
#include "edcast/synth/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

using namespace edcast;
using namespace edcast::synth;

namespace {

DgpSpec flat(double base) {
    DgpSpec s;
    s.name = "flat";
    s.base_level = base;
    s.n_days = 400;
    return s;
}

} // namespace

TEST_SUITE("synth") {

TEST_CASE("flat spec with a Monday offset") {
    auto s = flat(208.0);
    s.weekly_profile = {15, 0, 0, 0, 0, 0, 0};
    auto d = generate(s);
    REQUIRE(d.series.size() == 400);
    std::size_t mondays = 0;
    for (std::size_t i = 0; i < d.series.size(); ++i) {
        if (iso_weekday(d.series.date_at(i)) == 1) {
            CHECK(d.series[i] == 223.0);
            ++mondays;
        } else {
            CHECK(d.series[i] == 208.0);
        }
    }
    CHECK(mondays == 57);
}

TEST_CASE("all offsets zero gives a constant series") {
    auto d = generate(flat(150.0), 100);
    for (double v : d.series.values()) CHECK(v == 150.0);
    CHECK(d.truth.clamped == 0);
}

TEST_CASE("noise-free values follow the formula") {
    DgpSpec s = flat(120.0);
    s.n_days = 900;
    s.trend_segments = {{0, -0.01}, {500, 0.03}};
    s.weekly_profile = {9, 4, 1, 0, -2, -5, -7};
    s.yearly_amplitude = 6.0;
    s.bank_holiday_effect = -11.0;
    s.school_holiday_effect = 3.0;
    s.event_effects = {{"notting_hill_carnival", 17.0}, {"christmas", -21.0}};
    s.weather.rain_effect = -0.5;
    auto d = generate(s);
    const auto& cov = d.covariates;
    std::size_t carnival = 0, xmas = 0;
    for (std::size_t e = 0; e < cov.event_names.size(); ++e) {
        if (cov.event_names[e] == "notting_hill_carnival") carnival = e;
        if (cov.event_names[e] == "christmas") xmas = e;
    }
    std::size_t flagged = 0;
    for (std::size_t t = 0; t < 900; ++t) {
        const Date day = d.series.date_at(t);
        const double trend = t < 500 ? -0.01 * static_cast<double>(t)
                                     : -0.01 * 500.0 + 0.03 * static_cast<double>(t - 500);
        const double holiday = (cov.bank_holiday[t] ? -11.0 : 0.0) + (cov.school_holiday[t] ? 3.0 : 0.0);
        const double event = (cov.events[carnival][t] ? 17.0 : 0.0) + (cov.events[xmas][t] ? -21.0 : 0.0);
        const double expected = 120.0 + trend + s.weekly_profile[static_cast<std::size_t>(iso_weekday(day) - 1)] +
                                6.0 * std::sin(2.0 * M_PI * day_of_year(day) / 365.25) + holiday + event + 0.0 +
                                -0.5 * cov.precip_mm[t];
        CHECK(d.series[t] == doctest::Approx(expected).epsilon(1e-13));
        CHECK((d.truth.holiday[t] != 0.0) == (cov.bank_holiday[t] || cov.school_holiday[t]));
        flagged += cov.bank_holiday[t];
    }
    CHECK(flagged >= 15);
}

TEST_CASE("components sum to the pre-clamp series") {
    auto s = builtin_spec("stmarys-like");
    auto d = generate(s, 800);
    const auto& g = d.truth;
    for (std::size_t i = 0; i < 800; ++i) {
        const double sum = g.base[i] + g.trend[i] + g.weekly[i] + g.yearly[i] + g.holiday[i] + g.event[i] + g.flu[i] +
                           g.weather[i] + g.noise[i];
        CHECK(sum == g.pre_clamp[i]);
        CHECK(d.series[i] == std::max(0.0, g.pre_clamp[i]));
    }
    // the ingested search volume is the volume driving the flu component
    for (std::size_t i = 0; i < 800; ++i) {
        CHECK(d.covariates.flu_searches[i] * s.flu.effect == doctest::Approx(g.flu[i]).epsilon(1e-9));
    }
}

TEST_CASE("bundled specs match their stated levels") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        auto s = builtin_spec("stmarys-like");
        s.seed = seed;
        auto d = generate(s, 2920);
        const auto v = d.series.values();
        CHECK(std::abs(std::accumulate(v.begin(), v.end(), 0.0) / 2920.0 - 208.0) <= 3.0);
        std::array<double, 7> by_day{};
        for (std::size_t i = 0; i < v.size(); ++i) by_day[iso_weekday(d.series.date_at(i)) - 1] += v[i];
        CHECK(std::max_element(by_day.begin(), by_day.end()) == by_day.begin());
        CHECK(d.truth.clamp_rate < 0.001);

        auto c = builtin_spec("charingcross-like");
        c.seed = seed;
        auto e = generate(c, 2920);
        const auto w = e.series.values();
        CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) / 2920.0 - 106.0) <= 3.0);
        CHECK(e.truth.trend.back() > e.truth.trend.front());
    }
    CHECK_THROWS_AS(builtin_spec("kings-like"), SpecRejected);
}

TEST_CASE("seeded reproducibility") {
    auto s = builtin_spec("charingcross-like");
    auto a = generate(s, 300), b = generate(s, 300);
    CHECK(a.series == b.series);
    CHECK(a.covariates.precip_mm == b.covariates.precip_mm);
    s.seed += 1;
    CHECK_FALSE(generate(s, 300).series == a.series);
}

TEST_CASE("clamping beyond the limit rejects the spec") {
    auto s = flat(5.0);
    s.noise_sd = 20.0;
    CHECK_THROWS_AS(generate(s), SpecRejected);
    auto ok = flat(200.0);
    ok.noise_sd = 20.0;
    CHECK(generate(ok).truth.clamped == 0);
}

TEST_CASE("poisson mode") {
    auto s = flat(100.0);
    s.poisson = true;
    s.n_days = 2000;
    auto d = generate(s);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.series.size(); ++i) {
        CHECK(d.series[i] == std::round(d.series[i]));
        CHECK(d.truth.noise[i] == d.series[i] - 100.0);
        sum += d.series[i];
    }
    CHECK(std::abs(sum / 2000.0 - 100.0) < 1.0);
}

TEST_CASE("spec json") {
    auto s = builtin_spec("stmarys-like");
    auto back = DgpSpec::from_json(s.to_json());
    CHECK(back.to_json() == s.to_json());
    CHECK(generate(back, 200).series == generate(s, 200).series);
    auto j = s.to_json();
    j["event_effects"]["marathon"] = 5.0;
    CHECK_THROWS_AS(DgpSpec::from_json(j), SpecRejected);
    auto k = s.to_json();
    k["weekly_profile"] = {1, 2, 3};
    CHECK_THROWS_AS(DgpSpec::from_json(k), SpecRejected);
    auto m = s.to_json();
    m["trend_segments"] = {{{"start", 10}, {"slope", 0.1}}, {{"start", 5}, {"slope", 0.1}}};
    CHECK_THROWS_AS(DgpSpec::from_json(m), SpecRejected);
    CHECK(DgpSpec::from_json({{"base_level", 50}}).base_level == 50.0);
    CHECK_THROWS_AS(DgpSpec::from_json({{"noise_sd", -1}}), SpecRejected);
    CHECK_THROWS_AS(DgpSpec::from_json({{"start", "2010-13-01"}}), SpecRejected);
}

TEST_CASE("written dataset runs through ingest unchanged") {
    auto s = builtin_spec("stmarys-like");
    auto d = generate(s, 400);
    const auto dir = std::filesystem::temp_directory_path() / "edcast_synth_test";
    std::filesystem::remove_all(dir);
    write_dataset(d, s, dir, true);
    CHECK(ingest::load_attendance_csv(dir / "attendance.csv") == d.series);
    std::vector<std::filesystem::path> frames;
    for (const auto& e : std::filesystem::directory_iterator(dir / "raw" / "trends")) {
        if (e.path().filename() != "monthly.csv") frames.push_back(e.path());
    }
    std::sort(frames.begin(), frames.end());
    auto trends = ingest::adjust_trends(ingest::load_trends(frames, dir / "raw" / "trends" / "monthly.csv"));
    auto cov = ingest::build_covariate_table(d.series.start(), 400, ingest::Calendar::load(dir / "raw" / "calendar.json"),
                                             ingest::load_weather_csv(dir / "raw" / "weather.csv"), trends);
    CHECK(cov.bank_holiday == d.covariates.bank_holiday);
    CHECK(cov.school_holiday == d.covariates.school_holiday);
    CHECK(cov.events == d.covariates.events);
    CHECK(cov.precip_mm == d.covariates.precip_mm);
    CHECK(cov.temp_max_c == d.covariates.temp_max_c);
    CHECK(cov.flu_searches == d.covariates.flu_searches);
    auto loaded = ingest::load_covariate_csv(dir / "covariates.csv");
    CHECK(loaded.flu_searches == d.covariates.flu_searches);
    auto truth = nlohmann::json::parse(read_file(dir / "truth.json"));
    CHECK(DgpSpec::from_json(truth["spec"]).to_json() == s.to_json());
    CHECK(truth["value"].size() == 400);
    CHECK(truth["components"]["noise"].get<std::vector<double>>() == d.truth.noise);
    std::filesystem::remove_all(dir);
}

}
