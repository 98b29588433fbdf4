#include "edcast/core/date.hpp"
#include "edcast/core/errors.hpp"
#include "edcast/core/metrics.hpp"
#include "edcast/core/optim.hpp"
#include "edcast/core/parallel.hpp"
#include "edcast/core/random.hpp"
#include "edcast/core/series.hpp"
#include "edcast/core/stl.hpp"
#include "edcast/core/text.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace edcast;

TEST_SUITE("core") {

TEST_CASE("mae examples") {
    CHECK(mae(std::vector<double>{10, 12, 14}, std::vector<double>{10, 12, 14}) == 0.0);
    CHECK(mae(std::vector<double>{10, 12}, std::vector<double>{11, 14}) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(mae(std::vector<double>{200}, std::vector<double>{214}) == doctest::Approx(14.0).epsilon(1e-15));
}

TEST_CASE("mae contract violations") {
    CHECK_THROWS_AS(mae(std::vector<double>{1, 2}, std::vector<double>{1}), ContractViolation);
    CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), ContractViolation);
    CHECK_THROWS_AS(mae(std::vector<double>{NAN}, std::vector<double>{1}), ContractViolation);
}

TEST_CASE("mape examples") {
    CHECK(mape(std::vector<double>{100, 200}, std::vector<double>{100, 200}) == 0.0);
    CHECK(mape(std::vector<double>{200}, std::vector<double>{214}) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(mape(std::vector<double>{100, 100}, std::vector<double>{90, 110}) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("mape names the zero actual") {
    try {
        mape(std::vector<double>{5, 0, 3}, std::vector<double>{5, 1, 3});
        FAIL("expected ZeroDenominator");
    } catch (const ZeroDenominator& e) {
        CHECK(e.index() == 1);
    }
}

TEST_CASE("mae is translation equivariant") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z(100, 20);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(30), p(30), a2(30), p2(30);
        const double c = z(rng);
        for (int i = 0; i < 30; ++i) {
            a[i] = z(rng);
            p[i] = z(rng);
            a2[i] = a[i] + c;
            p2[i] = p[i] + c;
        }
        CHECK(std::abs(mae(a, p) - mae(a2, p2)) <= 1e-12);
        CHECK(mae(a, a) == 0.0);
    }
}

TEST_CASE("summarize") {
    auto s = summarize(std::vector<double>{100, 100}, std::vector<double>{90, 110});
    CHECK(s.n == 2);
    CHECK(s.mae == doctest::Approx(10.0));
    CHECK(s.mape == doctest::Approx(10.0));
}

namespace {

void check_reconstruction(const std::vector<double>& y, const Decomposition& d) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        REQUIRE(std::abs(d.trend[i] + d.seasonal[i] + d.remainder[i] - y[i]) <= 1e-9);
    }
}

void check_cycle_sums(const Decomposition& d, std::size_t period) {
    for (std::size_t c = 0; c + period <= d.seasonal.size(); c += period) {
        double s = 0.0;
        for (std::size_t k = 0; k < period; ++k) s += d.seasonal[c + k];
        REQUIRE(std::abs(s) <= 1e-6 * static_cast<double>(period));
    }
}

} // namespace

TEST_CASE("stl recovers a weekly sine") {
    std::vector<double> y(140);
    std::vector<double> s(140);
    for (std::size_t i = 0; i < y.size(); ++i) {
        s[i] = 5.0 * std::sin(2.0 * M_PI * static_cast<double>(i) / 7.0);
        y[i] = 100.0 + s[i];
    }
    auto d = decompose_stl(y, 7);
    check_reconstruction(y, d);
    check_cycle_sums(d, 7);
    for (std::size_t i = 0; i < y.size(); ++i) {
        CHECK(std::abs(d.seasonal[i] - s[i]) <= 0.1);
        CHECK(std::abs(d.trend[i] - 100.0) <= 0.1);
    }
}

TEST_CASE("stl on a constant series") {
    std::vector<double> y(70, 50.0);
    auto d = decompose_stl(y, 7);
    for (std::size_t i = 0; i < y.size(); ++i) {
        CHECK(std::abs(d.seasonal[i]) <= 1e-6);
        CHECK(std::abs(d.trend[i] - 50.0) <= 1e-6);
        CHECK(std::abs(d.remainder[i]) <= 1e-6);
    }
}

TEST_CASE("stl on a linear ramp") {
    std::vector<double> y(141);
    std::iota(y.begin(), y.end(), 0.0);
    auto d = decompose_stl(y, 7);
    check_reconstruction(y, d);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(d.seasonal[i]) <= 0.05);
    for (std::size_t i = 14; i + 14 < y.size(); ++i) CHECK(std::abs(d.trend[i] - y[i]) <= 0.05);
}

TEST_CASE("stl invariants on noisy data") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> z(0, 10);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> y(300);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = 200 + 0.05 * i + 8 * ((i % 7) == 0) + z(rng);
        auto d = decompose_stl(y, 7);
        check_reconstruction(y, d);
        check_cycle_sums(d, 7);
    }
}

TEST_CASE("stl rejects short input") {
    CHECK_THROWS_AS(decompose_stl(std::vector<double>(13, 1.0), 7), InsufficientData);
    CHECK_THROWS_AS(decompose_stl(std::vector<double>(20, 1.0), 1), ContractViolation);
}

TEST_CASE("stl trend span") {
    CHECK(stl_trend_span(7, 7) == 15);  // 10.5 / (1 - 1.5/7) = 13.36, next odd is 15
}

TEST_CASE("daily series") {
    DailySeries s(make_date(2014, 4, 10), {198, 183, 172});
    CHECK(s.end() == make_date(2014, 4, 12));
    CHECK(s.index_of(make_date(2014, 4, 11)) == 1u);
    CHECK_FALSE(s.index_of(make_date(2014, 4, 13)).has_value());
    CHECK(s.slice(1, 2)[0] == 183);
    CHECK(s.with_value(0, 1)[0] == 1);
    CHECK_THROWS_AS(DailySeries(make_date(2014, 1, 1), {}), ContractViolation);
    CHECK_THROWS_AS(DailySeries(make_date(2014, 1, 1), {-1.0}), ContractViolation);
    CHECK_NOTHROW(DailySeries(make_date(2014, 1, 1), {-1.0}, SeriesKind::transformed));
}

TEST_CASE("dates") {
    CHECK(format_date(parse_date("2014-04-10")) == "2014-04-10");
    CHECK(iso_weekday(parse_date("2014-04-10")) == 4);
    CHECK(easter_sunday(2014) == make_date(2014, 4, 20));
    CHECK(easter_sunday(2019) == make_date(2019, 4, 21));
    CHECK(nth_weekday_of_month(2014, 8, 1, -1) == make_date(2014, 8, 25));
    CHECK(nth_weekday_of_month(2014, 5, 1, 1) == make_date(2014, 5, 5));
    CHECK(last_day_of_month(2016, 2) == make_date(2016, 2, 29));
    CHECK(day_of_year(make_date(2015, 12, 31)) == 365);
    CHECK_THROWS_AS(parse_date("2014-02-30"), ContractViolation);
    CHECK(format_year_month(parse_year_month("2014-04")) == "2014-04");
}

TEST_CASE("number formatting round trips") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        double v = u(rng), back = 0.0;
        REQUIRE(parse_double(format_roundtrip(v), back));
        REQUIRE(back == v);
    }
    CHECK(format_fixed(199.571428, 6) == "199.571428");
    CHECK(format_fixed(-0.0000001, 6) == "0.000000");
}

TEST_CASE("csv records") {
    auto f = split_csv_record(R"(a,"b,c","d""e")");
    REQUIRE(f.size() == 3);
    CHECK(f[1] == "b,c");
    CHECK(f[2] == "d\"e");
    CHECK(csv_quote("{\"k\":1}") == "\"{\"\"k\"\":1}\"");
}

TEST_CASE("nelder mead minimizes a bounded quadratic") {
    auto f = [](const std::vector<double>& x) { return (x[0] - 0.3) * (x[0] - 0.3) + (x[1] + 2) * (x[1] + 2); };
    Bounds b{{0.0, 0.0}, {1.0, 1.0}};
    auto r = nelder_mead(f, {0.5, 0.5}, {}, &b);
    CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-3));
    CHECK(r.x[1] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("derived seeds are stable and distinct") {
    CHECK(derive_seed(7, {1, 2}) == derive_seed(7, {1, 2}));
    CHECK(derive_seed(7, {1, 2}) != derive_seed(7, {2, 1}));
    CHECK(derive_seed(7, {1}) != derive_seed(8, {1}));
}

TEST_CASE("parallel_for visits every index once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 5) throw Error("boom");
                    }),
                    Error);
}

}
