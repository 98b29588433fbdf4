#include "edcast/core/errors.hpp"
#include "edcast/features/matrix.hpp"
#include "edcast/ingest/calendar.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <random>

using namespace edcast;
using namespace edcast::features;

namespace {

std::size_t col(const ModelMatrix& m, const std::string& name) { return *m.schema().index_of(name); }

// Demand for 2014-03-27 .. 2014-04-13. The last eleven values reproduce the
// published excerpt (targets 2014-04-10 .. 2014-04-13, h = 1).
struct TableOne {
    DailySeries series;
    ingest::CovariateTable cov;
};

TableOne table_one() {
    const Date start = make_date(2014, 3, 27);
    std::vector<double> v = {205, 210, 190, 185, 215, 220, 200, 223, 189, 187, 195, 190, 195, 218, 198, 183, 172, 185};
    DailySeries s(start, v);
    auto cov = fixtures::covariates(start, v.size(), 1);
    auto days = ingest::london_calendar().resolve(start, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        cov.bank_holiday[i] = days[i].bank_holiday;
        cov.school_holiday[i] = days[i].school_holiday;
        cov.precip_mm[i] = 0.0;
    }
    const auto at = [&](int day) { return static_cast<std::size_t>(days_between(start, make_date(2014, 4, day))); };
    const double tmax[] = {17.5, 17.2, 15.0, 17.4};
    const double tmin[] = {12.0, 11.8, 10.8, 11.3};
    const double flu[] = {7.52, 4.88, 5.12, 4.08};
    for (int k = 0; k < 4; ++k) {
        cov.temp_max_c[at(9 + k)] = tmax[k];
        cov.temp_min_c[at(9 + k)] = tmin[k];
        cov.flu_searches[at(9 + k)] = flu[k];
    }
    return {s, cov};
}

} // namespace

TEST_SUITE("features") {

TEST_CASE("schema layout") {
    auto t = table_one();
    auto m = build_matrix(t.series, t.cov, 1);
    std::vector<std::string> names;
    for (const auto& f : m.schema().features) names.push_back(f.name);
    std::vector<std::string> expected = {"month",         "day_of_week",    "lag_origin",  "lag_same_weekday",
                                         "rollmean_prev_week", "time_index", "bank_holiday", "school_holiday",
                                         "precip_prev",   "tmax_prev",      "tmin_prev",   "flu_prev",
                                         "event:carnival"};
    CHECK(names == expected);
    CHECK(m.schema().features[0].kind == FeatureKind::categorical);
    CHECK(m.schema().features[0].levels == 12);
    CHECK(m.schema().features[1].levels == 7);
}

TEST_CASE("published excerpt") {
    auto t = table_one();
    auto m = build_matrix(t.series, t.cov, 1);
    auto r = *m.row_of(make_date(2014, 4, 10));
    CHECK(m.target()[r] == 198);
    CHECK(m.value(r, col(m, "lag_origin")) == 218);
    CHECK(m.value(r, col(m, "lag_same_weekday")) == 223);
    // The excerpt prints 199.6; the seven values average 1397/7.
    CHECK(m.value(r, col(m, "rollmean_prev_week")) == doctest::Approx(199.6).epsilon(0.05 / 199.6));
    CHECK(m.value(r, col(m, "rollmean_prev_week")) == doctest::Approx(1397.0 / 7.0).epsilon(1e-14));
    CHECK(m.value(r, col(m, "day_of_week")) == 4);
    CHECK(m.value(r, col(m, "month")) == 4);
    CHECK(m.value(r, col(m, "flu_prev")) == 7.52);
    CHECK(m.value(r, col(m, "tmax_prev")) == 17.5);
    CHECK(m.value(r, col(m, "tmin_prev")) == 12.0);
    CHECK(m.value(r, col(m, "precip_prev")) == 0.0);

    const double yesterday[] = {218, 198, 183, 172};
    const double last_week[] = {223, 189, 187, 195};
    const double mean_week[] = {199.6, 196, 195.1, 193};
    const double school[] = {0, 0, 1, 1};
    const double flu[] = {7.52, 4.88, 5.12, 4.08};
    for (int k = 0; k < 4; ++k) {
        auto row = *m.row_of(make_date(2014, 4, 10 + k));
        CHECK(m.value(row, col(m, "lag_origin")) == yesterday[k]);
        CHECK(m.value(row, col(m, "lag_same_weekday")) == last_week[k]);
        CHECK(std::abs(m.value(row, col(m, "rollmean_prev_week")) - mean_week[k]) <= 0.05);
        CHECK(m.value(row, col(m, "school_holiday")) == school[k]);
        CHECK(m.value(row, col(m, "bank_holiday")) == 0);
        CHECK(m.value(row, col(m, "flu_prev")) == flu[k]);
        CHECK(m.value(row, col(m, "event:carnival")) == t.cov.events[0][static_cast<std::size_t>(
                                                             days_between(t.series.start(), make_date(2014, 4, 10 + k)))]);
    }
}

TEST_CASE("constant series") {
    const Date start = make_date(2015, 1, 1);
    DailySeries s(start, std::vector<double>(60, 150.0));
    auto cov = fixtures::covariates(start, 60, 2);
    for (int h : {1, 3, 7}) {
        auto m = build_matrix(s, cov, h);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            CHECK(m.value(r, col(m, "lag_origin")) == 150.0);
            CHECK(m.value(r, col(m, "lag_same_weekday")) == 150.0);
            CHECK(m.value(r, col(m, "rollmean_prev_week")) == doctest::Approx(150.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("re-indexing oracle over horizons") {
    const Date start = make_date(2015, 3, 1);
    const std::size_t n = 90;
    auto s = fixtures::weekly_series(start, n, 7);
    auto cov = fixtures::covariates(start, n, 8);
    for (int h : {1, 2, 3, 7, 8, 14}) {
        auto m = build_matrix(s, cov, h);
        const std::size_t lag_sw = h <= 7 ? 7 : 14;
        const std::size_t max_back = std::max<std::size_t>(static_cast<std::size_t>(h) + 6, lag_sw);
        REQUIRE(m.rows() == n - max_back);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const auto t = static_cast<std::size_t>(days_between(start, m.dates()[r]));
            const std::size_t o = t - static_cast<std::size_t>(h);
            double sum = 0.0;
            for (std::size_t k = o - 6; k <= o; ++k) sum += s[k];
            CHECK(m.target()[r] == s[t]);
            CHECK(m.value(r, col(m, "lag_origin")) == s[o]);
            CHECK(m.value(r, col(m, "lag_same_weekday")) == s[t - lag_sw]);
            CHECK(std::abs(m.value(r, col(m, "rollmean_prev_week")) - sum / 7.0) <= 1e-12);
            CHECK(m.value(r, col(m, "precip_prev")) == cov.precip_mm[o]);
            CHECK(m.value(r, col(m, "tmin_prev")) == cov.temp_min_c[o]);
            CHECK(m.value(r, col(m, "flu_prev")) == cov.flu_searches[o]);
            CHECK(m.value(r, col(m, "bank_holiday")) == cov.bank_holiday[t]);
            CHECK(m.value(r, col(m, "day_of_week")) == iso_weekday(m.dates()[r]));
        }
    }
}

TEST_CASE("h = 7 uses the value seven days back") {
    const Date start = make_date(2015, 3, 1);
    auto s = fixtures::weekly_series(start, 40, 3);
    auto cov = fixtures::covariates(start, 40, 4);
    auto m = build_matrix(s, cov, 7);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto t = static_cast<std::size_t>(days_between(start, m.dates()[r]));
        CHECK(m.value(r, col(m, "lag_origin")) == s[t - 7]);
    }
}

TEST_CASE("mutation: later values never reach earlier rows") {
    const Date start = make_date(2016, 1, 1);
    const std::size_t n = 60;
    auto s = fixtures::weekly_series(start, n, 17);
    auto cov = fixtures::covariates(start, n, 18);
    std::mt19937_64 rng(19);
    for (int h : {1, 3, 7}) {
        auto base = build_matrix(s, cov, h);
        for (int rep = 0; rep < 25; ++rep) {
            const std::size_t d = rng() % n;
            auto mutated = build_matrix(s.with_value(d, s[d] + 1000.0), cov, h);
            for (std::size_t r = 0; r < base.rows(); ++r) {
                const auto t = static_cast<std::size_t>(days_between(start, base.dates()[r]));
                if (t > d + static_cast<std::size_t>(h) - 1) continue;
                if (t == d) continue;  // the target itself is the label, not a feature
                for (std::size_t c = 0; c < base.cols(); ++c) REQUIRE(base.value(r, c) == mutated.value(r, c));
            }
        }
    }
}

TEST_CASE("time index is affine and increasing") {
    const Date start = make_date(2016, 1, 1);
    auto s = fixtures::weekly_series(start, 101, 5);
    auto m = build_matrix(s, fixtures::covariates(start, 101, 6), 1);
    const auto c = col(m, "time_index");
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double t = static_cast<double>(days_between(start, m.dates()[r]));
        CHECK(m.value(r, c) == doctest::Approx((t - 50.0) / 100.0).epsilon(1e-14));
        if (r > 0) CHECK(m.value(r, c) > m.value(r - 1, c));
    }
}

TEST_CASE("contract errors") {
    const Date start = make_date(2016, 1, 1);
    auto s = fixtures::weekly_series(start, 30, 5);
    CHECK_THROWS_AS(build_matrix(s.slice(0, 14), fixtures::covariates(start, 14, 1), 1), InsufficientData);
    CHECK_THROWS_AS(build_matrix(s, fixtures::covariates(start, 29, 1), 1), ContractViolation);
    CHECK_THROWS_AS(build_matrix(s, fixtures::covariates(add_days(start, 1), 30, 1), 1), ContractViolation);
}

TEST_CASE("ts feature view is the identity") {
    DailySeries one(make_date(2016, 1, 1), {5.0});
    CHECK(ts_feature_view(one) == one);
    DailySeries tr(make_date(2016, 1, 1), {-5.0, 2.0}, SeriesKind::transformed);
    CHECK(ts_feature_view(tr) == tr);
    CHECK(ts_feature_view(tr).kind() == SeriesKind::transformed);
}

TEST_CASE("matrix csv") {
    auto t = table_one();
    auto m = build_matrix(t.series, t.cov, 1);
    auto csv = matrix_csv(m);
    auto header = csv.substr(0, csv.find('\n'));
    CHECK(header.rfind("date,target,month,day_of_week,lag_origin,", 0) == 0);
    CHECK(csv.find("2014-04-10,198.000000,4,4,218.000000,223.000000,199.571429,") != std::string::npos);
}

TEST_CASE("row selection and schema helpers") {
    auto t = table_one();
    auto m = build_matrix(t.series, t.cov, 1);
    auto s = m.slice(1, 3);
    CHECK(s.rows() == 3);
    CHECK(s.dates()[0] == m.dates()[1]);
    auto w = m.with_column({"decoy", FeatureKind::numeric, 0}, std::vector<double>(m.rows(), 1.0));
    CHECK(w.cols() == m.cols() + 1);
    CHECK(schema_difference(m.schema(), w.schema()) == "extra: decoy");
    CHECK(schema_from_json(schema_to_json(m.schema())) == m.schema());
    auto row = m.row(0);
    CHECK(row.values.size() == m.cols());
}

}
