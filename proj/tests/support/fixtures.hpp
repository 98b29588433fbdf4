#pragma once

#include "edcast/core/date.hpp"
#include "edcast/core/series.hpp"
#include "edcast/features/matrix.hpp"
#include "edcast/ingest/covariates.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fixtures {

inline edcast::DailySeries weekly_series(edcast::Date start, std::size_t n, std::uint64_t seed,
                                         double level = 200.0, double sd = 10.0) {
    static constexpr double week[7] = {15, 6, 2, 0, -1, -10, -12};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sd);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = edcast::add_days(start, static_cast<long>(i));
        v[i] = std::max(0.0, level + week[edcast::iso_weekday(d) - 1] + noise(rng));
    }
    return edcast::DailySeries(start, std::move(v));
}

inline edcast::ingest::CovariateTable covariates(edcast::Date start, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    edcast::ingest::CovariateTable t;
    t.start = start;
    t.event_names = {"carnival"};
    t.events.assign(1, std::vector<std::uint8_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        const double doy = edcast::day_of_year(edcast::add_days(start, static_cast<long>(i)));
        t.bank_holiday.push_back(u(rng) < 0.03 ? 1 : 0);
        t.school_holiday.push_back(u(rng) < 0.2 ? 1 : 0);
        t.precip_mm.push_back(u(rng) < 0.6 ? 0.0 : 10.0 * u(rng));
        const double tmax = 15.0 - 8.0 * std::cos(2.0 * M_PI * doy / 365.25) + 3.0 * u(rng);
        t.temp_max_c.push_back(tmax);
        t.temp_min_c.push_back(tmax - 4.0 - 4.0 * u(rng));
        t.flu_searches.push_back(20.0 + 15.0 * std::cos(2.0 * M_PI * doy / 365.25) + 5.0 * u(rng));
        t.events[0][i] = u(rng) < 0.01 ? 1 : 0;
    }
    return t;
}

/// Random matrix with the given feature kinds; categorical features get 4 levels.
inline edcast::features::ModelMatrix random_matrix(std::size_t rows, const std::vector<edcast::features::FeatureKind>& kinds,
                                                   std::uint64_t seed, double noise = 1.0) {
    using edcast::features::FeatureKind;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    auto schema = std::make_shared<edcast::features::Schema>();
    std::vector<std::vector<double>> cols(kinds.size(), std::vector<double>(rows));
    for (std::size_t j = 0; j < kinds.size(); ++j) {
        schema->features.push_back({"x" + std::to_string(j + 1), kinds[j], kinds[j] == FeatureKind::categorical ? 4 : 0});
        for (std::size_t i = 0; i < rows; ++i) {
            switch (kinds[j]) {
            case FeatureKind::numeric: cols[j][i] = z(rng); break;
            case FeatureKind::flag: cols[j][i] = z(rng) > 0.5 ? 1.0 : 0.0; break;
            case FeatureKind::categorical: cols[j][i] = static_cast<double>(1 + rng() % 4); break;
            }
        }
    }
    std::vector<double> y(rows);
    std::vector<edcast::Date> dates(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < kinds.size(); ++j) s += (j % 2 ? -1.0 : 1.0) * (1.0 + 0.5 * j) * cols[j][i];
        y[i] = 10.0 + s + noise * z(rng);
        dates[i] = edcast::add_days(edcast::make_date(2020, 1, 1), static_cast<long>(i));
    }
    return edcast::features::ModelMatrix(1, schema, std::move(dates), std::move(y), std::move(cols));
}

} // namespace fixtures
