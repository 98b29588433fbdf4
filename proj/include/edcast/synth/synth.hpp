#pragma once

#include "edcast/core/series.hpp"
#include "edcast/ingest/calendar.hpp"
#include "edcast/ingest/covariates.hpp"
#include "edcast/ingest/trends.hpp"
#include "edcast/ingest/weather.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace edcast::synth {

/// Slope applies from day `start` until the next segment begins.
struct TrendSegment {
    std::size_t start = 0;
    double slope = 0.0;  // attendances per day
};

/// Winter-peaked search volume: base + amplitude * ((1 + cos(2 pi (doy - peak) / 365.25)) / 2)^4
/// plus noise, floored at 0. Demand moves by `effect` per unit of volume.
struct FluSpec {
    double base = 10.0;
    double amplitude = 40.0;
    int peak_doy = 20;
    double noise_sd = 2.0;
    double effect = 0.0;
};

/// Daily maximum temperature mean - amplitude * cos(2 pi (doy - 15) / 365.25)
/// plus noise; the minimum sits `diurnal` plus a half-normal below it. Rain
/// falls with `rain_probability` as an exponential amount; demand moves by
/// `rain_effect` per mm.
struct WeatherSpec {
    double temp_mean = 15.0;
    double temp_amplitude = 7.0;
    double temp_noise_sd = 2.5;
    double diurnal = 7.0;
    double rain_probability = 0.45;
    double rain_mean_mm = 4.0;
    double rain_effect = 0.0;
};

struct DgpSpec {
    std::string name = "custom";
    Date start = make_date(2010, 1, 1);
    std::size_t n_days = 2920;
    double base_level = 208.0;
    std::vector<TrendSegment> trend_segments;
    std::array<double, 7> weekly_profile{};  // Monday first
    double yearly_amplitude = 0.0;
    double bank_holiday_effect = 0.0;
    double school_holiday_effect = 0.0;
    std::map<std::string, double> event_effects;  // keyed by calendar event name
    double noise_sd = 0.0;
    bool poisson = false;
    std::uint64_t seed = 1;
    FluSpec flu;
    WeatherSpec weather;
    ingest::Calendar calendar = ingest::london_calendar();

    /// Throws SpecRejected for negative spreads, unsorted trend segments or
    /// effects naming unknown events.
    void validate() const;
    nlohmann::json to_json() const;
    /// Missing keys keep their defaults; `calendar` may be omitted for the
    /// bundled London calendar.
    static DgpSpec from_json(const nlohmann::json& j);
};

/// Additive components per day. Their running sum in the order listed is
/// `pre_clamp`; in Poisson mode `noise` is the draw minus the mean.
struct GroundTruth {
    std::vector<double> base, trend, weekly, yearly, holiday, event, flu, weather, noise;
    std::vector<double> pre_clamp;
    std::size_t clamped = 0;
    double clamp_rate = 0.0;
};

struct SynthData {
    DailySeries series;
    ingest::CovariateTable covariates;
    GroundTruth truth;
    ingest::WeatherRecords weather;
    ingest::TrendsFrames trends;  // quarterly frames, each scaled to peak 100, plus monthly means
    ingest::Calendar calendar;
};

/// Generates `n_days` (default spec.n_days). Covariates come from the raw
/// weather and search frames through the ingest path, so holiday flags are
/// exactly the days their effects were applied. Throws SpecRejected when
/// more than 0.1% of days had to be clamped at zero.
SynthData generate(const DgpSpec& spec, std::optional<std::size_t> n_days = std::nullopt);

/// "stmarys-like" or "charingcross-like".
DgpSpec builtin_spec(const std::string& name);
const std::vector<std::string>& builtin_names();

/// Spec, clamp statistics and every component as arrays.
nlohmann::json truth_json(const SynthData& data, const DgpSpec& spec);

/// attendance.csv, covariates.csv and truth.json. With `raw`, also the
/// ingest inputs under raw/: weather.csv, trends/daily_NNN.csv,
/// trends/monthly.csv and calendar.json.
void write_dataset(const SynthData& data, const DgpSpec& spec, const std::filesystem::path& dir,
                   bool raw = false);

} // namespace edcast::synth
