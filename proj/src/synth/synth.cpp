#include "edcast/synth/synth.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/random.hpp"
#include "edcast/core/text.hpp"
#include "edcast/ingest/attendance.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace edcast::synth {

namespace {

constexpr double kTwoPi = 6.283185307179586;

void require(bool ok, const std::string& what) {
    if (!ok) throw SpecRejected(what);
}

} // namespace

void DgpSpec::validate() const {
    require(n_days >= 1, "n_days must be positive");
    require(std::isfinite(base_level), "base_level must be finite");
    require(noise_sd >= 0.0, "noise_sd must be non-negative");
    for (std::size_t i = 0; i < trend_segments.size(); ++i) {
        require(std::isfinite(trend_segments[i].slope), "trend slopes must be finite");
        require(i == 0 || trend_segments[i].start > trend_segments[i - 1].start,
                "trend segments must start on increasing days");
    }
    for (double w : weekly_profile) require(std::isfinite(w), "weekly offsets must be finite");
    const auto& names = calendar.event_names();
    for (const auto& [name, effect] : event_effects) {
        require(std::find(names.begin(), names.end(), name) != names.end(),
                "event effect for '" + name + "' has no calendar entry");
        require(std::isfinite(effect), "event effects must be finite");
    }
    require(flu.base >= 0.0 && flu.amplitude >= 0.0 && flu.noise_sd >= 0.0, "flu volume parameters must be non-negative");
    require(flu.peak_doy >= 1 && flu.peak_doy <= 366, "flu peak_doy must lie in 1..366");
    require(weather.temp_noise_sd >= 0.0 && weather.diurnal >= 0.0 && weather.rain_mean_mm >= 0.0,
            "weather spreads must be non-negative");
    require(weather.rain_probability >= 0.0 && weather.rain_probability <= 1.0, "rain_probability must lie in [0,1]");
}

nlohmann::json DgpSpec::to_json() const {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : trend_segments) segs.push_back({{"start", s.start}, {"slope", s.slope}});
    return {{"schema_version", 1},
            {"name", name},
            {"start", format_date(start)},
            {"n_days", n_days},
            {"base_level", base_level},
            {"trend_segments", segs},
            {"weekly_profile", weekly_profile},
            {"yearly_amplitude", yearly_amplitude},
            {"holiday_effects", {{"bank_holiday", bank_holiday_effect}, {"school_holiday", school_holiday_effect}}},
            {"event_effects", event_effects},
            {"noise_sd", noise_sd},
            {"poisson", poisson},
            {"seed", seed},
            {"flu",
             {{"base", flu.base},
              {"amplitude", flu.amplitude},
              {"peak_doy", flu.peak_doy},
              {"noise_sd", flu.noise_sd},
              {"effect", flu.effect}}},
            {"weather",
             {{"temp_mean", weather.temp_mean},
              {"temp_amplitude", weather.temp_amplitude},
              {"temp_noise_sd", weather.temp_noise_sd},
              {"diurnal", weather.diurnal},
              {"rain_probability", weather.rain_probability},
              {"rain_mean_mm", weather.rain_mean_mm},
              {"rain_effect", weather.rain_effect}}},
            {"calendar", calendar.to_json()}};
}

DgpSpec DgpSpec::from_json(const nlohmann::json& j) {
    DgpSpec s;
    try {
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1) {
            throw SpecRejected("unsupported spec schema_version");
        }
        s.name = j.value("name", s.name);
        if (j.contains("start")) s.start = parse_date(j.at("start").get<std::string>());
        s.n_days = j.value("n_days", s.n_days);
        s.base_level = j.value("base_level", s.base_level);
        if (j.contains("trend_segments")) {
            for (const auto& seg : j.at("trend_segments")) {
                s.trend_segments.push_back({seg.at("start").get<std::size_t>(), seg.at("slope").get<double>()});
            }
        }
        if (j.contains("weekly_profile")) {
            const auto w = j.at("weekly_profile").get<std::vector<double>>();
            if (w.size() != 7) throw SpecRejected("weekly_profile needs 7 offsets");
            std::copy(w.begin(), w.end(), s.weekly_profile.begin());
        }
        s.yearly_amplitude = j.value("yearly_amplitude", s.yearly_amplitude);
        if (j.contains("holiday_effects")) {
            const auto& h = j.at("holiday_effects");
            s.bank_holiday_effect = h.value("bank_holiday", 0.0);
            s.school_holiday_effect = h.value("school_holiday", 0.0);
        }
        if (j.contains("event_effects")) s.event_effects = j.at("event_effects").get<std::map<std::string, double>>();
        s.noise_sd = j.value("noise_sd", s.noise_sd);
        s.poisson = j.value("poisson", s.poisson);
        s.seed = j.value("seed", s.seed);
        if (j.contains("flu")) {
            const auto& f = j.at("flu");
            s.flu.base = f.value("base", s.flu.base);
            s.flu.amplitude = f.value("amplitude", s.flu.amplitude);
            s.flu.peak_doy = f.value("peak_doy", s.flu.peak_doy);
            s.flu.noise_sd = f.value("noise_sd", s.flu.noise_sd);
            s.flu.effect = f.value("effect", s.flu.effect);
        }
        if (j.contains("weather")) {
            const auto& w = j.at("weather");
            s.weather.temp_mean = w.value("temp_mean", s.weather.temp_mean);
            s.weather.temp_amplitude = w.value("temp_amplitude", s.weather.temp_amplitude);
            s.weather.temp_noise_sd = w.value("temp_noise_sd", s.weather.temp_noise_sd);
            s.weather.diurnal = w.value("diurnal", s.weather.diurnal);
            s.weather.rain_probability = w.value("rain_probability", s.weather.rain_probability);
            s.weather.rain_mean_mm = w.value("rain_mean_mm", s.weather.rain_mean_mm);
            s.weather.rain_effect = w.value("rain_effect", s.weather.rain_effect);
        }
        if (j.contains("calendar")) s.calendar = ingest::Calendar::from_json(j.at("calendar"));
    } catch (const nlohmann::json::exception& e) {
        throw SpecRejected(std::string("malformed spec: ") + e.what());
    } catch (const ContractViolation& e) {
        throw SpecRejected(std::string("malformed spec: ") + e.what());
    }
    s.validate();
    return s;
}

namespace {

double trend_at(const std::vector<TrendSegment>& segs, std::size_t t) {
    double v = 0.0;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const std::size_t end = k + 1 < segs.size() ? segs[k + 1].start : t;
        const std::size_t upto = std::min(t, end);
        if (upto > segs[k].start) v += segs[k].slope * static_cast<double>(upto - segs[k].start);
    }
    return v;
}

// Quarter-aligned frames, each rescaled so its peak reads 100, and the
// monthly means of the underlying volume.
ingest::TrendsFrames trend_frames(Date start, const std::vector<double>& volume) {
    ingest::TrendsFrames out;
    std::size_t i = 0;
    while (i < volume.size()) {
        std::size_t j = i;
        int months = 0;
        YearMonth current = year_month_of(add_days(start, static_cast<long>(i)));
        while (j < volume.size()) {
            const YearMonth ym = year_month_of(add_days(start, static_cast<long>(j)));
            if (!(ym == current)) {
                current = ym;
                if (++months == 3) break;
            }
            ++j;
        }
        const double peak = *std::max_element(volume.begin() + static_cast<long>(i), volume.begin() + static_cast<long>(j));
        ingest::DailyFrame f{add_days(start, static_cast<long>(i)), {}};
        for (std::size_t k = i; k < j; ++k) f.values.push_back(peak > 0.0 ? volume[k] * 100.0 / peak : 0.0);
        out.daily_frames.push_back(std::move(f));
        i = j;
    }
    std::map<YearMonth, std::pair<double, int>> sums;
    for (std::size_t k = 0; k < volume.size(); ++k) {
        auto& s = sums[year_month_of(add_days(start, static_cast<long>(k)))];
        s.first += volume[k];
        ++s.second;
    }
    for (const auto& [ym, s] : sums) out.monthly[ym] = s.first / s.second;
    return out;
}

} // namespace

SynthData generate(const DgpSpec& spec, std::optional<std::size_t> n_days) {
    spec.validate();
    const std::size_t n = n_days.value_or(spec.n_days);
    if (n < 1) throw SpecRejected("n_days must be positive");

    std::mt19937_64 noise_rng(derive_seed(spec.seed, {1}));
    std::mt19937_64 weather_rng(derive_seed(spec.seed, {2}));
    std::mt19937_64 flu_rng(derive_seed(spec.seed, {3}));
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    ingest::WeatherRecords weather;
    std::vector<double> volume(n);
    const auto& ws = spec.weather;
    for (std::size_t i = 0; i < n; ++i) {
        const Date d = add_days(spec.start, static_cast<long>(i));
        const double doy = day_of_year(d);
        const double tmax = ws.temp_mean - ws.temp_amplitude * std::cos(kTwoPi * (doy - 15.0) / 365.25) +
                            ws.temp_noise_sd * z(weather_rng);
        const double tmin = tmax - ws.diurnal - std::abs(1.5 * z(weather_rng));
        const bool rain = u(weather_rng) < ws.rain_probability;
        const double amount = -ws.rain_mean_mm * std::log(1.0 - u(weather_rng));
        weather.dates.push_back(d);
        weather.temp_max_c.push_back(tmax);
        weather.temp_min_c.push_back(tmin);
        weather.precip_mm.push_back(rain ? amount : 0.0);

        const double season = std::pow((1.0 + std::cos(kTwoPi * (doy - spec.flu.peak_doy) / 365.25)) / 2.0, 4.0);
        volume[i] = std::max(0.0, spec.flu.base + spec.flu.amplitude * season + spec.flu.noise_sd * z(flu_rng));
    }
    auto frames = trend_frames(spec.start, volume);
    auto cov = ingest::build_covariate_table(spec.start, n, spec.calendar, weather, ingest::adjust_trends(frames));

    std::vector<double> event_effect(cov.event_names.size(), 0.0);
    for (std::size_t e = 0; e < cov.event_names.size(); ++e) {
        auto it = spec.event_effects.find(cov.event_names[e]);
        if (it != spec.event_effects.end()) event_effect[e] = it->second;
    }

    GroundTruth g;
    for (auto* v : {&g.base, &g.trend, &g.weekly, &g.yearly, &g.holiday, &g.event, &g.flu, &g.weather, &g.noise,
                    &g.pre_clamp}) {
        v->resize(n);
    }
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Date d = cov.date_at(i);
        g.base[i] = spec.base_level;
        g.trend[i] = trend_at(spec.trend_segments, i);
        g.weekly[i] = spec.weekly_profile[static_cast<std::size_t>(iso_weekday(d) - 1)];
        g.yearly[i] = spec.yearly_amplitude * std::sin(kTwoPi * day_of_year(d) / 365.25);
        g.holiday[i] = (cov.bank_holiday[i] ? spec.bank_holiday_effect : 0.0) +
                       (cov.school_holiday[i] ? spec.school_holiday_effect : 0.0);
        double ev = 0.0;
        for (std::size_t e = 0; e < event_effect.size(); ++e) {
            if (cov.events[e][i]) ev += event_effect[e];
        }
        g.event[i] = ev;
        g.flu[i] = spec.flu.effect * volume[i];
        g.weather[i] = ws.rain_effect * cov.precip_mm[i];
        const double mean = g.base[i] + g.trend[i] + g.weekly[i] + g.yearly[i] + g.holiday[i] + g.event[i] + g.flu[i] +
                            g.weather[i];
        if (spec.poisson) {
            const double rate = std::max(0.0, mean);
            const double draw = rate > 0.0 ? static_cast<double>(std::poisson_distribution<long>(rate)(noise_rng)) : 0.0;
            g.noise[i] = draw - mean;
            g.pre_clamp[i] = draw;
            if (mean < 0.0) ++g.clamped;
        } else {
            g.noise[i] = spec.noise_sd * z(noise_rng);
            g.pre_clamp[i] = mean + g.noise[i];
            if (g.pre_clamp[i] < 0.0) ++g.clamped;
        }
        values[i] = std::max(0.0, g.pre_clamp[i]);
    }
    g.clamp_rate = static_cast<double>(g.clamped) / static_cast<double>(n);
    if (g.clamp_rate >= 0.001) {
        throw SpecRejected("spec '" + spec.name + "' clamps " + std::to_string(g.clamped) + " of " + std::to_string(n) +
                           " days at zero (limit 0.1%)");
    }
    return {DailySeries(spec.start, std::move(values)), std::move(cov), std::move(g), std::move(weather),
            std::move(frames), spec.calendar};
}

DgpSpec builtin_spec(const std::string& name) {
    DgpSpec s;
    s.name = name;
    s.start = make_date(2010, 1, 1);
    s.n_days = 2920;
    s.seed = 208;
    s.flu = {10.0, 40.0, 20, 2.0, 0.1};
    s.weather.rain_effect = -0.3;
    s.event_effects = {{"notting_hill_carnival", 20.0}, {"christmas", -25.0}};
    if (name == "stmarys-like") {
        s.base_level = 207.1;
        s.trend_segments = {{0, -0.005}, {1300, 0.009}};
        s.weekly_profile = {15, 6, 2, 0, -1, -10, -12};
        s.yearly_amplitude = 5.0;
        s.bank_holiday_effect = -10.0;
        s.school_holiday_effect = 2.0;
        s.noise_sd = 14.0;
    } else if (name == "charingcross-like") {
        s.base_level = 98.4;
        s.trend_segments = {{0, 0.004}};
        s.weekly_profile = {8, 3, 1, 0, -1, -5, -6};
        s.yearly_amplitude = 3.0;
        s.bank_holiday_effect = -5.0;
        s.school_holiday_effect = 1.0;
        s.event_effects = {{"notting_hill_carnival", 6.0}, {"christmas", -12.0}};
        s.noise_sd = 9.0;
        s.seed = 106;
    } else {
        throw SpecRejected("unknown built-in spec '" + name + "'");
    }
    s.validate();
    return s;
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"stmarys-like", "charingcross-like"};
    return names;
}

nlohmann::json truth_json(const SynthData& data, const DgpSpec& spec) {
    const auto& g = data.truth;
    nlohmann::json j;
    j["schema_version"] = 1;
    j["start"] = format_date(data.series.start());
    j["n_days"] = data.series.size();
    j["spec"] = spec.to_json();
    j["clamped"] = g.clamped;
    j["clamp_rate"] = g.clamp_rate;
    j["components"] = {{"base", g.base},       {"trend", g.trend},     {"weekly", g.weekly},
                       {"yearly", g.yearly},   {"holiday", g.holiday}, {"event", g.event},
                       {"flu", g.flu},         {"weather", g.weather}, {"noise", g.noise},
                       {"pre_clamp", g.pre_clamp}};
    j["value"] = std::vector<double>(data.series.values().begin(), data.series.values().end());
    return j;
}

void write_dataset(const SynthData& data, const DgpSpec& spec, const std::filesystem::path& dir, bool raw) {
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    files.emplace_back("attendance.csv", ingest::attendance_csv(data.series));
    files.emplace_back("covariates.csv", ingest::covariate_csv(data.covariates));
    files.emplace_back("truth.json", truth_json(data, spec).dump() + "\n");
    if (raw) {
        const std::filesystem::path r = "raw";
        files.emplace_back(r / "weather.csv", ingest::weather_csv(data.weather));
        for (std::size_t k = 0; k < data.trends.daily_frames.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "daily_%03zu.csv", k);
            files.emplace_back(r / "trends" / name, ingest::daily_frame_csv(data.trends.daily_frames[k]));
        }
        files.emplace_back(r / "trends" / "monthly.csv", ingest::monthly_csv(data.trends.monthly));
        files.emplace_back(r / "calendar.json", data.calendar.to_json().dump(2) + "\n");
    }
    for (const auto& [rel, content] : files) {
        std::filesystem::create_directories((dir / rel).parent_path());
        write_file_atomic(dir / rel, content);
    }
}

} // namespace edcast::synth
